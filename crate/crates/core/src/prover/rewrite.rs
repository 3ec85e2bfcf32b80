//! Universal rewrite rules over untyped term patterns.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ProveError;
use crate::logic::{Formula, LogicError, Signature, Sort, Term};

/// Default cap on rewrite steps per formula.
pub const DEFAULT_STEP_CAP: usize = 10_000;

/// A term shape without sort annotations. Function applications match any
/// overload of the named symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pattern {
    Var(String),
    Const(String),
    Zero,
    Neg(Box<Pattern>),
    Add(Box<Pattern>, Box<Pattern>),
    Mul(Box<Pattern>, Box<Pattern>),
    App(String, Vec<Pattern>),
}

impl Pattern {
    pub fn vars(&self, out: &mut Vec<String>) {
        match self {
            Pattern::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Pattern::Const(_) | Pattern::Zero => {}
            Pattern::Neg(p) => p.vars(out),
            Pattern::Add(a, b) | Pattern::Mul(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            Pattern::App(_, args) => args.iter().for_each(|a| a.vars(out)),
        }
    }

    fn matches(&self, t: &Term, b: &mut BTreeMap<String, Term>) -> bool {
        match (self, t) {
            (Pattern::Var(v), _) => match b.get(v) {
                Some(bound) => bound == t,
                None => {
                    b.insert(v.clone(), t.clone());
                    true
                }
            },
            (Pattern::Const(n), Term::Const(c)) => *n == c.name,
            (Pattern::Zero, Term::Zero(_)) => true,
            (Pattern::Neg(p), Term::Neg(s)) => p.matches(s, b),
            (Pattern::Add(p, q), Term::Add(s, u)) | (Pattern::Mul(p, q), Term::Mul(s, u)) => {
                p.matches(s, b) && q.matches(u, b)
            }
            (Pattern::App(n, ps), Term::App(f, args)) => {
                *n == f.name && ps.len() == args.len() && ps.iter().zip(args).all(|(p, a)| p.matches(a, b))
            }
            _ => false,
        }
    }

    /// Builds the instance of the pattern under `b`; `expected` resolves the
    /// sorts of zeros and ambiguous overloads.
    fn build(&self, sig: &Signature, b: &BTreeMap<String, Term>, expected: Option<&Sort>) -> Result<Term, LogicError> {
        match self {
            Pattern::Var(v) => b.get(v).cloned().ok_or_else(|| LogicError::UnknownSymbol(v.clone())),
            Pattern::Const(n) => sig
                .constant(n)
                .map(|c| c.term())
                .ok_or_else(|| LogicError::UnknownSymbol(n.clone())),
            Pattern::Zero => expected
                .map(|s| Term::zero(s.clone()))
                .ok_or_else(|| LogicError::UnknownSymbol("0 of unknown sort".into())),
            Pattern::Neg(p) => Ok(Term::neg(p.build(sig, b, expected)?)),
            Pattern::Add(p, q) => match p.build(sig, b, expected) {
                Ok(s) => {
                    let sort = s.sort();
                    Ok(Term::add(s, q.build(sig, b, Some(&sort))?))
                }
                Err(_) => {
                    let u = q.build(sig, b, expected)?;
                    let sort = u.sort();
                    Ok(Term::add(p.build(sig, b, Some(&sort))?, u))
                }
            },
            Pattern::Mul(p, q) => match p.build(sig, b, None) {
                Ok(s) => {
                    let right = expected.map(|e| Sort::new(e.source.clone(), s.sort().source));
                    Ok(Term::mul(s, q.build(sig, b, right.as_ref())?))
                }
                Err(_) => {
                    let u = q.build(sig, b, None)?;
                    let left = expected.map(|e| Sort::new(u.sort().target, e.target.clone()));
                    Ok(Term::mul(p.build(sig, b, left.as_ref())?, u))
                }
            },
            Pattern::App(n, ps) => {
                let args = ps
                    .iter()
                    .map(|p| p.build(sig, b, None))
                    .collect::<Result<Vec<_>, _>>()?;
                let sorts: Vec<Sort> = args.iter().map(Term::sort).collect();
                let mut fits: Vec<_> = sig.overloads(n).into_iter().filter(|f| f.sort.args == sorts).collect();
                if fits.len() > 1 {
                    if let Some(e) = expected {
                        fits.retain(|f| &f.sort.result == e);
                    }
                }
                match fits.as_slice() {
                    [f] => Ok(Term::app(f.clone(), args)),
                    [] if sig.overloads(n).is_empty() => Err(LogicError::UnknownSymbol(n.clone())),
                    _ => Err(LogicError::SortMismatch {
                        term: format!("{n}(…)"),
                        expected: "exactly one matching overload".into(),
                        actual: format!("{} candidates", fits.len()),
                    }),
                }
            }
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

impl Pattern {
    // precedence: 0 sum, 1 negation, 2 product, 3 atom
    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        let (prec, paren) = match self {
            Pattern::Add(..) => (0, ctx > 0),
            Pattern::Neg(_) => (1, ctx > 1),
            Pattern::Mul(..) => (2, ctx > 2),
            _ => (3, false),
        };
        if paren {
            write!(f, "(")?;
        }
        match self {
            Pattern::Var(v) | Pattern::Const(v) => write!(f, "{v}")?,
            Pattern::Zero => write!(f, "0")?,
            Pattern::Neg(p) => {
                write!(f, "-")?;
                p.fmt_at(f, prec)?;
            }
            Pattern::Add(a, b) => {
                a.fmt_at(f, prec)?;
                write!(f, " + ")?;
                b.fmt_at(f, prec + 1)?;
            }
            Pattern::Mul(a, b) => {
                a.fmt_at(f, prec)?;
                write!(f, "*")?;
                b.fmt_at(f, prec + 1)?;
            }
            Pattern::App(n, args) => {
                write!(f, "{n}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    a.fmt_at(f, 0)?;
                }
                write!(f, ")")?;
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// An oriented rule `left ↦ right`, applied to every instance of `left`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RewriteRule {
    pub left: Pattern,
    pub right: Pattern,
}

impl RewriteRule {
    /// Fails if the right side uses a variable the left side does not bind.
    pub fn new(left: Pattern, right: Pattern) -> Result<Self, LogicError> {
        let mut lv = Vec::new();
        left.vars(&mut lv);
        let mut rv = Vec::new();
        right.vars(&mut rv);
        if let Some(v) = rv.iter().find(|v| !lv.contains(v)) {
            return Err(LogicError::UnknownSymbol(v.clone()));
        }
        Ok(RewriteRule { left, right })
    }
}

impl fmt::Display for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.left, self.right)
    }
}

struct Rewriter<'a> {
    sig: &'a Signature,
    rules: &'a [RewriteRule],
    steps: usize,
    cap: usize,
    depth: usize,
}

/// Nesting bound for normalisation; growing terms hit it long before the
/// stack runs out.
const MAX_DEPTH: usize = 2_000;

impl Rewriter<'_> {
    /// Innermost normalisation. Rewriting at the root loops rather than
    /// recursing, so the stack depth stays bounded by the term depth.
    fn normalise(&mut self, t: &Term) -> Result<Term, ProveError> {
        if self.depth >= MAX_DEPTH {
            return Err(ProveError::RewriteBudgetExceeded(self.cap));
        }
        self.depth += 1;
        let out = self.normalise_at_depth(t);
        self.depth -= 1;
        out
    }

    fn normalise_at_depth(&mut self, t: &Term) -> Result<Term, ProveError> {
        let mut t = t.clone();
        loop {
            t = match &t {
                Term::Var(_) | Term::Const(_) | Term::Zero(_) => t.clone(),
                Term::Neg(s) => Term::neg(self.normalise(s)?),
                Term::Add(s, u) => Term::add(self.normalise(s)?, self.normalise(u)?),
                Term::Mul(s, u) => Term::mul(self.normalise(s)?, self.normalise(u)?),
                Term::App(f, args) => Term::app(
                    f.clone(),
                    args.iter().map(|a| self.normalise(a)).collect::<Result<_, _>>()?,
                ),
            };
            let mut fired = None;
            for r in self.rules {
                let mut b = BTreeMap::new();
                if r.left.matches(&t, &mut b) {
                    fired = Some((r, b));
                    break;
                }
            }
            let Some((r, b)) = fired else { return Ok(t) };
            self.steps += 1;
            if self.steps > self.cap {
                return Err(ProveError::RewriteBudgetExceeded(self.cap));
            }
            let sort = t.sort();
            t = r.right.build(self.sig, &b, Some(&sort))?;
        }
    }
}

/// Rewrites every term of `f` to normal form under `rules`, allowing at
/// most `cap` rule applications.
pub fn apply_universal_rules_capped(
    sig: &Signature,
    f: &Formula,
    rules: &[RewriteRule],
    cap: usize,
) -> Result<Formula, ProveError> {
    if rules.is_empty() {
        return Ok(f.clone());
    }
    let mut rw = Rewriter {
        sig,
        rules,
        steps: 0,
        cap,
        depth: 0,
    };
    f.try_map_terms(&mut |t| rw.normalise(t))
}

pub fn apply_universal_rules(sig: &Signature, f: &Formula, rules: &[RewriteRule]) -> Result<Formula, ProveError> {
    apply_universal_rules_capped(sig, f, rules, DEFAULT_STEP_CAP)
}
