use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A sort `(source, target)`: the type of a morphism `source -> target`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Sort {
    pub source: String,
    pub target: String,
}

impl Sort {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Self {
        Sort {
            source: source.into(),
            target: target.into(),
        }
    }

    /// Sort of `s * t` where `self` is the sort of `s` and `rhs` that of `t`,
    /// or `None` when the composition is not defined.
    pub fn compose(&self, rhs: &Sort) -> Option<Sort> {
        (self.source == rhs.target).then(|| Sort::new(rhs.source.clone(), self.target.clone()))
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.source, self.target)
    }
}

/// `σ(f) = (u₁,v₁) × … × (uₙ,vₙ) → (u,v)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FunctionSort {
    pub args: Vec<Sort>,
    pub result: Sort,
}

impl fmt::Display for FunctionSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, " x ")?;
            }
            write!(f, "({},{})", a.source, a.target)?;
        }
        write!(f, " -> ({},{})", self.result.source, self.result.target)
    }
}

/// A non-arithmetic function symbol. Overloads of the same name are distinct
/// symbols, told apart by their sort.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FunSym {
    pub name: String,
    pub sort: FunctionSort,
}

impl FunSym {
    pub fn new(name: impl Into<String>, args: Vec<Sort>, result: Sort) -> Self {
        FunSym {
            name: name.into(),
            sort: FunctionSort { args, result },
        }
    }

    pub fn arity(&self) -> usize {
        self.sort.args.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Var {
    pub name: String,
    pub sort: Sort,
}

impl Var {
    pub fn new(name: impl Into<String>, sort: Sort) -> Self {
        Var {
            name: name.into(),
            sort,
        }
    }

    pub fn term(&self) -> Term {
        Term::Var(self.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Constant {
    pub name: String,
    pub sort: Sort,
}

impl Constant {
    pub fn new(name: impl Into<String>, sort: Sort) -> Self {
        Constant {
            name: name.into(),
            sort,
        }
    }

    pub fn term(&self) -> Term {
        Term::Const(self.clone())
    }
}

/// Terms of the many-sorted language. The arithmetic symbols `-`, `+`, `·`
/// and the zero constants get dedicated variants; their sort indices are
/// determined by the children.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    Var(Var),
    Const(Constant),
    Zero(Sort),
    Neg(Box<Term>),
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    App(FunSym, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>, sort: Sort) -> Term {
        Term::Var(Var::new(name, sort))
    }

    pub fn constant(name: impl Into<String>, sort: Sort) -> Term {
        Term::Const(Constant::new(name, sort))
    }

    pub fn zero(sort: Sort) -> Term {
        Term::Zero(sort)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(t: Term) -> Term {
        Term::Neg(Box::new(t))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(s: Term, t: Term) -> Term {
        Term::Add(Box::new(s), Box::new(t))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(s: Term, t: Term) -> Term {
        Term::Mul(Box::new(s), Box::new(t))
    }

    /// Left-nested product of a non-empty sequence of factors.
    pub fn product(factors: impl IntoIterator<Item = Term>) -> Term {
        let mut it = factors.into_iter();
        let first = it.next().expect("product of no factors");
        it.fold(first, Term::mul)
    }

    pub fn app(f: FunSym, args: Vec<Term>) -> Term {
        Term::App(f, args)
    }

    /// The sort of a well-sorted term. Ill-sorted products fall back to the
    /// left factor's target, so callers that care must run the sort checker.
    pub fn sort(&self) -> Sort {
        match self {
            Term::Var(v) => v.sort.clone(),
            Term::Const(c) => c.sort.clone(),
            Term::Zero(s) => s.clone(),
            Term::Neg(t) | Term::Add(t, _) => t.sort(),
            Term::Mul(s, t) => Sort::new(t.sort().source, s.sort().target),
            Term::App(f, _) => f.sort.result.clone(),
        }
    }

    /// Node count.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) | Term::Zero(_) => 1,
            Term::Neg(t) => 1 + t.size(),
            Term::Add(s, t) | Term::Mul(s, t) => 1 + s.size() + t.size(),
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Var(_) | Term::Const(_) | Term::Zero(_) => vec![],
            Term::Neg(t) => vec![t],
            Term::Add(s, t) | Term::Mul(s, t) => vec![s, t],
            Term::App(_, args) => args.iter().collect(),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) | Term::Zero(_) => true,
            _ => self.children().into_iter().all(Term::is_ground),
        }
    }

    /// True if the only function symbols are the arithmetic ones.
    pub fn is_arithmetic(&self) -> bool {
        match self {
            Term::App(..) => false,
            _ => self.children().into_iter().all(Term::is_arithmetic),
        }
    }

    pub fn vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            _ => self.children().into_iter().for_each(|c| c.vars(out)),
        }
    }

    pub fn var_names(&self) -> BTreeSet<String> {
        let mut vs = BTreeSet::new();
        self.vars(&mut vs);
        vs.into_iter().map(|v| v.name).collect()
    }

    pub fn constants(&self, out: &mut Vec<Constant>) {
        match self {
            Term::Const(c) => {
                if !out.contains(c) {
                    out.push(c.clone())
                }
            }
            _ => self.children().into_iter().for_each(|c| c.constants(out)),
        }
    }

    /// Every non-arithmetic function symbol occurring in the term, in
    /// depth-first, left-to-right, innermost-first order.
    pub fn function_symbols(&self, out: &mut Vec<FunSym>) {
        for c in self.children() {
            c.function_symbols(out);
        }
        if let Term::App(f, _) = self {
            if !out.contains(f) {
                out.push(f.clone());
            }
        }
    }

    pub fn contains_symbol(&self, f: &FunSym) -> bool {
        match self {
            Term::App(g, _) if g == f => true,
            _ => self.children().into_iter().any(|c| c.contains_symbol(f)),
        }
    }

    /// Bottom-up structural map.
    pub fn map_bottom_up(&self, f: &mut impl FnMut(Term) -> Term) -> Term {
        let rebuilt = match self {
            Term::Var(_) | Term::Const(_) | Term::Zero(_) => self.clone(),
            Term::Neg(t) => Term::neg(t.map_bottom_up(f)),
            Term::Add(s, t) => Term::add(s.map_bottom_up(f), t.map_bottom_up(f)),
            Term::Mul(s, t) => Term::mul(s.map_bottom_up(f), t.map_bottom_up(f)),
            Term::App(g, args) => Term::App(g.clone(), args.iter().map(|a| a.map_bottom_up(f)).collect()),
        };
        f(rebuilt)
    }

    fn variant_rank(&self) -> u8 {
        match self {
            Term::Var(_) => 0,
            Term::Const(_) => 1,
            Term::Zero(_) => 2,
            Term::Neg(_) => 3,
            Term::Add(..) => 4,
            Term::Mul(..) => 5,
            Term::App(..) => 6,
        }
    }

    fn cmp_structural(&self, other: &Term) -> Ordering {
        let rank = self.variant_rank().cmp(&other.variant_rank());
        if rank != Ordering::Equal {
            return rank;
        }
        match (self, other) {
            (Term::Var(a), Term::Var(b)) => a.cmp(b),
            (Term::Const(a), Term::Const(b)) => a.cmp(b),
            (Term::Zero(a), Term::Zero(b)) => a.cmp(b),
            (Term::App(f, xs), Term::App(g, ys)) => f.cmp(g).then_with(|| xs.cmp(ys)),
            _ => self.children().cmp(&other.children()),
        }
    }
}

/// Total order on terms: node count first, then symbol identifiers.
impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size().cmp(&other.size()).then_with(|| self.cmp_structural(other))
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const PREC_ADD: u8 = 1;
const PREC_NEG: u8 = 2;
const PREC_MUL: u8 = 3;
const PREC_ATOM: u8 = 4;

impl Term {
    fn precedence(&self) -> u8 {
        match self {
            Term::Add(..) => PREC_ADD,
            Term::Neg(_) => PREC_NEG,
            Term::Mul(..) => PREC_MUL,
            _ => PREC_ATOM,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.precedence() < min;
        if paren {
            write!(f, "(")?;
        }
        match self {
            Term::Var(v) => write!(f, "{}", v.name)?,
            Term::Const(c) => write!(f, "{}", c.name)?,
            Term::Zero(s) if f.alternate() => write!(f, "0[{},{}]", s.source, s.target)?,
            Term::Zero(_) => write!(f, "0")?,
            Term::Neg(t) => {
                write!(f, "-")?;
                t.fmt_at(f, PREC_NEG)?;
            }
            Term::Add(s, t) => {
                s.fmt_at(f, PREC_ADD)?;
                write!(f, " + ")?;
                t.fmt_at(f, PREC_NEG)?;
            }
            Term::Mul(s, t) => {
                s.fmt_at(f, PREC_MUL)?;
                write!(f, "*")?;
                t.fmt_at(f, PREC_ATOM)?;
            }
            Term::App(g, args) => {
                write!(f, "{}(", g.name)?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    a.fmt_at(f, PREC_ADD)?;
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

/// `{:#}` annotates zeros with their sort as `0[u,v]`.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, PREC_ADD)
    }
}
