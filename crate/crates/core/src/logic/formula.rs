use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::term::{Constant, FunSym, Term, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn dual(self) -> Quantifier {
        match self {
            Quantifier::Forall => Quantifier::Exists,
            Quantifier::Exists => Quantifier::Forall,
        }
    }
}

/// First-order formulas whose only predicate is equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(Var, Box<Formula>),
    Exists(Var, Box<Formula>),
}

impl Formula {
    pub fn eq(s: Term, t: Term) -> Formula {
        Formula::Eq(s, t)
    }

    pub fn neq(s: Term, t: Term) -> Formula {
        Formula::not(Formula::Eq(s, t))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(f: Formula, g: Formula) -> Formula {
        Formula::And(Box::new(f), Box::new(g))
    }

    pub fn or(f: Formula, g: Formula) -> Formula {
        Formula::Or(Box::new(f), Box::new(g))
    }

    pub fn implies(f: Formula, g: Formula) -> Formula {
        Formula::Implies(Box::new(f), Box::new(g))
    }

    pub fn forall(v: Var, f: Formula) -> Formula {
        Formula::Forall(v, Box::new(f))
    }

    pub fn exists(v: Var, f: Formula) -> Formula {
        Formula::Exists(v, Box::new(f))
    }

    pub fn quantified(q: Quantifier, v: Var, f: Formula) -> Formula {
        match q {
            Quantifier::Forall => Formula::forall(v, f),
            Quantifier::Exists => Formula::exists(v, f),
        }
    }

    /// Right-nested conjunction; `None` for the empty conjunction.
    pub fn conjunction(fs: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        let mut fs: Vec<Formula> = fs.into_iter().collect();
        let mut acc = fs.pop()?;
        while let Some(f) = fs.pop() {
            acc = Formula::and(f, acc);
        }
        Some(acc)
    }

    /// Right-nested disjunction; `None` for the empty disjunction.
    pub fn disjunction(fs: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        let mut fs: Vec<Formula> = fs.into_iter().collect();
        let mut acc = fs.pop()?;
        while let Some(f) = fs.pop() {
            acc = Formula::or(f, acc);
        }
        Some(acc)
    }

    /// Flattens nested `And` nodes.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        match self {
            Formula::And(a, b) => {
                let mut out = a.conjuncts();
                out.extend(b.conjuncts());
                out
            }
            _ => vec![self],
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Eq(..) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            Formula::Forall(..) | Formula::Exists(..) => false,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.is_quantifier_free() && self.terms().iter().all(|t| t.is_ground())
    }

    pub fn is_arithmetic(&self) -> bool {
        self.terms().iter().all(|t| t.is_arithmetic())
    }

    /// All top-level terms (the sides of every equation), left to right.
    pub fn terms(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        self.visit_atoms(&mut |s, t| {
            out.push(s);
            out.push(t);
        });
        out
    }

    pub fn visit_atoms<'a>(&'a self, f: &mut impl FnMut(&'a Term, &'a Term)) {
        match self {
            Formula::Eq(s, t) => f(s, t),
            Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => g.visit_atoms(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
        }
    }

    /// Distinct equations in order of first appearance.
    pub fn atoms(&self) -> Vec<(Term, Term)> {
        let mut out: Vec<(Term, Term)> = Vec::new();
        self.visit_atoms(&mut |s, t| {
            if !out.iter().any(|(a, b)| a == s && b == t) {
                out.push((s.clone(), t.clone()));
            }
        });
        out
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Eq(s, t) => {
                let mut vs = BTreeSet::new();
                s.vars(&mut vs);
                t.vars(&mut vs);
                out.extend(vs.into_iter().filter(|v| !bound.contains(&v.name)));
            }
            Formula::Not(g) => g.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                bound.push(v.name.clone());
                g.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_var_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_all(&mut |f| match f {
            Formula::Eq(s, t) => {
                out.extend(s.var_names());
                out.extend(t.var_names());
            }
            Formula::Forall(v, _) | Formula::Exists(v, _) => {
                out.insert(v.name.clone());
            }
            _ => {}
        });
        out
    }

    fn visit_all(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Eq(..) => {}
            Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => g.visit_all(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit_all(f);
                b.visit_all(f);
            }
        }
    }

    pub fn constants(&self) -> Vec<Constant> {
        let mut out = Vec::new();
        for t in self.terms() {
            t.constants(&mut out);
        }
        out
    }

    /// Non-arithmetic function symbols in depth-first, innermost-first order.
    pub fn function_symbols(&self) -> Vec<FunSym> {
        let mut out = Vec::new();
        for t in self.terms() {
            t.function_symbols(&mut out);
        }
        out
    }

    /// Applies `f` to both sides of every equation.
    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> Formula {
        match self {
            Formula::Eq(s, t) => Formula::Eq(f(s), f(t)),
            Formula::Not(g) => Formula::not(g.map_terms(f)),
            Formula::And(a, b) => Formula::and(a.map_terms(f), b.map_terms(f)),
            Formula::Or(a, b) => Formula::or(a.map_terms(f), b.map_terms(f)),
            Formula::Implies(a, b) => Formula::implies(a.map_terms(f), b.map_terms(f)),
            Formula::Forall(v, g) => Formula::forall(v.clone(), g.map_terms(f)),
            Formula::Exists(v, g) => Formula::exists(v.clone(), g.map_terms(f)),
        }
    }

    /// Like [`Formula::map_terms`] but for fallible maps.
    pub fn try_map_terms<E>(&self, f: &mut impl FnMut(&Term) -> Result<Term, E>) -> Result<Formula, E> {
        Ok(match self {
            Formula::Eq(s, t) => Formula::Eq(f(s)?, f(t)?),
            Formula::Not(g) => Formula::not(g.try_map_terms(f)?),
            Formula::And(a, b) => Formula::and(a.try_map_terms(f)?, b.try_map_terms(f)?),
            Formula::Or(a, b) => Formula::or(a.try_map_terms(f)?, b.try_map_terms(f)?),
            Formula::Implies(a, b) => Formula::implies(a.try_map_terms(f)?, b.try_map_terms(f)?),
            Formula::Forall(v, g) => Formula::forall(v.clone(), g.try_map_terms(f)?),
            Formula::Exists(v, g) => Formula::exists(v.clone(), g.try_map_terms(f)?),
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Forall(..) | Formula::Exists(..) => 0,
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Not(_) => 4,
            Formula::Eq(..) => 5,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.precedence() < min;
        if paren {
            write!(f, "(")?;
        }
        match self {
            Formula::Eq(s, t) if f.alternate() => write!(f, "{s:#} = {t:#}")?,
            Formula::Eq(s, t) => write!(f, "{s} = {t}")?,
            Formula::Not(g) => match g.as_ref() {
                Formula::Eq(s, t) if f.alternate() => write!(f, "{s:#} != {t:#}")?,
                Formula::Eq(s, t) => write!(f, "{s} != {t}")?,
                _ => {
                    write!(f, "!")?;
                    g.fmt_at(f, 4)?;
                }
            },
            Formula::And(a, b) => {
                a.fmt_at(f, 4)?;
                write!(f, " & ")?;
                b.fmt_at(f, 3)?;
            }
            Formula::Or(a, b) => {
                a.fmt_at(f, 3)?;
                write!(f, " | ")?;
                b.fmt_at(f, 2)?;
            }
            Formula::Implies(a, b) => {
                a.fmt_at(f, 2)?;
                write!(f, " -> ")?;
                b.fmt_at(f, 1)?;
            }
            Formula::Forall(..) | Formula::Exists(..) => {
                let (q, mut body) = match self {
                    Formula::Forall(v, g) => ("forall", (v, g.as_ref())),
                    Formula::Exists(v, g) => ("exists", (v, g.as_ref())),
                    _ => unreachable!(),
                };
                write!(f, "{q} {}:{}", body.0.name, body.0.sort)?;
                // merge a block of equal quantifiers
                while let ("forall", Formula::Forall(v, g)) | ("exists", Formula::Exists(v, g)) = (q, body.1) {
                    write!(f, ", {}:{}", v.name, v.sort)?;
                    body = (v, g.as_ref());
                }
                write!(f, ". ")?;
                body.1.fmt_at(f, 0)?;
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

/// A ground clause `s₁ ≉ t₁ ∨ … ∨ sₙ ≉ tₙ ∨ p₁ ≈ q₁ ∨ … ∨ pₘ ≈ qₘ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Clause {
    pub negatives: Vec<(Term, Term)>,
    pub positives: Vec<(Term, Term)>,
}

impl Clause {
    pub fn len(&self) -> usize {
        self.negatives.len() + self.positives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_ground(&self) -> bool {
        self.negatives
            .iter()
            .chain(&self.positives)
            .all(|(s, t)| s.is_ground() && t.is_ground())
    }

    pub fn is_tautology(&self) -> bool {
        self.positives.iter().any(|p| self.negatives.contains(p))
    }

    /// The disjunction of two clauses, re-canonicalised.
    pub fn union(&self, other: &Clause) -> Clause {
        let mut c = self.clone();
        c.negatives.extend(other.negatives.iter().cloned());
        c.positives.extend(other.positives.iter().cloned());
        c.canonicalize();
        c
    }

    /// Sorts literals by the term order and drops duplicates.
    pub fn canonicalize(&mut self) {
        self.negatives.sort();
        self.negatives.dedup();
        self.positives.sort();
        self.positives.dedup();
    }

    pub fn to_formula(&self) -> Option<Formula> {
        Formula::disjunction(
            self.negatives
                .iter()
                .map(|(s, t)| Formula::neq(s.clone(), t.clone()))
                .chain(self.positives.iter().map(|(p, q)| Formula::eq(p.clone(), q.clone()))),
        )
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (s, t) in &self.negatives {
            if !first {
                write!(f, " | ")?;
            }
            first = false;
            write!(f, "{s} != {t}")?;
        }
        for (p, q) in &self.positives {
            if !first {
                write!(f, " | ")?;
            }
            first = false;
            write!(f, "{p} = {q}")?;
        }
        if first {
            write!(f, "<empty clause>")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::term::Sort;

    #[test]
    fn free_vars_respect_binders() {
        let s = Sort::new("u", "u");
        let x = Var::new("x", s.clone());
        let y = Var::new("y", s.clone());
        let f = Formula::forall(x.clone(), Formula::eq(x.term(), y.term()));
        assert_eq!(f.free_vars(), [y].into_iter().collect());
        assert!(!f.is_quantifier_free());
    }

    #[test]
    fn display_round_trips_precedence() {
        let s = Sort::new("u", "u");
        let a = Term::constant("a", s.clone());
        let b = Term::constant("b", s);
        let f = Formula::implies(
            Formula::and(
                Formula::eq(a.clone(), b.clone()),
                Formula::or(Formula::neq(a.clone(), a.clone()), Formula::eq(b.clone(), b.clone())),
            ),
            Formula::not(Formula::and(Formula::eq(a.clone(), a), Formula::eq(b.clone(), b))),
        );
        assert_eq!(f.to_string(), "a = b & (a != a | b = b) -> !(a = a & b = b)");
    }
}
