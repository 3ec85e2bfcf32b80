//! Ackermann's reduction: replaces the instances of a function symbol by
//! fresh constants and adds functional-consistency constraints.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::{Constant, Formula, FunSym, LogicError, Signature, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AckermannError {
    #[error("formula is not quantifier-free")]
    NotQuantifierFree,
    #[error("`{0}` is an arithmetic symbol and cannot be removed")]
    ArithmeticSymbol(String),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AckermannOptions {
    /// Emit constraints with syntactically reflexive hypotheses as bare
    /// equations.
    pub fc_simplify: bool,
}

impl Default for AckermannOptions {
    fn default() -> Self {
        AckermannOptions { fc_simplify: true }
    }
}

/// A replaced instance `f(t₁,…,tₙ)` and its constant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub symbol: FunSym,
    /// Arguments as they occurred in the input.
    pub args: Vec<Term>,
    /// Arguments with inner instances already replaced.
    pub flat_args: Vec<Term>,
    pub constant: Constant,
}

impl Instance {
    pub fn original(&self) -> Term {
        Term::app(self.symbol.clone(), self.args.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AckermannResult {
    pub flat: Formula,
    /// Consistency constraints; empty means the trivially true conjunction.
    pub fc: Vec<Formula>,
    /// Instances in index order.
    pub table: Vec<Instance>,
    pub extended_signature: Signature,
}

impl AckermannResult {
    /// `fc → flat`, or `flat` alone when there are no constraints.
    pub fn result(&self) -> Formula {
        match Formula::conjunction(self.fc.iter().cloned()) {
            Some(fc) => Formula::implies(fc, self.flat.clone()),
            None => self.flat.clone(),
        }
    }

    /// The constant replacing `instance`, if it was replaced.
    pub fn constant_of(&self, instance: &Term) -> Option<&Constant> {
        self.table
            .iter()
            .find(|i| &i.original() == instance)
            .map(|i| &i.constant)
    }

    /// Substitutes each constant by its original instance, innermost
    /// constants last, recovering the input up to the identification of
    /// equal instances.
    pub fn unflatten(&self, t: &Term) -> Term {
        let mut cur = t.clone();
        for inst in self.table.iter().rev() {
            let orig = inst.original();
            cur = cur.map_bottom_up(&mut |u| match &u {
                Term::Const(c) if *c == inst.constant => orig.clone(),
                _ => u,
            });
        }
        cur
    }
}

fn is_arithmetic_name(name: &str) -> bool {
    matches!(name, "+" | "-" | "*" | "0")
}

fn constant_hint(f: &FunSym, args: &[Term]) -> String {
    match args {
        [Term::Const(c)] => format!("{}_{}", f.name, c.name.trim_start_matches('_')),
        [Term::Var(v)] => format!("{}_{}", f.name, v.name),
        _ => f.name.clone(),
    }
}

struct Reducer<'a> {
    symbol: &'a FunSym,
    sig: Signature,
    table: Vec<Instance>,
}

impl Reducer<'_> {
    fn flatten(&mut self, t: &Term) -> Term {
        match t {
            Term::App(f, args) => {
                let flat_args: Vec<Term> = args.iter().map(|a| self.flatten(a)).collect();
                if f != self.symbol {
                    return Term::app(f.clone(), flat_args);
                }
                if let Some(i) = self.table.iter().find(|i| &i.args == args) {
                    return i.constant.term();
                }
                let c = self.sig.fresh_constant(&constant_hint(f, args), f.sort.result.clone());
                self.table.push(Instance {
                    symbol: f.clone(),
                    args: args.clone(),
                    flat_args,
                    constant: c.clone(),
                });
                c.term()
            }
            Term::Var(_) | Term::Const(_) | Term::Zero(_) => t.clone(),
            Term::Neg(s) => Term::neg(self.flatten(s)),
            Term::Add(s, u) => {
                let s = self.flatten(s);
                Term::add(s, self.flatten(u))
            }
            Term::Mul(s, u) => {
                let s = self.flatten(s);
                Term::mul(s, self.flatten(u))
            }
        }
    }

    fn formula(&mut self, f: &Formula) -> Formula {
        match f {
            Formula::Eq(s, t) => {
                let s = self.flatten(s);
                Formula::eq(s, self.flatten(t))
            }
            Formula::Not(g) => Formula::not(self.formula(g)),
            Formula::And(a, b) => {
                let a = self.formula(a);
                Formula::and(a, self.formula(b))
            }
            Formula::Or(a, b) => {
                let a = self.formula(a);
                Formula::or(a, self.formula(b))
            }
            Formula::Implies(a, b) => {
                let a = self.formula(a);
                Formula::implies(a, self.formula(b))
            }
            Formula::Forall(..) | Formula::Exists(..) => unreachable!("checked quantifier-free"),
        }
    }

    fn constraints(&self, opts: AckermannOptions) -> Vec<Formula> {
        let mut out = Vec::new();
        for (i, a) in self.table.iter().enumerate() {
            for b in &self.table[i + 1..] {
                let concl = Formula::eq(a.constant.term(), b.constant.term());
                let hyps: Vec<Formula> = a
                    .flat_args
                    .iter()
                    .zip(&b.flat_args)
                    .filter(|(s, t)| !(opts.fc_simplify && s == t))
                    .map(|(s, t)| Formula::eq(s.clone(), t.clone()))
                    .collect();
                out.push(match Formula::conjunction(hyps) {
                    Some(h) => Formula::implies(h, concl),
                    None => concl,
                });
            }
        }
        out
    }
}

fn check_input(sig: &Signature, fs: &[&Formula], symbol: &FunSym) -> Result<(), AckermannError> {
    if is_arithmetic_name(&symbol.name) {
        return Err(AckermannError::ArithmeticSymbol(symbol.name.clone()));
    }
    if !sig.overloads(&symbol.name).contains(symbol) {
        return Err(LogicError::UnknownSymbol(symbol.name.clone()).into());
    }
    if fs.iter().any(|f| !f.is_quantifier_free()) {
        return Err(AckermannError::NotQuantifierFree);
    }
    Ok(())
}

/// Removes every instance of `symbol` from the quantifier-free formula `f`.
/// Instances are indexed depth-first, left to right, innermost first;
/// syntactically equal instances share one constant.
pub fn ackermann_reduce(
    sig: &Signature,
    f: &Formula,
    symbol: &FunSym,
    opts: AckermannOptions,
) -> Result<AckermannResult, AckermannError> {
    check_input(sig, &[f], symbol)?;
    let mut r = Reducer {
        symbol,
        sig: sig.clone(),
        table: Vec::new(),
    };
    let flat = r.formula(f);
    Ok(AckermannResult {
        flat,
        fc: r.constraints(opts),
        table: r.table,
        extended_signature: r.sig,
    })
}

/// Removes all non-arithmetic function symbols, one symbol per pass in
/// innermost-first order of appearance. Constraints produced by earlier
/// passes are reduced by later ones; the combined result is
/// `(fc_k ∧ … ∧ fc_1) → flat`.
pub fn ackermann_reduce_all(
    sig: &Signature,
    f: &Formula,
    opts: AckermannOptions,
) -> Result<AckermannResult, AckermannError> {
    if !f.is_quantifier_free() {
        return Err(AckermannError::NotQuantifierFree);
    }
    let mut acc = AckermannResult {
        flat: f.clone(),
        fc: Vec::new(),
        table: Vec::new(),
        extended_signature: sig.clone(),
    };
    loop {
        let mut syms = Vec::new();
        for g in acc.fc.iter().chain(std::iter::once(&acc.flat)) {
            for s in g.function_symbols() {
                if !syms.contains(&s) {
                    syms.push(s);
                }
            }
        }
        let Some(symbol) = syms.into_iter().next() else {
            return Ok(acc);
        };
        let all: Vec<&Formula> = acc.fc.iter().chain(std::iter::once(&acc.flat)).collect();
        check_input(&acc.extended_signature, &all, &symbol)?;
        let mut r = Reducer {
            symbol: &symbol,
            sig: acc.extended_signature.clone(),
            table: Vec::new(),
        };
        let old_fc: Vec<Formula> = acc.fc.iter().map(|g| r.formula(g)).collect();
        let flat = r.formula(&acc.flat);
        let mut fc = r.constraints(opts);
        fc.extend(old_fc);
        acc.flat = flat;
        acc.fc = fc;
        acc.table.extend(r.table);
        acc.extended_signature = r.sig;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Sort;

    fn setup() -> (Signature, FunSym, Term, Term) {
        let mut sig = Signature::new();
        sig.add_object("u").unwrap();
        sig.add_object("v").unwrap();
        let s = Sort::new("u", "v");
        let f = sig.add_function("f", vec![s.clone()], s.clone()).unwrap();
        (sig, f, Term::var("x", s.clone()), Term::var("y", s))
    }

    #[test]
    fn no_instances_leaves_formula() {
        let (sig, f, x, y) = setup();
        let phi = Formula::eq(x, y);
        let r = ackermann_reduce(&sig, &phi, &f, AckermannOptions::default()).unwrap();
        assert_eq!(r.result(), phi);
        assert!(r.table.is_empty());
    }

    #[test]
    fn quantified_input_is_rejected() {
        let (sig, f, x, _) = setup();
        let Term::Var(xv) = x.clone() else { unreachable!() };
        let phi = Formula::forall(xv, Formula::eq(x.clone(), x));
        assert_eq!(
            ackermann_reduce(&sig, &phi, &f, AckermannOptions::default()),
            Err(AckermannError::NotQuantifierFree)
        );
    }

    #[test]
    fn equal_instances_share_a_constant() {
        let (sig, f, x, _) = setup();
        let fx = Term::app(f.clone(), vec![x.clone()]);
        let phi = Formula::eq(fx.clone(), fx.clone());
        let r = ackermann_reduce(&sig, &phi, &f, AckermannOptions::default()).unwrap();
        assert_eq!(r.table.len(), 1);
        assert!(r.fc.is_empty());
        let Formula::Eq(a, b) = &r.flat else { panic!() };
        assert_eq!(a, b);
        assert_eq!(r.unflatten(a), fx);
    }

    #[test]
    fn nested_symbols_are_removed_innermost_first() {
        let mut sig = Signature::new();
        sig.add_object("u").unwrap();
        let s = Sort::new("u", "u");
        let g = sig.add_function("g", vec![s.clone()], s.clone()).unwrap();
        let h = sig.add_function("h", vec![s.clone()], s.clone()).unwrap();
        let c = sig.add_constant("c", s).unwrap().term();
        let phi = Formula::eq(Term::app(g, vec![Term::app(h, vec![c.clone()])]), c);
        let r = ackermann_reduce_all(&sig, &phi, AckermannOptions::default()).unwrap();
        let names: Vec<&str> = r.table.iter().map(|i| i.symbol.name.as_str()).collect();
        assert_eq!(names, vec!["h", "g"]);
        assert!(r.fc.is_empty());
        assert!(r.flat.function_symbols().is_empty());
        assert!(r.extended_signature.check_sorts(&r.result()).is_ok());
    }
}
