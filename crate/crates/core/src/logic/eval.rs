use std::collections::HashMap;

use super::formula::{Clause, Formula};
use super::term::Term;
use super::LogicError;

/// Truth values for equations, keyed by their two sides.
pub type Valuation = HashMap<(Term, Term), bool>;

fn lookup(v: &Valuation, s: &Term, t: &Term) -> Result<bool, LogicError> {
    v.get(&(s.clone(), t.clone()))
        .copied()
        .ok_or_else(|| LogicError::UnassignedAtom(format!("{s} = {t}")))
}

/// Evaluates a quantifier-free formula, treating each distinct equation as
/// a propositional variable.
pub fn eval_propositional(f: &Formula, valuation: &Valuation) -> Result<bool, LogicError> {
    Ok(match f {
        Formula::Eq(s, t) => lookup(valuation, s, t)?,
        Formula::Not(g) => !eval_propositional(g, valuation)?,
        Formula::And(a, b) => eval_propositional(a, valuation)? & eval_propositional(b, valuation)?,
        Formula::Or(a, b) => eval_propositional(a, valuation)? | eval_propositional(b, valuation)?,
        Formula::Implies(a, b) => !eval_propositional(a, valuation)? | eval_propositional(b, valuation)?,
        Formula::Forall(..) | Formula::Exists(..) => return Err(LogicError::NotQuantifierFree),
    })
}

/// Evaluates a conjunction of clauses.
pub fn eval_clauses(clauses: &[Clause], valuation: &Valuation) -> Result<bool, LogicError> {
    let mut all = true;
    for c in clauses {
        let mut any = false;
        for (s, t) in &c.negatives {
            any |= !lookup(valuation, s, t)?;
        }
        for (p, q) in &c.positives {
            any |= lookup(valuation, p, q)?;
        }
        all &= any;
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::term::Sort;

    #[test]
    fn evaluates_atoms_and_connectives() {
        let s = Sort::new("u", "u");
        let p = Term::constant("p", s.clone());
        let q = Term::constant("q", s);
        let a = Formula::eq(p.clone(), q.clone());
        for val in [true, false] {
            let mut v = Valuation::new();
            v.insert((p.clone(), q.clone()), val);
            assert_eq!(eval_propositional(&a, &v), Ok(val));
            assert_eq!(
                eval_propositional(&Formula::implies(a.clone(), a.clone()), &v),
                Ok(true)
            );
        }
        assert!(matches!(
            eval_propositional(&a, &Valuation::new()),
            Err(LogicError::UnassignedAtom(_))
        ));
    }
}
