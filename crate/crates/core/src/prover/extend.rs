use super::ProveError;
use crate::logic::{Formula, FunSym, LogicError, Signature, Term};

/// Conjoins `g(p) ≈ g(q)` to every positive identity `p ≈ q` for which a
/// unary overload of `symbol` accepts the sort of `p`. Antecedents of
/// implications and negated subformulas are left alone; identities of
/// other sorts are unchanged.
pub fn extend_with_function(sig: &Signature, f: &Formula, symbol: &str) -> Result<Formula, ProveError> {
    let overloads = sig.overloads(symbol);
    if overloads.is_empty() {
        return Err(LogicError::UnknownSymbol(symbol.to_string()).into());
    }
    if let Some(bad) = overloads.iter().find(|g| g.arity() != 1) {
        return Err(LogicError::SortMismatch {
            term: symbol.to_string(),
            expected: "a unary symbol".into(),
            actual: bad.sort.to_string(),
        }
        .into());
    }
    Ok(extend(f, &overloads))
}

fn extend(f: &Formula, overloads: &[FunSym]) -> Formula {
    match f {
        Formula::Eq(p, q) => match overloads.iter().find(|g| g.sort.args[0] == p.sort()) {
            Some(g) => Formula::and(
                f.clone(),
                Formula::eq(
                    Term::app(g.clone(), vec![p.clone()]),
                    Term::app(g.clone(), vec![q.clone()]),
                ),
            ),
            None => f.clone(),
        },
        Formula::Not(_) => f.clone(),
        Formula::And(a, b) => Formula::and(extend(a, overloads), extend(b, overloads)),
        Formula::Or(a, b) => Formula::or(extend(a, overloads), extend(b, overloads)),
        Formula::Implies(a, b) => Formula::implies((**a).clone(), extend(b, overloads)),
        Formula::Forall(v, g) => Formula::forall(v.clone(), extend(g, overloads)),
        Formula::Exists(v, g) => Formula::exists(v.clone(), extend(g, overloads)),
    }
}
