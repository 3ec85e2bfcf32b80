use super::formula::{Clause, Formula};
use super::term::Term;

#[derive(Clone)]
enum Nnf {
    Lit(bool, Term, Term),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
}

fn nnf(f: &Formula, positive: bool) -> Nnf {
    match f {
        Formula::Eq(s, t) => Nnf::Lit(positive, s.clone(), t.clone()),
        Formula::Not(g) => nnf(g, !positive),
        Formula::And(a, b) if positive => Nnf::And(vec![nnf(a, true), nnf(b, true)]),
        Formula::And(a, b) => Nnf::Or(vec![nnf(a, false), nnf(b, false)]),
        Formula::Or(a, b) if positive => Nnf::Or(vec![nnf(a, true), nnf(b, true)]),
        Formula::Or(a, b) => Nnf::And(vec![nnf(a, false), nnf(b, false)]),
        Formula::Implies(a, b) if positive => Nnf::Or(vec![nnf(a, false), nnf(b, true)]),
        Formula::Implies(a, b) => Nnf::And(vec![nnf(a, true), nnf(b, false)]),
        Formula::Forall(..) | Formula::Exists(..) => panic!("to_cnf requires a quantifier-free formula"),
    }
}

fn distribute(n: &Nnf) -> Vec<Clause> {
    match n {
        Nnf::Lit(positive, s, t) => {
            let mut c = Clause::default();
            if *positive {
                c.positives.push((s.clone(), t.clone()));
            } else {
                c.negatives.push((s.clone(), t.clone()));
            }
            vec![c]
        }
        Nnf::And(parts) => dedup(parts.iter().flat_map(distribute).collect()),
        Nnf::Or(parts) => {
            let mut acc = vec![Clause::default()];
            for p in parts {
                let cs = distribute(p);
                let mut next = Vec::with_capacity(acc.len() * cs.len());
                for a in &acc {
                    for c in &cs {
                        next.push(a.union(c));
                    }
                }
                acc = dedup(next);
            }
            acc
        }
    }
}

fn dedup(clauses: Vec<Clause>) -> Vec<Clause> {
    let mut seen = std::collections::HashSet::new();
    clauses.into_iter().filter(|c| seen.insert(c.clone())).collect()
}

/// Conjunctive normal form by eliminating implications, pushing negations
/// inwards and distributing disjunction over conjunction.
///
/// Literals inside a clause are sorted by the term order and deduplicated;
/// duplicate clauses are dropped, keeping first appearances. Tautological
/// clauses are kept.
///
/// # Panics
/// If `f` contains a quantifier.
pub fn to_cnf(f: &Formula) -> Vec<Clause> {
    let mut out = distribute(&nnf(f, true));
    for c in &mut out {
        c.canonicalize();
    }
    dedup(out)
}
