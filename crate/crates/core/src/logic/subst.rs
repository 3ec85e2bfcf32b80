use std::collections::{BTreeMap, BTreeSet};

use super::formula::{Formula, Quantifier};
use super::term::{Term, Var};
use super::LogicError;

/// Replaces variables by terms inside a term (no binders to worry about).
pub fn substitute_term(t: &Term, bindings: &BTreeMap<String, Term>) -> Term {
    t.map_bottom_up(&mut |u| match &u {
        Term::Var(v) => bindings.get(&v.name).cloned().unwrap_or(u),
        _ => u,
    })
}

fn primed(name: &str, taken: &BTreeSet<String>) -> String {
    let mut cand = format!("{name}'");
    while taken.contains(&cand) {
        cand.push('\'');
    }
    cand
}

/// Capture-avoiding substitution of free variables.
///
/// A bound variable that would capture a variable of an inserted term is
/// renamed by appending primes.
pub fn substitute(f: &Formula, bindings: &BTreeMap<String, Term>) -> Result<Formula, LogicError> {
    let free = f.free_vars();
    for (name, t) in bindings {
        if let Some(v) = free.iter().find(|v| &v.name == name) {
            if v.sort != t.sort() {
                return Err(LogicError::SortMismatch {
                    term: format!("{name} := {t}"),
                    expected: v.sort.to_string(),
                    actual: t.sort().to_string(),
                });
            }
        }
    }
    Ok(subst_rec(f, bindings))
}

fn subst_rec(f: &Formula, bindings: &BTreeMap<String, Term>) -> Formula {
    if bindings.is_empty() {
        return f.clone();
    }
    match f {
        Formula::Eq(s, t) => Formula::Eq(substitute_term(s, bindings), substitute_term(t, bindings)),
        Formula::Not(g) => Formula::not(subst_rec(g, bindings)),
        Formula::And(a, b) => Formula::and(subst_rec(a, bindings), subst_rec(b, bindings)),
        Formula::Or(a, b) => Formula::or(subst_rec(a, bindings), subst_rec(b, bindings)),
        Formula::Implies(a, b) => Formula::implies(subst_rec(a, bindings), subst_rec(b, bindings)),
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            let q = if matches!(f, Formula::Forall(..)) {
                Quantifier::Forall
            } else {
                Quantifier::Exists
            };
            let mut inner = bindings.clone();
            inner.remove(&v.name);
            let body_free: BTreeSet<String> = g.free_vars().into_iter().map(|v| v.name).collect();
            inner.retain(|k, _| body_free.contains(k));
            let captured = inner.values().any(|t| t.var_names().contains(&v.name));
            if !captured {
                return Formula::quantified(q, v.clone(), subst_rec(g, &inner));
            }
            let mut taken = g.all_var_names();
            for (k, t) in &inner {
                taken.insert(k.clone());
                taken.extend(t.var_names());
            }
            let fresh = Var::new(primed(&v.name, &taken), v.sort.clone());
            let mut rename = BTreeMap::new();
            rename.insert(v.name.clone(), fresh.term());
            let renamed = subst_rec(g, &rename);
            Formula::quantified(q, fresh, subst_rec(&renamed, &inner))
        }
    }
}

/// Renames bound variables so that every binder has a distinct name that
/// also differs from all free variable names.
pub fn rename_apart(f: &Formula) -> Formula {
    let mut taken: BTreeSet<String> = f.all_var_names();
    let mut seen: BTreeSet<String> = f.free_vars().into_iter().map(|v| v.name).collect();
    rename_rec(f, &mut taken, &mut seen)
}

fn rename_rec(f: &Formula, taken: &mut BTreeSet<String>, seen: &mut BTreeSet<String>) -> Formula {
    match f {
        Formula::Eq(..) => f.clone(),
        Formula::Not(g) => Formula::not(rename_rec(g, taken, seen)),
        Formula::And(a, b) => Formula::and(rename_rec(a, taken, seen), rename_rec(b, taken, seen)),
        Formula::Or(a, b) => Formula::or(rename_rec(a, taken, seen), rename_rec(b, taken, seen)),
        Formula::Implies(a, b) => Formula::implies(rename_rec(a, taken, seen), rename_rec(b, taken, seen)),
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            let q = if matches!(f, Formula::Forall(..)) {
                Quantifier::Forall
            } else {
                Quantifier::Exists
            };
            let (v, body) = if seen.contains(&v.name) {
                let fresh = Var::new(primed(&v.name, taken), v.sort.clone());
                taken.insert(fresh.name.clone());
                let mut m = BTreeMap::new();
                m.insert(v.name.clone(), fresh.term());
                (fresh, subst_rec(g, &m))
            } else {
                (v.clone(), (**g).clone())
            };
            seen.insert(v.name.clone());
            Formula::quantified(q, v, rename_rec(&body, taken, seen))
        }
    }
}

/// Pulls all quantifiers to the front. Quantifier-free input is returned
/// unchanged.
pub fn to_prenex(f: &Formula) -> Formula {
    if f.is_quantifier_free() {
        return f.clone();
    }
    let (prefix, matrix) = pull(&rename_apart(f));
    prefix
        .into_iter()
        .rev()
        .fold(matrix, |acc, (q, v)| Formula::quantified(q, v, acc))
}

fn dual(prefix: Vec<(Quantifier, Var)>) -> Vec<(Quantifier, Var)> {
    prefix.into_iter().map(|(q, v)| (q.dual(), v)).collect()
}

fn pull(f: &Formula) -> (Vec<(Quantifier, Var)>, Formula) {
    match f {
        Formula::Eq(..) => (vec![], f.clone()),
        Formula::Not(g) => {
            let (p, m) = pull(g);
            (dual(p), Formula::not(m))
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            let (pa, ma) = pull(a);
            let (pb, mb) = pull(b);
            let mut prefix = if matches!(f, Formula::Implies(..)) {
                dual(pa)
            } else {
                pa
            };
            prefix.extend(pb);
            let m = match f {
                Formula::And(..) => Formula::and(ma, mb),
                Formula::Or(..) => Formula::or(ma, mb),
                _ => Formula::implies(ma, mb),
            };
            (prefix, m)
        }
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            let q = if matches!(f, Formula::Forall(..)) {
                Quantifier::Forall
            } else {
                Quantifier::Exists
            };
            let (mut p, m) = pull(g);
            p.insert(0, (q, v.clone()));
            (p, m)
        }
    }
}

/// Binds every free variable by an outer universal quantifier.
pub fn universal_closure(f: &Formula) -> Formula {
    f.free_vars()
        .into_iter()
        .rev()
        .fold(f.clone(), |acc, v| Formula::forall(v, acc))
}
