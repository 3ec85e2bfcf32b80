use std::collections::{BTreeMap, HashMap};

use num_traits::Signed;

use super::rewrite::{apply_universal_rules, RewriteRule};
use super::ProveError;
use crate::ackermann::{ackermann_reduce_all, AckermannOptions};
use crate::logic::{substitute, Formula, Signature, Sort, Term, Var};
use crate::membership::{find_witness, IdealPresentation, MonomialOrder};
use crate::ncpoly::{translate_term, IndeterminateTable, Letter, NCPolynomial};

/// Runs witness extraction for every dummy letter and returns the
/// solutions found; dummies without a solved form within `budget` are
/// omitted.
pub fn search_existential_witnesses(
    ideal: &IdealPresentation,
    dummies: &[Letter],
    budget: usize,
) -> BTreeMap<Letter, NCPolynomial> {
    dummies
        .iter()
        .filter_map(|&d| find_witness(ideal, d, budget).map(|w| (d, w)))
        .collect()
}

/// Rebuilds a term of sort `sort` from a polynomial whose indeterminates
/// name the given terms. Fails on nonzero constant terms and ill-sorted
/// products.
fn poly_to_term(
    p: &NCPolynomial,
    tbl: &IndeterminateTable,
    names: &HashMap<String, Term>,
    sort: &Sort,
) -> Option<Term> {
    let mut terms: Vec<(&Vec<Letter>, _)> = p.terms().collect();
    terms.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(b.0)));
    let mut acc: Option<Term> = None;
    for (w, c) in terms {
        if w.is_empty() {
            return None;
        }
        let factors: Vec<Term> = w
            .iter()
            .map(|&x| names.get(tbl.name(x)).cloned())
            .collect::<Option<_>>()?;
        let mono = Term::product(factors);
        let n: usize = c.abs().try_into().ok()?;
        let mut scaled = mono.clone();
        for _ in 1..n {
            scaled = Term::add(scaled, mono.clone());
        }
        if c.is_negative() {
            scaled = Term::neg(scaled);
        }
        acc = Some(match acc {
            None => scaled,
            Some(a) => Term::add(a, scaled),
        });
    }
    Some(acc.unwrap_or_else(|| Term::zero(sort.clone())))
}

/// Fills the unbound variables of `bindings` by witness search: each is
/// replaced by a dummy constant, every identity of the instantiated and
/// flattened matrix becomes an ideal generator, and the dummies together
/// with everything built from them are eliminated.
pub(crate) fn complete_bindings(
    sig: &Signature,
    prefix: &[Var],
    matrix: &Formula,
    bindings: &BTreeMap<String, Term>,
    rules: &[RewriteRule],
    budget: usize,
) -> Result<BTreeMap<String, Term>, ProveError> {
    let missing: Vec<&Var> = prefix.iter().filter(|v| !bindings.contains_key(&v.name)).collect();
    if missing.is_empty() {
        return Ok(BTreeMap::new());
    }
    let mut sig2 = sig.clone();
    let mut full = bindings.clone();
    let mut dummies = Vec::new();
    for v in &missing {
        let d = sig2.fresh_constant(&format!("w_{}", v.name), v.sort.clone());
        full.insert(v.name.clone(), d.term());
        dummies.push((v, d));
    }
    let inst = apply_universal_rules(&sig2, &substitute(matrix, &full)?, rules)?;
    let ack = ackermann_reduce_all(&sig2, &inst, AckermannOptions::default())?;

    let mut tbl = IndeterminateTable::new();
    let mut gens = Vec::new();
    for (s, t) in ack.flat.atoms() {
        gens.push(translate_term(&s, &mut tbl)? - translate_term(&t, &mut tbl)?);
    }
    let mut names: HashMap<String, Term> = HashMap::new();
    let mut eliminated = Vec::new();
    for x in 0..tbl.len() as Letter {
        let name = tbl.name(x).to_string();
        let original = match ack.table.iter().find(|i| i.constant.name == name) {
            Some(i) => ack.unflatten(&i.constant.term()),
            None => sig2.constant(&name).expect("translated constants are declared").term(),
        };
        let mut cs = Vec::new();
        original.constants(&mut cs);
        if dummies.iter().any(|(_, d)| cs.contains(d)) {
            eliminated.push(x);
        }
        names.insert(name, original);
    }
    let order = MonomialOrder::deglex((0..tbl.len() as Letter).collect()).with_elimination(eliminated);
    let ideal = IdealPresentation::with_order(gens, order);
    let letters: Vec<Letter> = dummies.iter().filter_map(|(_, d)| tbl.get(&d.name)).collect();
    let found = search_existential_witnesses(&ideal, &letters, budget);

    let mut out = BTreeMap::new();
    for (v, d) in &dummies {
        let Some(w) = tbl.get(&d.name).and_then(|x| found.get(&x)) else {
            continue;
        };
        let Some(t) = poly_to_term(w, &tbl, &names, &v.sort) else {
            continue;
        };
        if sig.check_term(&t).ok().as_ref() == Some(&v.sort) {
            out.insert(v.name.clone(), t);
        }
    }
    Ok(out)
}
