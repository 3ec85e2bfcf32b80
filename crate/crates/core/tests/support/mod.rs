//! Test-only oracles and generators shared by the integration suites.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use opstat_core::logic::{Formula, Sort, Term};
use opstat_core::ncpoly::{Letter, NCPolynomial, Word};
use rand::Rng;

type Row = BTreeMap<Word, BigInt>;

fn row_of(p: &NCPolynomial) -> Row {
    p.terms().map(|(w, c)| (w.clone(), c.clone())).collect()
}

fn lead(r: &Row) -> Option<(Word, BigInt)> {
    r.iter().next_back().map(|(w, c)| (w.clone(), c.clone()))
}

fn axpy(r: &mut Row, k: &BigInt, b: &Row) {
    for (w, c) in b {
        let e = r.entry(w.clone()).or_insert_with(BigInt::zero);
        *e += k * c;
        if e.is_zero() {
            r.remove(w);
        }
    }
}

fn scale(r: &Row, k: &BigInt) -> Row {
    r.iter()
        .map(|(w, c)| (w.clone(), c * k))
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

/// A ℤ-lattice in echelon form, keyed by pivot word.
#[derive(Default)]
pub struct Lattice {
    rows: BTreeMap<Word, Row>,
}

impl Lattice {
    pub fn insert(&mut self, mut r: Row) {
        while let Some((p, c)) = lead(&r) {
            let Some(b) = self.rows.get(&p).cloned() else {
                let r = if c.is_negative() {
                    scale(&r, &BigInt::from(-1))
                } else {
                    r
                };
                self.rows.insert(p, r);
                return;
            };
            let a = b[&p].clone();
            if c.is_multiple_of(&a) {
                axpy(&mut r, &-(&c / &a), &b);
                continue;
            }
            let e = a.extended_gcd(&c);
            let (g, s, t) = (e.gcd, e.x, e.y);
            let mut n = scale(&b, &s);
            axpy(&mut n, &t, &r);
            let mut rest = scale(&b, &(&c / &g));
            axpy(&mut rest, &-(&a / &g), &r);
            self.rows.insert(p, n);
            r = rest;
        }
    }

    pub fn contains(&self, f: &NCPolynomial) -> bool {
        let mut r = row_of(f);
        while let Some((p, c)) = lead(&r) {
            let Some(b) = self.rows.get(&p) else { return false };
            let a = &b[&p];
            if !c.is_multiple_of(a) {
                return false;
            }
            axpy(&mut r, &-(&c / a), b);
        }
        true
    }
}

pub fn words_up_to(letters: &[Letter], d: usize) -> Vec<Word> {
    let mut out = vec![Word::new()];
    let mut layer = vec![Word::new()];
    for _ in 0..d {
        let mut next = Vec::new();
        for w in &layer {
            for &x in letters {
                let mut v = w.clone();
                v.push(x);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Brute-force membership: is `f` an integer combination of the products
/// `a·g·b` with `|a| + |b| ≤ d`? Sound for membership; a negative answer
/// only excludes certificates within the cofactor bound.
pub fn in_truncated_ideal(f: &NCPolynomial, generators: &[NCPolynomial], letters: &[Letter], d: usize) -> bool {
    let words = words_up_to(letters, d);
    let mut lat = Lattice::default();
    for g in generators {
        for a in &words {
            for b in &words {
                if a.len() + b.len() <= d {
                    lat.insert(row_of(&g.sandwich(&BigInt::from(1), a, b)));
                }
            }
        }
    }
    lat.contains(f)
}

pub fn random_poly(rng: &mut impl Rng, letters: &[Letter], max_deg: usize, max_terms: usize) -> NCPolynomial {
    let n = rng.gen_range(1..=max_terms);
    NCPolynomial::from_terms((0..n).map(|_| {
        let len = rng.gen_range(0..=max_deg);
        let w: Word = (0..len).map(|_| letters[rng.gen_range(0..letters.len())]).collect();
        let mut c = rng.gen_range(-3i64..=3);
        if c == 0 {
            c = 1;
        }
        (w, BigInt::from(c))
    }))
}

/// Random ground term of sort `u → u` over the given constants.
pub fn random_term(rng: &mut impl Rng, consts: &[Term], depth: usize) -> Term {
    let s = Sort::new("u", "u");
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..8) {
            0 => Term::zero(s),
            _ => consts[rng.gen_range(0..consts.len())].clone(),
        };
    }
    match rng.gen_range(0..4) {
        0 => Term::neg(random_term(rng, consts, depth - 1)),
        1 => Term::add(random_term(rng, consts, depth - 1), random_term(rng, consts, depth - 1)),
        _ => Term::mul(random_term(rng, consts, depth - 1), random_term(rng, consts, depth - 1)),
    }
}

/// Random quantifier-free formula over the given atoms.
pub fn random_formula(rng: &mut impl Rng, atoms: &[Formula], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return atoms[rng.gen_range(0..atoms.len())].clone();
    }
    let k = rng.gen_range(0..4);
    let mut sub = || random_formula(rng, atoms, depth - 1);
    match k {
        0 => Formula::not(sub()),
        1 => Formula::and(sub(), sub()),
        2 => Formula::or(sub(), sub()),
        _ => Formula::implies(sub(), sub()),
    }
}
