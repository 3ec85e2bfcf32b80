//! Exact arithmetic in the free algebra ℤ⟨X⟩ and translation of arithmetic
//! ground terms into it.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::{Clause, Formula, Term};

/// Indeterminate identifier.
pub type Letter = u32;

/// A word over the indeterminates; the empty word is the unit monomial.
pub type Word = Vec<Letter>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("term `{0}` contains a non-arithmetic function symbol")]
    NonArithmeticSymbol(String),
    #[error("term `{0}` is not ground")]
    NotGround(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyParseError {
    #[error("unknown indeterminate `{0}`")]
    UnknownIndeterminate(String),
    #[error("malformed polynomial near `{0}`")]
    Malformed(String),
}

/// Integer linear combination of words. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<(Word, BigInt)>", into = "Vec<(Word, BigInt)>")]
pub struct NCPolynomial {
    terms: BTreeMap<Word, BigInt>,
}

impl From<Vec<(Word, BigInt)>> for NCPolynomial {
    fn from(terms: Vec<(Word, BigInt)>) -> Self {
        Self::from_terms(terms)
    }
}

impl From<NCPolynomial> for Vec<(Word, BigInt)> {
    fn from(p: NCPolynomial) -> Self {
        p.terms.into_iter().collect()
    }
}

impl NCPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(BigInt::one(), Word::new())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c.into(), Word::new())
    }

    pub fn var(x: Letter) -> Self {
        Self::monomial(BigInt::one(), vec![x])
    }

    pub fn word(w: Word) -> Self {
        Self::monomial(BigInt::one(), w)
    }

    pub fn monomial(c: BigInt, w: Word) -> Self {
        let mut p = Self::zero();
        p.add_term(w, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Word, BigInt)>) -> Self {
        let mut p = Self::zero();
        for (w, c) in terms {
            p.add_term(w, c);
        }
        p
    }

    /// Adds `c·w` in place.
    pub fn add_term(&mut self, w: Word, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &[Letter]) -> BigInt {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Vec::len).max()
    }

    pub fn letters(&self) -> Vec<Letter> {
        let mut out: Vec<Letter> = self.terms.keys().flatten().copied().collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(w, d)| (w.clone(), d * c)).collect(),
        }
    }

    /// `c · left · self · right`.
    pub fn sandwich(&self, c: &BigInt, left: &[Letter], right: &[Letter]) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(w, d)| {
                    let mut nw = Vec::with_capacity(left.len() + w.len() + right.len());
                    nw.extend_from_slice(left);
                    nw.extend_from_slice(w);
                    nw.extend_from_slice(right);
                    (nw, d * c)
                })
                .collect(),
        }
    }

    /// Renders with words written as `*`-joined names, highest degree first.
    pub fn render(&self, names: &IndeterminateTable) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut terms: Vec<(&Word, &BigInt)> = self.terms.iter().collect();
        terms.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(b.0)));
        let mut out = String::new();
        for (i, (w, c)) in terms.into_iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            let word = render_word(w, names);
            if w.is_empty() {
                let _ = write!(out, "{mag}");
            } else if mag.is_one() {
                out.push_str(&word);
            } else {
                let _ = write!(out, "{mag}*{word}");
            }
        }
        out
    }

    /// Parses the rendering produced by [`NCPolynomial::render`].
    pub fn parse(text: &str, names: &IndeterminateTable) -> Result<Self, PolyParseError> {
        let text = text.trim();
        if text == "0" {
            return Ok(Self::zero());
        }
        let mut p = Self::zero();
        let mut rest = text;
        let mut first = true;
        while !rest.is_empty() {
            let (neg, body) = if first {
                match rest.strip_prefix('-') {
                    Some(r) => (true, r.trim_start()),
                    None => (false, rest),
                }
            } else if let Some(r) = rest.strip_prefix("- ") {
                (true, r)
            } else if let Some(r) = rest.strip_prefix("+ ") {
                (false, r)
            } else {
                return Err(PolyParseError::Malformed(rest.to_string()));
            };
            first = false;
            let end = body
                .find(" + ")
                .into_iter()
                .chain(body.find(" - "))
                .min()
                .unwrap_or(body.len());
            let (term, tail) = body.split_at(end);
            rest = tail.trim_start();
            let mut coeff = BigInt::one();
            let mut word = Word::new();
            for (k, factor) in term.split('*').enumerate() {
                let factor = factor.trim();
                if k == 0 && factor.chars().next().is_some_and(|c| c.is_ascii_digit()) {
                    coeff = factor
                        .parse()
                        .map_err(|_| PolyParseError::Malformed(term.to_string()))?;
                } else if factor.is_empty() {
                    return Err(PolyParseError::Malformed(term.to_string()));
                } else {
                    word.push(
                        names
                            .get(factor)
                            .ok_or_else(|| PolyParseError::UnknownIndeterminate(factor.to_string()))?,
                    );
                }
            }
            p.add_term(word, if neg { -coeff } else { coeff });
        }
        Ok(p)
    }
}

pub fn render_word(w: &[Letter], names: &IndeterminateTable) -> String {
    if w.is_empty() {
        return "1".to_string();
    }
    w.iter().map(|&x| names.name(x)).collect::<Vec<_>>().join("*")
}

pub fn parse_word(text: &str, names: &IndeterminateTable) -> Result<Word, PolyParseError> {
    let text = text.trim();
    if text == "1" {
        return Ok(Word::new());
    }
    text.split('*')
        .map(|n| {
            names
                .get(n.trim())
                .ok_or_else(|| PolyParseError::UnknownIndeterminate(n.to_string()))
        })
        .collect()
}

impl Add for &NCPolynomial {
    type Output = NCPolynomial;
    fn add(self, rhs: &NCPolynomial) -> NCPolynomial {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl Sub for &NCPolynomial {
    type Output = NCPolynomial;
    fn sub(self, rhs: &NCPolynomial) -> NCPolynomial {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), -c);
        }
        out
    }
}

impl Neg for &NCPolynomial {
    type Output = NCPolynomial;
    fn neg(self) -> NCPolynomial {
        NCPolynomial {
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }
}

impl Mul for &NCPolynomial {
    type Output = NCPolynomial;
    fn mul(self, rhs: &NCPolynomial) -> NCPolynomial {
        let mut out = NCPolynomial::zero();
        for (u, a) in &self.terms {
            for (v, b) in &rhs.terms {
                let mut w = u.clone();
                w.extend_from_slice(v);
                out.add_term(w, a * b);
            }
        }
        out
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for NCPolynomial {
            type Output = NCPolynomial;
            fn $m(self, rhs: NCPolynomial) -> NCPolynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for NCPolynomial {
    type Output = NCPolynomial;
    fn neg(self) -> NCPolynomial {
        -&self
    }
}

/// Bijection between constant names and indeterminate ids, assigned in
/// order of first appearance.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct IndeterminateTable {
    names: Vec<String>,
    index: HashMap<String, Letter>,
}

impl From<Vec<String>> for IndeterminateTable {
    fn from(names: Vec<String>) -> Self {
        Self::from_names(names)
    }
}

impl From<IndeterminateTable> for Vec<String> {
    fn from(t: IndeterminateTable) -> Self {
        t.names
    }
}

impl IndeterminateTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names(names: impl IntoIterator<Item = String>) -> Self {
        let mut t = Self::new();
        for n in names {
            t.intern(&n);
        }
        t
    }

    pub fn intern(&mut self, name: &str) -> Letter {
        if let Some(&x) = self.index.get(name) {
            return x;
        }
        let x = self.names.len() as Letter;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), x);
        x
    }

    pub fn get(&self, name: &str) -> Option<Letter> {
        self.index.get(name).copied()
    }

    pub fn name(&self, x: Letter) -> &str {
        &self.names[x as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Interns every nonzero constant of `f` in order of appearance.
    pub fn intern_formula(&mut self, f: &Formula) {
        for c in f.constants() {
            self.intern(&c.name);
        }
    }
}

/// Maps an arithmetic ground term to its polynomial. Zero constants go to 0
/// and every other constant, identity morphisms included, becomes an
/// indeterminate.
pub fn translate_term(t: &Term, tbl: &mut IndeterminateTable) -> Result<NCPolynomial, TranslateError> {
    Ok(match t {
        Term::Var(_) => return Err(TranslateError::NotGround(t.to_string())),
        Term::App(..) => return Err(TranslateError::NonArithmeticSymbol(t.to_string())),
        Term::Zero(_) => NCPolynomial::zero(),
        Term::Const(c) => NCPolynomial::var(tbl.intern(&c.name)),
        Term::Neg(s) => -translate_term(s, tbl)?,
        Term::Add(s, u) => translate_term(s, tbl)? + translate_term(u, tbl)?,
        Term::Mul(s, u) => translate_term(s, tbl)? * translate_term(u, tbl)?,
    })
}

/// Quantifier-free formula whose literals carry the difference polynomial
/// of their two sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolyFormula {
    Eq(NCPolynomial),
    Not(Box<PolyFormula>),
    And(Box<PolyFormula>, Box<PolyFormula>),
    Or(Box<PolyFormula>, Box<PolyFormula>),
    Implies(Box<PolyFormula>, Box<PolyFormula>),
}

/// Translates an arithmetic ground sentence literal by literal.
pub fn translate(phi: &Formula, tbl: &mut IndeterminateTable) -> Result<PolyFormula, TranslateError> {
    let b = Box::new;
    Ok(match phi {
        Formula::Eq(s, t) => PolyFormula::Eq(translate_term(s, tbl)? - translate_term(t, tbl)?),
        Formula::Not(g) => PolyFormula::Not(b(translate(g, tbl)?)),
        Formula::And(x, y) => PolyFormula::And(b(translate(x, tbl)?), b(translate(y, tbl)?)),
        Formula::Or(x, y) => PolyFormula::Or(b(translate(x, tbl)?), b(translate(y, tbl)?)),
        Formula::Implies(x, y) => PolyFormula::Implies(b(translate(x, tbl)?), b(translate(y, tbl)?)),
        Formula::Forall(v, _) | Formula::Exists(v, _) => return Err(TranslateError::NotGround(v.name.clone())),
    })
}

/// Generator polynomials `s − t` of the negative literals and candidate
/// polynomials `p − q` of the positive literals of a clause.
pub fn translate_clause(
    c: &Clause,
    tbl: &mut IndeterminateTable,
) -> Result<(Vec<NCPolynomial>, Vec<NCPolynomial>), TranslateError> {
    let mut gens = Vec::with_capacity(c.negatives.len());
    for (s, t) in &c.negatives {
        gens.push(translate_term(s, tbl)? - translate_term(t, tbl)?);
    }
    let mut cands = Vec::with_capacity(c.positives.len());
    for (p, q) in &c.positives {
        cands.push(translate_term(p, tbl)? - translate_term(q, tbl)?);
    }
    Ok((gens, cands))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Sort;

    fn xy() -> (NCPolynomial, NCPolynomial) {
        (NCPolynomial::var(0), NCPolynomial::var(1))
    }

    #[test]
    fn additive_inverse() {
        let (x, y) = xy();
        let p = &(&x * &y) + &NCPolynomial::constant(3);
        assert!((&p + &(-&p)).is_zero());
    }

    #[test]
    fn multiplication_is_noncommutative() {
        let (x, y) = xy();
        assert_eq!(&x * &y, NCPolynomial::word(vec![0, 1]));
        assert_ne!(&x * &y, &y * &x);
    }

    #[test]
    fn difference_of_squares_expands() {
        let (x, y) = xy();
        let lhs = &(&x + &y) * &(&x - &y);
        let expected = NCPolynomial::from_terms([
            (vec![0, 0], BigInt::from(1)),
            (vec![0, 1], BigInt::from(-1)),
            (vec![1, 0], BigInt::from(1)),
            (vec![1, 1], BigInt::from(-1)),
        ]);
        assert_eq!(lhs, expected);
    }

    #[test]
    fn identity_constants_are_indeterminates() {
        let uv = Sort::new("u", "v");
        let uu = Sort::new("u", "u");
        let x = Term::constant("x", uv.clone());
        let iu = Term::constant("iu", uu);
        let mut tbl = IndeterminateTable::new();
        let f = Formula::eq(Term::mul(x.clone(), iu), x);
        let PolyFormula::Eq(p) = translate(&f, &mut tbl).unwrap() else {
            panic!()
        };
        assert_eq!(p.render(&tbl), "x*iu - x");
        assert_eq!(tbl.names(), ["x".to_string(), "iu".to_string()]);
    }

    #[test]
    fn zero_constants_vanish() {
        let uv = Sort::new("u", "v");
        let c = Term::constant("c", uv.clone());
        let mut tbl = IndeterminateTable::new();
        let f = Formula::eq(Term::add(c.clone(), Term::neg(c)), Term::zero(uv.clone()));
        assert_eq!(translate(&f, &mut tbl).unwrap(), PolyFormula::Eq(NCPolynomial::zero()));
        let z = Formula::eq(Term::zero(uv.clone()), Term::zero(uv));
        assert_eq!(translate(&z, &mut tbl).unwrap(), PolyFormula::Eq(NCPolynomial::zero()));
    }

    #[test]
    fn render_parse_round_trip() {
        let tbl = IndeterminateTable::from_names(["x".to_string(), "y".to_string()]);
        let p = NCPolynomial::from_terms([
            (vec![0, 1], BigInt::from(3)),
            (vec![0], BigInt::from(-1)),
            (vec![], BigInt::from(2)),
        ]);
        let text = p.render(&tbl);
        assert_eq!(text, "3*x*y - x + 2");
        assert_eq!(NCPolynomial::parse(&text, &tbl).unwrap(), p);
        let q = -&p;
        assert_eq!(NCPolynomial::parse(&q.render(&tbl), &tbl).unwrap(), q);
    }
}
