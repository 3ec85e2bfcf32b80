use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::ncpoly::{Letter, NCPolynomial, Word};
use num_bigint::BigInt;

/// Degree-lexicographic order on words, optionally refined into an
/// elimination order.
///
/// Letters listed earlier in `precedence` are smaller; letters missing from
/// it rank above all listed ones, by id. With an elimination block, words
/// are first compared by how many eliminated letters they contain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "OrderSpec", into = "OrderSpec")]
pub struct MonomialOrder {
    precedence: Vec<Letter>,
    elimination: BTreeSet<Letter>,
    rank: HashMap<Letter, u32>,
}

#[derive(Serialize, Deserialize)]
struct OrderSpec {
    precedence: Vec<Letter>,
    elimination: BTreeSet<Letter>,
}

impl From<OrderSpec> for MonomialOrder {
    fn from(s: OrderSpec) -> Self {
        MonomialOrder::deglex(s.precedence).with_elimination(s.elimination)
    }
}

impl From<MonomialOrder> for OrderSpec {
    fn from(o: MonomialOrder) -> Self {
        OrderSpec {
            precedence: o.precedence,
            elimination: o.elimination,
        }
    }
}

impl MonomialOrder {
    pub fn deglex(precedence: Vec<Letter>) -> Self {
        let mut seen = BTreeSet::new();
        let precedence: Vec<Letter> = precedence.into_iter().filter(|x| seen.insert(*x)).collect();
        let rank = precedence.iter().enumerate().map(|(i, &x)| (x, i as u32)).collect();
        Self {
            precedence,
            elimination: BTreeSet::new(),
            rank,
        }
    }

    pub fn with_elimination(mut self, letters: impl IntoIterator<Item = Letter>) -> Self {
        self.elimination.extend(letters);
        self
    }

    pub fn precedence(&self) -> &[Letter] {
        &self.precedence
    }

    pub fn elimination(&self) -> &BTreeSet<Letter> {
        &self.elimination
    }

    pub fn is_eliminated(&self, x: Letter) -> bool {
        self.elimination.contains(&x)
    }

    pub(crate) fn rank(&self, x: Letter) -> u32 {
        match self.rank.get(&x) {
            Some(&r) => r,
            None => self.precedence.len() as u32 + x,
        }
    }

    pub(crate) fn letter(&self, r: u32) -> Letter {
        let n = self.precedence.len() as u32;
        if r < n {
            self.precedence[r as usize]
        } else {
            r - n
        }
    }

    /// Sort key whose lexicographic order is this monomial order.
    pub(crate) fn key(&self, w: &[Letter]) -> Vec<u32> {
        let mut k = Vec::with_capacity(w.len() + 2);
        k.push(w.iter().filter(|x| self.is_eliminated(**x)).count() as u32);
        k.push(w.len() as u32);
        k.extend(w.iter().map(|&x| self.rank(x)));
        k
    }

    pub fn cmp_words(&self, a: &[Letter], b: &[Letter]) -> Ordering {
        self.key(a).cmp(&self.key(b))
    }

    pub fn leading_term(&self, p: &NCPolynomial) -> Option<(Word, BigInt)> {
        p.terms()
            .max_by(|a, b| self.cmp_words(a.0, b.0))
            .map(|(w, c)| (w.clone(), c.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_dominates_precedence() {
        let o = MonomialOrder::deglex(vec![1, 0]);
        assert_eq!(o.cmp_words(&[1, 1], &[0]), Ordering::Greater);
        assert_eq!(o.cmp_words(&[1], &[0]), Ordering::Less);
        assert_eq!(o.cmp_words(&[1, 0], &[0, 1]), Ordering::Less);
    }

    #[test]
    fn elimination_block_dominates_degree() {
        let o = MonomialOrder::deglex(vec![0, 1, 2]).with_elimination([2]);
        assert_eq!(o.cmp_words(&[2], &[0, 1, 0, 1]), Ordering::Greater);
        assert_eq!(o.cmp_words(&[2, 0], &[0, 2]), Ordering::Greater);
    }

    #[test]
    fn compatible_with_multiplication() {
        let o = MonomialOrder::deglex(vec![0, 1]).with_elimination([1]);
        let pairs = [
            (vec![0u32, 1], vec![1u32, 0]),
            (vec![0], vec![1]),
            (vec![0, 0, 0], vec![1]),
        ];
        for (a, b) in pairs {
            let base = o.cmp_words(&a, &b);
            for l in [vec![], vec![0], vec![1, 0]] {
                for r in [vec![], vec![1], vec![0, 1]] {
                    let la: Vec<u32> = l.iter().chain(&a).chain(&r).copied().collect();
                    let lb: Vec<u32> = l.iter().chain(&b).chain(&r).copied().collect();
                    assert_eq!(o.cmp_words(&la, &lb), base);
                }
            }
        }
    }
}
