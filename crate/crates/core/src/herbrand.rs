//! Herbrand normal forms and fair enumeration of Herbrand expansions.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::{
    substitute, to_prenex, universal_closure, Formula, FunSym, LogicError, Quantifier, Signature, Sort, Term, Var,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HerbrandError {
    #[error("sort {0} has no ground terms")]
    EmptySortUniverse(Sort),
    #[error("hint binds `{0}`, which is not an existential variable")]
    UnknownHintVariable(String),
    #[error("hint term `{0}` is not ground")]
    NonGroundHint(String),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// A symbol introduced by Herbrandisation and the universal variable it
/// replaced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Introduced {
    pub symbol: String,
    pub replaced: Var,
    /// Existential variables the new symbol depends on; empty for constants.
    pub arguments: Vec<Var>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HerbrandResult {
    pub sentence: Formula,
    pub extended_signature: Signature,
    pub introduced: Vec<Introduced>,
}

impl HerbrandResult {
    /// The term standing for a replaced universal variable, if it became a
    /// constant.
    pub fn constant_for(&self, var_name: &str) -> Option<Term> {
        let i = self
            .introduced
            .iter()
            .find(|i| i.replaced.name == var_name && i.arguments.is_empty())?;
        Some(Term::constant(i.symbol.clone(), i.replaced.sort.clone()))
    }

    /// Existential prefix and quantifier-free matrix of the sentence.
    pub fn split(&self) -> (Vec<Var>, Formula) {
        split_prefix(&self.sentence)
    }
}

/// Leading quantifier block and the remaining formula.
pub fn split_prefix(f: &Formula) -> (Vec<Var>, Formula) {
    let mut vars = Vec::new();
    let mut cur = f;
    while let Formula::Exists(v, g) | Formula::Forall(v, g) = cur {
        vars.push(v.clone());
        cur = g;
    }
    (vars, cur.clone())
}

/// Eliminates universal quantifiers: free variables are closed universally,
/// the result is prenexed, and each universal variable becomes a fresh
/// constant (no preceding existentials) or a fresh function of the
/// preceding existential variables.
pub fn herbrandise(sig: &Signature, f: &Formula) -> HerbrandResult {
    let mut sig = sig.clone();
    let prenex = to_prenex(&universal_closure(f));
    let mut prefix = Vec::new();
    let mut cur = &prenex;
    loop {
        match cur {
            Formula::Forall(v, g) => {
                prefix.push((Quantifier::Forall, v.clone()));
                cur = g;
            }
            Formula::Exists(v, g) => {
                prefix.push((Quantifier::Exists, v.clone()));
                cur = g;
            }
            _ => break,
        }
    }
    let mut matrix = cur.clone();
    let mut exist: Vec<Var> = Vec::new();
    let mut introduced = Vec::new();
    for (q, v) in prefix {
        match q {
            Quantifier::Exists => exist.push(v),
            Quantifier::Forall => {
                let hint = v.name.trim_end_matches('\'');
                let replacement = if exist.is_empty() {
                    sig.fresh_constant(hint, v.sort.clone()).term()
                } else {
                    let f: FunSym =
                        sig.fresh_function(hint, exist.iter().map(|x| x.sort.clone()).collect(), v.sort.clone());
                    Term::app(f, exist.iter().map(Var::term).collect())
                };
                let symbol = match &replacement {
                    Term::Const(c) => c.name.clone(),
                    Term::App(f, _) => f.name.clone(),
                    _ => unreachable!(),
                };
                introduced.push(Introduced {
                    symbol,
                    replaced: v.clone(),
                    arguments: exist.clone(),
                });
                let mut b = BTreeMap::new();
                b.insert(v.name.clone(), replacement);
                matrix = substitute(&matrix, &b).expect("replacement has the variable's sort");
            }
        }
    }
    let sentence = exist
        .iter()
        .rev()
        .fold(matrix, |acc, v| Formula::exists(v.clone(), acc));
    HerbrandResult {
        sentence,
        extended_signature: sig,
        introduced,
    }
}

/// Ground terms of each sort, generated lazily by increasing size.
#[derive(Clone, Debug)]
pub struct GroundTerms {
    sig: Signature,
    /// Terms of exactly a given size, per sort.
    by_size: HashMap<(Sort, usize), Vec<Term>>,
    /// Flattened stream per sort and the next size to append.
    streams: HashMap<Sort, (Vec<Term>, usize)>,
}

/// Largest size tried before declaring a sort empty.
const MAX_EMPTY_PROBE: usize = 8;

impl GroundTerms {
    pub fn new(sig: &Signature) -> Self {
        GroundTerms {
            sig: sig.clone(),
            by_size: HashMap::new(),
            streams: HashMap::new(),
        }
    }

    /// All ground terms of `sort` with exactly `size` nodes, ordered by
    /// the term order.
    pub fn of_size(&mut self, sort: &Sort, size: usize) -> Vec<Term> {
        if let Some(ts) = self.by_size.get(&(sort.clone(), size)) {
            return ts.clone();
        }
        let mut out = Vec::new();
        let objects_known = self.sig.objects.contains(&sort.source) && self.sig.objects.contains(&sort.target);
        if size == 1 {
            for (name, s) in &self.sig.constants {
                if s == sort {
                    out.push(Term::constant(name.clone(), s.clone()));
                }
            }
            if objects_known {
                out.push(Term::zero(sort.clone()));
            }
        } else if size > 1 && objects_known {
            for t in self.of_size(sort, size - 1) {
                out.push(Term::neg(t));
            }
            for i in 1..size - 1 {
                let left = self.of_size(sort, i);
                let right = self.of_size(sort, size - 1 - i);
                for l in &left {
                    for r in &right {
                        out.push(Term::add(l.clone(), r.clone()));
                    }
                }
            }
            let objects: Vec<String> = self.sig.objects.iter().cloned().collect();
            for w in &objects {
                for i in 1..size - 1 {
                    let left = self.of_size(&Sort::new(w.clone(), sort.target.clone()), i);
                    if left.is_empty() {
                        continue;
                    }
                    let right = self.of_size(&Sort::new(sort.source.clone(), w.clone()), size - 1 - i);
                    for l in &left {
                        for r in &right {
                            out.push(Term::mul(l.clone(), r.clone()));
                        }
                    }
                }
            }
            let funs: Vec<FunSym> = self
                .sig
                .functions
                .keys()
                .cloned()
                .collect::<Vec<_>>()
                .into_iter()
                .flat_map(|n| self.sig.overloads(&n))
                .filter(|f| f.sort.result == *sort)
                .collect();
            for f in funs {
                for args in self.argument_tuples(&f.sort.args, size - 1) {
                    out.push(Term::app(f.clone(), args));
                }
            }
        }
        out.sort();
        self.by_size.insert((sort.clone(), size), out.clone());
        out
    }

    fn argument_tuples(&mut self, sorts: &[Sort], total: usize) -> Vec<Vec<Term>> {
        if sorts.is_empty() {
            return if total == 0 { vec![vec![]] } else { vec![] };
        }
        let mut out = Vec::new();
        for first in 1..=total.saturating_sub(sorts.len() - 1) {
            let heads = self.of_size(&sorts[0], first);
            if heads.is_empty() {
                continue;
            }
            let tails = self.argument_tuples(&sorts[1..], total - first);
            for h in &heads {
                for t in &tails {
                    let mut v = vec![h.clone()];
                    v.extend(t.iter().cloned());
                    out.push(v);
                }
            }
        }
        out
    }

    /// The `i`-th ground term of `sort`, if the sort has that many.
    pub fn nth(&mut self, sort: &Sort, i: usize) -> Option<Term> {
        loop {
            let (len, next) = {
                let e = self.streams.entry(sort.clone()).or_insert_with(|| (Vec::new(), 1));
                (e.0.len(), e.1)
            };
            if i < len {
                return Some(self.streams[sort].0[i].clone());
            }
            if len == 0 && next > MAX_EMPTY_PROBE {
                return None;
            }
            let more = self.of_size(sort, next);
            let e = self.streams.get_mut(sort).unwrap();
            e.0.extend(more);
            e.1 += 1;
            if e.1 > 64 {
                return None;
            }
        }
    }
}

/// One element of the Herbrand expansion with the instantiation producing
/// it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundInstance {
    pub sentence: Formula,
    pub bindings: BTreeMap<String, Term>,
    pub from_hint: bool,
}

/// Fair stream over the Herbrand expansion of a sentence in Herbrand
/// normal form. Hints come first, then index tuples by increasing sum
/// (Cantor order) over the per-sort ground term streams.
#[derive(Clone, Debug)]
pub struct GroundEnumerator {
    prefix: Vec<Var>,
    matrix: Formula,
    terms: GroundTerms,
    hints: VecDeque<BTreeMap<String, Term>>,
    level: usize,
    pending: VecDeque<Vec<usize>>,
    done: bool,
}

/// Builds the enumerator. Hints may leave variables unbound; those are
/// filled with the first ground term of their sort.
pub fn expansion(
    sig: &Signature,
    h: &Formula,
    hints: Vec<BTreeMap<String, Term>>,
) -> Result<GroundEnumerator, HerbrandError> {
    let (prefix, matrix) = split_prefix(h);
    let mut terms = GroundTerms::new(sig);
    for v in &prefix {
        if terms.nth(&v.sort, 0).is_none() {
            return Err(HerbrandError::EmptySortUniverse(v.sort.clone()));
        }
    }
    for hint in &hints {
        for (name, t) in hint {
            let v = prefix
                .iter()
                .find(|v| &v.name == name)
                .ok_or_else(|| HerbrandError::UnknownHintVariable(name.clone()))?;
            if !t.is_ground() {
                return Err(HerbrandError::NonGroundHint(t.to_string()));
            }
            let s = sig.check_term(t)?;
            if s != v.sort {
                return Err(LogicError::SortMismatch {
                    term: t.to_string(),
                    expected: v.sort.to_string(),
                    actual: s.to_string(),
                }
                .into());
            }
        }
    }
    Ok(GroundEnumerator {
        prefix,
        matrix,
        terms,
        hints: hints.into(),
        level: 0,
        pending: VecDeque::new(),
        done: false,
    })
}

/// Index tuples of the given dimension with the given sum, lexicographic.
fn compositions(n: usize, sum: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return if sum == 0 { vec![vec![]] } else { vec![] };
    }
    if n == 1 {
        return vec![vec![sum]];
    }
    let mut out = Vec::new();
    for first in 0..=sum {
        for mut rest in compositions(n - 1, sum - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl GroundEnumerator {
    pub fn variables(&self) -> &[Var] {
        &self.prefix
    }

    pub fn matrix(&self) -> &Formula {
        &self.matrix
    }

    /// Grounds the matrix under `bindings`, filling unbound variables with
    /// the first ground term of their sort.
    pub fn instantiate(&mut self, bindings: &BTreeMap<String, Term>) -> GroundInstance {
        let mut full = bindings.clone();
        for v in &self.prefix {
            if !full.contains_key(&v.name) {
                let t = self.terms.nth(&v.sort, 0).expect("sorts checked non-empty");
                full.insert(v.name.clone(), t);
            }
        }
        GroundInstance {
            sentence: substitute(&self.matrix, &full).expect("bindings are well-sorted"),
            bindings: full,
            from_hint: false,
        }
    }
}

impl Iterator for GroundEnumerator {
    type Item = GroundInstance;

    fn next(&mut self) -> Option<GroundInstance> {
        if let Some(h) = self.hints.pop_front() {
            let mut inst = self.instantiate(&h);
            inst.from_hint = true;
            return Some(inst);
        }
        if self.done {
            return None;
        }
        if self.prefix.is_empty() {
            self.done = true;
            return Some(GroundInstance {
                sentence: self.matrix.clone(),
                bindings: BTreeMap::new(),
                from_hint: false,
            });
        }
        loop {
            while let Some(idx) = self.pending.pop_front() {
                let mut b = BTreeMap::new();
                let mut ok = true;
                for (v, &i) in self.prefix.clone().iter().zip(&idx) {
                    match self.terms.nth(&v.sort, i) {
                        Some(t) => {
                            b.insert(v.name.clone(), t);
                        }
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    return Some(self.instantiate(&b));
                }
            }
            self.pending = compositions(self.prefix.len(), self.level).into();
            self.level += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig_with(consts: &[&str]) -> Signature {
        let mut s = Signature::new();
        s.add_object("u").unwrap();
        for c in consts {
            s.add_constant(c, Sort::new("u", "u")).unwrap();
        }
        s
    }

    #[test]
    fn ground_sentence_is_unchanged() {
        let sig = sig_with(&["c"]);
        let c = Term::constant("c", Sort::new("u", "u"));
        let f = Formula::eq(c.clone(), c);
        let h = herbrandise(&sig, &f);
        assert_eq!(h.sentence, f);
        assert!(h.introduced.is_empty());
        let items: Vec<_> = expansion(&h.extended_signature, &h.sentence, vec![]).unwrap().collect();
        assert_eq!(items.len(), 1);
    }

    #[test]
    fn leading_universal_becomes_constant() {
        let mut sig = sig_with(&[]);
        let s = Sort::new("u", "u");
        let p = sig.add_function("p", vec![s.clone()], s.clone()).unwrap();
        let q = sig.add_function("q", vec![s.clone()], s.clone()).unwrap();
        let y = Var::new("y", s.clone());
        let f = Formula::forall(
            y.clone(),
            Formula::eq(
                Term::app(p.clone(), vec![y.term()]),
                Term::app(q.clone(), vec![y.term()]),
            ),
        );
        let h = herbrandise(&sig, &f);
        let c = Term::constant("_y", s);
        assert_eq!(
            h.sentence,
            Formula::eq(Term::app(p, vec![c.clone()]), Term::app(q, vec![c]))
        );
        assert_eq!(h.constant_for("y").unwrap().to_string(), "_y");
        assert!(h.extended_signature.check_sorts(&h.sentence).is_ok());
    }

    #[test]
    fn universal_after_existential_becomes_function() {
        let sig = sig_with(&["c"]);
        let s = Sort::new("u", "u");
        let x = Var::new("x", s.clone());
        let y = Var::new("y", s.clone());
        let f = Formula::exists(x.clone(), Formula::forall(y.clone(), Formula::eq(x.term(), y.term())));
        let h = herbrandise(&sig, &f);
        let (vars, m) = h.split();
        assert_eq!(vars, vec![x.clone()]);
        let Formula::Eq(_, Term::App(fy, args)) = m else {
            panic!()
        };
        assert_eq!(fy.sort.args, vec![s]);
        assert_eq!(args, vec![x.term()]);
        // fixed point
        assert_eq!(herbrandise(&h.extended_signature, &h.sentence).sentence, h.sentence);
    }

    #[test]
    fn enumeration_starts_with_constants() {
        let sig = sig_with(&["c", "d"]);
        let x = Var::new("x", Sort::new("u", "u"));
        let h = Formula::exists(x.clone(), Formula::eq(x.term(), x.term()));
        let first: Vec<String> = expansion(&sig, &h, vec![])
            .unwrap()
            .take(2)
            .map(|g| g.sentence.to_string())
            .collect();
        assert_eq!(first, vec!["c = c", "d = d"]);
    }

    #[test]
    fn hints_come_first() {
        let sig = sig_with(&["c", "d"]);
        let s = Sort::new("u", "u");
        let x = Var::new("x", s.clone());
        let h = Formula::exists(x.clone(), Formula::eq(x.term(), x.term()));
        let mut hint = BTreeMap::new();
        hint.insert(
            "x".to_string(),
            Term::mul(Term::constant("d", s.clone()), Term::constant("c", s)),
        );
        let first = expansion(&sig, &h, vec![hint]).unwrap().next().unwrap();
        assert!(first.from_hint);
        assert_eq!(first.sentence.to_string(), "d*c = d*c");
    }

    #[test]
    fn enumeration_is_fair_across_positions() {
        let sig = sig_with(&["c", "d"]);
        let s = Sort::new("u", "u");
        let x = Var::new("x", s.clone());
        let y = Var::new("y", s.clone());
        let h = Formula::exists(x.clone(), Formula::exists(y.clone(), Formula::eq(x.term(), y.term())));
        let mut gt = GroundTerms::new(&sig);
        let targets: Vec<Term> = (0..4).map(|i| gt.nth(&s, i).unwrap()).collect();
        let seen: Vec<GroundInstance> = expansion(&sig, &h, vec![]).unwrap().take(40).collect();
        for t in &targets {
            assert!(seen.iter().any(|g| &g.bindings["x"] == t));
            assert!(seen.iter().any(|g| &g.bindings["y"] == t));
        }
        for g in &seen {
            assert!(g.sentence.is_ground());
            assert!(sig.check_sorts(&g.sentence).is_ok());
        }
    }
}
