use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::order::MonomialOrder;
use super::{IdealPresentation, MembershipCertificate, MembershipVerdict, Summand};
use crate::ncpoly::{Letter, NCPolynomial};

/// Order key: `[eliminated-letter count, length, ranks...]`.
type Key = Vec<u32>;

fn word_of(k: &[u32]) -> &[u32] {
    &k[2..]
}

/// Polynomial with terms sorted by decreasing key.
#[derive(Clone, Debug, Default)]
struct KPoly(Vec<(Key, BigInt)>);

impl KPoly {
    fn lead(&self) -> &(Key, BigInt) {
        &self.0[0]
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn from_map(m: BTreeMap<Key, BigInt>) -> Self {
        KPoly(m.into_iter().rev().collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Src {
    Gen(usize),
    Elem(usize),
}

/// One term `coeff · left · src · right` of a derivation, in rank space.
#[derive(Clone, Debug)]
struct Step {
    coeff: BigInt,
    left: Vec<u32>,
    src: Src,
    right: Vec<u32>,
}

#[derive(Debug)]
struct Elem {
    poly: KPoly,
    active: bool,
    /// `poly` equals the sum of these terms.
    deriv: Vec<Step>,
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    ai: Vec<u32>,
    bi: Vec<u32>,
    aj: Vec<u32>,
    bj: Vec<u32>,
}

#[derive(Debug)]
enum Task {
    Adjoin(KPoly, Vec<Step>),
    Pair(Pair),
}

/// Tuning knobs of the completion procedure.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompletionOptions {
    /// Bounded mode: ambiguities whose word is longer are discarded, which
    /// forfeits the ability to prove non-membership.
    pub max_degree: Option<usize>,
}

type Expansion = Arc<Vec<(BigInt, Vec<u32>, usize, Vec<u32>)>>;

/// Term operations that count as one extra completion operation. Keeps a
/// budget meaningful when basis elements grow long.
const WORK_UNIT: u64 = 256;

/// Incremental computation of a strong Gröbner basis of a two-sided ideal
/// over ℤ, where every basis element keeps a derivation from the original
/// generators.
#[derive(Debug)]
pub struct CompletionState {
    ideal: IdealPresentation,
    order: MonomialOrder,
    elim_ranks: Vec<bool>,
    alphabet: Vec<u32>,
    elems: Vec<Elem>,
    /// Active elements indexed by the first rank of their leading word;
    /// elements with the empty leading word live under `u32::MAX`.
    index: HashMap<u32, Vec<usize>>,
    queue: BTreeMap<(usize, u8, u64), Task>,
    seq: u64,
    /// Ordered pairs of active elements with non-unit leading coefficients,
    /// whose ambiguities `wᵢ·m·wⱼ` form an infinite family.
    families: Vec<(usize, usize)>,
    horizon: Option<usize>,
    discarded: bool,
    ops: u64,
    /// Term operations done by the task in progress.
    work: u64,
    options: CompletionOptions,
    expansions: HashMap<usize, Expansion>,
}

impl CompletionState {
    /// Starts a completion. `alphabet` lists every indeterminate the ideal
    /// lives over; letters of the generators are always included.
    pub fn new(ideal: &IdealPresentation, alphabet: &[Letter], options: CompletionOptions) -> Self {
        let order = ideal.order.clone();
        let mut letters: Vec<Letter> = alphabet.to_vec();
        for g in &ideal.generators {
            letters.extend(g.letters());
        }
        letters.sort_unstable();
        letters.dedup();
        let mut alphabet: Vec<u32> = letters.iter().map(|&x| order.rank(x)).collect();
        alphabet.sort_unstable();
        let max_rank = alphabet.iter().copied().max().unwrap_or(0) as usize;
        let elim_ranks = (0..=max_rank)
            .map(|r| order.is_eliminated(order.letter(r as u32)))
            .collect();
        let mut st = CompletionState {
            ideal: ideal.clone(),
            order,
            elim_ranks,
            alphabet,
            elems: Vec::new(),
            index: HashMap::new(),
            queue: BTreeMap::new(),
            seq: 0,
            families: Vec::new(),
            horizon: None,
            discarded: false,
            ops: 0,
            work: 0,
            options,
            expansions: HashMap::new(),
        };
        for (g, p) in ideal.generators.iter().enumerate() {
            let kp = st.to_kpoly(p);
            if kp.is_zero() {
                continue;
            }
            let deriv = vec![Step {
                coeff: BigInt::one(),
                left: vec![],
                src: Src::Gen(g),
                right: vec![],
            }];
            st.push_adjoin(kp, deriv);
        }
        st
    }

    pub fn ideal(&self) -> &IdealPresentation {
        &self.ideal
    }

    /// Number of operations performed so far: one per processed ambiguity
    /// or adjunction attempt, plus one per `WORK_UNIT` term operations.
    pub fn operations(&self) -> u64 {
        self.ops
    }

    /// True once the basis is a finite strong Gröbner basis: nothing is
    /// pending, no infinite ambiguity family exists and nothing was
    /// discarded by a degree bound.
    pub fn is_complete(&self) -> bool {
        self.queue.is_empty() && self.families.is_empty() && !self.discarded
    }

    /// Active basis elements.
    pub fn basis(&self) -> Vec<NCPolynomial> {
        self.elems
            .iter()
            .filter(|e| e.active)
            .map(|e| self.to_poly(&e.poly))
            .collect()
    }

    fn is_elim_rank(&self, r: u32) -> bool {
        self.elim_ranks
            .get(r as usize)
            .copied()
            .unwrap_or_else(|| self.order.is_eliminated(self.order.letter(r)))
    }

    fn to_kpoly(&self, p: &NCPolynomial) -> KPoly {
        let mut terms: Vec<(Key, BigInt)> = p.terms().map(|(w, c)| (self.order.key(w), c.clone())).collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        KPoly(terms)
    }

    fn to_poly(&self, p: &KPoly) -> NCPolynomial {
        NCPolynomial::from_terms(p.0.iter().map(|(k, c)| (self.letters(word_of(k)), c.clone())))
    }

    fn letters(&self, ranks: &[u32]) -> Vec<Letter> {
        ranks.iter().map(|&r| self.order.letter(r)).collect()
    }

    fn concat_key(&self, left: &[u32], k: &[u32], right: &[u32]) -> Key {
        let extra = left.iter().chain(right).filter(|&&r| self.is_elim_rank(r)).count() as u32;
        let mut out = Vec::with_capacity(k.len() + left.len() + right.len());
        out.push(k[0] + extra);
        out.push(k[1] + (left.len() + right.len()) as u32);
        out.extend_from_slice(left);
        out.extend_from_slice(word_of(k));
        out.extend_from_slice(right);
        out
    }

    fn sandwich(&self, c: &BigInt, left: &[u32], p: &KPoly, right: &[u32]) -> KPoly {
        KPoly(
            p.0.iter()
                .map(|(k, d)| (self.concat_key(left, k, right), c * d))
                .collect(),
        )
    }

    fn enqueue(&mut self, degree: usize, kind: u8, task: Task) {
        self.seq += 1;
        self.queue.insert((degree, kind, self.seq), task);
    }

    fn push_adjoin(&mut self, p: KPoly, deriv: Vec<Step>) {
        let deg = word_of(&p.lead().0).len();
        self.enqueue(deg, 0, Task::Adjoin(p, deriv));
    }

    fn push_pair(&mut self, pair: Pair) {
        let deg = pair.ai.len() + word_of(&self.elems[pair.i].poly.lead().0).len() + pair.bi.len();
        if self.options.max_degree.is_some_and(|m| deg > m) {
            self.discarded = true;
            return;
        }
        self.enqueue(deg, 1, Task::Pair(pair));
    }

    /// Finds an active element whose leading term divides the term `c·k`.
    fn find_reducer(&self, k: &[u32], c: &BigInt) -> Option<(usize, usize)> {
        let w = word_of(k);
        let divides = |e: &Elem| c.is_multiple_of(&e.poly.lead().1);
        if let Some(ids) = self.index.get(&u32::MAX) {
            for &i in ids {
                if self.elems[i].active && divides(&self.elems[i]) {
                    return Some((i, 0));
                }
            }
        }
        for p in 0..w.len() {
            if let Some(ids) = self.index.get(&w[p]) {
                for &i in ids {
                    let e = &self.elems[i];
                    if !e.active {
                        continue;
                    }
                    let lw = word_of(&e.poly.lead().0);
                    if p + lw.len() <= w.len() && w[p..p + lw.len()] == *lw && divides(e) {
                        return Some((i, p));
                    }
                }
            }
        }
        None
    }

    /// Full reduction by the active elements. Extends `deriv` so that the
    /// returned remainder still equals the sum of `deriv`.
    fn reduce_kpoly(&self, p: &KPoly, deriv: &mut Vec<Step>) -> (KPoly, u64) {
        let mut work: BTreeMap<Key, BigInt> = p.0.iter().cloned().collect();
        let mut rem = Vec::new();
        let mut cost = 0;
        while let Some((k, c)) = work.pop_last() {
            cost += 1;
            match self.find_reducer(&k, &c) {
                None => rem.push((k, c)),
                Some((i, pos)) => {
                    let e = &self.elems[i];
                    let (lk, lc) = e.poly.lead();
                    let q = &c / lc;
                    let w = word_of(&k);
                    let left = w[..pos].to_vec();
                    let right = w[pos + word_of(lk).len()..].to_vec();
                    cost += e.poly.0.len() as u64;
                    for (tk, tc) in e.poly.0.iter().skip(1) {
                        let nk = self.concat_key(&left, tk, &right);
                        let delta = -(&q * tc);
                        match work.entry(nk) {
                            std::collections::btree_map::Entry::Vacant(v) => {
                                v.insert(delta);
                            }
                            std::collections::btree_map::Entry::Occupied(mut o) => {
                                *o.get_mut() += delta;
                                if o.get().is_zero() {
                                    o.remove();
                                }
                            }
                        }
                    }
                    deriv.push(Step {
                        coeff: -q,
                        left,
                        src: Src::Elem(i),
                        right,
                    });
                }
            }
        }
        (KPoly(rem), cost)
    }

    fn combine(&mut self, parts: &[(BigInt, &[u32], usize, &[u32])]) -> (KPoly, Vec<Step>) {
        let mut acc: BTreeMap<Key, BigInt> = BTreeMap::new();
        let mut deriv = Vec::new();
        for (c, l, i, r) in parts {
            if c.is_zero() {
                continue;
            }
            self.work += self.elems[*i].poly.0.len() as u64;
            for (k, d) in self.sandwich(c, l, &self.elems[*i].poly, r).0 {
                let e = acc.entry(k).or_default();
                *e += d;
            }
            deriv.push(Step {
                coeff: c.clone(),
                left: l.to_vec(),
                src: Src::Elem(*i),
                right: r.to_vec(),
            });
        }
        acc.retain(|_, c| !c.is_zero());
        (KPoly::from_map(acc), deriv)
    }

    /// Processes queued items until `budget` operations were spent or the
    /// queue runs dry, and returns the operations spent. The last item may
    /// overshoot the budget.
    pub fn step(&mut self, budget: usize) -> usize {
        let mut done = 0;
        while done < budget {
            self.maybe_widen_families();
            let Some((_, task)) = self.queue.pop_first() else { break };
            self.work = 0;
            match task {
                Task::Adjoin(p, deriv) => self.adjoin(p, deriv),
                Task::Pair(pair) => self.process_pair(pair),
            }
            let cost = 1 + (self.work / WORK_UNIT) as usize;
            done += cost;
            self.ops += cost as u64;
        }
        done
    }

    /// Runs until complete or until `budget` operations were spent. Returns
    /// whether the basis is complete.
    pub fn complete(&mut self, budget: usize) -> bool {
        let mut left = budget;
        while !self.is_complete() && left > 0 {
            let n = self.step(left);
            if n == 0 {
                break;
            }
            left = left.saturating_sub(n);
        }
        self.is_complete()
    }

    fn adjoin(&mut self, p: KPoly, mut deriv: Vec<Step>) {
        let (mut r, cost) = self.reduce_kpoly(&p, &mut deriv);
        self.work += cost;
        if r.is_zero() {
            return;
        }
        if r.lead().1.is_negative() {
            for t in &mut r.0 {
                t.1 = -&t.1;
            }
            for s in &mut deriv {
                s.coeff = -&s.coeff;
            }
        }
        let k = self.elems.len();
        let (lk, lc) = r.lead().clone();
        self.elems.push(Elem {
            poly: r,
            active: true,
            deriv,
        });
        let slot = word_of(&lk).first().copied().unwrap_or(u32::MAX);
        self.index.entry(slot).or_default().push(k);

        // Elements made redundant by the new leading term are re-reduced.
        for j in 0..k {
            if !self.elems[j].active {
                continue;
            }
            let (jk, jc) = self.elems[j].poly.lead();
            if jc.is_multiple_of(&lc) && contains(word_of(jk), word_of(&lk)) {
                self.elems[j].active = false;
                self.families.retain(|&(a, b)| a != j && b != j);
                let p = self.elems[j].poly.clone();
                let deriv = vec![Step {
                    coeff: BigInt::one(),
                    left: vec![],
                    src: Src::Elem(j),
                    right: vec![],
                }];
                self.push_adjoin(p, deriv);
            }
        }

        for j in 0..=k {
            if self.elems[j].active {
                self.enqueue_ambiguities(k, j);
            }
        }
        // Families involving a constant are multiples of its inclusion
        // ambiguities and need no separate treatment.
        if !is_unit(&lc) && !word_of(&lk).is_empty() {
            let partners: Vec<usize> = (0..=k)
                .filter(|&j| {
                    let (jk, jc) = self.elems[j].poly.lead();
                    self.elems[j].active && !is_unit(jc) && !word_of(jk).is_empty()
                })
                .collect();
            for j in partners {
                self.register_family(k, j);
                if j != k {
                    self.register_family(j, k);
                }
            }
        }
    }

    fn enqueue_ambiguities(&mut self, i: usize, j: usize) {
        let u = word_of(&self.elems[i].poly.lead().0).to_vec();
        let v = word_of(&self.elems[j].poly.lead().0).to_vec();
        let mut pairs = Vec::new();
        // suffix of u equals prefix of v
        for k in 1..u.len().min(v.len()) {
            if u[u.len() - k..] == v[..k] {
                pairs.push(Pair {
                    i,
                    j,
                    ai: vec![],
                    bi: v[k..].to_vec(),
                    aj: u[..u.len() - k].to_vec(),
                    bj: vec![],
                });
            }
        }
        if i != j {
            // suffix of v equals prefix of u
            for k in 1..u.len().min(v.len()) {
                if v[v.len() - k..] == u[..k] {
                    pairs.push(Pair {
                        i,
                        j,
                        ai: v[..v.len() - k].to_vec(),
                        bi: vec![],
                        aj: vec![],
                        bj: u[k..].to_vec(),
                    });
                }
            }
            // inclusions
            if v.len() <= u.len() {
                for p in occurrences(&u, &v) {
                    pairs.push(Pair {
                        i,
                        j,
                        ai: vec![],
                        bi: vec![],
                        aj: u[..p].to_vec(),
                        bj: u[p + v.len()..].to_vec(),
                    });
                }
            }
            if u.len() < v.len() {
                for p in occurrences(&v, &u) {
                    pairs.push(Pair {
                        i,
                        j,
                        ai: v[..p].to_vec(),
                        bi: v[p + u.len()..].to_vec(),
                        aj: vec![],
                        bj: vec![],
                    });
                }
            }
        }
        for p in pairs {
            self.push_pair(p);
        }
    }

    fn register_family(&mut self, i: usize, j: usize) {
        self.families.push((i, j));
        if let Some(h) = self.horizon {
            for len in 0..=h {
                self.enqueue_family(i, j, len);
            }
        }
    }

    fn enqueue_family(&mut self, i: usize, j: usize, len: usize) {
        let wi = word_of(&self.elems[i].poly.lead().0).to_vec();
        let wj = word_of(&self.elems[j].poly.lead().0).to_vec();
        for m in words_of_length(&self.alphabet, len) {
            let mut bi = m.clone();
            bi.extend_from_slice(&wj);
            let mut aj = wi.clone();
            aj.extend_from_slice(&m);
            self.push_pair(Pair {
                i,
                j,
                ai: vec![],
                bi,
                aj,
                bj: vec![],
            });
        }
    }

    /// Extends the enumerated part of the infinite ambiguity families by
    /// one middle-word length whenever nothing cheaper is pending.
    fn maybe_widen_families(&mut self) {
        if self.families.is_empty() {
            return;
        }
        let next = self.horizon.map_or(0, |h| h + 1);
        let cheapest = self
            .families
            .iter()
            .map(|&(i, j)| {
                word_of(&self.elems[i].poly.lead().0).len() + word_of(&self.elems[j].poly.lead().0).len() + next
            })
            .min()
            .unwrap_or(usize::MAX);
        let pending = self.queue.keys().next().map_or(usize::MAX, |k| k.0);
        if pending <= cheapest {
            return;
        }
        if self.options.max_degree.is_some_and(|m| cheapest > m) {
            self.discarded = true;
            self.families.clear();
            return;
        }
        self.horizon = Some(next);
        for (i, j) in self.families.clone() {
            self.enqueue_family(i, j, next);
        }
    }

    fn process_pair(&mut self, pair: Pair) {
        let Pair { i, j, ai, bi, aj, bj } = pair;
        if !self.elems[i].active || !self.elems[j].active {
            return;
        }
        let ci = self.elems[i].poly.lead().1.clone();
        let cj = self.elems[j].poly.lead().1.clone();
        let l = ci.lcm(&cj);
        let (s, ds) = self.combine(&[(&l / &ci, &ai, i, &bi), (-(&l / &cj), &aj, j, &bj)]);
        let g_poly = if !cj.is_multiple_of(&ci) && !ci.is_multiple_of(&cj) {
            let e = ci.extended_gcd(&cj);
            Some(self.combine(&[(e.x, &ai, i, &bi), (e.y, &aj, j, &bj)]))
        } else {
            None
        };
        if !s.is_zero() {
            self.push_adjoin(s, ds);
        }
        if let Some((g, dg)) = g_poly {
            if !g.is_zero() {
                self.push_adjoin(g, dg);
            }
        }
    }

    fn expansion(&mut self, i: usize) -> Expansion {
        if let Some(e) = self.expansions.get(&i) {
            return e.clone();
        }
        let deriv = self.elems[i].deriv.clone();
        let e = Arc::new(self.expand(&deriv));
        self.expansions.insert(i, e.clone());
        e
    }

    /// Rewrites a derivation in terms of the original generators, merging
    /// equal summands.
    fn expand(&mut self, deriv: &[Step]) -> Vec<(BigInt, Vec<u32>, usize, Vec<u32>)> {
        let mut acc: HashMap<(Vec<u32>, usize, Vec<u32>), BigInt> = HashMap::new();
        let mut order: Vec<(Vec<u32>, usize, Vec<u32>)> = Vec::new();
        let mut add = |acc: &mut HashMap<_, BigInt>, key: (Vec<u32>, usize, Vec<u32>), c: BigInt| {
            if !acc.contains_key(&key) {
                order.push(key.clone());
            }
            *acc.entry(key).or_default() += c;
        };
        for s in deriv {
            match s.src {
                Src::Gen(g) => add(&mut acc, (s.left.clone(), g, s.right.clone()), s.coeff.clone()),
                Src::Elem(e) => {
                    let sub = self.expansion(e);
                    for (c, l, g, r) in sub.iter() {
                        let mut nl = s.left.clone();
                        nl.extend_from_slice(l);
                        let mut nr = r.clone();
                        nr.extend_from_slice(&s.right);
                        add(&mut acc, (nl, *g, nr), &s.coeff * c);
                    }
                }
            }
        }
        order
            .into_iter()
            .filter_map(|k| {
                let c = acc.remove(&k)?;
                (!c.is_zero()).then_some((c, k.0, k.1, k.2))
            })
            .collect()
    }

    fn certificate(&mut self, target: NCPolynomial, deriv: &[Step]) -> MembershipCertificate {
        let summands = self
            .expand(deriv)
            .into_iter()
            .map(|(coeff, l, generator, r)| Summand {
                coeff,
                left: self.letters(&l),
                generator,
                right: self.letters(&r),
            })
            .collect();
        MembershipCertificate { target, summands }
    }

    /// Reduces `f` by the current basis. Returns the remainder together with
    /// a certificate for `f − remainder`.
    pub fn reduce(&mut self, f: &NCPolynomial) -> (NCPolynomial, MembershipCertificate) {
        let kp = self.to_kpoly(f);
        let mut deriv = Vec::new();
        let (rem, _) = self.reduce_kpoly(&kp, &mut deriv);
        let rem = self.to_poly(&rem);
        // deriv records the subtracted multiples with negated sign
        for s in &mut deriv {
            s.coeff = -&s.coeff;
        }
        let cert = self.certificate(f - &rem, &deriv);
        (rem, cert)
    }

    /// Membership verdict from the current state, without further work.
    pub fn query(&mut self, f: &NCPolynomial) -> MembershipVerdict {
        let (rem, cert) = self.reduce(f);
        if rem.is_zero() {
            MembershipVerdict::Member(cert)
        } else if self.is_complete() {
            MembershipVerdict::NotMember { basis: self.basis() }
        } else {
            MembershipVerdict::Unknown
        }
    }

    /// Active elements whose leading word is the single letter `x` with
    /// unit coefficient, returned as `(element, tail)` with
    /// `element = ±(x − tail)`. Tails are fully reduced.
    pub fn solved_forms(&mut self, x: Letter) -> Vec<NCPolynomial> {
        let rx = self.order.rank(x);
        let mut out = Vec::new();
        for i in 0..self.elems.len() {
            let e = &self.elems[i];
            if !e.active {
                continue;
            }
            let (lk, lc) = e.poly.lead();
            if word_of(lk) != [rx] || !is_unit(lc) {
                continue;
            }
            let lc = lc.clone();
            let tail = KPoly(e.poly.0[1..].to_vec());
            let mut scratch = Vec::new();
            let (reduced, _) = self.reduce_kpoly(&tail, &mut scratch);
            // x·lc + tail = 0  ⇒  x = −tail/lc
            out.push(self.to_poly(&reduced).scale(&-lc));
        }
        out
    }
}

fn is_unit(c: &BigInt) -> bool {
    c.abs().is_one()
}

fn contains(hay: &[u32], needle: &[u32]) -> bool {
    needle.is_empty() || hay.windows(needle.len()).any(|w| w == needle)
}

fn occurrences(hay: &[u32], needle: &[u32]) -> Vec<usize> {
    if needle.is_empty() {
        // a constant divides a word at every position; one suffices
        return vec![0];
    }
    if needle.len() > hay.len() {
        return vec![];
    }
    (0..=hay.len() - needle.len())
        .filter(|&p| hay[p..p + needle.len()] == *needle)
        .collect()
}

fn words_of_length(alphabet: &[u32], len: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                alphabet.iter().map(move |&x| {
                    let mut w2 = w.clone();
                    w2.push(x);
                    w2
                })
            })
            .collect();
    }
    out
}
