//! Idealisation of arithmetic ground clauses and sentences: a clause holds
//! when some positive-literal difference lies in the ideal generated by
//! its negative-literal differences.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::{to_cnf, Clause, Formula};
use crate::membership::{
    CompletionOptions, CompletionState, IdealPresentation, MembershipCertificate, MembershipVerdict, MonomialOrder,
};
use crate::ncpoly::{translate_clause, IndeterminateTable, Letter, NCPolynomial, TranslateError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdealiseError {
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error("formula is not quantifier-free")]
    NotQuantifierFree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    True,
    False,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClauseVerdict {
    /// Candidate `candidate` lies in the ideal.
    True {
        candidate: usize,
        certificate: MembershipCertificate,
    },
    /// The ideal has the given finite strong Gröbner basis and no
    /// candidate reduces to zero. Clauses without positive literals are
    /// False with an empty basis.
    False {
        basis: Vec<NCPolynomial>,
    },
    Unknown,
}

impl ClauseVerdict {
    pub fn summary(&self) -> Verdict {
        match self {
            ClauseVerdict::True { .. } => Verdict::True,
            ClauseVerdict::False { .. } => Verdict::False,
            ClauseVerdict::Unknown => Verdict::Unknown,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseIdealisation {
    pub clause: Clause,
    /// Generators are the distinct negative-literal differences in sorted
    /// order; certificates index into this list.
    pub ideal: IdealPresentation,
    pub candidates: Vec<NCPolynomial>,
    pub verdict: ClauseVerdict,
    /// Completion operations this clause spent (shared states count for
    /// each clause that advanced them).
    pub operations: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceIdealisation {
    pub table: IndeterminateTable,
    /// The clauses that decided the verdict: every True clause covering the
    /// sentence, or the first False one.
    pub clauses: Vec<ClauseIdealisation>,
    pub verdict: Verdict,
    /// Number of clause idealisations started.
    pub membership_tests: usize,
    /// Number of times a clause was split on a deferred assumption.
    pub splits: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealiseOptions {
    /// Completion work after which an undecided clause is split on the next
    /// deferred assumption.
    pub node_timeout: Duration,
    pub completion: CompletionOptions,
}

impl Default for IdealiseOptions {
    fn default() -> Self {
        IdealiseOptions {
            node_timeout: Duration::from_secs(1),
            completion: CompletionOptions::default(),
        }
    }
}

/// Operations granted between two rounds of candidate queries.
const QUERY_CHUNK: usize = 16;

type SharedState = Arc<Mutex<CompletionState>>;
type StateKey = (Vec<NCPolynomial>, Vec<Letter>);

/// Completion states shared by clauses with the same generator set and
/// alphabet.
#[derive(Clone, Default)]
struct CompletionCache {
    states: Arc<Mutex<HashMap<StateKey, SharedState>>>,
}

impl CompletionCache {
    fn get(&self, ideal: &IdealPresentation, alphabet: &[Letter], options: &CompletionOptions) -> SharedState {
        let mut map = self.states.lock().unwrap();
        map.entry((ideal.generators.clone(), alphabet.to_vec()))
            .or_insert_with(|| Arc::new(Mutex::new(CompletionState::new(ideal, alphabet, options.clone()))))
            .clone()
    }
}

struct ClauseJob {
    result: ClauseIdealisation,
    state: SharedState,
    elapsed: Duration,
}

impl ClauseJob {
    fn new(
        clause: Clause,
        tbl: &mut IndeterminateTable,
        cache: &CompletionCache,
        options: &CompletionOptions,
    ) -> Result<Self, IdealiseError> {
        let (mut gens, candidates) = translate_clause(&clause, tbl)?;
        gens.retain(|g| !g.is_zero());
        gens.sort();
        gens.dedup();
        // Precedence by name, so literals that contribute nothing cannot
        // change the order through the interning sequence.
        let mut precedence: Vec<Letter> = (0..tbl.len() as Letter).collect();
        precedence.sort_by(|&a, &b| tbl.name(a).cmp(tbl.name(b)));
        let order = MonomialOrder::deglex(precedence);
        let ideal = IdealPresentation::with_order(gens, order);
        // Letters outside the clause can be sent to zero, so membership is
        // decided over the clause's own letters.
        let mut alphabet: Vec<Letter> = ideal.letters();
        alphabet.extend(candidates.iter().flat_map(NCPolynomial::letters));
        alphabet.sort_unstable();
        alphabet.dedup();
        let state = cache.get(&ideal, &alphabet, options);
        Ok(ClauseJob {
            result: ClauseIdealisation {
                clause,
                ideal,
                candidates,
                verdict: ClauseVerdict::Unknown,
                operations: 0,
            },
            state,
            elapsed: Duration::ZERO,
        })
    }

    /// Spends up to `budget` completion operations; candidates are queried
    /// in order after every chunk and the first member wins.
    fn advance(&mut self, budget: usize) -> Verdict {
        if !matches!(self.result.verdict, ClauseVerdict::Unknown) {
            return self.result.verdict.summary();
        }
        if self.result.candidates.is_empty() {
            self.result.verdict = ClauseVerdict::False { basis: Vec::new() };
            return Verdict::False;
        }
        let start = Instant::now();
        let mut st = self.state.lock().unwrap();
        let mut left = budget;
        let verdict = loop {
            let mut all_rejected = true;
            let mut found = None;
            for (k, c) in self.result.candidates.iter().enumerate() {
                match st.query(c) {
                    MembershipVerdict::Member(certificate) => {
                        found = Some(ClauseVerdict::True {
                            candidate: k,
                            certificate,
                        });
                        break;
                    }
                    MembershipVerdict::NotMember { .. } => {}
                    MembershipVerdict::Unknown => all_rejected = false,
                }
            }
            if let Some(v) = found {
                break v;
            }
            if all_rejected {
                break ClauseVerdict::False { basis: st.basis() };
            }
            if left == 0 {
                break ClauseVerdict::Unknown;
            }
            let n = st.step(left.min(QUERY_CHUNK));
            if n == 0 {
                break ClauseVerdict::Unknown;
            }
            self.result.operations += n as u64;
            left = left.saturating_sub(n);
        };
        drop(st);
        self.elapsed += start.elapsed();
        self.result.verdict = verdict;
        self.result.verdict.summary()
    }
}

struct Node {
    job: ClauseJob,
    /// Index of the next deferred assumption to split on.
    depth: usize,
}

/// Resumable idealisation of `assumptions → claim`.
///
/// Assumptions that are conjunctions of literals contribute their negated
/// literals to every clause from the start. The others are deferred: a
/// clause that turns out False, or stays undecided past the node timeout,
/// is replaced by its disjunctions with the clauses of the next deferred
/// assumption's negation. Leaves that have used up every deferred
/// assumption are exactly the clauses of the full CNF, so a False leaf
/// makes the sentence False.
pub struct Idealiser {
    table: IndeterminateTable,
    deferred: Vec<Vec<Clause>>,
    open: Vec<Node>,
    closed: Vec<ClauseIdealisation>,
    failed: Option<ClauseIdealisation>,
    tests: usize,
    splits: usize,
    cache: CompletionCache,
    options: IdealiseOptions,
}

fn product(a: &[Clause], b: &[Clause]) -> Vec<Clause> {
    let mut out: Vec<Clause> = Vec::new();
    for x in a {
        for y in b {
            let c = x.union(y);
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    out
}

fn check_qf(fs: &[&Formula]) -> Result<(), IdealiseError> {
    if fs.iter().all(|f| f.is_quantifier_free()) {
        Ok(())
    } else {
        Err(IdealiseError::NotQuantifierFree)
    }
}

impl Idealiser {
    fn with_roots(
        mut table: IndeterminateTable,
        roots: Vec<Clause>,
        deferred: Vec<Vec<Clause>>,
        options: IdealiseOptions,
    ) -> Result<Self, IdealiseError> {
        let cache = CompletionCache::default();
        let mut open = Vec::new();
        for c in roots {
            open.push(Node {
                job: ClauseJob::new(c, &mut table, &cache, &options.completion)?,
                depth: 0,
            });
        }
        Ok(Idealiser {
            tests: open.len(),
            table,
            deferred,
            open,
            closed: Vec::new(),
            failed: None,
            splits: 0,
            cache,
            options,
        })
    }

    /// Idealises the full CNF of `phi`.
    pub fn direct(phi: &Formula, options: IdealiseOptions) -> Result<Self, IdealiseError> {
        check_qf(&[phi])?;
        let mut table = IndeterminateTable::new();
        table.intern_formula(phi);
        Self::with_roots(table, to_cnf(phi), Vec::new(), options)
    }

    /// Idealises `⋀ assumptions → claim`, deferring compound assumptions in
    /// the given order.
    pub fn incremental(
        assumptions: &[Formula],
        claim: &Formula,
        options: IdealiseOptions,
    ) -> Result<Self, IdealiseError> {
        let mut all: Vec<&Formula> = assumptions.iter().collect();
        all.push(claim);
        check_qf(&all)?;
        let mut table = IndeterminateTable::new();
        for f in &all {
            table.intern_formula(f);
        }
        let mut roots = to_cnf(claim);
        let mut deferred = Vec::new();
        for a in assumptions {
            let neg = to_cnf(&Formula::not(a.clone()));
            if neg.len() == 1 {
                roots = product(&roots, &neg);
            } else {
                deferred.push(neg);
            }
        }
        Self::with_roots(table, roots, deferred, options)
    }

    pub fn table(&self) -> &IndeterminateTable {
        &self.table
    }

    pub fn membership_tests(&self) -> usize {
        self.tests
    }

    pub fn verdict(&self) -> Verdict {
        if self.failed.is_some() {
            Verdict::False
        } else if self.open.is_empty() {
            Verdict::True
        } else {
            Verdict::Unknown
        }
    }

    /// Grants every open clause `budget` completion operations. Clauses
    /// created by splitting during the call receive the same grant.
    pub fn run(&mut self, budget: usize) -> Verdict {
        let mut frontier = std::mem::take(&mut self.open);
        while !frontier.is_empty() && self.failed.is_none() {
            frontier.par_iter_mut().for_each(|n| {
                n.job.advance(budget);
            });
            let mut next = Vec::new();
            for node in frontier {
                let v = node.job.result.verdict.summary();
                let last = node.depth == self.deferred.len();
                match v {
                    Verdict::True => self.closed.push(node.job.result),
                    Verdict::False if last => {
                        self.failed = Some(node.job.result);
                        break;
                    }
                    Verdict::Unknown if last || node.job.elapsed < self.options.node_timeout => self.open.push(node),
                    _ => {
                        self.splits += 1;
                        for d in &self.deferred[node.depth] {
                            let c = node.job.result.clause.union(d);
                            let job = match ClauseJob::new(c, &mut self.table, &self.cache, &self.options.completion) {
                                Ok(j) => j,
                                Err(_) => unreachable!("atoms interned up front"),
                            };
                            self.tests += 1;
                            next.push(Node {
                                job,
                                depth: node.depth + 1,
                            });
                        }
                    }
                }
            }
            frontier = next;
        }
        if self.failed.is_some() {
            self.open.clear();
        }
        self.verdict()
    }

    pub fn report(&self) -> SentenceIdealisation {
        let clauses = match &self.failed {
            Some(f) => vec![f.clone()],
            None => {
                let mut v = self.closed.clone();
                v.extend(self.open.iter().map(|n| n.job.result.clone()));
                v
            }
        };
        SentenceIdealisation {
            table: self.table.clone(),
            clauses,
            verdict: self.verdict(),
            membership_tests: self.tests,
            splits: self.splits,
        }
    }
}

/// Idealises one clause with up to `budget` completion operations.
pub fn idealise_clause(
    c: &Clause,
    tbl: &mut IndeterminateTable,
    budget: usize,
) -> Result<ClauseIdealisation, IdealiseError> {
    let mut job = ClauseJob::new(
        c.clone(),
        tbl,
        &CompletionCache::default(),
        &CompletionOptions::default(),
    )?;
    job.advance(budget);
    Ok(job.result)
}

/// Idealises every clause of the CNF of `phi`, each with up to `budget`
/// completion operations.
pub fn idealise_sentence(phi: &Formula, budget: usize) -> Result<SentenceIdealisation, IdealiseError> {
    let mut it = Idealiser::direct(phi, IdealiseOptions::default())?;
    it.run(budget);
    Ok(it.report())
}

/// Idealises `⋀ assumptions → claim` by splitting on compound assumptions
/// only when needed.
pub fn idealise_incremental(
    assumptions: &[Formula],
    claim: &Formula,
    budget: usize,
    node_timeout: Duration,
) -> Result<SentenceIdealisation, IdealiseError> {
    let options = IdealiseOptions {
        node_timeout,
        ..IdealiseOptions::default()
    };
    let mut it = Idealiser::incremental(assumptions, claim, options)?;
    it.run(budget);
    Ok(it.report())
}
