//! The semi-decision loop: Herbrandisation, fair instantiation, Ackermann
//! reduction and interleaved idealisation of the growing disjunction of
//! ground instances.

mod extend;
mod rewrite;
mod witness;

pub use extend::extend_with_function;
pub use rewrite::{apply_universal_rules, apply_universal_rules_capped, Pattern, RewriteRule, DEFAULT_STEP_CAP};
pub use witness::search_existential_witnesses;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ackermann::{ackermann_reduce_all, AckermannError, AckermannOptions, AckermannResult};
use crate::herbrand::{expansion, herbrandise, GroundInstance, HerbrandError, HerbrandResult};
use crate::idealise::{IdealiseError, IdealiseOptions, Idealiser, SentenceIdealisation, Verdict};
use crate::logic::{
    substitute_term, to_prenex, universal_closure, Formula, LogicError, Quantifier, Signature, Term, Var,
};
use crate::membership::CompletionOptions;
use crate::ncpoly::TranslateError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProveError {
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Herbrand(#[from] HerbrandError),
    #[error(transparent)]
    Ackermann(#[from] AckermannError),
    #[error(transparent)]
    Idealise(#[from] IdealiseError),
    #[error("rewriting did not reach a normal form within {0} steps")]
    RewriteBudgetExceeded(usize),
    #[error("hint refers to `{0}`, which is neither an existential variable nor a universal variable replaced by a constant")]
    UnresolvableHint(String),
}

impl From<TranslateError> for ProveError {
    fn from(e: TranslateError) -> Self {
        ProveError::Idealise(e.into())
    }
}

#[derive(Clone, Debug)]
pub struct ProverConfig {
    /// Rounds before giving up; 0 means unbounded.
    pub max_rounds: usize,
    /// Round `n` grants `n · quantum` completion operations to each clause
    /// of every live instance disjunction.
    pub quantum: usize,
    /// Instantiations of the existential variables tried before the
    /// systematic enumeration. Terms may mention the universally
    /// quantified variables of the input.
    pub hints: Vec<BTreeMap<String, Term>>,
    pub rules: Vec<RewriteRule>,
    /// Unary symbols whose images are conjoined to the assumptions.
    pub extend_with: Vec<String>,
    pub incremental: bool,
    pub node_timeout: Duration,
    /// Fill variables a hint leaves open by searching the assumption ideal.
    pub witness_search: bool,
    pub witness_budget: usize,
    pub completion: CompletionOptions,
    pub ackermann: AckermannOptions,
}

impl Default for ProverConfig {
    fn default() -> Self {
        ProverConfig {
            max_rounds: 0,
            quantum: 256,
            hints: Vec::new(),
            rules: Vec::new(),
            extend_with: Vec::new(),
            incremental: true,
            node_timeout: Duration::from_secs(1),
            witness_search: true,
            witness_budget: 20_000,
            completion: CompletionOptions::default(),
            ackermann: AckermannOptions::default(),
        }
    }
}

/// Everything needed to audit a run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProofTrace {
    pub verdict: Verdict,
    pub herbrand: HerbrandResult,
    /// Variables filled in by witness search.
    pub witnesses: BTreeMap<String, Term>,
    /// Ground instances whose disjunction decided the run (or the latest
    /// one when undecided).
    pub instances: Vec<GroundInstance>,
    pub ackermann: AckermannResult,
    /// The arithmetic sentence handed to idealisation, split into
    /// assumptions and claim.
    pub assumptions: Vec<Formula>,
    pub claim: Formula,
    pub idealisation: SentenceIdealisation,
    /// Clause idealisations started over all instance disjunctions.
    pub membership_tests: usize,
    pub rounds: usize,
    /// Cumulative operations granted per clause, per instance disjunction.
    pub granted: Vec<u64>,
    pub ackermann_reductions: usize,
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug)]
pub enum ProofOutcome {
    Proved(Box<ProofTrace>),
    /// Only for ground inputs whose idealisation is False.
    NotProvable(Box<ProofTrace>),
    Timeout(Box<ProofTrace>),
}

impl ProofOutcome {
    pub fn trace(&self) -> &ProofTrace {
        match self {
            ProofOutcome::Proved(t) | ProofOutcome::NotProvable(t) | ProofOutcome::Timeout(t) => t,
        }
    }
}

/// Caps the worker pool at `OPSTAT_THREADS` when set. Has no effect after
/// the pool was first used.
pub fn configure_threads() {
    if let Some(n) = std::env::var("OPSTAT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Splits `A₁ → (A₂ → … → C)` into the conjuncts of the antecedents and
/// the final consequent.
pub fn split_implication(f: &Formula) -> (Vec<Formula>, Formula) {
    match f {
        Formula::Implies(a, c) => {
            let mut asm: Vec<Formula> = a.conjuncts().into_iter().cloned().collect();
            let (more, claim) = split_implication(c);
            asm.extend(more);
            (asm, claim)
        }
        _ => (Vec::new(), f.clone()),
    }
}

fn join(assumptions: Vec<Formula>, claim: Formula) -> Formula {
    match Formula::conjunction(assumptions) {
        Some(a) => Formula::implies(a, claim),
        None => claim,
    }
}

/// One disjunction `ψ_k` of ground instances and its idealisation.
struct Psi {
    instances: Vec<GroundInstance>,
    ackermann: AckermannResult,
    assumptions: Vec<Formula>,
    claim: Formula,
    idealiser: Idealiser,
    granted: u64,
    verdict: Verdict,
}

struct Run<'a> {
    cfg: &'a ProverConfig,
    herbrand: HerbrandResult,
    reductions: usize,
}

impl Run<'_> {
    fn build_psi(&mut self, instances: Vec<GroundInstance>) -> Result<Psi, ProveError> {
        let mut asm = Vec::new();
        let mut claims = Vec::new();
        for i in &instances {
            let (a, c) = split_implication(&i.sentence);
            asm.extend(a);
            claims.push(c);
        }
        let psi = join(asm, Formula::disjunction(claims).expect("at least one instance"));
        let ackermann = ackermann_reduce_all(&self.herbrand.extended_signature, &psi, self.cfg.ackermann)?;
        self.reductions += 1;
        let (mut assumptions, claim) = split_implication(&ackermann.flat);
        assumptions.extend(ackermann.fc.iter().cloned());
        let options = IdealiseOptions {
            node_timeout: self.cfg.node_timeout,
            completion: self.cfg.completion.clone(),
        };
        let idealiser = if self.cfg.incremental {
            Idealiser::incremental(&assumptions, &claim, options)?
        } else {
            Idealiser::direct(&join(assumptions.clone(), claim.clone()), options)?
        };
        Ok(Psi {
            instances,
            ackermann,
            assumptions,
            claim,
            idealiser,
            granted: 0,
            verdict: Verdict::Unknown,
        })
    }

    fn ground_instance(&self, g: GroundInstance) -> Result<GroundInstance, ProveError> {
        let sentence = apply_universal_rules(&self.herbrand.extended_signature, &g.sentence, &self.cfg.rules)?;
        Ok(GroundInstance { sentence, ..g })
    }

    /// Replaces references to universally quantified variables by their
    /// Herbrand constants.
    fn resolve_hint(&self, exist: &[Var], hint: &BTreeMap<String, Term>) -> Result<BTreeMap<String, Term>, ProveError> {
        let mut consts = BTreeMap::new();
        for i in &self.herbrand.introduced {
            if i.arguments.is_empty() {
                consts.insert(
                    i.replaced.name.clone(),
                    self.herbrand.constant_for(&i.replaced.name).unwrap(),
                );
            }
        }
        let mut out = BTreeMap::new();
        for (name, t) in hint {
            if !exist.iter().any(|v| &v.name == name) {
                return Err(ProveError::UnresolvableHint(name.clone()));
            }
            let r = substitute_term(t, &consts);
            if let Some(v) = r.var_names().into_iter().next() {
                return Err(ProveError::UnresolvableHint(v));
            }
            out.insert(name.clone(), r);
        }
        Ok(out)
    }
}

/// Prenexes the universal closure, conjoins function images to the
/// assumptions of the matrix and normalises with the rewrite rules.
fn preprocess(sig: &Signature, phi: &Formula, cfg: &ProverConfig) -> Result<Formula, ProveError> {
    let prenex = to_prenex(&universal_closure(phi));
    let mut prefix = Vec::new();
    let mut cur = &prenex;
    while let Formula::Forall(v, g) | Formula::Exists(v, g) = cur {
        let q = if matches!(cur, Formula::Forall(..)) {
            Quantifier::Forall
        } else {
            Quantifier::Exists
        };
        prefix.push((q, v.clone()));
        cur = g;
    }
    let (mut assumptions, claim) = split_implication(cur);
    for sym in &cfg.extend_with {
        assumptions = assumptions
            .iter()
            .map(|a| extend_with_function(sig, a, sym))
            .collect::<Result<_, _>>()?;
    }
    let matrix = apply_universal_rules(sig, &join(assumptions, claim), &cfg.rules)?;
    Ok(prefix
        .into_iter()
        .rev()
        .fold(matrix, |acc, (q, v)| Formula::quantified(q, v, acc)))
}

/// Tries to show that `phi` holds in every preadditive semicategory.
///
/// Round `n` adds the `n`-th ground instance to the disjunction and grants
/// `n · quantum` operations to the idealisation of every disjunction built
/// so far. Ground inputs use a single disjunction and are the only ones
/// that can be refuted.
pub fn prove(sig: &Signature, phi: &Formula, cfg: &ProverConfig) -> Result<ProofOutcome, ProveError> {
    configure_threads();
    let start = Instant::now();
    sig.check_sorts(phi)?;
    let pre = preprocess(sig, phi, cfg)?;
    let herbrand = herbrandise(sig, &pre);
    let (exist, matrix) = herbrand.split();
    let ground = exist.is_empty();
    let mut run = Run {
        cfg,
        herbrand,
        reductions: 0,
    };

    let mut hints = Vec::new();
    let mut witnesses = BTreeMap::new();
    for h in &cfg.hints {
        let mut h = run.resolve_hint(&exist, h)?;
        if cfg.witness_search {
            let found = witness::complete_bindings(
                &run.herbrand.extended_signature,
                &exist,
                &matrix,
                &h,
                &cfg.rules,
                cfg.witness_budget,
            )?;
            for (k, t) in found {
                witnesses.insert(k.clone(), t.clone());
                h.insert(k, t);
            }
        }
        hints.push(h);
    }
    let mut stream = expansion(&run.herbrand.extended_signature, &run.herbrand.sentence, hints)?;

    let mut psis: Vec<Psi> = Vec::new();
    let mut round = 0;
    loop {
        round += 1;
        let out_of_rounds = cfg.max_rounds > 0 && round > cfg.max_rounds;
        if !out_of_rounds && !(ground && !psis.is_empty()) {
            if let Some(g) = stream.next() {
                let g = run.ground_instance(g)?;
                let mut instances = psis.last().map(|p| p.instances.clone()).unwrap_or_default();
                instances.push(g);
                psis.push(run.build_psi(instances)?);
            }
        }
        let rounds_done = if out_of_rounds { round - 1 } else { round };
        let finish = |psis: &[Psi], k: usize, verdict: Verdict, run: &Run| -> ProofTrace {
            let p = &psis[k];
            ProofTrace {
                verdict,
                herbrand: run.herbrand.clone(),
                witnesses: witnesses.clone(),
                instances: p.instances.clone(),
                ackermann: p.ackermann.clone(),
                assumptions: p.assumptions.clone(),
                claim: p.claim.clone(),
                idealisation: p.idealiser.report(),
                membership_tests: psis.iter().map(|p| p.idealiser.membership_tests()).sum(),
                rounds: rounds_done,
                granted: psis.iter().map(|p| p.granted).collect(),
                ackermann_reductions: run.reductions,
                elapsed_ms: start.elapsed().as_millis() as u64,
            }
        };
        if out_of_rounds {
            let trace = finish(&psis, psis.len() - 1, Verdict::Unknown, &run);
            return Ok(ProofOutcome::Timeout(Box::new(trace)));
        }
        let grant = round * cfg.quantum;
        psis.par_iter_mut()
            .filter(|p| p.verdict == Verdict::Unknown)
            .for_each(|p| {
                p.verdict = p.idealiser.run(grant);
                p.granted += grant as u64;
            });
        if let Some(k) = psis.iter().position(|p| p.verdict == Verdict::True) {
            let trace = finish(&psis, k, Verdict::True, &run);
            return Ok(ProofOutcome::Proved(Box::new(trace)));
        }
        if ground && psis[0].verdict == Verdict::False {
            let trace = finish(&psis, 0, Verdict::False, &run);
            return Ok(ProofOutcome::NotProvable(Box::new(trace)));
        }
    }
}
