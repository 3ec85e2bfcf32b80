use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::Context;
use clap::{Parser, Subcommand};
use opstat_cli::bundle::{parse_bundle, Bundle};
use opstat_cli::problem::parse_problem;
use opstat_core::ackermann::AckermannOptions;
use opstat_core::idealise::ClauseVerdict;
use opstat_core::membership::CompletionOptions;
use opstat_core::prover::{prove, ProofOutcome, ProverConfig};

const PROVED: u8 = 0;
const REJECTED: u8 = 1;
const TIMEOUT: u8 = 2;
const INPUT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(
    name = "opstat",
    version,
    about = "Proves identities between morphisms in preadditive semicategories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the prover on a problem file.
    Prove(ProveArgs),
    /// Replay the certificates in a bundle.
    CheckCert { path: PathBuf },
}

#[derive(clap::Args)]
struct ProveArgs {
    file: PathBuf,
    /// Give up after this many rounds; 0 runs until decided.
    #[arg(long, default_value_t = 0)]
    max_rounds: usize,
    #[arg(long, default_value_t = 1000)]
    node_timeout_ms: u64,
    /// Split on one assumption at a time (default).
    #[arg(long, overrides_with = "no_incremental")]
    incremental: bool,
    /// Idealise the whole instance at once.
    #[arg(long)]
    no_incremental: bool,
    #[arg(long, overrides_with = "no_witness_search")]
    witness_search: bool,
    #[arg(long)]
    no_witness_search: bool,
    /// Discard overlaps above this degree (cannot refute).
    #[arg(long)]
    max_degree: Option<usize>,
    /// Keep reflexive hypotheses in consistency constraints.
    #[arg(long)]
    no_fc_simplify: bool,
    /// Completion operations per clause per round, times the round number.
    #[arg(long, default_value_t = 256)]
    quantum: usize,
    /// Write a certificate bundle here when proved.
    #[arg(long)]
    cert_out: Option<PathBuf>,
    /// Write the proof trace as JSON.
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Prove(args) => run_prove(args),
        Command::CheckCert { path } => run_check(path),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}

fn run_prove(args: ProveArgs) -> anyhow::Result<u8> {
    let text = std::fs::read_to_string(&args.file).with_context(|| format!("reading {}", args.file.display()))?;
    let problem = parse_problem(&text).with_context(|| args.file.display().to_string())?;
    let cfg = ProverConfig {
        max_rounds: args.max_rounds,
        quantum: args.quantum.max(1),
        hints: problem.hints.clone(),
        rules: problem.rules.clone(),
        extend_with: problem.extend.clone(),
        incremental: !args.no_incremental,
        node_timeout: Duration::from_millis(args.node_timeout_ms),
        witness_search: !args.no_witness_search,
        completion: CompletionOptions {
            max_degree: args.max_degree,
        },
        ackermann: AckermannOptions {
            fc_simplify: !args.no_fc_simplify,
        },
        ..ProverConfig::default()
    };
    let outcome = prove(&problem.signature, &problem.sentence(), &cfg)?;
    let trace = outcome.trace();
    let (label, code) = match &outcome {
        ProofOutcome::Proved(_) => ("proved", PROVED),
        ProofOutcome::NotProvable(_) => ("not provable", REJECTED),
        ProofOutcome::Timeout(_) => ("timeout", TIMEOUT),
    };
    println!("{label}");
    println!("rounds: {}", trace.rounds);
    println!("instances: {}", trace.instances.len());
    println!("membership tests: {}", trace.membership_tests);
    println!("elapsed: {} ms", trace.elapsed_ms);
    for (v, t) in &trace.witnesses {
        println!("witness: {v} := {t}");
    }
    for (i, c) in trace.idealisation.clauses.iter().enumerate() {
        let v = match &c.verdict {
            ClauseVerdict::True { certificate, .. } => format!("true, {} summands", certificate.summands.len()),
            ClauseVerdict::False { .. } => "false".to_string(),
            ClauseVerdict::Unknown => "unknown".to_string(),
        };
        println!("clause {}: {v}", i + 1);
    }
    if let Some(path) = &args.trace_out {
        let json = serde_json::to_string_pretty(trace)?;
        std::fs::write(path, json).with_context(|| format!("writing {}", path.display()))?;
    }
    if let (ProofOutcome::Proved(t), Some(path)) = (&outcome, &args.cert_out) {
        let bundle = Bundle::from_idealisation(&t.idealisation);
        std::fs::write(path, bundle.render()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(code)
}

fn run_check(path: PathBuf) -> anyhow::Result<u8> {
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let bundle = parse_bundle(&text).with_context(|| path.display().to_string())?;
    let results = bundle.check();
    for (c, ok) in bundle.clauses.iter().zip(&results) {
        println!("{}: {}", c.label, if *ok { "ok" } else { "rejected" });
    }
    Ok(if results.iter().all(|&ok| ok) { PROVED } else { REJECTED })
}
