use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use typestate_learn::dot::export_dot;
use typestate_learn::equivalence::Bounds;
use typestate_learn::error::Error;
use typestate_learn::models;
use typestate_learn::pipeline::{run_compare, run_learn, CompareOptions, LearnOptions, OracleKind, Verification};
use typestate_learn::purpose::LearningPurpose;
use typestate_learn::spec::{load_purpose, parse_model, parse_purpose, AutomatonSpec, LoadedModel, Target};
use typestate_learn::sweep::{run_sweep, run_sweep_sequential, sweep_cases, SweepOracle};

const EXIT_USAGE: u8 = 1;
const EXIT_NONDET: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_VERIFY: u8 = 4;

/// Learn callback typestates of asynchronous components.
#[derive(Parser, Debug)]
#[command(name = "typestate", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Learn a model and write the typestate (JSON + DOT) and metrics.
    Learn(LearnArgs),
    /// Compare the distinguisher oracle with the state-bound oracle.
    Compare(CompareArgs),
    /// Render a model file as DOT.
    Export(ExportArgs),
    /// Learn a batch of random Mealy machines and summarize.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Model file, or the name of a bundled model (e.g. media_player).
    #[arg(long)]
    model: String,
    /// Learning purpose file or bundled name (e.g. one_pending.purpose).
    #[arg(long)]
    purpose: Option<String>,
    /// Apply the refinement block shipped with the model.
    #[arg(long)]
    refine: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct LearnArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// dist, state-bound or perfect.
    #[arg(long, default_value = "dist")]
    oracle: OracleKind,
    #[arg(long, default_value_t = 2)]
    bdist: usize,
    #[arg(long)]
    state_bound: Option<usize>,
    /// Maximum number of counterexamples before giving up.
    #[arg(long, default_value_t = 64)]
    eq_cap: usize,
    /// Word budget of one state-bound equivalence query.
    #[arg(long, default_value_t = 1_000_000)]
    budget: u128,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Metrics path; defaults to <out-dir>/<name>.metrics.json.
    #[arg(long)]
    metrics: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 2)]
    bdist: usize,
    /// Defaults to the learned machine's state count.
    #[arg(long)]
    state_bound: Option<usize>,
    #[arg(long, default_value_t = 1_000_000)]
    budget: u128,
    /// Also write the report to <out-dir>/<name>.compare.json.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[arg(long)]
    model: String,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, default_value_t = 200)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// perfect, dist (at each target's own bound) or dist:<B>.
    #[arg(long, default_value = "dist")]
    oracle: String,
    /// Run cases one after another.
    #[arg(long)]
    sequential: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Learn(a) => learn(a),
        Command::Compare(a) => compare(a),
        Command::Export(a) => export(a),
        Command::Sweep(a) => sweep(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::NonDeterminism(_)) => EXIT_NONDET,
        Some(Error::EqCapExceeded { .. }) | Some(Error::QueryBudget { .. }) => EXIT_BUDGET,
        _ => EXIT_USAGE,
    }
}

fn read_source(arg: &str) -> Result<String> {
    let path = Path::new(arg);
    if path.exists() {
        return fs::read_to_string(path).with_context(|| format!("reading {}", path.display()));
    }
    match models::bundled(arg) {
        Some(text) => Ok(text.to_string()),
        None => bail!("no such file or bundled model: {arg}"),
    }
}

fn load(arg: &str) -> Result<LoadedModel> {
    let text = read_source(arg)?;
    parse_model(&text).with_context(|| format!("loading model {arg}"))
}

fn load_purpose_arg(arg: &Option<String>) -> Result<Option<LearningPurpose>> {
    let Some(arg) = arg else { return Ok(None) };
    let purpose = if Path::new(arg).exists() {
        load_purpose(Path::new(arg))?
    } else {
        parse_purpose(&read_source(arg)?)?
    };
    Ok(Some(purpose))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn learn(a: LearnArgs) -> Result<u8> {
    let model = load(&a.model.model)?;
    let bounds = Bounds {
        b_dist: match (a.oracle, a.state_bound) {
            (OracleKind::Dist, Some(_)) => None,
            _ => Some(a.bdist),
        },
        b_state: a.state_bound,
    };
    let opts = LearnOptions {
        oracle: a.oracle,
        bounds,
        purpose: load_purpose_arg(&a.model.purpose)?,
        seed: a.model.seed,
        refine: a.model.refine,
        eq_cap: a.eq_cap,
        state_bound_budget: a.budget,
    };
    let report = run_learn(&model, &opts)?;
    let stem = file_stem(&report.model);
    let metrics = serde_json::to_string_pretty(&report.metrics)? + "\n";
    let metrics_path = a
        .metrics
        .unwrap_or_else(|| a.out_dir.join(format!("{stem}.metrics.json")));
    write(&metrics_path, &metrics)?;
    if let Some(automaton) = &report.automaton {
        let spec = AutomatonSpec::from_automaton(automaton, Some(&report.model));
        write(
            &a.out_dir.join(format!("{stem}.learned.json")),
            &(serde_json::to_string_pretty(&spec)? + "\n"),
        )?;
        write(&a.out_dir.join(format!("{stem}.dot")), &export_dot(automaton))?;
    }
    print!("{metrics}");
    match &report.verification {
        Verification::Verified => {
            eprintln!("verified: learned model matches the ground truth");
            Ok(0)
        }
        Verification::Unavailable => {
            eprintln!("note: no ground truth available; result not verified");
            Ok(0)
        }
        Verification::Failed(w) => {
            eprintln!("verification failed: outputs differ on {}", w.join(" "));
            Ok(EXIT_VERIFY)
        }
    }
}

fn compare(a: CompareArgs) -> Result<u8> {
    let model = load(&a.model.model)?;
    let opts = CompareOptions {
        b_dist: a.bdist,
        b_state: a.state_bound,
        budget: a.budget,
        seed: a.model.seed,
        refine: a.model.refine,
        purpose: load_purpose_arg(&a.model.purpose)?,
    };
    let report = run_compare(&model, &opts)?;
    let text = serde_json::to_string_pretty(&report)? + "\n";
    if let Some(dir) = &a.out_dir {
        write(&dir.join(format!("{}.compare.json", file_stem(&report.model))), &text)?;
    }
    print!("{text}");
    Ok(0)
}

fn export(a: ExportArgs) -> Result<u8> {
    let model = load(&a.model)?;
    let automaton = match &model.target {
        Target::Async(m) => m.automaton().clone(),
        Target::Mealy(m) => typestate_learn::convert::mealy_to_interface_automaton(m)
            .context("only closure-shaped Mealy machines can be exported")?,
        Target::Counter(_) => bail!("a request-response model has no finite automaton to export"),
    };
    let dot = export_dot(&automaton);
    match &a.out {
        Some(path) => write(path, &dot)?,
        None => print!("{dot}"),
    }
    Ok(0)
}

fn parse_sweep_oracle(s: &str) -> Result<SweepOracle> {
    Ok(match s {
        "perfect" => SweepOracle::Perfect,
        "dist" => SweepOracle::DistExact,
        other => match other.strip_prefix("dist:").map(str::parse) {
            Some(Ok(b)) => SweepOracle::Dist(b),
            _ => bail!("unknown sweep oracle {other:?} (perfect, dist, dist:<B>)"),
        },
    })
}

fn sweep(a: SweepArgs) -> Result<u8> {
    let oracle = parse_sweep_oracle(&a.oracle)?;
    let cases = sweep_cases(a.count, a.seed);
    let results = if a.sequential {
        run_sweep_sequential(&cases, oracle)
    } else {
        run_sweep(&cases, oracle)
    };
    let mut failures = 0usize;
    let mut correct = 0usize;
    let mut within = 0usize;
    for r in &results {
        match r {
            Ok(r) => {
                println!("{}", serde_json::to_string(r)?);
                correct += r.correct as usize;
                within += r.eq_within_budget as usize;
            }
            Err(e) => {
                failures += 1;
                eprintln!("case failed: {e}");
            }
        }
    }
    eprintln!(
        "{} cases: {correct} correct, {within} within the per-query bound, {failures} errors",
        results.len()
    );
    Ok(if failures == 0 && correct == results.len() {
        0
    } else {
        EXIT_VERIFY
    })
}
