mod config;
mod ops;
mod params;

use clap::{Args, Parser, Subcommand};
use config::{CliError, ExperimentConfig};
use params::*;
use serde_json::{json, Value};
use specflow::par::Exec;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Special flows over torus rotations: certified diagnostics as CSV plus a JSON summary.
///
/// Exit codes: 0 all checks pass, 1 a check or certificate failed, 2 invalid input, 3 precision exhausted.
#[derive(Parser)]
#[command(name = "specflow-lab", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Experiment config (JSON); flags given here override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    precision_bits: Option<u32>,
    /// Output directory [default: specflow-out]
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker cap; results do not depend on it
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Also write a gnuplot script for the CSV
    #[arg(long, global = true)]
    plot_script: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Convergents p_n/q_n and both approximation inequalities
    Convergents(ConvergentsParams),
    /// Common denominators from palindromic Thue–Morse prefixes
    PalindromicPair(PalindromicParams),
    /// Greedy Yoccoz pair and its growth conditions
    Yoccoz(YoccozParams),
    /// Bounded search for an integer relation kα + lβ = m
    Ergodicity(ErgodicityParams),
    /// Birkhoff sums f^(m) against m∫f
    Birkhoff(BirkhoffParams),
    /// A flow trajectory
    Flow(FlowParams),
    /// Oscillatory integral of one slice against its bound
    ExpSum(ExpSumParams),
    /// |∫∫ e^{2πis f^(n)}| against 1/(π|s|θ)-type bounds
    WeakMixing(WeakMixingParams),
    /// Level-set measure of return times against its bound
    LevelSet(LevelSetParams),
    /// Monte Carlo correlations μ(T_t A ∩ B)
    Correlate(CorrelateParams),
    /// Denjoy–Koksma scan along common denominators
    Rigidity(RigidityParams),
    /// Histogram of the centred cocycle along a common denominator
    Distribution(DistributionParams),
    /// Partial partitions and stretch checks for a Yoccoz pair
    Fayad(FayadParams),
    /// Crossing times of a nearby pair and their sparseness
    Crossings(CrossingsParams),
    /// Residuals of the exact cocycle identities
    Identity(IdentityParams),
    /// Constructive shadowing witnesses for random nearby pairs
    RatnerWitness(WitnessParams),
    /// Run the operation named in the config's `operation` field
    Run,
}

impl Command {
    /// Operation name and the flags that were actually given.
    fn split(&self) -> (Option<&'static str>, Value) {
        match self {
            Command::Convergents(p) => (Some("convergents"), v(p)),
            Command::PalindromicPair(p) => (Some("palindromic-pair"), v(p)),
            Command::Yoccoz(p) => (Some("yoccoz"), v(p)),
            Command::Ergodicity(p) => (Some("ergodicity"), v(p)),
            Command::Birkhoff(p) => (Some("birkhoff"), v(p)),
            Command::Flow(p) => (Some("flow"), v(p)),
            Command::ExpSum(p) => (Some("exp-sum"), v(p)),
            Command::WeakMixing(p) => (Some("weak-mixing"), v(p)),
            Command::LevelSet(p) => (Some("level-set"), v(p)),
            Command::Correlate(p) => (Some("correlate"), v(p)),
            Command::Rigidity(p) => (Some("rigidity"), v(p)),
            Command::Distribution(p) => (Some("distribution"), v(p)),
            Command::Fayad(p) => (Some("fayad"), v(p)),
            Command::Crossings(p) => (Some("crossings"), v(p)),
            Command::Identity(p) => (Some("identity"), v(p)),
            Command::RatnerWitness(p) => (Some("ratner-witness"), v(p)),
            Command::Run => (None, json!({})),
        }
    }
}

fn v<T: serde::Serialize>(p: &T) -> Value {
    serde_json::to_value(p).expect("flags serialise")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("specflow-lab: one or more checks failed; see the summary");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("specflow-lab: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let g = cli.global;
    let mut cfg = match &g.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let (name, overlay) = cli.command.split();
    let name = match (name, cfg.operation.as_deref()) {
        (Some(n), Some(c)) if n != c => {
            return Err(CliError::Validation(format!("config is for `{c}` but the subcommand is `{n}`")));
        }
        (Some(n), _) => n.to_string(),
        (None, Some(c)) => c.to_string(),
        (None, None) => return Err(CliError::Validation("`run` needs an `operation` in the config".into())),
    };
    if !ops::OPERATIONS.contains(&name.as_str()) {
        return Err(CliError::Validation(format!("unknown operation `{name}`")));
    }
    cfg.operation = Some(name.clone());
    cfg.overlay_params(overlay);
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(b) = g.precision_bits {
        cfg.precision_bits = Some(b);
    }
    if let Some(o) = g.out {
        cfg.output.dir = Some(o);
    }

    let exec = Exec::default();
    let ctx = ops::Ctx { cfg: &cfg, exec };
    let report = exec.with_threads(g.threads, || ops::run(&name, &ctx))?;

    let dir = cfg.output.dir.clone().unwrap_or_else(|| PathBuf::from("specflow-out"));
    let stem = cfg.output.stem.clone().unwrap_or_else(|| name.clone());
    fs::create_dir_all(&dir)?;
    let csv_name = format!("{stem}.csv");
    write_csv(&dir.join(&csv_name), &report.table)?;

    let summary = json!({
        "operation": name,
        "config_hash": cfg.hash(),
        "seed": cfg.seed,
        "precision_bits": report.rotation.as_ref().map(|r| r.precision_bits),
        "inputs": {
            "rotation": report.rotation,
            "roof": report.roof,
            "params": cfg.params,
        },
        "results": report.results,
        "pass": report.pass,
        "csv": csv_name,
    });
    let text = serde_json::to_string_pretty(&summary).expect("summary serialises");
    fs::write(dir.join(format!("{stem}.json")), format!("{text}\n"))?;
    if g.plot_script {
        fs::write(dir.join(format!("{stem}.gp")), plot_script(&csv_name, &report.table))?;
    }
    // A closed pipe (e.g. `| head`) must not turn a finished run into a failure.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    Ok(report.pass)
}

fn write_csv(path: &Path, t: &ops::Table) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&t.header)?;
    for r in &t.rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn plot_script(csv_name: &str, t: &ops::Table) -> String {
    let (x, ys) = &t.plot;
    let curves: Vec<String> = ys
        .iter()
        .enumerate()
        .map(|(i, y)| {
            let src = if i == 0 { format!("'{csv_name}'") } else { "''".into() };
            format!("{src} using {x}:{y} with linespoints title '{}'", t.header[y - 1])
        })
        .collect();
    format!(
        "# gnuplot script for {csv_name}\nset datafile separator ','\nset xlabel '{}'\nplot {}\n",
        t.header[x - 1],
        curves.join(", \\\n     ")
    )
}
