//! Command-line front end. Every subcommand is a thin adapter over the
//! library: stdout carries data (CSV for traces and ensembles, JSON for
//! analytics), stderr carries notes, and all randomness comes from --seed.

use std::error::Error;
use std::fs;
use std::io::{self, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use percolate::graph::{percolate, PercolationConfig};
use percolate::limits::{
    giant_exhaustion_law, solve_threshold, HittingLaw, HittingLawRecord, LimitParams, THRESHOLD_TOL,
};
use percolate::urn::{martingale_transform, scale_trace, urn_run, UrnConfig};
use percolate::validation::{
    graph_urn_equivalence, hitting_law_check, increment_law_check, jump_decay_check,
    mean_decay_check, run_ensemble, stream_independence_check, variance_profile_check,
    EnsembleConfig, EnsembleSummary, RecordSet, SimParams,
};

type CliResult<T> = Result<T, Box<dyn Error>>;

#[derive(Parser)]
#[command(
    name = "percolate",
    version,
    about = "Percolation/urn process simulator with limit-law analytics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// One ball count plus exactly one way of stating the contact rate.
#[derive(Args)]
#[command(group(clap::ArgGroup::new("rate").required(true)))]
struct RateArgs {
    /// Ball count n; the graph simulator runs on n + 1 vertices
    #[arg(long)]
    n: u64,
    /// Contact rate c = n * p
    #[arg(long, group = "rate")]
    c: Option<f64>,
    /// Per-contact probability p (alternative to --c)
    #[arg(long, group = "rate")]
    p: Option<f64>,
}

impl RateArgs {
    fn prob(&self) -> f64 {
        match (self.c, self.p) {
            (Some(c), None) => c / self.n as f64,
            (None, Some(p)) => p,
            _ => unreachable!("the rate group admits exactly one flag"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum View {
    /// Raw counts per step
    Trace,
    /// Count over n on the alpha = k/n clock
    Scaled,
    /// Compensated process (U(k)/q^k - n)/sqrt(n)
    Martingale,
}

#[derive(Clone, Copy, ValueEnum)]
enum Arm {
    Urn,
    Graph,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckName {
    IncrementLaw,
    MeanDecay,
    VarianceProfile,
    JumpDecay,
    Equivalence,
    HittingLaw,
    StreamIndependence,
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureName {
    /// 100 urn runs at n = 100, c = 1.6 with the exhaustion diagonal
    UrnEnsemble,
    /// alpha_star over the c grid [0.5, 4.0] in steps of 0.05
    ThresholdCurve,
}

#[derive(Subcommand)]
enum Command {
    /// Spread labels over a fresh random graph and print the step trace
    SimulateGraph {
        #[command(flatten)]
        rate: RateArgs,
        /// RNG seed; equal seeds reproduce runs bit for bit
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write to this file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the two-urn process and print one of its trace views
    SimulateUrn {
        #[command(flatten)]
        rate: RateArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Which columns to emit
        #[arg(long, value_enum, default_value_t = View::Trace)]
        view: View,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate many runs in parallel: mean/variance traces and diagnostics
    Ensemble {
        #[command(flatten)]
        rate: RateArgs,
        /// Which simulator drives the runs
        #[arg(long, value_enum, default_value_t = Arm::Urn)]
        arm: Arm,
        #[arg(long, default_value_t = 1000)]
        runs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads; the output is identical for any count
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Also write per-run scaled exhaustion times to this CSV
        #[arg(long)]
        exhaustions_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gaussian law of the first downward crossing of a level, with density
    Density {
        /// Level in (0, 1) whose crossing is described
        #[arg(long = "level-A")]
        level_a: f64,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve e^(-c*alpha) = 1 - alpha for the drained fraction alpha_star
    Threshold {
        #[arg(long)]
        c: f64,
        /// Residual tolerance on the root
        #[arg(long, default_value_t = THRESHOLD_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Crossing law at the self-consistent level A = 1 - alpha_star
    ExhaustionLaw {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run named statistical checks; exits 1 if any check fails
    Validate {
        /// Subset of checks to run (repeatable; default: all)
        #[arg(long = "check", value_enum)]
        checks: Vec<CheckName>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads; results are identical for any count
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit one of the bundled reference datasets
    Figure {
        #[arg(value_enum)]
        name: FigureName,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> CliResult<ExitCode> {
    match command {
        Command::SimulateGraph { rate, seed, out } => {
            let config = PercolationConfig::new(rate.n + 1, rate.prob(), seed, 0)?;
            let trace = percolate(&config)?;
            let mut buf = Vec::new();
            trace.write_csv(&mut buf)?;
            emit(out.as_ref(), &buf)?;
        }
        Command::SimulateUrn {
            rate,
            seed,
            view,
            out,
        } => {
            let config = UrnConfig::from_probability(rate.n, rate.prob(), seed, 0)?;
            let trace = urn_run(&config)?;
            let mut buf = Vec::new();
            match view {
                View::Trace => trace.write_csv(&mut buf)?,
                View::Scaled => scale_trace(&trace, &config).write_csv(&mut buf)?,
                View::Martingale => martingale_transform(&trace, &config)?.write_csv(&mut buf)?,
            }
            emit(out.as_ref(), &buf)?;
        }
        Command::Ensemble {
            rate,
            arm,
            runs,
            seed,
            workers,
            format,
            exhaustions_out,
            out,
        } => {
            init_workers(workers)?;
            let p = rate.prob();
            let sim = match arm {
                Arm::Urn => SimParams::Urn(UrnConfig::from_probability(rate.n, p, 0, 0)?),
                Arm::Graph => SimParams::Graph(PercolationConfig::new(rate.n + 1, p, 0, 0)?),
            };
            let record = RecordSet {
                traces: false,
                exhaustions: exhaustions_out.is_some(),
                martingale: true,
                scaled: true,
            };
            let summary = run_ensemble(&EnsembleConfig::new(runs, seed, sim, record)?)?;
            eprintln!(
                "ensemble: {} runs, n = {}, c = {}, failure fraction {}",
                summary.runs, summary.n, summary.c, summary.failure_fraction
            );
            if let Some(path) = &exhaustions_out {
                let mut buf = Vec::new();
                summary.write_exhaustions_csv(&mut buf)?;
                fs::write(path, &buf)
                    .map_err(|e| format!("--exhaustions-out {}: {e}", path.display()))?;
            }
            let data = match format {
                Format::Csv => ensemble_csv(&summary).into_bytes(),
                Format::Json => pretty_json(&serde_json::to_value(&summary)?),
            };
            emit(out.as_ref(), &data)?;
        }
        Command::Density { level_a, c, n, out } => {
            let params = LimitParams::new(n, c)?;
            let law = HittingLaw::from_level(level_a, &params)?;
            let mut value = serde_json::to_value(HittingLawRecord::new(&law, &params))?;
            // 101-point density curve over alpha0 +/- 5 sd for plotting
            let curve: Vec<serde_json::Value> = (0..=100)
                .map(|i| {
                    let t = law.alpha0 + law.sd * (i as f64 - 50.0) / 10.0;
                    serde_json::json!({ "t": t, "density": law.density(t) })
                })
                .collect();
            value["curve"] = serde_json::Value::Array(curve);
            emit(out.as_ref(), &pretty_json(&value))?;
        }
        Command::Threshold { c, tol, out } => {
            let solution = solve_threshold(c, tol)?;
            emit(out.as_ref(), &pretty_json(&serde_json::to_value(solution)?))?;
        }
        Command::ExhaustionLaw { c, n, out } => {
            let law = giant_exhaustion_law(c, n)?;
            let record = HittingLawRecord::new(&law, &LimitParams::new(n, c)?);
            emit(out.as_ref(), &pretty_json(&serde_json::to_value(record)?))?;
        }
        Command::Validate {
            checks,
            seed,
            workers,
            out,
        } => {
            init_workers(workers)?;
            return run_validate(&checks, seed, out.as_ref());
        }
        Command::Figure { name, seed, out } => {
            let data = match name {
                FigureName::UrnEnsemble => figure_urn_ensemble(seed)?,
                FigureName::ThresholdCurve => figure_threshold_curve()?,
            };
            emit(out.as_ref(), data.as_bytes())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn emit(out: Option<&PathBuf>, data: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => {
            fs::write(path, data).map_err(|e| format!("--out {}: {e}", path.display()))?
        }
        None => io::stdout().write_all(data)?,
    }
    Ok(())
}

fn pretty_json(value: &serde_json::Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

fn init_workers(workers: Option<usize>) -> CliResult<()> {
    if let Some(w) = workers {
        if w == 0 {
            return Err("--workers must be at least 1".into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| format!("--workers: {e}"))?;
    }
    Ok(())
}

/// Columns per step index: mean/variance of the count, how many runs had
/// already ended, then the scaled and compensated views when recorded.
fn ensemble_csv(summary: &EnsembleSummary) -> String {
    let mut s = String::from("k,mean_u,var_u,ended");
    let scaled = summary.scaled_mean_trace.as_deref();
    let mt = summary.martingale_mean_trace.as_deref();
    let vt = summary.martingale_var_trace.as_deref();
    if scaled.is_some() {
        s.push_str(",scaled_mean");
    }
    if mt.is_some() && vt.is_some() {
        s.push_str(",mean_t,var_t");
    }
    s.push('\n');
    for k in 0..summary.mean_trace.len() {
        s.push_str(&format!(
            "{k},{},{},{}",
            summary.mean_trace[k], summary.var_trace[k], summary.padded[k]
        ));
        if let Some(sc) = scaled {
            s.push_str(&format!(",{}", sc[k]));
        }
        if let (Some(m), Some(v)) = (mt, vt) {
            s.push_str(&format!(",{},{}", m[k], v[k]));
        }
        s.push('\n');
    }
    s
}

fn run_validate(requested: &[CheckName], seed: u64, out: Option<&PathBuf>) -> CliResult<ExitCode> {
    const ALL: [CheckName; 7] = [
        CheckName::IncrementLaw,
        CheckName::MeanDecay,
        CheckName::VarianceProfile,
        CheckName::JumpDecay,
        CheckName::Equivalence,
        CheckName::HittingLaw,
        CheckName::StreamIndependence,
    ];
    let mut list: Vec<CheckName> = Vec::new();
    for &c in if requested.is_empty() {
        &ALL[..]
    } else {
        requested
    } {
        if !list.contains(&c) {
            list.push(c);
        }
    }
    let mut results = Vec::with_capacity(list.len());
    let mut all_pass = true;
    for check in list {
        let (name, pass, detail) = run_check(check, seed)?;
        eprintln!("check {name}: {}", if pass { "PASS" } else { "FAIL" });
        all_pass &= pass;
        results.push(serde_json::json!({ "check": name, "pass": pass, "report": detail }));
    }
    emit(out, &pretty_json(&serde_json::Value::Array(results)))?;
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

/// Fixed reference scales per check; the KS gate is 0.05 and the chi-square
/// gate is p > 0.01.
fn run_check(check: CheckName, seed: u64) -> CliResult<(&'static str, bool, serde_json::Value)> {
    Ok(match check {
        CheckName::IncrementLaw => {
            let report = increment_law_check(4, 0.3, 20_000, seed)?;
            let pass = report.p_value > 0.01;
            ("increment-law", pass, serde_json::to_value(report)?)
        }
        CheckName::MeanDecay => {
            let report = mean_decay_check(100, 1.6, 10_000, seed)?;
            ("mean-decay", report.pass, serde_json::to_value(report)?)
        }
        CheckName::VarianceProfile => {
            let report = variance_profile_check(1000, 1.6, 10_000, seed)?;
            (
                "variance-profile",
                report.pass,
                serde_json::to_value(report)?,
            )
        }
        CheckName::JumpDecay => {
            let report = jump_decay_check(1.6, 10_000, seed)?;
            ("jump-decay", report.pass, serde_json::to_value(report)?)
        }
        CheckName::Equivalence => {
            let report = graph_urn_equivalence(100, 1.6, 5000, seed)?;
            let pass = report.statistic < 0.05;
            ("equivalence", pass, serde_json::to_value(report)?)
        }
        CheckName::HittingLaw => {
            let report = hitting_law_check(2.0, 400, 5000, seed)?;
            let pass = report.report.statistic < 0.05;
            ("hitting-law", pass, serde_json::to_value(report)?)
        }
        CheckName::StreamIndependence => {
            let report = stream_independence_check(seed);
            (
                "stream-independence",
                report.pass,
                serde_json::to_value(report)?,
            )
        }
    })
}

/// 100 runs at n = 100, c = 1.6: per-step counts next to the exhaustion
/// diagonal n - k. Early-exhaustion and small-component tallies go to
/// stderr so the dataset stays purely columnar.
fn figure_urn_ensemble(seed: u64) -> CliResult<String> {
    let (n, c, runs) = (100u64, 1.6, 100u64);
    let alpha_star = solve_threshold(c, THRESHOLD_TOL)?.alpha_star;
    let mut s = String::from("run,k,u,diagonal\n");
    let mut early = 0u64;
    let mut small_component = 0u64;
    for run in 0..runs {
        let config = UrnConfig::from_contact_rate(n, c, seed, run)?;
        let trace = urn_run(&config)?;
        let step = trace.first_exhaustion_step();
        if trace.count_at(step) > 0 {
            early += 1;
        }
        if (step as f64 / n as f64) <= alpha_star / 2.0 {
            small_component += 1;
        }
        for (k, &u) in trace.u.iter().enumerate() {
            s.push_str(&format!("{run},{k},{u},{}\n", n.saturating_sub(k as u64)));
        }
    }
    eprintln!("figure urn-ensemble: n = {n}, c = {c}, runs = {runs}, seed = {seed}");
    eprintln!(
        "note: {early}/{runs} runs exhausted early (untouched balls remained); \
         {small_component}/{runs} exhausted before alpha_star/2"
    );
    Ok(s)
}

fn figure_threshold_curve() -> CliResult<String> {
    let mut s = String::from("c,alpha_star\n");
    for i in 0..=70u64 {
        let c = (50 + 5 * i) as f64 / 100.0;
        let solution = solve_threshold(c, THRESHOLD_TOL)?;
        s.push_str(&format!("{c},{}\n", solution.alpha_star));
    }
    Ok(s)
}
