//! Parallel ensembles with bit-reproducible output. Count sums are taken in
//! exact integer arithmetic (order cannot matter); everything floating-point
//! is computed per run, reassembled in run order, and only then reduced — so
//! the summary is a pure function of (config), not of worker count.

use std::io;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{percolate, PercolationConfig};
use crate::limits::{solve_threshold, THRESHOLD_TOL};
use crate::urn::{urn_run, UrnConfig};

/// Which per-run material the summary keeps beyond the always-on aggregates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RecordSet {
    /// Full count series of every run.
    pub traces: bool,
    /// First-exhaustion step of every run, scaled by 1/n.
    pub exhaustions: bool,
    /// Mean/variance traces of the compensated process T(k).
    pub martingale: bool,
    /// Mean trace of the scaled process U(k)/n.
    pub scaled: bool,
}

impl RecordSet {
    pub const NONE: RecordSet = RecordSet {
        traces: false,
        exhaustions: false,
        martingale: false,
        scaled: false,
    };

    pub fn all() -> RecordSet {
        RecordSet {
            traces: true,
            exhaustions: true,
            martingale: true,
            scaled: true,
        }
    }

    pub fn exhaustions_only() -> RecordSet {
        RecordSet {
            exhaustions: true,
            ..RecordSet::NONE
        }
    }
}

/// Which simulator an ensemble drives. The config's own seed/stream fields
/// are ignored: the ensemble stamps (base_seed, run index) onto each run.
#[derive(Debug, Clone, PartialEq)]
pub enum SimParams {
    Urn(UrnConfig),
    Graph(PercolationConfig),
}

impl SimParams {
    /// Ball count of the urn view: n for an urn, vertices - 1 for a graph.
    pub fn n(&self) -> u64 {
        match self {
            SimParams::Urn(c) => c.n,
            SimParams::Graph(c) => c.n_plus_1 - 1,
        }
    }

    pub fn p(&self) -> f64 {
        match self {
            SimParams::Urn(c) => c.p,
            SimParams::Graph(c) => c.p,
        }
    }

    pub fn contact_rate(&self) -> f64 {
        match self {
            SimParams::Urn(c) => c.c,
            SimParams::Graph(c) => c.n_plus_1.saturating_sub(1) as f64 * c.p,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub runs: u64,
    pub base_seed: u64,
    pub sim: SimParams,
    pub record: RecordSet,
}

impl EnsembleConfig {
    pub fn new(runs: u64, base_seed: u64, sim: SimParams, record: RecordSet) -> Result<Self> {
        if runs == 0 {
            return Err(Error::InvalidConfig(
                "ensemble needs at least one run".into(),
            ));
        }
        Ok(EnsembleConfig {
            runs,
            base_seed,
            sim,
            record,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub runs: u64,
    /// Ball count (the graph arm reports its vertex count minus one).
    pub n: u64,
    /// Contact rate c = n p of the urn view.
    pub c: f64,
    /// Mean of the count series per step; index 0 is the initial count n.
    pub mean_trace: Vec<f64>,
    /// Sample variance of the count series per step (0 for a single run).
    pub var_trace: Vec<f64>,
    /// How many runs had already ended (and were held at 0) at each index.
    pub padded: Vec<u64>,
    pub scaled_mean_trace: Option<Vec<f64>>,
    pub martingale_mean_trace: Option<Vec<f64>>,
    pub martingale_var_trace: Option<Vec<f64>>,
    /// First-exhaustion step of each run, scaled by 1/n, in run order.
    pub exhaustion_samples: Option<Vec<f64>>,
    /// Whether each exhaustion lies past alpha_star/2 (supercritical only).
    pub exhaustion_is_giant: Option<Vec<bool>>,
    /// Root of the crossing equation when c > 1.
    pub alpha_star: Option<f64>,
    /// Fraction of runs whose component died while untouched counts remained.
    pub failure_fraction: f64,
    /// Mean over runs of (max_{k <= n} |T(k) - T(k-1)| / sqrt(n))^2;
    /// absent when q = 0 leaves T undefined.
    pub max_jump_sq_mean: Option<f64>,
    /// Full count series per run, in run order.
    pub traces: Option<Vec<Vec<u64>>>,
}

impl EnsembleSummary {
    /// Columns: run_index, scaled_time, is_giant (0/1). Header always;
    /// rows only when exhaustions were recorded.
    pub fn write_exhaustions_csv<W: io::Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "run_index,scaled_time,is_giant")?;
        if let (Some(samples), Some(giant)) = (&self.exhaustion_samples, &self.exhaustion_is_giant)
        {
            for (i, (s, g)) in samples.iter().zip(giant).enumerate() {
                writeln!(out, "{i},{s},{}", u8::from(*g))?;
            }
        }
        Ok(())
    }
}

/// Scalars extracted from one run while its trace is still in scope.
struct RunOutcome {
    k_end: u64,
    exhaustion_step: u64,
    exhausted_early: bool,
    jump_sq: f64,
}

#[derive(Default)]
struct Acc {
    sum: Vec<u128>,
    sum_sq: Vec<u128>,
    outcomes: Vec<(u64, RunOutcome)>,
    traces: Vec<(u64, Vec<u64>)>,
}

impl Acc {
    fn absorb_series(&mut self, series: &[u64]) {
        if self.sum.len() < series.len() {
            self.sum.resize(series.len(), 0);
            self.sum_sq.resize(series.len(), 0);
        }
        for (k, &v) in series.iter().enumerate() {
            let v = v as u128;
            self.sum[k] += v;
            self.sum_sq[k] += v * v;
        }
    }

    fn merge(mut self, mut other: Acc) -> Acc {
        if self.sum.len() < other.sum.len() {
            std::mem::swap(&mut self, &mut other);
        }
        for (k, v) in other.sum.into_iter().enumerate() {
            self.sum[k] += v;
        }
        for (k, v) in other.sum_sq.into_iter().enumerate() {
            self.sum_sq[k] += v;
        }
        self.outcomes.append(&mut other.outcomes);
        self.traces.append(&mut other.traces);
        self
    }
}

/// Largest compensated one-step move, squared: (max_k |b(k) - p u(k-1)| /
/// (n q^k))^2 over the window 1 <= k <= min(n, run length).
fn squared_max_jump(series: &[u64], n: u64, p: f64, q: f64) -> f64 {
    let n_f = n as f64;
    let window = (series.len() - 1).min(n as usize);
    let mut max = 0.0f64;
    for k in 1..=window {
        let b = (series[k - 1] - series[k]) as f64;
        let jump = (b - p * series[k - 1] as f64).abs() / (n_f * q.powi(k as i32));
        max = max.max(jump);
    }
    max * max
}

pub fn run_ensemble(config: &EnsembleConfig) -> Result<EnsembleSummary> {
    let n = config.sim.n();
    let p = config.sim.p();
    let q = 1.0 - p;
    let n_f = n as f64;
    let keep_traces = config.record.traces;

    let acc = (0..config.runs)
        .into_par_iter()
        .try_fold(Acc::default, |mut acc, i| -> Result<Acc> {
            let (series, exhaustion_step, exhausted_early) = match &config.sim {
                SimParams::Urn(base) => {
                    let run_cfg = UrnConfig {
                        seed: config.base_seed,
                        stream_id: i,
                        ..base.clone()
                    };
                    let trace = urn_run(&run_cfg)?;
                    let step = trace.first_exhaustion_step();
                    let early = trace.count_at(step) > 0;
                    (trace.u, step, early)
                }
                SimParams::Graph(base) => {
                    let run_cfg = PercolationConfig {
                        seed: config.base_seed,
                        stream_id: i,
                        ..base.clone()
                    };
                    let trace = percolate(&run_cfg)?;
                    let step = trace.first_exhaustion_step();
                    let early = trace.steps[step as usize - 1].not_visited > 0;
                    (trace.not_visited_series(), step, early)
                }
            };
            acc.absorb_series(&series);
            let jump_sq = if q > 0.0 {
                squared_max_jump(&series, n, p, q)
            } else {
                0.0
            };
            acc.outcomes.push((
                i,
                RunOutcome {
                    k_end: (series.len() - 1) as u64,
                    exhaustion_step,
                    exhausted_early,
                    jump_sq,
                },
            ));
            if keep_traces {
                acc.traces.push((i, series));
            }
            Ok(acc)
        })
        .try_reduce(Acc::default, |a, b| Ok(a.merge(b)));
    let mut acc = acc?;

    acc.outcomes.sort_unstable_by_key(|(i, _)| *i);
    acc.traces.sort_unstable_by_key(|(i, _)| *i);

    let runs_f = config.runs as f64;
    let grid = acc.sum.len();
    let mean_trace: Vec<f64> = acc.sum.iter().map(|&s| s as f64 / runs_f).collect();
    let var_trace: Vec<f64> = if config.runs == 1 {
        vec![0.0; grid]
    } else {
        acc.sum
            .iter()
            .zip(&acc.sum_sq)
            .map(|(&s, &ss)| {
                let s = s as f64;
                (ss as f64 - s * s / runs_f) / (runs_f - 1.0)
            })
            .collect()
    };

    let mut ended_at = vec![0u64; grid];
    for (_, o) in &acc.outcomes {
        ended_at[o.k_end as usize] += 1;
    }
    let mut padded = vec![0u64; grid];
    let mut ended = 0;
    for k in 1..grid {
        ended += ended_at[k - 1];
        padded[k] = ended;
    }

    let scaled_mean_trace = config
        .record
        .scaled
        .then(|| mean_trace.iter().map(|m| m / n_f).collect());

    let (martingale_mean_trace, martingale_var_trace) = if config.record.martingale && q > 0.0 {
        // T is affine in U at each k, so its aggregates derive exactly from
        // the integer count sums
        let sqrt_n = n_f.sqrt();
        let mean = mean_trace
            .iter()
            .enumerate()
            .map(|(k, m)| (m / q.powi(k as i32) - n_f) / sqrt_n)
            .collect();
        let var = var_trace
            .iter()
            .enumerate()
            .map(|(k, v)| v / (n_f * q.powi(2 * k as i32)))
            .collect();
        (Some(mean), Some(var))
    } else {
        (None, None)
    };

    let supercritical = config.sim.contact_rate() > 1.0;
    let alpha_star = if supercritical {
        Some(solve_threshold(config.sim.contact_rate(), THRESHOLD_TOL)?.alpha_star)
    } else {
        None
    };

    let (exhaustion_samples, exhaustion_is_giant) = if config.record.exhaustions {
        let samples: Vec<f64> = acc
            .outcomes
            .iter()
            .map(|(_, o)| o.exhaustion_step as f64 / n_f)
            .collect();
        let giant = match alpha_star {
            Some(a) => samples.iter().map(|&s| s > a / 2.0).collect(),
            None => vec![false; samples.len()],
        };
        (Some(samples), Some(giant))
    } else {
        (None, None)
    };

    let failures = acc
        .outcomes
        .iter()
        .filter(|(_, o)| o.exhausted_early)
        .count();
    let max_jump_sq_mean =
        (q > 0.0).then(|| acc.outcomes.iter().map(|(_, o)| o.jump_sq).sum::<f64>() / runs_f);

    Ok(EnsembleSummary {
        runs: config.runs,
        n,
        c: config.sim.contact_rate(),
        mean_trace,
        var_trace,
        padded,
        scaled_mean_trace,
        martingale_mean_trace,
        martingale_var_trace,
        exhaustion_samples,
        exhaustion_is_giant,
        alpha_star,
        failure_fraction: failures as f64 / runs_f,
        max_jump_sq_mean,
        traces: keep_traces.then(|| acc.traces.into_iter().map(|(_, t)| t).collect()),
    })
}
