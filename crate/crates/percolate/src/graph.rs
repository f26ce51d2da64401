//! Component spread on a random graph with deferred edge decisions.
//!
//! Edges are never materialized. A transmitting vertex reaches a
//! Binomial(not_visited, p) subset of the untouched vertices, which is the
//! exact law of its untouched-neighbor count on an Erdős–Rényi graph; which
//! particular vertices join is a uniform subset and never affects the counts,
//! so runs are O(steps) memory with one stream word per positive-trial draw.

use std::io;

use crate::error::{Error, Result};
use crate::kernel::{binomial_draw, RngStream};

/// Lifecycle of a single vertex. Transitions only run forward:
/// NotVisited -> VisitedNotTransmitted -> VisitedTransmitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexLabel {
    NotVisited,
    VisitedNotTransmitted,
    VisitedTransmitted,
}

impl VertexLabel {
    /// The label a vertex takes when it is touched next, if any.
    pub fn advanced(self) -> Option<VertexLabel> {
        match self {
            VertexLabel::NotVisited => Some(VertexLabel::VisitedNotTransmitted),
            VertexLabel::VisitedNotTransmitted => Some(VertexLabel::VisitedTransmitted),
            VertexLabel::VisitedTransmitted => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PercolationConfig {
    pub n_plus_1: u64,
    pub p: f64,
    pub seed: u64,
    pub stream_id: u64,
}

impl PercolationConfig {
    pub fn new(n_plus_1: u64, p: f64, seed: u64, stream_id: u64) -> Result<Self> {
        if n_plus_1 == 0 {
            return Err(Error::InvalidConfig(
                "graph needs at least one vertex".into(),
            ));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        Ok(PercolationConfig {
            n_plus_1,
            p,
            seed,
            stream_id,
        })
    }

    /// Hard step bound. Transmissions take exactly n_plus_1 steps; reseed
    /// stretches at the smallest positive pool have mean < 1/p steps each,
    /// so this is generous by orders of magnitude. With p = 0 the process
    /// cannot finish and the cap converts the hang into an error.
    pub fn step_cap(&self) -> u64 {
        step_cap(self.n_plus_1, self.p)
    }
}

pub(crate) fn step_cap(size: u64, p: f64) -> u64 {
    let base = 4 * size + 1000;
    if p > 0.0 {
        base + (1000.0 / p).ceil() as u64
    } else {
        base
    }
}

/// State counts after one step, plus what the step did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepRecord {
    pub k: u64,
    pub not_visited: u64,
    pub visited_not_transmitted: u64,
    pub visited_transmitted: u64,
    pub newly_visited: u64,
    /// True when the step was a fresh Binomial(not_visited, p) seeding draw
    /// taken because no visited vertex was left to transmit.
    pub reseed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PercolationTrace {
    pub n_plus_1: u64,
    pub p: f64,
    pub steps: Vec<StepRecord>,
    /// Steps at which no visited-not-transmitted vertex remained: every
    /// component exhaustion, terminal step included.
    pub exhaustion_steps: Vec<u64>,
}

impl PercolationTrace {
    /// First step with the visited-not-transmitted pool empty; this is the
    /// moment the component reached from the initial seed has been consumed.
    pub fn first_exhaustion_step(&self) -> u64 {
        self.exhaustion_steps[0]
    }

    /// not_visited counts aligned to the urn view: index 0 is the initial
    /// pool of n_plus_1 - 1, index k the count after step k.
    pub fn not_visited_series(&self) -> Vec<u64> {
        let mut series = Vec::with_capacity(self.steps.len() + 1);
        series.push(self.n_plus_1 - 1);
        series.extend(self.steps.iter().map(|r| r.not_visited));
        series
    }

    /// Columns: k, not_visited, visited_not_transmitted, visited_transmitted,
    /// newly_visited, reseed (0/1). One row per step.
    pub fn write_csv<W: io::Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(
            out,
            "k,not_visited,visited_not_transmitted,visited_transmitted,newly_visited,reseed"
        )?;
        for r in &self.steps {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.k,
                r.not_visited,
                r.visited_not_transmitted,
                r.visited_transmitted,
                r.newly_visited,
                u8::from(r.reseed)
            )?;
        }
        Ok(())
    }
}

/// Every step at which the visited-not-transmitted pool is empty: the
/// component exhaustions that force a reseed, plus the terminal step.
/// Recomputed from the rows; agrees with the trace's stored field.
pub fn exhaustion_steps(trace: &PercolationTrace) -> Vec<u64> {
    trace
        .steps
        .iter()
        .filter(|r| r.visited_not_transmitted == 0)
        .map(|r| r.k)
        .collect()
}

/// Run the spread to full transmission.
///
/// Starts from one seeded vertex (which vertex never matters to the counts).
/// Each step: if a visited-not-transmitted vertex exists, it transmits,
/// converting Binomial(not_visited, p) untouched vertices; otherwise, while
/// untouched vertices remain, a reseed draw converts Binomial(not_visited, p)
/// of them — a zero draw still advances the clock and is recorded.
pub fn percolate(config: &PercolationConfig) -> Result<PercolationTrace> {
    let mut rng = RngStream::new(config.seed, config.stream_id);
    percolate_with(config, &mut rng)
}

/// As `percolate`, but on a caller-supplied stream (one word per step with a
/// nonempty untouched pool; zero words otherwise).
pub fn percolate_with(config: &PercolationConfig, rng: &mut RngStream) -> Result<PercolationTrace> {
    let cap = config.step_cap();
    let mut not_visited = config.n_plus_1 - 1;
    let mut visited_nt = 1u64; // the seed
    let mut visited_t = 0u64;

    let mut steps = Vec::new();
    let mut exhaustions = Vec::new();
    let mut k = 0u64;

    while visited_nt > 0 || not_visited > 0 {
        k += 1;
        if k > cap {
            return Err(Error::StepCapExceeded {
                cap,
                size: config.n_plus_1,
            });
        }
        let reseed = visited_nt == 0;
        let b = binomial_draw(not_visited, config.p, rng)?;
        not_visited -= b;
        visited_nt += b;
        if !reseed {
            visited_nt -= 1;
            visited_t += 1;
        }
        steps.push(StepRecord {
            k,
            not_visited,
            visited_not_transmitted: visited_nt,
            visited_transmitted: visited_t,
            newly_visited: b,
            reseed,
        });
        if visited_nt == 0 {
            exhaustions.push(k);
        }
    }

    Ok(PercolationTrace {
        n_plus_1: config.n_plus_1,
        p: config.p,
        steps,
        exhaustion_steps: exhaustions,
    })
}
