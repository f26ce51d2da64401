//! The two-urn twin of the graph process: balls sit in a "not visited" urn
//! and each step moves a Binomial(U, p) batch out, so U(k) alone carries the
//! whole law of the graph's untouched-vertex count. Also provides the two
//! rescaled views used by the limit analysis: S(alpha) = U(alpha n)/n on the
//! alpha = k/n grid, and the compensated process T(k) = (U(k)/q^k - n)/sqrt(n)
//! whose increments are centered.

use std::io;

use crate::error::{Error, Result};
use crate::kernel::{binomial_draw, RngStream};

#[derive(Debug, Clone, PartialEq)]
pub struct UrnConfig {
    pub n: u64,
    pub p: f64,
    /// c = n * p, the mean contact rate; kept exactly consistent with p.
    pub c: f64,
    pub seed: u64,
    pub stream_id: u64,
}

impl UrnConfig {
    pub fn from_probability(n: u64, p: f64, seed: u64, stream_id: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("urn needs at least one ball".into()));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        if p == 0.0 {
            return Err(Error::InvalidConfig(
                "p = 0 never drains the urn; the run would not terminate".into(),
            ));
        }
        Ok(UrnConfig {
            n,
            p,
            c: n as f64 * p,
            seed,
            stream_id,
        })
    }

    pub fn from_contact_rate(n: u64, c: f64, seed: u64, stream_id: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("urn needs at least one ball".into()));
        }
        if !c.is_finite() || c <= 0.0 || c > n as f64 {
            return Err(Error::InvalidRate(c));
        }
        let p = c / n as f64;
        // re-derive c so that c == n * p holds exactly in floats
        Ok(UrnConfig {
            n,
            p,
            c: n as f64 * p,
            seed,
            stream_id,
        })
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    /// Same bound as the graph process on n + 1 vertices.
    pub fn step_cap(&self) -> u64 {
        crate::graph::step_cap(self.n + 1, self.p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UrnTrace {
    /// U(k) for k = 0..=k_end; u[0] = n, u[k_end] = 0.
    pub u: Vec<u64>,
    /// moved[k] is the batch drawn while at u[k], so u[k+1] = u[k] - moved[k].
    pub moved: Vec<u64>,
}

impl UrnTrace {
    pub fn n(&self) -> u64 {
        self.u[0]
    }

    pub fn k_end(&self) -> u64 {
        (self.u.len() - 1) as u64
    }

    /// U(k), extended by the absorbed state: zero for k past the trace.
    pub fn count_at(&self, k: u64) -> u64 {
        self.u.get(k as usize).copied().unwrap_or(0)
    }

    /// First k >= 1 with n - U(k) < k: the moved-out count has fallen behind
    /// the clock, which is exactly when the graph twin runs out of
    /// visited-not-transmitted vertices. Falls through to n + 1 when the run
    /// drains too fast for the condition to fire inside the trace.
    pub fn first_exhaustion_step(&self) -> u64 {
        let n = self.n();
        for k in 1..self.u.len() {
            if n - self.u[k] < k as u64 {
                return k as u64;
            }
        }
        n + 1
    }

    /// Columns: k, u, moved. The terminal row's moved is 0 (nothing leaves
    /// an empty urn).
    pub fn write_csv<W: io::Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "k,u,moved")?;
        for (k, &u) in self.u.iter().enumerate() {
            let moved = self.moved.get(k).copied().unwrap_or(0);
            writeln!(out, "{k},{u},{moved}")?;
        }
        Ok(())
    }
}

pub fn urn_run(config: &UrnConfig) -> Result<UrnTrace> {
    let mut rng = RngStream::new(config.seed, config.stream_id);
    urn_run_with(config, &mut rng)
}

/// As `urn_run`, on a caller-supplied stream: one word per step, since the
/// urn is nonempty at every draw.
pub fn urn_run_with(config: &UrnConfig, rng: &mut RngStream) -> Result<UrnTrace> {
    let cap = config.step_cap();
    let mut u = vec![config.n];
    let mut moved = Vec::new();
    let mut current = config.n;
    let mut k = 0u64;
    while current > 0 {
        k += 1;
        if k > cap {
            return Err(Error::StepCapExceeded {
                cap,
                size: config.n,
            });
        }
        let b = binomial_draw(current, config.p, rng)?;
        moved.push(b);
        current -= b;
        u.push(current);
    }
    Ok(UrnTrace { u, moved })
}

/// S(alpha) = U(alpha n)/n on the grid alpha = k/n, held constant to the
/// right between grid points and zero past the end of the trace.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledTrace {
    pub n: u64,
    pub alpha: Vec<f64>,
    pub s: Vec<f64>,
}

impl ScaledTrace {
    /// Right-continuous lookup: the value at the last grid point <= alpha.
    pub fn value_at(&self, alpha: f64) -> f64 {
        if alpha < 0.0 {
            return self.s[0];
        }
        let idx = (alpha * self.n as f64).floor() as usize;
        self.s.get(idx).copied().unwrap_or(0.0)
    }

    /// Columns: alpha, s.
    pub fn write_csv<W: io::Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "alpha,s")?;
        for (a, s) in self.alpha.iter().zip(&self.s) {
            writeln!(out, "{a},{s}")?;
        }
        Ok(())
    }
}

pub fn scale_trace(trace: &UrnTrace, config: &UrnConfig) -> ScaledTrace {
    let n_f = config.n as f64;
    let alpha = (0..trace.u.len()).map(|k| k as f64 / n_f).collect();
    let s = trace.u.iter().map(|&u| u as f64 / n_f).collect();
    ScaledTrace {
        n: config.n,
        alpha,
        s,
    }
}

/// The compensated process T(k) = (U(k) q^{-k} - n)/sqrt(n); its increments
/// are conditionally centered, so the path is a martingale started at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleTrace {
    pub t: Vec<f64>,
}

impl MartingaleTrace {
    /// Columns: k, t.
    pub fn write_csv<W: io::Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "k,t")?;
        for (k, t) in self.t.iter().enumerate() {
            writeln!(out, "{k},{t}")?;
        }
        Ok(())
    }
}

pub fn martingale_transform(trace: &UrnTrace, config: &UrnConfig) -> Result<MartingaleTrace> {
    let q = config.q();
    if q == 0.0 {
        return Err(Error::InvalidConfig(
            "compensator q^{-k} is undefined at q = 0".into(),
        ));
    }
    let n_f = config.n as f64;
    let sqrt_n = n_f.sqrt();
    let t = trace
        .u
        .iter()
        .enumerate()
        .map(|(k, &u)| {
            // gives exactly 0 at k = 0 and avoids 0/0 when q^k underflows
            let ratio = if u == 0 {
                0.0
            } else {
                u as f64 / q.powi(k as i32)
            };
            (ratio - n_f) / sqrt_n
        })
        .collect();
    Ok(MartingaleTrace { t })
}
