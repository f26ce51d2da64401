//! Goodness-of-fit machinery: one- and two-sample Kolmogorov-Smirnov and a
//! chi-square comparison with automatic low-count bin merging.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StatName {
    #[serde(rename = "KS")]
    Ks,
    #[serde(rename = "chi_square")]
    ChiSquare,
}

impl std::fmt::Display for StatName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StatName::Ks => write!(f, "KS"),
            StatName::ChiSquare => write!(f, "chi_square"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GofReport {
    pub statistic_name: StatName,
    pub statistic: f64,
    pub p_value: f64,
    pub sample_size: u64,
}

/// Survival function of the Kolmogorov distribution: P(K > z). Theta-function
/// inversion below z = 0.755, a four-term alternating series above; both
/// forms agree to ~1e-10 at the seam.
fn kolmogorov_survival(z: f64) -> f64 {
    const W: f64 = 2.506_628_274_631_000_7; // sqrt(2 pi)
    const C1: f64 = -1.233_700_550_136_169_7; // -pi^2 / 8
    const C2: f64 = 9.0 * C1;
    const C3: f64 = 25.0 * C1;
    if z <= 0.0 {
        return 1.0;
    }
    if z < 0.2 {
        // cdf < 1e-75 here; survival indistinguishable from 1
        return 1.0;
    }
    if z < 0.755 {
        let v = 1.0 / (z * z);
        return 1.0 - W * ((C1 * v).exp() + (C2 * v).exp() + (C3 * v).exp()) / z;
    }
    if z < 6.8116 {
        let zz = z * z;
        let s = (-2.0 * zz).exp() - (-8.0 * zz).exp() + (-18.0 * zz).exp() - (-32.0 * zz).exp();
        return (2.0 * s).clamp(0.0, 1.0);
    }
    0.0
}

/// Two-sided one-sample KS test of `samples` against a cdf. The p-value uses
/// the asymptotic Kolmogorov law, adequate from a few hundred samples up.
pub fn ks_compare<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<GofReport> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let lo = f - i as f64 / m;
        let hi = (i + 1) as f64 / m - f;
        d = d.max(lo).max(hi);
    }
    Ok(GofReport {
        statistic_name: StatName::Ks,
        statistic: d,
        p_value: kolmogorov_survival(m.sqrt() * d),
        sample_size: sorted.len() as u64,
    })
}

/// Two-sided two-sample KS test. Ties across the two samples are handled by
/// comparing the empirical cdfs only after consuming every tied value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<GofReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let neff = na * nb / (na + nb);
    Ok(GofReport {
        statistic_name: StatName::Ks,
        statistic: d,
        p_value: kolmogorov_survival(neff.sqrt() * d),
        sample_size: (a.len() + b.len()) as u64,
    })
}

/// Pearson chi-square of observed bin counts against expected probabilities.
///
/// Bins are merged left to right until each carries expected count >= 5 (the
/// last merged bin absorbs any deficient tail), then the statistic is
/// referred to chi-square with merged_bins - 1 degrees of freedom.
pub fn chi_square_compare(observed: &[u64], expected_probs: &[f64]) -> Result<GofReport> {
    if observed.is_empty() || observed.len() != expected_probs.len() {
        return Err(Error::InvalidConfig(
            "chi-square needs matching non-empty observed/expected".into(),
        ));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::EmptySample);
    }
    let total_f = total as f64;

    let mut merged: Vec<(f64, f64)> = Vec::new(); // (observed, expected)
    let mut acc_o = 0.0;
    let mut acc_e = 0.0;
    for (&o, &pr) in observed.iter().zip(expected_probs) {
        acc_o += o as f64;
        acc_e += pr * total_f;
        if acc_e >= 5.0 {
            merged.push((acc_o, acc_e));
            acc_o = 0.0;
            acc_e = 0.0;
        }
    }
    if acc_e > 0.0 || acc_o > 0.0 {
        // fold the deficient tail into the last full bin
        if let Some(last) = merged.last_mut() {
            last.0 += acc_o;
            last.1 += acc_e;
        } else {
            merged.push((acc_o, acc_e));
        }
    }
    if merged.len() < 2 {
        return Err(Error::InvalidConfig(
            "chi-square needs at least two bins after merging".into(),
        ));
    }

    let statistic: f64 = merged.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let dof = (merged.len() - 1) as f64;
    let dist = statrs::distribution::ChiSquared::new(dof).expect("dof >= 1");
    use statrs::distribution::ContinuousCDF;
    let p_value = (1.0 - dist.cdf(statistic)).clamp(0.0, 1.0);
    Ok(GofReport {
        statistic_name: StatName::ChiSquare,
        statistic,
        p_value,
        sample_size: total,
    })
}
