//! Closed-form limit objects for the urn drain at contact rate c: the
//! deterministic profile v(alpha) = e^{-c alpha}, the variance profiles of
//! the two rescaled processes, a marginally-correct sampler for the
//! Gaussian-corrected profile, the normal law of level-crossing times, and
//! the fixed-point equation whose root marks where the big component ends.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{sample_stretched_bm, RngStream, VarianceSchedule};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitParams {
    pub n: u64,
    pub c: f64,
}

impl LimitParams {
    pub fn new(n: u64, c: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("limit laws need n >= 1".into()));
        }
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::InvalidRate(c));
        }
        Ok(LimitParams { n, c })
    }
}

/// v(alpha) = e^{-c alpha}, the n -> infinity profile of the scaled count
/// U(alpha n)/n. Defined for alpha >= 0.
pub fn ode_limit(alpha: f64, params: &LimitParams) -> f64 {
    (-params.c * alpha).exp()
}

/// Which rescaled process a variance profile refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarianceMode {
    /// S(alpha) = U(alpha n)/n; limiting variance v(alpha)(1 - v(alpha)),
    /// the bridge-like profile that rises to 1/4 at alpha = ln 2 / c.
    Scaled,
    /// T(k) = (U(k) q^{-k} - n)/sqrt(n); limiting variance e^{c alpha} - 1,
    /// growing without bound.
    Compensated,
}

/// Limiting variance of the chosen process at alpha >= 0. Both modes are 0
/// at alpha = 0.
pub fn limit_variance(alpha: f64, params: &LimitParams, mode: VarianceMode) -> f64 {
    match mode {
        VarianceMode::Scaled => {
            let v = ode_limit(alpha, params);
            v * (1.0 - v)
        }
        VarianceMode::Compensated => (params.c * alpha).exp_m1(),
    }
}

/// One path of the corrected profile v(alpha) + n^{-1/2} B(alpha) on the
/// given grid, where B is centered Gaussian with Var B(alpha) =
/// v(alpha)(1 - v(alpha)).
///
/// The variance profile rises then falls, so the path is one Brownian motion
/// read at the profile's level: forward while the profile rises, back over
/// its own past once it falls. Every one-dimensional marginal is exact;
/// the joint law across the peak is a modeling choice, and nothing
/// downstream consumes more than marginals.
///
/// The grid must be finite, strictly increasing, and start at 0. Words
/// consumed: one per distinct positive variance level.
pub fn sample_wlimit_path(
    params: &LimitParams,
    grid: &[f64],
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("grid is empty"));
    }
    if grid[0] != 0.0 {
        return Err(Error::InvalidGrid("grid must start at 0"));
    }
    for pair in grid.windows(2) {
        if !pair[1].is_finite() || pair[1] <= pair[0] {
            return Err(Error::InvalidGrid("grid must be strictly increasing"));
        }
    }

    let h: Vec<f64> = grid
        .iter()
        .map(|&a| limit_variance(a, params, VarianceMode::Scaled))
        .collect();
    let mut levels = h.clone();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let schedule = VarianceSchedule::new(levels.clone())?;
    let w = sample_stretched_bm(&schedule, rng);

    let scale = 1.0 / (params.n as f64).sqrt();
    let path = grid
        .iter()
        .zip(&h)
        .map(|(&a, &hi)| {
            let idx = levels
                .binary_search_by(|probe| probe.total_cmp(&hi))
                .expect("every level came from the sorted pool");
            ode_limit(a, params) + scale * w[idx]
        })
        .collect();
    Ok(path)
}

/// Normal law of the first time the corrected profile crosses down through
/// level A: center -log(A)/c, spread (1/c) sqrt((1-A)/(nA)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HittingLaw {
    pub level_a: f64,
    pub alpha0: f64,
    pub sd: f64,
}

impl HittingLaw {
    pub fn from_level(level_a: f64, params: &LimitParams) -> Result<Self> {
        if !level_a.is_finite() || level_a <= 0.0 || level_a >= 1.0 {
            return Err(Error::InvalidLevel(level_a));
        }
        let alpha0 = -level_a.ln() / params.c;
        let sd = spread(level_a, params);
        Ok(HittingLaw {
            level_a,
            alpha0,
            sd,
        })
    }

    pub fn density(&self, t: f64) -> f64 {
        let z = (t - self.alpha0) / self.sd;
        (-0.5 * z * z).exp() / (self.sd * (2.0 * std::f64::consts::PI).sqrt())
    }

    pub fn cdf(&self, t: f64) -> f64 {
        let z = (t - self.alpha0) / self.sd;
        0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
    }
}

fn spread(level_a: f64, params: &LimitParams) -> f64 {
    (1.0 / params.c) * ((1.0 - level_a) / (params.n as f64 * level_a)).sqrt()
}

/// Crossing-time density at t for level A: the Gaussian density with mean
/// -log(A)/c and the n^{-1/2} spread above.
pub fn hitting_density(t: f64, level_a: f64, params: &LimitParams) -> Result<f64> {
    Ok(HittingLaw::from_level(level_a, params)?.density(t))
}

/// Root of e^{-c alpha} = 1 - alpha. alpha_star is the fraction eventually
/// drained in one connected sweep; it is 0 up to c = 1 and grows toward 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdSolution {
    pub c: f64,
    pub alpha_star: f64,
    pub subcritical: bool,
    pub residual: f64,
}

/// Default residual tolerance for `solve_threshold`.
pub const THRESHOLD_TOL: f64 = 1e-12;

/// Solve e^{-c alpha} = 1 - alpha for the largest root in [0, 1].
///
/// alpha = 0 always solves it; a second root exists exactly when c > 1.
/// Bisection brackets the positive root away from 0, then a few Newton steps
/// sharpen it; the residual |e^{-c a} - (1 - a)| is reported and kept <= tol.
pub fn solve_threshold(c: f64, tol: f64) -> Result<ThresholdSolution> {
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::InvalidRate(c));
    }
    if !tol.is_finite() || tol < 1e-15 {
        // below ~1e-15 float cancellation in the residual dominates
        return Err(Error::InvalidTolerance(tol));
    }
    if c <= 1.0 {
        return Ok(ThresholdSolution {
            c,
            alpha_star: 0.0,
            subcritical: true,
            residual: 0.0,
        });
    }

    let f = |a: f64| (-c * a).exp() - (1.0 - a);
    let mut lo = 1e-12;
    let mut hi = 1.0 - 1e-12;
    // f(lo) ~ (1 - c) lo < 0; if f(hi) <= 0 the root sits between hi and 1,
    // within a whisker of 1 - e^{-c}
    let mut alpha = if f(hi) <= 0.0 {
        1.0 - (-c).exp()
    } else {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    for _ in 0..5 {
        let fa = f(alpha);
        if fa.abs() <= tol {
            break;
        }
        let deriv = 1.0 - c * (-c * alpha).exp();
        if deriv == 0.0 {
            break;
        }
        alpha -= fa / deriv;
    }
    let residual = f(alpha).abs();
    if residual > tol {
        return Err(Error::InvalidTolerance(tol));
    }
    Ok(ThresholdSolution {
        c,
        alpha_star: alpha,
        subcritical: false,
        residual,
    })
}

/// Crossing law of the big component's drain time: the root alpha_star of
/// the fixed-point equation becomes the center, and A = e^{-c alpha_star}
/// the level. The returned center IS the solver's root, bit for bit.
pub fn giant_exhaustion_law(c: f64, n: u64) -> Result<HittingLaw> {
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::InvalidRate(c));
    }
    if c <= 1.0 {
        return Err(Error::SubcriticalRate(c));
    }
    let params = LimitParams::new(n, c)?;
    let sol = solve_threshold(c, THRESHOLD_TOL)?;
    let level_a = (-c * sol.alpha_star).exp();
    Ok(HittingLaw {
        level_a,
        alpha0: sol.alpha_star,
        sd: spread(level_a, &params),
    })
}

/// JSON shape for emitted hitting laws: {c, n, A, alpha0, sd}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HittingLawRecord {
    pub c: f64,
    pub n: u64,
    #[serde(rename = "A")]
    pub level_a: f64,
    pub alpha0: f64,
    pub sd: f64,
}

impl HittingLawRecord {
    pub fn new(law: &HittingLaw, params: &LimitParams) -> Self {
        HittingLawRecord {
            c: params.c,
            n: params.n,
            level_a: law.level_a,
            alpha0: law.alpha0,
            sd: law.sd,
        }
    }
}
