use crate::error::{Error, Result};
use crate::kernel::RngStream;

/// Inversion is used while trials * min(p, 1-p) stays below this; the walk
/// then takes ~cutoff + O(sqrt(cutoff)) pmf terms. Above it the
/// triangle/parallelogram/exponential rejection sampler takes over.
const INVERSION_CUTOFF: f64 = 10.0;

/// Largest trial count whose arithmetic stays exact in f64.
const MAX_TRIALS: u64 = 1 << 53;

/// One Binomial(trials, p) draw.
///
/// Consumes exactly one word of `rng` whenever 0 < p < 1 and trials > 0
/// (and zero words in the degenerate cases): the inversion path spends the
/// word as its single uniform, the rejection path spends it to key a child
/// stream and loops on that. Replaying a stream therefore replays the draws
/// no matter which path each call took.
pub fn binomial_draw(trials: u64, p: f64, rng: &mut RngStream) -> Result<u64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    if trials > MAX_TRIALS {
        return Err(Error::InvalidConfig(format!(
            "trial count {trials} exceeds the float-exact range"
        )));
    }
    if trials == 0 || p == 0.0 {
        return Ok(0);
    }
    if p == 1.0 {
        return Ok(trials);
    }

    let flipped = p > 0.5;
    let pe = if flipped { 1.0 - p } else { p };

    let k = if (trials as f64) * pe < INVERSION_CUTOFF {
        inversion(trials, pe, rng.next_open01())
    } else {
        let mut child = rng.split();
        rejection(trials, pe, &mut child)
    };

    Ok(if flipped { trials - k } else { k })
}

/// Inverse-CDF walk. pe <= 1/2 and trials * pe < cutoff keep the starting
/// mass (1-pe)^trials well above underflow.
fn inversion(trials: u64, pe: f64, u: f64) -> u64 {
    let q = 1.0 - pe;
    let ratio = pe / q;
    let mut pmf = ((-pe).ln_1p() * trials as f64).exp();
    let mut cum = pmf;
    let mut k = 0u64;
    while u > cum {
        if k >= trials {
            // float residue past the full support; clamp to the top
            return trials;
        }
        pmf *= ((trials - k) as f64 / (k + 1) as f64) * ratio;
        k += 1;
        cum += pmf;
    }
    k
}

/// Mode-centered envelope pieces for the rejection sampler: a central
/// triangle, flanking parallelograms, and two exponential tails. Acceptance
/// is decided against the exact pmf (via a squeeze where profitable), so the
/// output law is exact, not approximate.
struct Envelope {
    n_f: f64,
    p: f64,
    q: f64,
    mode: i64,
    mode_f: f64,
    npq: f64,
    p1: f64,
    xm: f64,
    xl: f64,
    xr: f64,
    c: f64,
    lambda_l: f64,
    lambda_r: f64,
    p2: f64,
    p3: f64,
    p4: f64,
}

impl Envelope {
    fn new(trials: u64, pe: f64) -> Self {
        let n_f = trials as f64;
        let q = 1.0 - pe;
        let np = n_f * pe;
        let peak = np + pe;
        let mode = peak as i64;
        let mode_f = mode as f64;
        let npq = np * q;
        let p1 = (2.195 * npq.sqrt() - 4.6 * q).floor() + 0.5;
        let xm = mode_f + 0.5;
        let xl = xm - p1;
        let xr = xm + p1;
        let c = 0.134 + 20.5 / (15.3 + mode_f);
        let a_l = (peak - xl) / (peak - xl * pe);
        let lambda_l = a_l * (1.0 + 0.5 * a_l);
        let a_r = (xr - peak) / (xr * q);
        let lambda_r = a_r * (1.0 + 0.5 * a_r);
        let p2 = p1 * (1.0 + 2.0 * c);
        let p3 = p2 + c / lambda_l;
        let p4 = p3 + c / lambda_r;
        Envelope {
            n_f,
            p: pe,
            q,
            mode,
            mode_f,
            npq,
            p1,
            xm,
            xl,
            xr,
            c,
            lambda_l,
            lambda_r,
            p2,
            p3,
            p4,
        }
    }
}

fn rejection(trials: u64, pe: f64, rng: &mut RngStream) -> u64 {
    let env = Envelope::new(trials, pe);
    loop {
        let u = rng.next_open01() * env.p4;
        let mut v = rng.next_open01();

        if u <= env.p1 {
            // central triangle: accept without touching the pmf
            let x = env.xm - env.p1 * v + u;
            return x as i64 as u64;
        }

        let ix: i64;
        if u <= env.p2 {
            // parallelogram band around the triangle
            let x = env.xl + (u - env.p1) / env.c;
            v = v * env.c + 1.0 - (x - env.xm).abs() / env.p1;
            if v > 1.0 || v <= 0.0 {
                continue;
            }
            ix = x as i64;
        } else if u <= env.p3 {
            // left exponential tail
            ix = (env.xl + v.ln() / env.lambda_l) as i64;
            if ix < 0 {
                continue;
            }
            v *= (u - env.p2) * env.lambda_l;
        } else {
            // right exponential tail
            ix = (env.xr - v.ln() / env.lambda_r) as i64;
            if ix > trials as i64 {
                continue;
            }
            v *= (u - env.p3) * env.lambda_r;
        }

        if accept(ix, v, &env) {
            return ix as u64;
        }
    }
}

fn accept(ix: i64, v: f64, env: &Envelope) -> bool {
    let k = (ix - env.mode).unsigned_abs() as f64;
    if k > 20.0 && k < env.npq / 2.0 - 1.0 {
        // squeeze: a quadratic band around the log-pmf settles most cases
        let amaxp = (k / env.npq) * ((k * (k / 3.0 + 0.625) + 1.0 / 6.0) / env.npq + 0.5);
        let ynorm = -k * k / (2.0 * env.npq);
        let alv = v.ln();
        if alv < ynorm - amaxp {
            return true;
        }
        if alv > ynorm + amaxp {
            return false;
        }
        // undecided: exact log-pmf with series-corrected factorials
        let x1 = (ix + 1) as f64;
        let f1 = env.mode_f + 1.0;
        let z = env.n_f + 1.0 - env.mode_f;
        let w = env.n_f - ix as f64 + 1.0;
        let t = env.xm * (f1 / x1).ln()
            + (env.n_f - env.mode_f + 0.5) * (z / w).ln()
            + (ix as f64 - env.mode_f) * ((w * env.p) / (x1 * env.q)).ln()
            + stirling_tail(f1)
            + stirling_tail(z)
            + stirling_tail(x1)
            + stirling_tail(w);
        alv <= t
    } else {
        // near the mode (or tiny npq): exact pmf ratio by product recurrence
        let s = env.p / env.q;
        let a = s * (env.n_f + 1.0);
        let mut f = 1.0;
        if env.mode < ix {
            for i in (env.mode + 1)..=ix {
                f *= a / i as f64 - s;
            }
        } else if env.mode > ix {
            for i in (ix + 1)..=env.mode {
                f /= a / i as f64 - s;
            }
        }
        v <= f
    }
}

/// Remainder of Stirling's series for ln x!: ln sqrt(2 pi) + (x+1/2) ln x - x
/// plus this tail. Coefficients are the standard 1/(12x) series folded to one
/// rational expression.
fn stirling_tail(x: f64) -> f64 {
    let x2 = x * x;
    (13860.0 - (462.0 - (132.0 - (99.0 - 140.0 / x2) / x2) / x2) / x2) / x / 166320.0
}
