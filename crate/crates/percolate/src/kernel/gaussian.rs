use crate::error::{Error, Result};
use crate::kernel::RngStream;

/// One normal draw by inverse CDF: exactly one stream word, no rejection
/// loop, so consumption never depends on the outcome. `sd = 0` returns
/// `mean` exactly (the word is still consumed, keeping call sites aligned
/// across parameter choices).
pub fn gaussian_draw(mean: f64, sd: f64, rng: &mut RngStream) -> Result<f64> {
    if !sd.is_finite() || sd < 0.0 {
        return Err(Error::InvalidStdDev(sd));
    }
    if !mean.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "mean must be finite, got {mean}"
        )));
    }
    let u = rng.next_open01();
    let z = std::f64::consts::SQRT_2 * statrs::function::erf::erf_inv(2.0 * u - 1.0);
    Ok(mean + sd * z)
}
