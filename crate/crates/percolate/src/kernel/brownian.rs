use crate::error::{Error, Result};
use crate::kernel::{gaussian_draw, RngStream};

/// Cumulative variance levels for a time-changed Brownian motion. Must start
/// at 0 and never decrease; flat stretches are allowed and produce exactly
/// repeated path values.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceSchedule {
    levels: Vec<f64>,
}

impl VarianceSchedule {
    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidSchedule("schedule is empty"));
        }
        if levels[0] != 0.0 {
            return Err(Error::InvalidSchedule("schedule must start at 0"));
        }
        for pair in levels.windows(2) {
            if !pair[1].is_finite() || pair[1] < pair[0] {
                return Err(Error::InvalidSchedule(
                    "schedule must be finite and non-decreasing",
                ));
            }
        }
        Ok(VarianceSchedule { levels })
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty schedules
    }
}

/// One path of a Brownian motion evaluated at the schedule's variance levels:
/// W[0] = 0 and W[i] - W[i-1] ~ Normal(0, levels[i] - levels[i-1]),
/// independent across i. Consumes exactly len - 1 words, including for
/// zero-variance increments (which are exactly zero), so consumption depends
/// only on the schedule length.
pub fn sample_stretched_bm(schedule: &VarianceSchedule, rng: &mut RngStream) -> Vec<f64> {
    let levels = schedule.levels();
    let mut path = Vec::with_capacity(levels.len());
    path.push(0.0);
    for i in 1..levels.len() {
        let sd = (levels[i] - levels[i - 1]).sqrt();
        let prev = path[i - 1];
        let next =
            gaussian_draw(prev, sd, rng).expect("schedule validation keeps mean and sd finite");
        path.push(next);
    }
    path
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_validation() {
        assert!(VarianceSchedule::new(vec![]).is_err());
        assert!(VarianceSchedule::new(vec![0.5, 1.0]).is_err());
        assert!(VarianceSchedule::new(vec![0.0, 2.0, 1.0]).is_err());
        assert!(VarianceSchedule::new(vec![0.0, f64::NAN]).is_err());
        assert!(VarianceSchedule::new(vec![0.0, f64::INFINITY]).is_err());
        assert!(VarianceSchedule::new(vec![0.0]).is_ok());
        assert!(VarianceSchedule::new(vec![0.0, 0.0, 3.0, 3.0]).is_ok());
    }

    #[test]
    fn trivial_schedule_is_zero_path() {
        let sched = VarianceSchedule::new(vec![0.0]).unwrap();
        let mut rng = RngStream::new(1, 0);
        assert_eq!(sample_stretched_bm(&sched, &mut rng), vec![0.0]);
        assert_eq!(rng.words_consumed(), 0);
    }

    #[test]
    fn flat_stretches_repeat_exactly_and_still_consume() {
        let sched = VarianceSchedule::new(vec![0.0, 0.5, 0.5, 2.0, 2.0]).unwrap();
        let mut rng = RngStream::new(7, 3);
        let path = sample_stretched_bm(&sched, &mut rng);
        assert_eq!(path.len(), 5);
        assert_eq!(path[0], 0.0);
        assert_eq!(path[1], path[2]);
        assert_eq!(path[3], path[4]);
        assert_ne!(path[1], path[3]);
        assert_eq!(rng.words_consumed(), 4);
    }

    #[test]
    fn replay_is_identical() {
        let sched = VarianceSchedule::new(vec![0.0, 1.0, 4.0, 4.5]).unwrap();
        let mut a = RngStream::new(11, 2);
        let mut b = RngStream::new(11, 2);
        assert_eq!(
            sample_stretched_bm(&sched, &mut a),
            sample_stretched_bm(&sched, &mut b)
        );
    }

    // Marginal variance matches the schedule and covariance matches the
    // earlier level; bands are 4 standard errors.
    #[test]
    fn path_moments() {
        let sched = VarianceSchedule::new(vec![0.0, 0.5, 0.5, 2.0, 2.0]).unwrap();
        let reps = 4000usize;
        let mut rng = RngStream::new(99, 0);
        let mut sum_mid = 0.0;
        let mut sum_mid_sq = 0.0;
        let mut sum_end_sq = 0.0;
        let mut sum_cross = 0.0;
        for _ in 0..reps {
            let path = sample_stretched_bm(&sched, &mut rng);
            sum_mid += path[1];
            sum_mid_sq += path[1] * path[1];
            sum_end_sq += path[4] * path[4];
            sum_cross += path[1] * path[4];
        }
        let r = reps as f64;
        let mean_mid = sum_mid / r;
        let var_mid = sum_mid_sq / r;
        let var_end = sum_end_sq / r;
        let cov = sum_cross / r;

        let se_mean = (0.5f64 / r).sqrt();
        assert!(mean_mid.abs() <= 4.0 * se_mean, "mean {mean_mid}");
        let se_var_mid = 0.5 * (2.0 / r).sqrt();
        assert!((var_mid - 0.5).abs() <= 4.0 * se_var_mid, "var {var_mid}");
        let se_var_end = 2.0 * (2.0 / r).sqrt();
        assert!((var_end - 2.0).abs() <= 4.0 * se_var_end, "var {var_end}");
        // Var(W(s) W(t)) = s t + 2 s^2 for s <= t under the joint gaussian
        let se_cov = ((0.5 * 2.0 + 2.0 * 0.25) / r).sqrt();
        assert!((cov - 0.5).abs() <= 4.0 * se_cov, "cov {cov}");
    }
}
