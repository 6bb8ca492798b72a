//! Summary statistics across repeated runs.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Normal 0.975 quantile, used once there are 30 or more samples.
pub const Z_975: f64 = 1.959964;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanCi {
    pub n: usize,
    pub mean: f64,
    /// Half-width of the 95% interval; 0 for a single sample.
    pub half_width: f64,
}

impl MeanCi {
    pub fn lower(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.half_width
    }
}

pub fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Unbiased sample standard deviation.
pub fn std_dev(xs: &[f64]) -> Option<f64> {
    let m = mean(xs)?;
    if xs.len() < 2 {
        return None;
    }
    let ss: f64 = xs.iter().map(|x| (x - m).powi(2)).sum();
    Some((ss / (xs.len() - 1) as f64).sqrt())
}

/// Two-sided 97.5% quantile used for the interval of `n` samples.
pub fn critical_value(n: usize) -> f64 {
    if n >= 30 {
        return Z_975;
    }
    let dof = (n.max(2) - 1) as f64;
    StudentsT::new(0.0, 1.0, dof)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.975)
}

/// Mean with a 95% confidence interval (Student t below 30 samples, normal above).
pub fn mean_ci(xs: &[f64]) -> Option<MeanCi> {
    let m = mean(xs)?;
    let half_width = match std_dev(xs) {
        Some(s) => critical_value(xs.len()) * s / (xs.len() as f64).sqrt(),
        None => 0.0,
    };
    Some(MeanCi {
        n: xs.len(),
        mean: m,
        half_width,
    })
}
