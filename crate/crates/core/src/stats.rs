//! Empirical distributions, Kolmogorov–Smirnov distances and the
//! informed-fraction curve comparison.

use thiserror::Error;

use crate::asymptotics::logistic_cdf;
use crate::engine::{informed_fraction, TransmissionSchedule};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("empirical distribution needs at least one value")]
    Empty,
    #[error("sample contains NaN")]
    NaN,
}

/// Empirical CDF of a finite sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf {
    sorted_values: Vec<f64>,
}

impl Ecdf {
    pub fn new(mut values: Vec<f64>) -> Result<Self, StatsError> {
        if values.is_empty() {
            return Err(StatsError::Empty);
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(StatsError::NaN);
        }
        values.sort_unstable_by(f64::total_cmp);
        Ok(Self { sorted_values: values })
    }

    pub fn count(&self) -> usize {
        self.sorted_values.len()
    }

    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted_values
    }

    /// Fraction of values `≤ t`.
    pub fn eval(&self, t: f64) -> f64 {
        self.sorted_values.partition_point(|&x| x <= t) as f64 / self.count() as f64
    }
}

/// Free-function form of [`Ecdf::eval`].
pub fn ecdf_eval(e: &Ecdf, t: f64) -> f64 {
    e.eval(t)
}

/// One-sample KS distance `sup_t |F_N(t) − F(t)|` against a continuous CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(e: &Ecdf, cdf: F) -> f64 {
    let nf = e.count() as f64;
    e.sorted_values
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = cdf(x);
            ((i + 1) as f64 / nf - c).abs().max((c - i as f64 / nf).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample KS distance `sup_t |F_a(t) − F_b(t)|`.
pub fn ks_two_sample(a: &Ecdf, b: &Ecdf) -> f64 {
    let (xa, xb) = (&a.sorted_values, &b.sorted_values);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
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
    d
}

/// Empirical informed-fraction curve against the logistic reference.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveComparison {
    pub grid: Vec<f64>,
    pub empirical: Vec<f64>,
    pub reference: Vec<f64>,
    pub sup_distance: f64,
}

/// Default grid: 161 points from −8 to 8 in steps of 0.1.
pub fn default_grid() -> Vec<f64> {
    curve_grid(-8.0, 8.0, 0.1)
}

/// Evenly spaced points from `lo` to `hi` inclusive.
pub fn curve_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    assert!(step > 0.0 && hi >= lo, "grid needs lo <= hi and a positive step");
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| lo + i as f64 * step).collect()
}

/// Compares `S_n(T_half + t / (λp))` with `e^t / (e^t + 1)` on `grid`.
pub fn logistic_curve_check(
    sched: &TransmissionSchedule,
    lambda: f64,
    p: f64,
    grid: &[f64],
) -> CurveComparison {
    let t_half = sched.t_half();
    let scale = 1.0 / (lambda * p);
    let empirical: Vec<f64> =
        grid.iter().map(|&t| informed_fraction(sched, t_half + t * scale)).collect();
    let reference: Vec<f64> = grid.iter().map(|&t| logistic_cdf(t)).collect();
    let sup_distance = empirical
        .iter()
        .zip(&reference)
        .map(|(e, r)| (e - r).abs())
        .fold(0.0, f64::max);
    CurveComparison { grid: grid.to_vec(), empirical, reference, sup_distance }
}

/// `max_{k_min ≤ k ≤ n} |R_k / (λ p k) − 1|`, the relative deviation of the
/// spreading intensity from its mean growth.
pub fn max_intensity_deviation(
    sched: &TransmissionSchedule,
    lambda: f64,
    p: f64,
    k_min: usize,
) -> f64 {
    let k_min = k_min.max(1);
    sched.intensities()[k_min..]
        .iter()
        .zip(k_min..)
        .map(|(r, k)| (r / (lambda * p * k as f64) - 1.0).abs())
        .fold(0.0, f64::max)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

pub fn standard_error(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Pearson correlation.
pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    sxy / (sxx * syy).sqrt()
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
