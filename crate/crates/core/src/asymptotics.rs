//! Limit laws and large-population approximations.
//!
//! The initial-phase limit `V = γ + Σ_{k≥1} (ξ_k / J_k − 1/k)` has no closed
//! form for general contact-rate laws, so it is handled by sampling a
//! truncated series. Gumbel and logistic laws have exact CDFs and
//! inverse-transform samplers.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Open01};
use thiserror::Error;

use crate::demographics::{DemographicsError, RateDistribution};
use crate::stats::{ks_one_sample, Ecdf};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Default number of series terms for [`sample_v`]. The neglected tail is a
/// mean-zero martingale whose standard deviation is of order `K^{-1/2}`.
pub const DEFAULT_TRUNCATION: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticsError {
    #[error("series truncation must be at least 1")]
    ZeroTruncation,
    #[error("root contact rate z0 = {0} must be positive and finite")]
    InvalidRootRate(f64),
    #[error(transparent)]
    Rates(#[from] DemographicsError),
}

/// `P(G ≤ t) = exp(−e^{−t})`.
pub fn gumbel_cdf(t: f64) -> f64 {
    (-(-t).exp()).exp()
}

/// Standard Gumbel draw `−log(−log U)`.
pub fn gumbel_sample<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = Open01.sample(rng);
    -(-u.ln()).ln()
}

/// `P(L ≤ t) = e^t / (e^t + 1)`, evaluated without overflow.
pub fn logistic_cdf(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// Standard logistic draw `log(U / (1 − U))`.
pub fn logistic_sample<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = Open01.sample(rng);
    (u / (1.0 - u)).ln()
}

/// Parameters of the truncated series for `V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VSamplerConfig {
    z0: f64,
    rates: RateDistribution,
    truncation: usize,
    lambda: f64,
    harmonic: f64,
}

impl VSamplerConfig {
    pub fn new(
        z0: f64,
        rates: RateDistribution,
        truncation: usize,
    ) -> Result<Self, AsymptoticsError> {
        if truncation == 0 {
            return Err(AsymptoticsError::ZeroTruncation);
        }
        if !(z0.is_finite() && z0 > 0.0) {
            return Err(AsymptoticsError::InvalidRootRate(z0));
        }
        let lambda = rates.moments()?.lambda;
        let harmonic = (1..=truncation).map(|k| 1.0 / k as f64).sum();
        Ok(Self { z0, rates, truncation, lambda, harmonic })
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn rates(&self) -> &RateDistribution {
        &self.rates
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Draws `γ + Σ_{k=1}^{K} (ξ_k / J_k − 1/k)` with `J_1 = z0/λ` and
/// `J_k = λ^{-1}(z0 + Z_1 + … + Z_{k−1})`.
pub fn sample_v<R: Rng + ?Sized>(cfg: &VSamplerConfig, rng: &mut R) -> f64 {
    // Σ ξ_k / J_k accumulated separately; Σ 1/k = H_K is precomputed
    let mut cum = cfg.z0;
    let mut acc = 0.0;
    for k in 1..=cfg.truncation {
        let xi: f64 = Exp1.sample(rng);
        acc += xi / cum;
        if k < cfg.truncation {
            cum += cfg.rates.sample(rng);
        }
    }
    EULER_GAMMA + (cfg.lambda * acc - cfg.harmonic)
}

/// `V + G` with `G` standard Gumbel, independent of `V`.
pub fn sample_limit_broadcast<R: Rng + ?Sized>(cfg: &VSamplerConfig, rng: &mut R) -> f64 {
    let v = sample_v(cfg, rng);
    v + gumbel_sample(rng)
}

/// `V + L` with `L` standard logistic, independent of `V`.
pub fn sample_limit_passage<R: Rng + ?Sized>(cfg: &VSamplerConfig, rng: &mut R) -> f64 {
    let v = sample_v(cfg, rng);
    v + logistic_sample(rng)
}

/// Joint limit of `k` normalized passage times: one shared `V` plus `k`
/// independent logistic terms.
pub fn sample_limit_passage_joint<R: Rng + ?Sized>(
    cfg: &VSamplerConfig,
    k: usize,
    rng: &mut R,
) -> Vec<f64> {
    let v = sample_v(cfg, rng);
    (0..k).map(|_| v + logistic_sample(rng)).collect()
}

/// Which limit law a [`LimitSample`] was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitLaw {
    V,
    Gumbel,
    Logistic,
    VPlusGumbel,
    VPlusLogistic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitSample {
    pub value: f64,
    pub law: LimitLaw,
}

pub fn sample_limit<R: Rng + ?Sized>(
    law: LimitLaw,
    cfg: &VSamplerConfig,
    rng: &mut R,
) -> LimitSample {
    let value = match law {
        LimitLaw::V => sample_v(cfg, rng),
        LimitLaw::Gumbel => gumbel_sample(rng),
        LimitLaw::Logistic => logistic_sample(rng),
        LimitLaw::VPlusGumbel => sample_limit_broadcast(cfg, rng),
        LimitLaw::VPlusLogistic => sample_limit_passage(cfg, rng),
    };
    LimitSample { value, law }
}

/// Nonrandom centering of the broadcast time, `(log(np) + log n) / (λp)`.
pub fn approx_broadcast_center(n: f64, p: f64, lambda: f64) -> f64 {
    ((n * p).ln() + n.ln()) / (lambda * p)
}

/// Nonrandom centering of a first passage time, `log(np) / (λp)`.
pub fn approx_passage_center(n: f64, p: f64, lambda: f64) -> f64 {
    (n * p).ln() / (lambda * p)
}

/// Ratio of broadcast-time centerings with and without receivers,
/// `(1/p)(1 − log(1/p) / (2 log n))`.
pub fn slowdown_factor(n: f64, p: f64) -> f64 {
    (1.0 - (1.0 / p).ln() / (2.0 * n.ln())) / p
}

/// KS distance between `samples` draws of `Σ_{i=1}^m ξ_i / i` and the law
/// of the maximum of `m` unit exponentials, `(1 − e^{−t})^m`.
pub fn renyi_max_check<R: Rng + ?Sized>(m: usize, samples: usize, rng: &mut R) -> f64 {
    assert!(m >= 1 && samples >= 1);
    let sums: Vec<f64> = (0..samples)
        .map(|_| {
            (1..=m)
                .map(|i| {
                    let xi: f64 = Exp1.sample(rng);
                    xi / i as f64
                })
                .sum()
        })
        .collect();
    let e = Ecdf::new(sums).expect("nonempty, finite");
    let mf = m as f64;
    ks_one_sample(&e, |t| if t <= 0.0 { 0.0 } else { (mf * (-(-t).exp()).ln_1p()).exp() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{StreamFactory, StreamRole};
    use crate::stats::{correlation, ks_two_sample, mean, median, variance};

    const PI2: f64 = std::f64::consts::PI * std::f64::consts::PI;

    fn draws<F: FnMut(&mut crate::rng::SimRng) -> f64>(seed: u64, n: usize, mut f: F) -> Vec<f64> {
        let mut rng = StreamFactory::new(seed).stream(0, StreamRole::Limit);
        (0..n).map(|_| f(&mut rng)).collect()
    }

    fn homogeneous(trunc: usize) -> VSamplerConfig {
        VSamplerConfig::new(1.0, RateDistribution::PointMass { value: 1.0 }, trunc).unwrap()
    }

    #[test]
    fn gumbel_cdf_values() {
        assert!((gumbel_cdf(0.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((gumbel_cdf(0.0) - 0.367879).abs() < 1e-6);
        assert_eq!(gumbel_cdf(f64::INFINITY), 1.0);
        assert_eq!(gumbel_cdf(f64::NEG_INFINITY), 0.0);
        assert!(gumbel_cdf(40.0) > 1.0 - 1e-15 && gumbel_cdf(-5.0) < 1e-60);
        let ts: Vec<f64> = (-100..=100).map(|i| i as f64 * 0.1).collect();
        assert!(ts.windows(2).all(|w| gumbel_cdf(w[0]) <= gumbel_cdf(w[1])));
    }

    #[test]
    fn quantile_round_trips() {
        for i in 1..=9 {
            let u = i as f64 / 10.0;
            assert!((gumbel_cdf(-(-u.ln()).ln()) - u).abs() < 1e-12);
            assert!((logistic_cdf((u / (1.0 - u)).ln()) - u).abs() < 1e-12);
        }
    }

    #[test]
    fn logistic_cdf_values() {
        assert_eq!(logistic_cdf(0.0), 0.5);
        for t in [0.1, 0.7, 2.0, 5.5, 30.0, 800.0] {
            assert!((logistic_cdf(-t) - (1.0 - logistic_cdf(t))).abs() < 1e-15);
        }
        assert_eq!(logistic_cdf(f64::INFINITY), 1.0);
        assert_eq!(logistic_cdf(f64::NEG_INFINITY), 0.0);
        let ts: Vec<f64> = (-100..=100).map(|i| i as f64 * 0.1).collect();
        assert!(ts.windows(2).all(|w| logistic_cdf(w[0]) <= logistic_cdf(w[1])));
    }

    #[test]
    fn gumbel_sample_mean() {
        let xs = draws(1, 1_000_000, |r| gumbel_sample(r));
        assert!((mean(&xs) - EULER_GAMMA).abs() < 0.005, "{}", mean(&xs));
    }

    #[test]
    fn logistic_sample_fits_cdf() {
        let xs = draws(2, 100_000, |r| logistic_sample(r));
        let d = ks_one_sample(&Ecdf::new(xs).unwrap(), logistic_cdf);
        assert!(d < 0.01, "{d}");
    }

    #[test]
    fn config_validation() {
        let r = RateDistribution::PointMass { value: 1.0 };
        assert_eq!(VSamplerConfig::new(1.0, r, 0), Err(AsymptoticsError::ZeroTruncation));
        assert_eq!(VSamplerConfig::new(0.0, r, 5), Err(AsymptoticsError::InvalidRootRate(0.0)));
        assert!(matches!(
            VSamplerConfig::new(1.0, RateDistribution::PointMass { value: 0.0 }, 5),
            Err(AsymptoticsError::Rates(DemographicsError::ZeroMean(_)))
        ));
    }

    #[test]
    fn single_term_v() {
        // V = γ + ξ_1 − 1 when K = 1 and z0 = λ
        let cfg = VSamplerConfig::new(2.0, RateDistribution::PointMass { value: 2.0 }, 1).unwrap();
        let mut a = StreamFactory::new(3).stream(0, StreamRole::Limit);
        let mut b = StreamFactory::new(3).stream(0, StreamRole::Limit);
        let xi: f64 = Exp1.sample(&mut b);
        assert!((sample_v(&cfg, &mut a) - (EULER_GAMMA + xi - 1.0)).abs() < 1e-15);
        let xs = draws(4, 400_000, |r| sample_v(&cfg, r));
        assert!((mean(&xs) - EULER_GAMMA).abs() < 0.006, "{}", mean(&xs));
    }

    #[test]
    fn v_is_reproducible_and_roles_independent() {
        let cfg = homogeneous(200);
        let f = StreamFactory::new(5);
        let a = sample_v(&cfg, &mut f.stream(9, StreamRole::Limit));
        let b = sample_v(&cfg, &mut f.stream(9, StreamRole::Limit));
        assert_eq!(a.to_bits(), b.to_bits());
        let pairs = 100_000u64;
        let (xs, ys): (Vec<f64>, Vec<f64>) = (0..pairs)
            .map(|i| {
                (
                    sample_v(&homogeneous(20), &mut f.stream(i, StreamRole::Limit)),
                    sample_v(&homogeneous(20), &mut f.stream(i, StreamRole::LimitAux)),
                )
            })
            .unzip();
        assert!(correlation(&xs, &ys).abs() < 0.01);
    }

    #[test]
    fn homogeneous_v_is_gumbel() {
        // truncation error sd ≈ K^{-1/2} ≈ 0.03, negligible against the KS
        // critical value 1.95/√N ≈ 0.0138 at N = 2·10⁴
        let cfg = homogeneous(1_000);
        let xs = draws(6, 20_000, |r| sample_v(&cfg, r));
        let d = ks_one_sample(&Ecdf::new(xs).unwrap(), gumbel_cdf);
        assert!(d < 0.02, "{d}");
    }

    #[test]
    fn broadcast_limit_moments() {
        let cfg = homogeneous(1_000);
        let xs = draws(7, 200_000, |r| sample_limit_broadcast(&cfg, r));
        // se of the mean ≈ 0.004, of the variance ≈ 0.017
        assert!((mean(&xs) - 2.0 * EULER_GAMMA).abs() < 0.02, "{}", mean(&xs));
        assert!((variance(&xs) - PI2 / 3.0).abs() < 0.08, "{}", variance(&xs));
    }

    #[test]
    fn broadcast_limit_symmetric_in_roles() {
        // V from one stream and G from another, then the roles swapped
        let cfg = homogeneous(300);
        let f = StreamFactory::new(8);
        let n = 30_000u64;
        let a: Vec<f64> = (0..n)
            .map(|i| {
                sample_v(&cfg, &mut f.stream(i, StreamRole::Limit))
                    + gumbel_sample(&mut f.stream(i, StreamRole::LimitAux))
            })
            .collect();
        let b: Vec<f64> = (0..n)
            .map(|i| {
                sample_v(&cfg, &mut f.stream(i, StreamRole::LimitAux))
                    + gumbel_sample(&mut f.stream(i, StreamRole::Limit))
            })
            .collect();
        let d = ks_two_sample(&Ecdf::new(a).unwrap(), &Ecdf::new(b).unwrap());
        // two-sample critical value 1.95·√(2/N) ≈ 0.016
        assert!(d < 0.02, "{d}");
    }

    #[test]
    fn passage_limit_median_and_symmetry() {
        let cfg = homogeneous(300);
        let n = 100_000;
        let plus = draws(9, n, |r| sample_limit_passage(&cfg, r));
        let minus = draws(10, n, |r| {
            let v = sample_v(&cfg, r);
            v - logistic_sample(r)
        });
        // brute force: independent summands from separate streams
        let vs = draws(11, n, |r| sample_v(&cfg, r));
        let ls = draws(12, n, |r| logistic_sample(r));
        let brute: Vec<f64> = vs.iter().zip(&ls).map(|(v, l)| v + l).collect();
        assert!((median(&plus) - median(&brute)).abs() < 0.03);
        let d = ks_two_sample(&Ecdf::new(plus).unwrap(), &Ecdf::new(minus).unwrap());
        assert!(d < 0.012, "{d}");
    }

    #[test]
    fn joint_passage_correlation() {
        // Cov = Var(V), so ρ = Var V / (Var V + Var L) = (π²/6) / (π²/6 + π²/3) = 1/3
        let cfg = homogeneous(300);
        let mut rng = StreamFactory::new(13).stream(0, StreamRole::Limit);
        let (a, b): (Vec<f64>, Vec<f64>) = (0..100_000)
            .map(|_| {
                let p = sample_limit_passage_joint(&cfg, 2, &mut rng);
                (p[0], p[1])
            })
            .unzip();
        assert!((correlation(&a, &b) - 1.0 / 3.0).abs() < 0.02);
    }

    #[test]
    fn limit_sample_tags() {
        let cfg = homogeneous(10);
        let mut rng = StreamFactory::new(14).stream(0, StreamRole::Limit);
        for law in [
            LimitLaw::V,
            LimitLaw::Gumbel,
            LimitLaw::Logistic,
            LimitLaw::VPlusGumbel,
            LimitLaw::VPlusLogistic,
        ] {
            let s = sample_limit(law, &cfg, &mut rng);
            assert_eq!(s.law, law);
            assert!(s.value.is_finite());
        }
    }

    #[test]
    fn centering_terms() {
        let e2 = std::f64::consts::E.powi(2);
        assert!((approx_broadcast_center(e2, 1.0, 1.0) - 4.0).abs() < 1e-12);
        let c = approx_broadcast_center(1e6, 0.01, 1.0);
        assert!((c - (1e4f64.ln() + 1e6f64.ln()) / 0.01).abs() < 1e-9);
        assert!((c - 2302.585).abs() < 1e-3);
        // consistent with the slowdown ratio
        let ratio = c / approx_broadcast_center(1e6, 1.0, 1.0);
        assert!((ratio - slowdown_factor(1e6, 0.01)).abs() < 1e-9);
        assert!((approx_passage_center(500.0, 1.0, 2.0) - 500f64.ln() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn slowdown_values() {
        assert!((slowdown_factor(1e6, 0.01) - 83.333_333).abs() < 1e-3);
        for n in [2.0, 10.0, 1e3, 1e9] {
            assert_eq!(slowdown_factor(n, 1.0), 1.0);
        }
        let vals: Vec<f64> = [1e2, 1e3, 1e6, 1e12, 1e300].iter().map(|&n| slowdown_factor(n, 0.1)).collect();
        assert!(vals.windows(2).all(|w| w[0] < w[1]));
        assert!(vals.iter().all(|&v| v < 10.0));
        assert!(10.0 - vals[4] < 0.02);
    }

    #[test]
    fn renyi_identity() {
        let f = StreamFactory::new(15);
        for (i, m) in [1usize, 10, 100].into_iter().enumerate() {
            let d = renyi_max_check(m, 100_000, &mut f.stream(i as u64, StreamRole::Limit));
            assert!(d < 0.01, "m={m}: {d}");
        }
    }

    #[test]
    fn renyi_sum_mean() {
        let mut rng = StreamFactory::new(16).stream(0, StreamRole::Limit);
        let n = 100_000;
        let xs: Vec<f64> = (0..n)
            .map(|_| (1..=100).map(|i| { let x: f64 = Exp1.sample(&mut rng); x / i as f64 }).sum())
            .collect();
        // H_100 − log 100 = γ + 0.005; se ≈ 1.28/√N ≈ 0.004
        assert!((mean(&xs) - 100f64.ln() - EULER_GAMMA).abs() < 0.02);
    }
}
