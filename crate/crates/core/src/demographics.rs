//! Model parameterization: the root rate `z0`, the transmitter probability
//! `p`, the contact-rate law `F`, and the number `n` of nonroot nodes.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DemographicsError {
    #[error("rate distribution has mean {0}; a strictly positive mean contact rate is required")]
    ZeroMean(f64),
    #[error("transmitter probability p = {0} is outside (0, 1]")]
    InvalidProbability(f64),
    #[error("root contact rate z0 = {0} must be positive and finite")]
    InvalidRootRate(f64),
    #[error("population size n must be at least 1")]
    EmptyPopulation,
    #[error("invalid {kind} parameters: {reason}")]
    InvalidRateParameter { kind: &'static str, reason: String },
    #[error("second moment of the rate distribution overflows")]
    MomentOverflow,
}

/// Contact-rate law `F` of nonroot nodes, in contacts per unit time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateDistribution {
    PointMass { value: f64 },
    Exponential { mean: f64 },
    Uniform { lo: f64, hi: f64 },
    #[serde(rename = "lognormal")]
    LogNormal { mu: f64, sigma: f64 },
    TwoPoint { value_a: f64, prob_a: f64, value_b: f64 },
}

/// Closed-form first and second moments of a [`RateDistribution`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    /// Mean contact rate.
    pub lambda: f64,
    pub second_moment: f64,
}

impl RateDistribution {
    pub fn kind_name(&self) -> &'static str {
        match self {
            RateDistribution::PointMass { .. } => "point_mass",
            RateDistribution::Exponential { .. } => "exponential",
            RateDistribution::Uniform { .. } => "uniform",
            RateDistribution::LogNormal { .. } => "lognormal",
            RateDistribution::TwoPoint { .. } => "two_point",
        }
    }

    fn check_params(&self) -> Result<(), DemographicsError> {
        let bad = |reason: &str| {
            Err(DemographicsError::InvalidRateParameter {
                kind: self.kind_name(),
                reason: reason.to_string(),
            })
        };
        let nonneg = |x: f64| x.is_finite() && x >= 0.0;
        match *self {
            RateDistribution::PointMass { value } if !nonneg(value) => {
                bad("value must be finite and nonnegative")
            }
            RateDistribution::Exponential { mean } if !nonneg(mean) => {
                bad("mean must be finite and nonnegative")
            }
            RateDistribution::Uniform { lo, hi } if !(nonneg(lo) && nonneg(hi) && lo <= hi) => {
                bad("need 0 <= lo <= hi, both finite")
            }
            RateDistribution::LogNormal { mu, sigma }
                if !(mu.is_finite() && sigma.is_finite() && sigma >= 0.0) =>
            {
                bad("need finite mu and finite sigma >= 0")
            }
            RateDistribution::TwoPoint { value_a, prob_a, value_b }
                if !(nonneg(value_a) && nonneg(value_b) && (0.0..=1.0).contains(&prob_a)) =>
            {
                bad("need nonnegative finite values and prob_a in [0, 1]")
            }
            _ => Ok(()),
        }
    }

    /// Mean `λ = ∫ z F(dz)`.
    pub fn mean(&self) -> f64 {
        match *self {
            RateDistribution::PointMass { value } => value,
            RateDistribution::Exponential { mean } => mean,
            RateDistribution::Uniform { lo, hi } => 0.5 * (lo + hi),
            RateDistribution::LogNormal { mu, sigma } => (mu + 0.5 * sigma * sigma).exp(),
            RateDistribution::TwoPoint { value_a, prob_a, value_b } => {
                prob_a * value_a + (1.0 - prob_a) * value_b
            }
        }
    }

    /// Second moment `∫ z² F(dz)`.
    pub fn second_moment(&self) -> f64 {
        match *self {
            RateDistribution::PointMass { value } => value * value,
            RateDistribution::Exponential { mean } => 2.0 * mean * mean,
            RateDistribution::Uniform { lo, hi } => (lo * lo + lo * hi + hi * hi) / 3.0,
            RateDistribution::LogNormal { mu, sigma } => (2.0 * mu + 2.0 * sigma * sigma).exp(),
            RateDistribution::TwoPoint { value_a, prob_a, value_b } => {
                prob_a * value_a * value_a + (1.0 - prob_a) * value_b * value_b
            }
        }
    }

    /// Validates the parameters and returns the closed-form moments.
    pub fn moments(&self) -> Result<Moments, DemographicsError> {
        self.check_params()?;
        let lambda = self.mean();
        let second_moment = self.second_moment();
        if !second_moment.is_finite() || !lambda.is_finite() {
            return Err(DemographicsError::MomentOverflow);
        }
        if lambda <= 0.0 {
            return Err(DemographicsError::ZeroMean(lambda));
        }
        Ok(Moments { lambda, second_moment })
    }
}

impl Distribution<f64> for RateDistribution {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            RateDistribution::PointMass { value } => value,
            RateDistribution::Exponential { mean } => {
                let e: f64 = Exp1.sample(rng);
                mean * e
            }
            RateDistribution::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            RateDistribution::LogNormal { mu, sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                (mu + sigma * z).exp()
            }
            RateDistribution::TwoPoint { value_a, prob_a, value_b } => {
                if rng.random::<f64>() < prob_a {
                    value_a
                } else {
                    value_b
                }
            }
        }
    }
}

/// The `n`-th model: `n` nonroot nodes, transmitter probability `p`, root
/// rate `z0`, and nonroot rate law `rates`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Demographics {
    pub n: usize,
    pub p: f64,
    pub z0: f64,
    pub rates: RateDistribution,
}

impl Demographics {
    pub fn new(n: usize, p: f64, z0: f64, rates: RateDistribution) -> Self {
        Self { n, p, z0, rates }
    }

    /// Checks every model invariant and returns the moments of `F`.
    pub fn validate(&self) -> Result<Moments, DemographicsError> {
        if self.n == 0 {
            return Err(DemographicsError::EmptyPopulation);
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(DemographicsError::InvalidProbability(self.p));
        }
        if !(self.z0.is_finite() && self.z0 > 0.0) {
            return Err(DemographicsError::InvalidRootRate(self.z0));
        }
        self.rates.moments()
    }

    pub fn lambda(&self) -> f64 {
        self.rates.mean()
    }
}

/// Realized `(θ_i, Z_i)` of the nonroot nodes `i = 1..=n`, stored at
/// index `i - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationSample {
    pub theta: Vec<bool>,
    pub z: Vec<f64>,
}

impl PopulationSample {
    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// Contact rate contributed to the spreading intensity by node `i - 1`.
    #[inline]
    pub fn transmit_rate(&self, idx: usize) -> f64 {
        if self.theta[idx] {
            self.z[idx]
        } else {
            0.0
        }
    }
}

/// Draws `θ_i ~ Bernoulli(p)` and then `Z_i ~ F`, independently.
pub fn sample_population<R: Rng + ?Sized>(demo: &Demographics, rng: &mut R) -> PopulationSample {
    let n = demo.n;
    let theta = if demo.p >= 1.0 {
        vec![true; n]
    } else {
        (0..n).map(|_| rng.random::<f64>() < demo.p).collect()
    };
    let z = (0..n).map(|_| demo.rates.sample(rng)).collect();
    PopulationSample { theta, z }
}
