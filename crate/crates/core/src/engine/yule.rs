use rand::Rng;
use rand_distr::{Distribution, Exp1, Geometric};

use crate::demographics::RateDistribution;

/// Birth times `T̂_1 … T̂_m` of the reproduction-capable individuals of a
/// thinned Yule process, with their birth indices `D_1 … D_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThinnedYuleRun {
    pub t_hat: Vec<f64>,
    pub d: Vec<u64>,
}

/// Direct simulation of the thinned Yule process.
///
/// Starting from one individual of rate `z0`, births arrive at the current
/// net rate `R`. The number of births up to and including the next capable
/// one is geometric on `{1, 2, …}` with success probability `p`; each of
/// those births contributes its own exponential gap `ξ / R`. Only capable
/// individuals draw a rate from `rates` and raise `R`.
pub fn simulate_thinned_yule<R: Rng + ?Sized>(
    p: f64,
    z0: f64,
    rates: &RateDistribution,
    m: usize,
    rng: &mut R,
) -> ThinnedYuleRun {
    assert!(p > 0.0 && p <= 1.0, "p must lie in (0, 1]");
    assert!(z0 > 0.0, "z0 must be positive");
    let skips = Geometric::new(p).expect("p in (0, 1]");
    let mut t_hat = Vec::with_capacity(m);
    let mut d = Vec::with_capacity(m);
    let mut rate = z0;
    let mut t = 0.0;
    let mut births = 0u64;
    for _ in 0..m {
        let batch = 1 + skips.sample(rng);
        for _ in 0..batch {
            let xi: f64 = Exp1.sample(rng);
            t += xi / rate;
        }
        births += batch;
        t_hat.push(t);
        d.push(births);
        rate += rates.sample(rng);
    }
    ThinnedYuleRun { t_hat, d }
}

/// Partial sums `(λp)^{-1} Σ_{ℓ≤k} ξ_ℓ / J_ℓ`, `k = 1..=m`, with
/// `J_ℓ = λ^{-1}(z0 + Z_1 + … + Z_{ℓ−1})` built from fresh draws.
///
/// Has the law of the thinned Yule birth times `T̂_1 … T̂_m`.
pub fn yule_reference_times<R: Rng + ?Sized>(
    z0: f64,
    rates: &RateDistribution,
    m: usize,
    p: f64,
    rng: &mut R,
) -> Vec<f64> {
    assert!(p > 0.0 && p <= 1.0, "p must lie in (0, 1]");
    let lambda = rates.mean();
    assert!(lambda > 0.0, "rate distribution must have positive mean");
    let scale = 1.0 / (lambda * p);
    let mut out = Vec::with_capacity(m);
    let mut cum = z0;
    let mut acc = 0.0;
    for _ in 0..m {
        let j = cum / lambda;
        let xi: f64 = Exp1.sample(rng);
        acc += xi / j;
        out.push(scale * acc);
        cum += rates.sample(rng);
    }
    out
}
