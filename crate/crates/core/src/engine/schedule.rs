use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::EngineError;
use crate::demographics::{Demographics, PopulationSample};

/// Informing times and spreading intensities of one replicate.
///
/// `times[k]` is the instant the `k`-th nonroot node becomes informed and
/// `intensities[k]` is the total contact rate of informed transmitters on
/// `[times[k], times[k + 1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionSchedule {
    times: Vec<f64>,
    intensities: Vec<f64>,
}

impl TransmissionSchedule {
    /// Builds a schedule from raw vectors, checking shape and ordering.
    pub fn from_parts(times: Vec<f64>, intensities: Vec<f64>) -> Result<Self, EngineError> {
        if times.len() < 2 {
            return Err(EngineError::InvalidSchedule("need at least one nonroot node"));
        }
        if times.len() != intensities.len() {
            return Err(EngineError::InvalidSchedule("times and intensities differ in length"));
        }
        if times[0] != 0.0 {
            return Err(EngineError::InvalidSchedule("T_0 must be 0"));
        }
        if times.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(EngineError::InvalidSchedule("times must be nondecreasing"));
        }
        if intensities.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(EngineError::InvalidSchedule("intensities must be nondecreasing"));
        }
        Ok(Self { times, intensities })
    }

    pub(crate) fn from_raw(times: Vec<f64>, intensities: Vec<f64>) -> Self {
        debug_assert_eq!(times.len(), intensities.len());
        Self { times, intensities }
    }

    /// Number of nonroot nodes.
    pub fn n(&self) -> usize {
        self.times.len() - 1
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }

    pub fn t_full(&self) -> f64 {
        self.times[self.n()]
    }

    pub fn t_half(&self) -> f64 {
        self.times[self.n() / 2]
    }
}

/// Builds the schedule from `T_k = Σ_{j<k} (n / (n − j)) ξ_j / R_j`, using
/// the population in index order as the informing order.
///
/// Consumes exactly `n` unit-exponential variates from `rng`.
pub fn simulate_schedule<R: Rng + ?Sized>(
    demo: &Demographics,
    pop: &PopulationSample,
    rng: &mut R,
) -> TransmissionSchedule {
    let n = demo.n;
    assert_eq!(pop.len(), n, "population size does not match demographics");
    let nf = n as f64;
    let mut times = Vec::with_capacity(n + 1);
    let mut intensities = Vec::with_capacity(n + 1);
    let mut t = 0.0;
    let mut r = demo.z0;
    times.push(t);
    intensities.push(r);
    for j in 0..n {
        let xi: f64 = Exp1.sample(rng);
        t += nf / (n - j) as f64 * xi / r;
        r += pop.transmit_rate(j);
        times.push(t);
        intensities.push(r);
    }
    TransmissionSchedule::from_raw(times, intensities)
}

/// Half, second-half and full broadcast times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BroadcastSummary {
    pub t_half: f64,
    pub t_half2: f64,
    pub t_full: f64,
}

/// `t_half = T_{⌊n/2⌋}`, `t_full = T_n`.
pub fn broadcast_summary(sched: &TransmissionSchedule) -> BroadcastSummary {
    let t_half = sched.t_half();
    let t_full = sched.t_full();
    BroadcastSummary { t_half, t_half2: t_full - t_half, t_full }
}

/// First passage times of `k` tagged nonroot nodes. Entry `i` of both
/// vectors belongs to tagged node `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PassageTimes {
    pub taus: Vec<f64>,
    pub ranks: Vec<usize>,
}

/// Assigns distinct informing ranks, uniform without replacement over
/// `1..=n`, to `k_targets` tagged nodes and reads off their passage times.
///
/// Exchangeability of the nonroot nodes makes this the joint law of the
/// passage times of any `k_targets` fixed nodes.
pub fn passage_times<R: Rng + ?Sized>(
    sched: &TransmissionSchedule,
    k_targets: usize,
    rng: &mut R,
) -> Result<PassageTimes, EngineError> {
    let n = sched.n();
    if k_targets == 0 {
        return Err(EngineError::NoTargets);
    }
    if k_targets > n {
        return Err(EngineError::TooManyTargets { requested: k_targets, n });
    }
    let ranks: Vec<usize> = index::sample(rng, n, k_targets).into_iter().map(|r| r + 1).collect();
    let taus = ranks.iter().map(|&r| sched.times[r]).collect();
    Ok(PassageTimes { taus, ranks })
}

/// Fraction of nonroot nodes informed by time `t`.
pub fn informed_fraction(sched: &TransmissionSchedule, t: f64) -> f64 {
    let informed = sched.times[1..].partition_point(|&x| x <= t);
    informed as f64 / sched.n() as f64
}

/// `λ p (T_m − T_l)`.
pub fn normalized_interval(
    sched: &TransmissionSchedule,
    l: usize,
    m: usize,
    lambda: f64,
    p: f64,
) -> Result<f64, EngineError> {
    let n = sched.n();
    if !(l < m && m <= n) {
        return Err(EngineError::IndexOutOfRange { l, m, n });
    }
    Ok(lambda * p * (sched.times[m] - sched.times[l]))
}
