use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::TransmissionSchedule;
use crate::demographics::{Demographics, PopulationSample};

/// Fenwick tree over per-node contact rates, used to pick the source of
/// the next contact in O(log n).
struct RateTree {
    tree: Vec<f64>,
    weights: Vec<f64>,
    top: usize,
}

impl RateTree {
    fn new(len: usize) -> Self {
        let top = if len == 0 { 0 } else { 1 << (usize::BITS - 1 - len.leading_zeros()) };
        Self { tree: vec![0.0; len + 1], weights: vec![0.0; len], top }
    }

    fn add(&mut self, idx: usize, w: f64) {
        self.weights[idx] += w;
        let mut i = idx + 1;
        while i < self.tree.len() {
            self.tree[i] += w;
            i += i & i.wrapping_neg();
        }
    }

    /// Smallest index whose inclusive prefix sum exceeds `target`.
    fn find(&self, mut target: f64) -> usize {
        let len = self.weights.len();
        let mut pos = 0;
        let mut step = self.top;
        while step > 0 {
            let next = pos + step;
            if next <= len && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos.min(len - 1)
    }

    fn total(&self) -> f64 {
        let mut i = self.weights.len();
        let mut s = 0.0;
        while i > 0 {
            s += self.tree[i];
            i &= i - 1;
        }
        s
    }
}

/// Contact-level simulation of the information dynamics.
///
/// Contacts by informed transmitters arrive at the aggregate rate `R`; the
/// source is picked in proportion to its own rate and the target uniformly
/// among the other `n` nodes. A contact informs its target if the target is
/// still uninformed. Nonroot node `i` carries `pop` entry `i - 1`.
pub fn simulate_naive<R: Rng + ?Sized>(
    demo: &Demographics,
    pop: &PopulationSample,
    rng: &mut R,
) -> TransmissionSchedule {
    simulate_naive_counted(demo, pop, rng).0
}

/// As [`simulate_naive`], also returning the total number of contacts made
/// by informed transmitters (successful or not).
pub fn simulate_naive_counted<R: Rng + ?Sized>(
    demo: &Demographics,
    pop: &PopulationSample,
    rng: &mut R,
) -> (TransmissionSchedule, u64) {
    let n = demo.n;
    assert_eq!(pop.len(), n, "population size does not match demographics");
    let node_rate = |node: usize| if node == 0 { demo.z0 } else { pop.transmit_rate(node - 1) };

    let mut informed = vec![false; n + 1];
    let mut sources = RateTree::new(n + 1);
    let mut times = Vec::with_capacity(n + 1);
    let mut intensities = Vec::with_capacity(n + 1);

    informed[0] = true;
    sources.add(0, demo.z0);
    let mut r = demo.z0;
    let mut t = 0.0;
    times.push(t);
    intensities.push(r);

    let mut contacts = 0u64;
    let mut k = 0;
    while k < n {
        let xi: f64 = Exp1.sample(rng);
        t += xi / r;
        contacts += 1;

        let source = loop {
            let s = sources.find(rng.random::<f64>() * sources.total());
            // rounding in the prefix sums can land on a zero-rate node
            if sources.weights[s] > 0.0 {
                break s;
            }
        };
        let mut target = rng.random_range(0..n);
        if target >= source {
            target += 1;
        }
        if !informed[target] {
            informed[target] = true;
            k += 1;
            let w = node_rate(target);
            if w > 0.0 {
                sources.add(target, w);
            }
            r += w;
            times.push(t);
            intensities.push(r);
        }
    }
    (TransmissionSchedule::from_raw(times, intensities), contacts)
}
