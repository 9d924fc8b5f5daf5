//! Single-replicate simulation of the spreading process.
//!
//! Nonroot nodes are labeled in the order in which they become informed, so
//! a replicate is fully described by its [`TransmissionSchedule`]: the
//! informing times `T_0 = 0 ≤ T_1 ≤ … ≤ T_n` and the spreading intensities
//! `R_0 … R_n` in force between them. [`simulate_schedule`] builds it from
//! the exponential-spacings representation in O(n); [`simulate_naive`] runs
//! the contact-level Markov chain and serves as an independent oracle.

mod naive;
mod schedule;
mod yule;

pub use naive::{simulate_naive, simulate_naive_counted};
pub use schedule::{
    broadcast_summary, informed_fraction, normalized_interval, passage_times, simulate_schedule,
    BroadcastSummary, PassageTimes, TransmissionSchedule,
};
pub use yule::{simulate_thinned_yule, yule_reference_times, ThinnedYuleRun};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("requested {requested} tagged nodes but the population has only {n} nonroot nodes")]
    TooManyTargets { requested: usize, n: usize },
    #[error("at least one tagged node is required")]
    NoTargets,
    #[error("interval ({l}, {m}) is not within 0 <= l < m <= {n}")]
    IndexOutOfRange { l: usize, m: usize, n: usize },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(&'static str),
}
