//! Monte Carlo laboratory for message spreading in a population of
//! transmitters and receivers on the complete graph.
//!
//! * [`demographics`]: model parameters and population sampling.
//! * [`engine`]: exact and contact-level simulators, Yule processes.
//! * [`asymptotics`]: limit-law samplers and centering formulas.
//! * [`stats`]: empirical CDFs and goodness-of-fit distances.
//! * [`experiment`]: configuration, replicate fan-out and output files.

pub mod asymptotics;
pub mod demographics;
pub mod engine;
pub mod experiment;
pub mod rng;
pub mod stats;
