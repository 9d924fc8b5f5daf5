//! Seeded random streams.
//!
//! Every random quantity in a run is drawn from a stream identified by the
//! triple (master seed, replicate index, role). Streams are derived by
//! hashing the triple with the SplitMix64 finalizer and seeding a
//! xoshiro256++ generator, so two roles of the same replicate never share
//! state and the draws of replicate `i` do not depend on how many other
//! replicates ran, or in which order.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

/// Generator used throughout the crate.
pub type SimRng = Xoshiro256PlusPlus;

/// What a stream is used for. Distinct roles give independent streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamRole {
    Population,
    Schedule,
    Ranks,
    Naive,
    Thinning,
    YuleReference,
    Limit,
    LimitAux,
    Reference,
}

impl StreamRole {
    fn tag(self) -> u64 {
        match self {
            StreamRole::Population => 0x01,
            StreamRole::Schedule => 0x02,
            StreamRole::Ranks => 0x03,
            StreamRole::Naive => 0x04,
            StreamRole::Thinning => 0x05,
            StreamRole::YuleReference => 0x06,
            StreamRole::Limit => 0x07,
            StreamRole::LimitAux => 0x08,
            StreamRole::Reference => 0x09,
        }
    }
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Source of independent, reproducible streams for one experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamFactory {
    master_seed: u64,
}

impl StreamFactory {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    /// 64-bit key for (replicate, role).
    pub fn key(&self, replicate: u64, role: StreamRole) -> u64 {
        let a = splitmix64(self.master_seed);
        let b = splitmix64(a ^ replicate.rotate_left(17));
        splitmix64(b ^ role.tag().wrapping_mul(0xd6e8_feb8_6659_fd93))
    }

    pub fn stream(&self, replicate: u64, role: StreamRole) -> SimRng {
        SimRng::seed_from_u64(self.key(replicate, role))
    }
}
