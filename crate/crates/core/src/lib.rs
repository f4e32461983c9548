//! Compute-forward multiple access (CFMA) for the two-user real Gaussian
//! MIMO multiple access channel.
//!
//! The crate computes the CFMA achievable rate pair for given channels,
//! input covariances and coding choices, the MAC sum capacity by iterative
//! water-filling, and decides whether CFMA reaches the sum capacity by
//! checking the sign of a determinant polynomial in the scaling ratio
//! `gamma = beta_1 / beta_2` with Sturm sequences. Closed forms for SIMO and
//! 2x2 diagonal channels are provided alongside the general path.
//!
//! All logarithms are base 2, so every rate is in bits per real channel use.
//!
//! The crate is `no_std` and only needs `alloc`. Everything is a pure
//! function over immutable values.

#![no_std]
#![deny(missing_docs)]

extern crate alloc;

#[cfg(any(test, feature = "std"))]
extern crate std;

mod error;
mod math;

pub mod closed_form;
pub mod matrix;
pub mod model;
pub mod poly;
pub mod rate;
pub mod sumcap;
pub mod waterfill;

pub use self::error::Error;
pub use self::matrix::Matrix;
pub use self::model::{ChannelPair, CodingChoice, CovariancePair, RatePairResult};
pub use self::poly::RealPolynomial;
pub use self::rate::{achievable_pair, compute_m, rate_first, rate_second, EffectiveNoiseReport};
pub use self::sumcap::{check_sum_capacity, CheckOptions, SumCapVerdict};
pub use self::waterfill::{iterative_waterfill, CovarianceShape, SumCapacityResult, WaterfillOptions};

/// Convenience alias used throughout the crate.
pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Index of one of the two transmitters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum User {
    /// Transmitter 1.
    One,
    /// Transmitter 2.
    Two,
}

impl User {
    /// Zero-based index (0 for user 1, 1 for user 2).
    pub fn index(self) -> usize {
        match self {
            User::One => 0,
            User::Two => 1,
        }
    }

    /// The other user.
    pub fn other(self) -> User {
        match self {
            User::One => User::Two,
            User::Two => User::One,
        }
    }
}
