//! Channel, covariance and coding-choice types shared by every module.

use crate::matrix::{Matrix, TOL_FACTOR, TOL_PIVOT};
use crate::{Error, Result, User};

/// Relative slack allowed on the trace constraint `trace(K) <= P`.
pub const TOL_TRACE: f64 = 1e-9;

/// The two real `r x t` channel matrices of a two-user MAC.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelPair {
    t: usize,
    r: usize,
    h1: Matrix,
    h2: Matrix,
}

impl ChannelPair {
    /// Validates shapes and finiteness.
    pub fn new(h1: Matrix, h2: Matrix) -> Result<Self> {
        if h1.rows() != h2.rows() || h1.cols() != h2.cols() {
            return Err(Error::Dimension {
                context: "H1 and H2 must have identical shapes",
            });
        }
        if h1.rows() == 0 || h1.cols() == 0 {
            return Err(Error::Dimension {
                context: "channel matrices must be non-empty",
            });
        }
        if !h1.is_finite() || !h2.is_finite() {
            return Err(Error::NonFinite {
                context: "channel matrices",
            });
        }
        Ok(ChannelPair {
            t: h1.cols(),
            r: h1.rows(),
            h1,
            h2,
        })
    }

    /// SIMO channel from two receive vectors (t = 1).
    pub fn simo(h1: &[f64], h2: &[f64]) -> Result<Self> {
        ChannelPair::new(Matrix::column(h1), Matrix::column(h2))
    }

    /// SISO channel (t = r = 1).
    pub fn siso(h1: f64, h2: f64) -> Result<Self> {
        ChannelPair::simo(&[h1], &[h2])
    }

    /// Transmit antennas per user.
    pub fn t(&self) -> usize {
        self.t
    }

    /// Receive antennas.
    pub fn r(&self) -> usize {
        self.r
    }

    /// Channel of user 1.
    pub fn h1(&self) -> &Matrix {
        &self.h1
    }

    /// Channel of user 2.
    pub fn h2(&self) -> &Matrix {
        &self.h2
    }

    /// Channel of the given user.
    pub fn h(&self, user: User) -> &Matrix {
        match user {
            User::One => &self.h1,
            User::Two => &self.h2,
        }
    }

    /// Same channel with the users exchanged.
    pub fn swapped(&self) -> ChannelPair {
        ChannelPair {
            t: self.t,
            r: self.r,
            h1: self.h2.clone(),
            h2: self.h1.clone(),
        }
    }

    /// Whether both channel matrices are diagonal (off-diagonals exactly zero).
    pub fn is_diagonal(&self) -> bool {
        self.h1.is_diagonal() && self.h2.is_diagonal()
    }

    /// `I_r + H1 K1 H1^T + H2 K2 H2^T`.
    pub fn received_covariance(&self, cov: &CovariancePair) -> Matrix {
        let s1 = self.h1.mul(cov.k1()).mul(&self.h1.transpose());
        let s2 = self.h2.mul(cov.k2()).mul(&self.h2.transpose());
        s1.add(&s2).add_identity(1.0).symmetrize()
    }
}

/// Input covariances of both users with their Cholesky factors.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariancePair {
    k1: Matrix,
    k2: Matrix,
    power: f64,
    b1: Matrix,
    b2: Matrix,
}

impl CovariancePair {
    /// Validates the covariances against the power budget and factors them.
    pub fn new(k1: Matrix, k2: Matrix, power: f64) -> Result<Self> {
        if !(power > 0.0) || !power.is_finite() {
            return Err(Error::InvalidArgument("power must be positive and finite"));
        }
        if !k1.is_square() || k1.rows() != k2.rows() || !k2.is_square() {
            return Err(Error::Dimension {
                context: "covariances must be square t x t",
            });
        }
        let b1 = k1.cholesky_lower(TOL_PIVOT)?;
        let b2 = k2.cholesky_lower(TOL_PIVOT)?;
        for (user, k, b) in [(1, &k1, &b1), (2, &k2, &b2)] {
            let trace = k.trace();
            if trace > power * (1.0 + TOL_TRACE) {
                return Err(Error::PowerExceeded { user, trace, power });
            }
            let resid = b.gram().sub(k).max_abs();
            if resid > TOL_FACTOR * (1.0 + k.max_abs()) {
                // Pivot zeroing discarded more than rounding noise: the matrix
                // had a negative eigenvalue hidden below the pivot tolerance.
                return Err(Error::NotPsd {
                    pivot: usize::MAX,
                    value: -resid,
                });
            }
        }
        Ok(CovariancePair {
            k1: k1.symmetrize(),
            k2: k2.symmetrize(),
            power,
            b1,
            b2,
        })
    }

    /// `K1 = K2 = (P / t) I_t`.
    pub fn isotropic(t: usize, power: f64) -> Result<Self> {
        let k = Matrix::identity(t).scale(power / t as f64);
        CovariancePair::new(k.clone(), k, power)
    }

    /// Covariance of user 1.
    pub fn k1(&self) -> &Matrix {
        &self.k1
    }

    /// Covariance of user 2.
    pub fn k2(&self) -> &Matrix {
        &self.k2
    }

    /// Covariance of the given user.
    pub fn k(&self, user: User) -> &Matrix {
        match user {
            User::One => &self.k1,
            User::Two => &self.k2,
        }
    }

    /// Lower-triangular factor of `K1`.
    pub fn b1(&self) -> &Matrix {
        &self.b1
    }

    /// Lower-triangular factor of `K2`.
    pub fn b2(&self) -> &Matrix {
        &self.b2
    }

    /// Lower-triangular factor of the given user's covariance.
    pub fn b(&self, user: User) -> &Matrix {
        match user {
            User::One => &self.b1,
            User::Two => &self.b2,
        }
    }

    /// Per-user power budget `P`.
    pub fn power(&self) -> f64 {
        self.power
    }

    /// Same covariances with the users exchanged.
    pub fn swapped(&self) -> CovariancePair {
        CovariancePair {
            k1: self.k2.clone(),
            k2: self.k1.clone(),
            power: self.power,
            b1: self.b2.clone(),
            b2: self.b1.clone(),
        }
    }
}

/// Integer coefficient vectors `a`, `b` of the two decoded combinations and
/// the positive lattice scalings `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodingChoice {
    a: [i64; 2],
    b: [i64; 2],
    beta: [f64; 2],
}

impl CodingChoice {
    /// Checks `a != 0`, `det[a b] != 0` and `beta > 0`.
    pub fn new(a: [i64; 2], b: [i64; 2], beta: [f64; 2]) -> Result<Self> {
        if a == [0, 0] {
            return Err(Error::InvalidArgument("coefficient vector a must be nonzero"));
        }
        if a[0] * b[1] - a[1] * b[0] == 0 {
            return Err(Error::LinearlyDependent);
        }
        if !(beta[0] > 0.0 && beta[1] > 0.0) || !beta[0].is_finite() || !beta[1].is_finite() {
            return Err(Error::InvalidArgument("beta must be positive and finite"));
        }
        Ok(CodingChoice { a, b, beta })
    }

    /// `a = (1,1)`, `b = (1,0)`, `beta = (gamma, 1)`.
    pub fn sum_capacity(gamma: f64) -> Result<Self> {
        CodingChoice::new([1, 1], [1, 0], [gamma, 1.0])
    }

    /// First coefficient vector.
    pub fn a(&self) -> [i64; 2] {
        self.a
    }

    /// Second coefficient vector.
    pub fn b(&self) -> [i64; 2] {
        self.b
    }

    /// Scalings `(beta_1, beta_2)`.
    pub fn beta(&self) -> [f64; 2] {
        self.beta
    }

    /// `a_l * beta_l`.
    pub fn a_tilde(&self) -> [f64; 2] {
        [self.a[0] as f64 * self.beta[0], self.a[1] as f64 * self.beta[1]]
    }

    /// `b_l * beta_l`.
    pub fn b_tilde(&self) -> [f64; 2] {
        [self.b[0] as f64 * self.beta[0], self.b[1] as f64 * self.beta[1]]
    }

    /// `a_1 b_2 - a_2 b_1`.
    pub fn integer_det(&self) -> i64 {
        self.a[0] * self.b[1] - self.a[1] * self.b[0]
    }

    /// `a~_1 b~_2 - a~_2 b~_1`, which equals `beta_1 beta_2 (a_1 b_2 - a_2 b_1)`.
    pub fn scaled_det(&self) -> f64 {
        let at = self.a_tilde();
        let bt = self.b_tilde();
        at[0] * bt[1] - at[1] * bt[0]
    }

    /// Same choice with the users exchanged.
    pub fn swapped(&self) -> CodingChoice {
        CodingChoice {
            a: [self.a[1], self.a[0]],
            b: [self.b[1], self.b[0]],
            beta: [self.beta[1], self.beta[0]],
        }
    }
}

/// Outcome of the case-split rate pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePairResult {
    /// Rate of user 1 selected by the case split (bits).
    pub r1: f64,
    /// Rate of user 2 selected by the case split (bits).
    pub r2: f64,
    /// `r_1(a, beta)`, unclamped.
    pub r1_first: f64,
    /// `r_2(a, beta)`, unclamped.
    pub r2_first: f64,
    /// `r_1(b | a, beta)`, unclamped.
    pub r1_second: f64,
    /// `r_2(b | a, beta)`, unclamped.
    pub r2_second: f64,
    /// Whether every expression the case split depends on is non-negative.
    pub valid: bool,
}

impl RatePairResult {
    /// `R1 + R2`.
    pub fn sum(&self) -> f64 {
        self.r1 + self.r2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channel_shapes() {
        let h1 = Matrix::identity(2);
        let h2 = Matrix::zeros(2, 3);
        assert!(ChannelPair::new(h1.clone(), h2).is_err());
        let ch = ChannelPair::new(h1.clone(), h1).unwrap();
        assert_eq!((ch.t(), ch.r()), (2, 2));
        let bad = Matrix::from_rows(&[[f64::NAN]]).unwrap();
        assert!(ChannelPair::new(bad.clone(), bad).is_err());
    }

    #[test]
    fn covariance_power_budget() {
        let k = Matrix::identity(2);
        assert!(CovariancePair::new(k.clone(), k.clone(), 2.0).is_ok());
        assert!(matches!(
            CovariancePair::new(k.clone(), k.scale(1.5), 2.0),
            Err(Error::PowerExceeded { user: 2, .. })
        ));
        assert!(CovariancePair::new(k.clone(), k, 0.0).is_err());
    }

    #[test]
    fn coding_choice_invariants() {
        assert!(CodingChoice::new([0, 0], [1, 0], [1.0, 1.0]).is_err());
        assert_eq!(
            CodingChoice::new([1, 1], [1, 1], [1.0, 1.0]),
            Err(Error::LinearlyDependent)
        );
        assert_eq!(
            CodingChoice::new([1, 1], [2, 2], [1.0, 1.0]),
            Err(Error::LinearlyDependent)
        );
        assert!(CodingChoice::new([1, 1], [1, 0], [0.0, 1.0]).is_err());
        let c = CodingChoice::new([1, 2], [3, 1], [2.0, 0.5]).unwrap();
        assert_eq!(c.a_tilde(), [2.0, 1.0]);
        assert_eq!(c.b_tilde(), [6.0, 0.5]);
        assert_eq!(c.integer_det(), -5);
        assert_eq!(c.scaled_det(), 2.0 * 0.5 - 1.0 * 6.0);
    }
}
