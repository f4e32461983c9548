//! Sum capacity of the two-user MIMO MAC by iterative water-filling.
//!
//! Each user in turn water-fills against the noise plus the other user's
//! current interference, `N = I_r + H_j K_j H_j^T`. The sum rate is a concave
//! function of `(K_1, K_2)` and every half-step maximizes it over one block,
//! so the objective never decreases.

use alloc::vec::Vec;

use crate::math::log2;
use crate::matrix::Matrix;
use crate::model::{ChannelPair, CovariancePair};
use crate::{Error, Result, User};

/// Relative threshold below which an eigen-gain is treated as a dead mode.
const TOL_GAIN: f64 = 1e-14;

/// Admissible input covariances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CovarianceShape {
    /// Any PSD matrix with `trace(K) <= P`.
    #[default]
    Full,
    /// Diagonal `K` only (per-antenna power split). Requires diagonal channels.
    Diagonal,
}

/// Stopping rule and shape constraint for [`iterative_waterfill`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaterfillOptions {
    /// Stop once a full round improves the sum rate by less than this (bits).
    pub tol: f64,
    /// Maximum number of full rounds (user 1 then user 2).
    pub max_iter: usize,
    /// Covariance constraint.
    pub shape: CovarianceShape,
}

impl Default for WaterfillOptions {
    fn default() -> Self {
        WaterfillOptions {
            tol: 1e-10,
            max_iter: 10_000,
            shape: CovarianceShape::Full,
        }
    }
}

impl WaterfillOptions {
    /// Default stopping rule with diagonal covariances.
    pub fn diagonal() -> Self {
        WaterfillOptions {
            shape: CovarianceShape::Diagonal,
            ..WaterfillOptions::default()
        }
    }
}

/// Optimal covariances and the resulting sum capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct SumCapacityResult {
    /// `1/2 log2(C_d)` in bits per channel use.
    pub c_sum: f64,
    /// `|I_r + H_1 K_1* H_1^T + H_2 K_2* H_2^T|`.
    pub c_d: f64,
    /// Optimal covariances with their Cholesky factors.
    pub covariances: CovariancePair,
    /// Number of full rounds performed.
    pub iterations: usize,
    /// Whether the stopping rule was met before `max_iter`.
    pub converged: bool,
    /// Sum rate (bits) after every half-round, starting from `K = 0`.
    pub objective_trace: Vec<f64>,
}

impl SumCapacityResult {
    /// `K_1*`.
    pub fn k1(&self) -> &Matrix {
        self.covariances.k1()
    }

    /// `K_2*`.
    pub fn k2(&self) -> &Matrix {
        self.covariances.k2()
    }
}

/// Water level `mu` with `sum_i max(mu - 1/g_i, 0) = power` over positive gains.
///
/// Bisection on `mu` to 1e-12 relative, then the level is recomputed in closed
/// form on the final active set so the powers sum to `power` exactly.
fn water_level(gains: &[f64], power: f64) -> f64 {
    let used = |mu: f64| -> f64 {
        gains
            .iter()
            .filter(|&&g| g > 0.0)
            .map(|&g| (mu - 1.0 / g).max(0.0))
            .sum()
    };
    let floor = gains
        .iter()
        .filter(|&&g| g > 0.0)
        .map(|&g| 1.0 / g)
        .fold(f64::INFINITY, f64::min);
    let mut lo = floor;
    let mut hi = floor + power;
    while used(hi) < power {
        hi = lo + 2.0 * (hi - lo);
    }
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if used(mid) > power {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mu = 0.5 * (lo + hi);
    let active: Vec<f64> = gains
        .iter()
        .copied()
        .filter(|&g| g > 0.0 && mu - 1.0 / g > 0.0)
        .collect();
    if active.is_empty() {
        return mu;
    }
    let exact = (power + active.iter().map(|g| 1.0 / g).sum::<f64>()) / active.len() as f64;
    // The closed form must agree with the active set it came from.
    if active.iter().all(|&g| exact - 1.0 / g >= 0.0) {
        exact
    } else {
        mu
    }
}

fn allocate(gains: &[f64], power: f64) -> Vec<f64> {
    let peak = gains.iter().copied().fold(0.0f64, f64::max);
    let cut = TOL_GAIN * peak.max(1.0);
    let live: Vec<f64> = gains.iter().map(|&g| if g > cut { g } else { 0.0 }).collect();
    if live.iter().all(|&g| g == 0.0) {
        return alloc::vec![0.0; gains.len()];
    }
    let mu = water_level(&live, power);
    live.iter()
        .map(|&g| if g > 0.0 { (mu - 1.0 / g).max(0.0) } else { 0.0 })
        .collect()
}

/// Covariance maximizing `log|N + H K H^T|` subject to `trace(K) <= power`.
///
/// The whitened channel Gram matrix `H^T N^{-1} H` is diagonalized and the
/// power is poured over its eigen-gains. A zero channel returns `K = 0`.
pub fn single_user_waterfill(h: &Matrix, noise: &Matrix, power: f64) -> Result<Matrix> {
    if !(power > 0.0) {
        return Err(Error::InvalidArgument("power must be positive"));
    }
    if noise.rows() != h.rows() || !noise.is_square() {
        return Err(Error::Dimension {
            context: "noise covariance must be r x r",
        });
    }
    let t = h.cols();
    if h.is_zero() {
        return Ok(Matrix::zeros(t, t));
    }
    let n_inv = noise
        .inverse()
        .map_err(|_| Error::Singular("effective noise covariance"))?;
    let gram = h.transpose().mul(&n_inv).mul(h).symmetrize();
    let (gains, vectors) = gram.symmetric_eigen()?;
    let powers = allocate(&gains, power);
    Ok(Matrix::reconstruct(&vectors, &powers).symmetrize())
}

/// Diagonal-constrained variant for a diagonal channel and diagonal noise:
/// the modes are the antennas, with gains `H_ii^2 / N_ii`.
pub fn single_user_waterfill_diagonal(h: &Matrix, noise: &Matrix, power: f64) -> Result<Matrix> {
    if !(power > 0.0) {
        return Err(Error::InvalidArgument("power must be positive"));
    }
    if !h.is_diagonal() || !noise.is_diagonal() {
        return Err(Error::InvalidArgument(
            "diagonal water-filling needs a diagonal channel and noise",
        ));
    }
    let t = h.cols();
    let gains: Vec<f64> = (0..t)
        .map(|i| {
            if i < h.rows() {
                h[(i, i)] * h[(i, i)] / noise[(i, i)]
            } else {
                0.0
            }
        })
        .collect();
    Ok(Matrix::from_diag(&allocate(&gains, power)))
}

fn sum_rate(ch: &ChannelPair, k1: &Matrix, k2: &Matrix) -> f64 {
    let s = ch
        .h1()
        .mul(k1)
        .mul(&ch.h1().transpose())
        .add(&ch.h2().mul(k2).mul(&ch.h2().transpose()))
        .add_identity(1.0);
    0.5 * log2(s.det())
}

/// Sum capacity and optimal covariances, user 1 updated first in every round.
///
/// With a single transmit antenna the trace constraint leaves no freedom and
/// `K_1 = K_2 = P` is returned without iterating.
pub fn iterative_waterfill(
    ch: &ChannelPair,
    power: f64,
    opts: &WaterfillOptions,
) -> Result<SumCapacityResult> {
    if !(power > 0.0) || !power.is_finite() {
        return Err(Error::InvalidArgument("power must be positive and finite"));
    }
    let t = ch.t();
    let r = ch.r();
    if opts.shape == CovarianceShape::Diagonal && !ch.is_diagonal() {
        return Err(Error::InvalidArgument(
            "diagonal covariances need diagonal channel matrices",
        ));
    }
    if t == 1 {
        let k = Matrix::from_diag(&[power]);
        let covariances = CovariancePair::new(k.clone(), k, power)?;
        let c_d = ch.received_covariance(&covariances).det();
        return Ok(SumCapacityResult {
            c_sum: 0.5 * log2(c_d),
            c_d,
            covariances,
            iterations: 0,
            converged: true,
            objective_trace: alloc::vec![0.5 * log2(c_d)],
        });
    }

    let step = |h: &Matrix, noise: &Matrix| -> Result<Matrix> {
        match opts.shape {
            CovarianceShape::Full => single_user_waterfill(h, noise, power),
            CovarianceShape::Diagonal => single_user_waterfill_diagonal(h, noise, power),
        }
    };
    let interference = |user: User, k: &Matrix| -> Matrix {
        let h = ch.h(user);
        h.mul(k).mul(&h.transpose()).add_identity(1.0).symmetrize()
    };

    let mut k1 = Matrix::zeros(t, t);
    let mut k2 = Matrix::zeros(t, t);
    let mut trace = Vec::new();
    let mut prev = sum_rate(ch, &k1, &k2);
    trace.push(prev);
    let mut converged = false;
    let mut iterations = 0;
    debug_assert_eq!(r, ch.h1().rows());
    while iterations < opts.max_iter {
        iterations += 1;
        k1 = step(ch.h1(), &interference(User::Two, &k2))?;
        trace.push(sum_rate(ch, &k1, &k2));
        k2 = step(ch.h2(), &interference(User::One, &k1))?;
        let current = sum_rate(ch, &k1, &k2);
        trace.push(current);
        if (current - prev).abs() < opts.tol {
            converged = true;
            break;
        }
        prev = current;
    }

    let covariances = CovariancePair::new(k1, k2, power)?;
    let c_d = ch.received_covariance(&covariances).det();
    Ok(SumCapacityResult {
        c_sum: 0.5 * log2(c_d),
        c_d,
        covariances,
        iterations,
        converged,
        objective_trace: trace,
    })
}
