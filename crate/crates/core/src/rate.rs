//! CFMA achievable rates for the two-user MIMO MAC.
//!
//! The receiver first decodes the integer combination with coefficients `a`
//! and then, with the first combination as side information, the combination
//! with coefficients `b`. With `a~_l = a_l beta_l` and `B_l` the lower
//! Cholesky factor of `K_l`,
//!
//! ```text
//! M            = (a~_1^2 + a~_2^2) I_t + D D^T,   D = a~_1 B_2^T H_2^T - a~_2 B_1^T H_1^T
//! r_l(a,beta)   = 1/2 log( beta_l^{2t} |I_r + sum_l H_l K_l H_l^T| / |M| )
//! r_l(b|a,beta) = 1/2 log( beta_l^{2t} |M| / (a~_1 b~_2 - a~_2 b~_1)^{2t} )
//! ```
//!
//! Everything is evaluated per channel use: the block-length-`n` matrices are
//! block diagonal, so the `n`-fold objects never need to be formed.

use alloc::vec::Vec;

use crate::math::log2;
use crate::matrix::Matrix;
use crate::model::{ChannelPair, CodingChoice, CovariancePair, RatePairResult};
use crate::{Error, Result, User};

fn check_shapes(ch: &ChannelPair, cov: &CovariancePair) -> Result<()> {
    if cov.k1().rows() != ch.t() {
        return Err(Error::Dimension {
            context: "covariance size must equal the transmit antenna count",
        });
    }
    Ok(())
}

/// `a~_1 B_2^T H_2^T - a~_2 B_1^T H_1^T` (t x r).
fn combined_precoded(ch: &ChannelPair, cov: &CovariancePair, at: [f64; 2]) -> Matrix {
    let g1 = ch.h1().mul(cov.b1());
    let g2 = ch.h2().mul(cov.b2());
    g2.scale(at[0]).sub(&g1.scale(at[1])).transpose()
}

/// The matrix `M` of the first decoding step.
pub fn compute_m(ch: &ChannelPair, cov: &CovariancePair, choice: &CodingChoice) -> Result<Matrix> {
    check_shapes(ch, cov)?;
    let at = choice.a_tilde();
    let d = combined_precoded(ch, cov, at);
    Ok(d.gram().add_identity(at[0] * at[0] + at[1] * at[1]).symmetrize())
}

/// Log-determinants shared by all four rate expressions.
#[derive(Debug, Clone, Copy)]
struct RateTerms {
    log_det_s: f64,
    log_det_m: f64,
    log_scaled_det: f64,
    t: f64,
}

impl RateTerms {
    fn new(ch: &ChannelPair, cov: &CovariancePair, choice: &CodingChoice) -> Result<Self> {
        let m = compute_m(ch, cov, choice)?;
        let det_m = m.det();
        if !(det_m > 0.0) {
            return Err(Error::Degenerate("|M| is not positive"));
        }
        let det_s = ch.received_covariance(cov).det();
        if !(det_s > 0.0) {
            return Err(Error::Degenerate("received covariance determinant is not positive"));
        }
        let scaled = choice.scaled_det();
        if scaled == 0.0 {
            return Err(Error::Degenerate("a~_1 b~_2 - a~_2 b~_1 vanishes"));
        }
        Ok(RateTerms {
            log_det_s: log2(det_s),
            log_det_m: log2(det_m),
            log_scaled_det: log2(scaled.abs()),
            t: ch.t() as f64,
        })
    }

    fn first(&self, beta: f64) -> f64 {
        0.5 * (2.0 * self.t * log2(beta) + self.log_det_s - self.log_det_m)
    }

    fn second(&self, beta: f64) -> f64 {
        0.5 * (2.0 * self.t * log2(beta) + self.log_det_m) - self.t * self.log_scaled_det
    }
}

/// `r_l(a, beta)`: rate at which the first combination can be decoded,
/// charged to user `l`. May be negative.
pub fn rate_first(
    user: User,
    ch: &ChannelPair,
    cov: &CovariancePair,
    choice: &CodingChoice,
) -> Result<f64> {
    let terms = RateTerms::new(ch, cov, choice)?;
    Ok(terms.first(choice.beta()[user.index()]))
}

/// `r_l(b | a, beta)`: rate of the second combination given the first.
/// May be negative.
pub fn rate_second(
    user: User,
    ch: &ChannelPair,
    cov: &CovariancePair,
    choice: &CodingChoice,
) -> Result<f64> {
    let terms = RateTerms::new(ch, cov, choice)?;
    Ok(terms.second(choice.beta()[user.index()]))
}

/// Case-split achievable rate pair.
///
/// User `l` gets `r_l(a)` when `b_l = 0`, `r_l(b|a)` when `a_l = 0`, and the
/// minimum of both otherwise. The pair is flagged invalid when any expression
/// that the selected branch depends on is negative.
pub fn achievable_pair(
    ch: &ChannelPair,
    cov: &CovariancePair,
    choice: &CodingChoice,
) -> Result<RatePairResult> {
    let terms = RateTerms::new(ch, cov, choice)?;
    let beta = choice.beta();
    let (a, b) = (choice.a(), choice.b());
    let first = [terms.first(beta[0]), terms.first(beta[1])];
    let second = [terms.second(beta[0]), terms.second(beta[1])];
    let mut rates = [0.0; 2];
    let mut valid = true;
    for l in 0..2 {
        let (rate, ok) = if b[l] == 0 {
            (first[l], first[l] >= 0.0)
        } else if a[l] == 0 {
            (second[l], second[l] >= 0.0)
        } else {
            (first[l].min(second[l]), first[l] >= 0.0 && second[l] >= 0.0)
        };
        rates[l] = rate;
        valid &= ok;
    }
    Ok(RatePairResult {
        r1: rates[0],
        r2: rates[1],
        r1_first: first[0],
        r2_first: first[1],
        r1_second: second[0],
        r2_second: second[1],
        valid,
    })
}

/// Which `(a, b)` pairs [`best_rate_pair`] tries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoefficientSearch {
    /// `a = (1,1)` with `b = (1,0)` or `b = (0,1)`.
    #[default]
    UnitDeterminant,
    /// Every linearly independent pair with entries in `[-a_max, a_max]`.
    Extended {
        /// Largest absolute coefficient.
        a_max: i64,
    },
}

/// Largest valid sum rate over the coefficient set, for fixed `beta`.
///
/// Returns `None` when no candidate yields a valid pair. Ties keep the first
/// candidate in enumeration order.
pub fn best_rate_pair(
    ch: &ChannelPair,
    cov: &CovariancePair,
    beta: [f64; 2],
    search: CoefficientSearch,
) -> Result<Option<(CodingChoice, RatePairResult)>> {
    let mut candidates: Vec<([i64; 2], [i64; 2])> = Vec::new();
    match search {
        CoefficientSearch::UnitDeterminant => {
            candidates.push(([1, 1], [1, 0]));
            candidates.push(([1, 1], [0, 1]));
        }
        CoefficientSearch::Extended { a_max } => {
            if a_max < 1 {
                return Err(Error::InvalidArgument("a_max must be at least 1"));
            }
            let range = -a_max..=a_max;
            for a1 in range.clone() {
                for a2 in range.clone() {
                    for b1 in range.clone() {
                        for b2 in range.clone() {
                            if (a1, a2) != (0, 0) && a1 * b2 - a2 * b1 != 0 {
                                candidates.push(([a1, a2], [b1, b2]));
                            }
                        }
                    }
                }
            }
        }
    }
    let mut best: Option<(CodingChoice, RatePairResult)> = None;
    for (a, b) in candidates {
        let choice = CodingChoice::new(a, b, beta)?;
        let pair = achievable_pair(ch, cov, &choice)?;
        if !pair.valid {
            continue;
        }
        if best.as_ref().map_or(true, |(_, p)| pair.sum() > p.sum()) {
            best = Some((choice, pair));
        }
    }
    Ok(best)
}

/// Optimal equalizers of both decoding steps and the determinants of the
/// resulting effective-noise covariances.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveNoiseReport {
    /// `|Sigma_1(W*)|`, evaluated from the defining noise covariance.
    pub sigma1_det: f64,
    /// `|Sigma_2(F*, L*)|`, evaluated from the defining noise covariance.
    pub sigma2_det: f64,
    /// Closed-form prediction `|M| / |I_r + sum_l H_l K_l H_l^T|`.
    pub sigma1_det_predicted: f64,
    /// Closed-form prediction `(a~_1 b~_2 - a~_2 b~_1)^{2t} / |M|`.
    pub sigma2_det_predicted: f64,
    /// First-step equalizer `W*` (t x r).
    pub w_opt: Matrix,
    /// Second-step equalizer `F*` (t x r).
    pub f_opt: Matrix,
    /// Side-information weight `L*` (t x t).
    pub l_opt: Matrix,
}

/// Effective-noise covariance of the first step for an arbitrary equalizer
/// `W`: `W W^T + sum_l (a~_l I - W H_l B_l)(a~_l I - W H_l B_l)^T`.
pub fn sigma1(ch: &ChannelPair, cov: &CovariancePair, choice: &CodingChoice, w: &Matrix) -> Matrix {
    let at = choice.a_tilde();
    let t = ch.t();
    let mut sigma = w.gram();
    for user in [User::One, User::Two] {
        let hb = ch.h(user).mul(cov.b(user));
        let resid = Matrix::identity(t).scale(at[user.index()]).sub(&w.mul(&hb));
        sigma = sigma.add(&resid.gram());
    }
    sigma.symmetrize()
}

/// Effective-noise covariance of the second step for arbitrary `F`, `L`:
/// `F F^T + sum_l (b~_l I - F H_l B_l - a~_l L)(...)^T`.
pub fn sigma2(
    ch: &ChannelPair,
    cov: &CovariancePair,
    choice: &CodingChoice,
    f: &Matrix,
    l: &Matrix,
) -> Matrix {
    let at = choice.a_tilde();
    let bt = choice.b_tilde();
    let t = ch.t();
    let mut sigma = f.gram();
    for user in [User::One, User::Two] {
        let i = user.index();
        let hb = ch.h(user).mul(cov.b(user));
        let resid = Matrix::identity(t)
            .scale(bt[i])
            .sub(&f.mul(&hb))
            .sub(&l.scale(at[i]));
        sigma = sigma.add(&resid.gram());
    }
    sigma.symmetrize()
}

/// Closed-form optimal equalizers and the noise determinants they attain.
pub fn equalizer_oracle(
    ch: &ChannelPair,
    cov: &CovariancePair,
    choice: &CodingChoice,
) -> Result<EffectiveNoiseReport> {
    check_shapes(ch, cov)?;
    let t = ch.t();
    let at = choice.a_tilde();
    let bt = choice.b_tilde();
    let a_energy = at[0] * at[0] + at[1] * at[1];
    let scaled_det = choice.scaled_det();

    let s = ch.received_covariance(cov);
    let s_inv = s
        .inverse()
        .map_err(|_| Error::Singular("received covariance"))?;

    // W* = (sum_l a~_l B_l^T H_l^T) S^{-1}
    let mut a_sum = Matrix::zeros(t, ch.r());
    for user in [User::One, User::Two] {
        let bh = cov.b(user).transpose().mul(&ch.h(user).transpose());
        a_sum = a_sum.add(&bh.scale(at[user.index()]));
    }
    let w_opt = a_sum.mul(&s_inv);

    // F* = (scaled_det / a_energy) D M_k^{-1}, M_k = I_r + D^T D / a_energy
    let d = combined_precoded(ch, cov, at);
    let mk = d.transpose().mul(&d).scale(1.0 / a_energy).add_identity(1.0);
    let mk_inv = mk.inverse().map_err(|_| Error::Singular("M_k"))?;
    let f_opt = d.mul(&mk_inv).scale(scaled_det / a_energy);

    // L* = (sum_l a~_l (b~_l I - F H_l B_l)) / a_energy
    let mut l_opt = Matrix::zeros(t, t);
    for user in [User::One, User::Two] {
        let i = user.index();
        let hb = ch.h(user).mul(cov.b(user));
        let term = Matrix::identity(t).scale(bt[i]).sub(&f_opt.mul(&hb));
        l_opt = l_opt.add(&term.scale(at[i]));
    }
    let l_opt = l_opt.scale(1.0 / a_energy);

    let sigma1_det = sigma1(ch, cov, choice, &w_opt).det();
    let sigma2_det = sigma2(ch, cov, choice, &f_opt, &l_opt).det();
    let det_m = compute_m(ch, cov, choice)?.det();
    let det_s = s.det();
    Ok(EffectiveNoiseReport {
        sigma1_det,
        sigma2_det,
        sigma1_det_predicted: det_m / det_s,
        sigma2_det_predicted: crate::math::powi(scaled_det, 2 * t as i32) / det_m,
        w_opt,
        f_opt,
        l_opt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn siso(p: f64) -> (ChannelPair, CovariancePair) {
        let ch = ChannelPair::siso(1.0, 1.0).unwrap();
        let k = Matrix::from_diag(&[p]);
        (ch, CovariancePair::new(k.clone(), k, p).unwrap())
    }

    fn mimo_identity() -> (ChannelPair, CovariancePair) {
        let ch = ChannelPair::new(Matrix::identity(2), Matrix::identity(2)).unwrap();
        (ch, CovariancePair::isotropic(2, 2.0).unwrap())
    }

    #[test]
    fn m_examples() {
        let (ch, cov) = siso(1.5);
        let c = CodingChoice::new([1, 1], [1, 0], [1.0, 1.0]).unwrap();
        assert!((compute_m(&ch, &cov, &c).unwrap()[(0, 0)] - 2.0).abs() < 1e-15);

        let (ch, cov) = mimo_identity();
        let m = compute_m(&ch, &cov, &c).unwrap();
        assert!(m.sub(&Matrix::identity(2).scale(2.0)).max_abs() < 1e-15);
    }

    #[test]
    fn m_collapses_when_a2_is_zero() {
        let h1 = Matrix::from_rows(&[[0.3, 1.2], [0.7, -0.4]]).unwrap();
        let h2 = Matrix::from_rows(&[[0.9, 0.1], [0.2, 0.5]]).unwrap();
        let ch = ChannelPair::new(h1, h2).unwrap();
        let k1 = Matrix::from_rows(&[[1.0, 0.2], [0.2, 0.5]]).unwrap();
        let k2 = Matrix::from_rows(&[[0.8, -0.1], [-0.1, 0.7]]).unwrap();
        let cov = CovariancePair::new(k1, k2, 2.0).unwrap();
        let c = CodingChoice::new([1, 0], [0, 1], [1.0, 1.0]).unwrap();
        let m = compute_m(&ch, &cov, &c).unwrap();
        let g2 = ch.h2().mul(cov.b2());
        let expected = g2.transpose().mul(&g2).add_identity(1.0);
        assert!(m.sub(&expected).max_abs() < 1e-14);

        // Sylvester: |I_t + B2^T H2^T H2 B2| = |I_r + H2 K2 H2^T|
        let r1 = rate_first(User::One, &ch, &cov, &c).unwrap();
        let s = ch.received_covariance(&cov).det();
        let single = ch.h2().mul(cov.k2()).mul(&ch.h2().transpose()).add_identity(1.0).det();
        assert!((r1 - 0.5 * (s / single).log2()).abs() < 1e-13);
    }

    #[test]
    fn siso_rates() {
        let (ch, cov) = siso(1.5);
        let c = CodingChoice::new([1, 1], [1, 0], [1.0, 1.0]).unwrap();
        assert!((rate_first(User::One, &ch, &cov, &c).unwrap() - 0.5).abs() < 1e-15);
        assert!((rate_second(User::One, &ch, &cov, &c).unwrap() - 0.5).abs() < 1e-15);
        let pair = achievable_pair(&ch, &cov, &c).unwrap();
        assert!(pair.valid);
        assert!((pair.r1 - 0.5).abs() < 1e-15);
        assert!((pair.r2 - 0.5).abs() < 1e-15);
        // C_sum = 1/2 log2(1 + 2P) = 1
        assert!((pair.sum() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mimo_identity_rates() {
        let (ch, cov) = mimo_identity();
        let c = CodingChoice::new([1, 1], [1, 0], [1.0, 1.0]).unwrap();
        // 1/2 log2(|3 I| / |2 I|) = 1/2 log2(9/4)
        let r = rate_first(User::One, &ch, &cov, &c).unwrap();
        assert!((r - 0.5 * (9.0f64 / 4.0).log2()).abs() < 1e-14);
        let r = rate_second(User::Two, &ch, &cov, &c).unwrap();
        assert!((r - 1.0).abs() < 1e-14);
    }

    #[test]
    fn case_split_mirror() {
        let (ch, cov) = siso(3.0);
        let c = CodingChoice::new([1, 1], [0, 1], [1.3, 1.0]).unwrap();
        let pair = achievable_pair(&ch, &cov, &c).unwrap();
        assert_eq!(pair.r1, pair.r1_first);
        assert_eq!(pair.r2, pair.r2_first.min(pair.r2_second));
        let c = CodingChoice::new([1, 0], [0, 1], [1.0, 1.0]).unwrap();
        let pair = achievable_pair(&ch, &cov, &c).unwrap();
        assert_eq!(pair.r1, pair.r1_first);
        assert_eq!(pair.r2, pair.r2_second);
    }

    #[test]
    fn negative_first_rate_is_invalid() {
        let (ch, cov) = siso(1.0);
        // tiny beta_1 drives r_1(a) far below zero
        let c = CodingChoice::new([1, 1], [1, 0], [1e-3, 1.0]).unwrap();
        let pair = achievable_pair(&ch, &cov, &c).unwrap();
        assert!(pair.r1_first < 0.0);
        assert!(!pair.valid);
    }

    #[test]
    fn oracle_single_term_equalizer() {
        let (ch, cov) = siso(2.0);
        let c = CodingChoice::new([0, 1], [1, 0], [1.0, 1.7]).unwrap();
        let rep = equalizer_oracle(&ch, &cov, &c).unwrap();
        let s = ch.received_covariance(&cov);
        let expected = cov
            .b2()
            .transpose()
            .mul(&ch.h2().transpose())
            .mul(&s.inverse().unwrap())
            .scale(1.7);
        assert!(rep.w_opt.sub(&expected).max_abs() < 1e-14);
        assert!((rep.sigma1_det / rep.sigma1_det_predicted - 1.0).abs() < 1e-12);
        assert!((rep.sigma2_det / rep.sigma2_det_predicted - 1.0).abs() < 1e-12);
    }

    #[test]
    fn default_search_prefers_valid_pairs() {
        let (ch, cov) = siso(10.0);
        let (choice, pair) = best_rate_pair(&ch, &cov, [1.0, 1.0], CoefficientSearch::default())
            .unwrap()
            .unwrap();
        assert!(pair.valid);
        assert_eq!(choice.a(), [1, 1]);
        let ext = best_rate_pair(&ch, &cov, [1.0, 1.0], CoefficientSearch::Extended { a_max: 2 })
            .unwrap()
            .unwrap();
        assert!(ext.1.sum() >= pair.sum() - 1e-12);
    }
}
