//! Formula-level conditions for SIMO and 2x2 diagonal channels.
//!
//! These bypass interpolation and Sturm chains and serve both as fast paths
//! and as cross-checks of [`crate::sumcap`].

use alloc::vec;

use crate::math::{powi, sqrt};
use crate::matrix::Matrix;
use crate::model::{ChannelPair, CovariancePair};
use crate::poly::{positive_roots, RealPolynomial};
use crate::sumcap::GammaInterval;
use crate::{Error, Result};

/// Relative threshold `lambda_2 / lambda_1` below which SIMO channels count as collinear.
pub const TOL_COLLINEAR: f64 = 1e-10;
/// Relative trimming applied to polynomials in `P`.
const TOL_TRIM_P: f64 = 1e-12;

/// SIMO channel (`t = 1`) at power `P`, summarised by its 2x2 Gram matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimoInstance {
    /// `||h_1||^2`.
    pub norm1: f64,
    /// `||h_2||^2`.
    pub norm2: f64,
    /// `h_1^T h_2`.
    pub inner: f64,
    /// Larger nonzero eigenvalue of `h_1 h_1^T + h_2 h_2^T`.
    pub lambda1: f64,
    /// Smaller eigenvalue, clamped at zero.
    pub lambda2: f64,
    /// Power budget.
    pub power: f64,
}

impl SimoInstance {
    /// Builds the instance from two receive vectors of equal length.
    pub fn new(h1: &[f64], h2: &[f64], power: f64) -> Result<Self> {
        if h1.len() != h2.len() || h1.is_empty() {
            return Err(Error::Dimension { context: "SIMO channel vectors" });
        }
        if !(power >= 0.0) || !power.is_finite() {
            return Err(Error::InvalidArgument("power must be non-negative"));
        }
        if h1.iter().chain(h2).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { context: "SIMO channel vectors" });
        }
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let norm1 = dot(h1, h1);
        let norm2 = dot(h2, h2);
        let inner = dot(h1, h2);
        let half = 0.5 * (norm1 + norm2);
        let gram_det = (norm1 * norm2 - inner * inner).max(0.0);
        let lambda1 = half + sqrt((half * half - gram_det).max(0.0));
        let lambda2 = if lambda1 > 0.0 { gram_det / lambda1 } else { 0.0 };
        Ok(SimoInstance { norm1, norm2, inner, lambda1, lambda2, power })
    }

    /// Extracts the receive vectors from a channel with `t = 1`.
    pub fn from_channel(ch: &ChannelPair, power: f64) -> Result<Self> {
        if ch.t() != 1 {
            return Err(Error::Dimension { context: "SIMO instance needs t = 1" });
        }
        SimoInstance::new(ch.h1().as_slice(), ch.h2().as_slice(), power)
    }

    /// Same channel at another power.
    pub fn with_power(&self, power: f64) -> Self {
        SimoInstance { power, ..*self }
    }

    /// Whether `lambda_2 <= TOL_COLLINEAR * lambda_1`.
    pub fn is_collinear(&self) -> bool {
        self.lambda2 <= TOL_COLLINEAR * self.lambda1
    }

    /// `C_d = (1 + lambda_1 P)(1 + lambda_2 P)`.
    pub fn c_d(&self) -> f64 {
        (1.0 + self.lambda1 * self.power) * (1.0 + self.lambda2 * self.power)
    }

    /// Coefficients of `f(gamma) = (1 + P||h_2||^2) gamma^2 - 2 P h_1^T h_2 gamma + (1 + P||h_1||^2)`.
    pub fn f_poly(&self) -> RealPolynomial {
        let p = self.power;
        RealPolynomial::new(vec![1.0 + p * self.norm1, -2.0 * p * self.inner, 1.0 + p * self.norm2])
    }
}

/// `Delta = (sqrt(C_d) + 2P h_1^T h_2)^2 - 4(1 + P||h_1||^2)(1 + P||h_2||^2)`.
pub fn simo_delta(inst: &SimoInstance) -> f64 {
    let p = inst.power;
    let b = sqrt(inst.c_d()) + 2.0 * p * inst.inner;
    b * b - 4.0 * (1.0 + p * inst.norm1) * (1.0 + p * inst.norm2)
}

/// Interval of `gamma` where the quadratic `g` is non-positive, if `Delta >= 0`.
pub fn simo_gamma_range(inst: &SimoInstance) -> Option<GammaInterval> {
    let delta = simo_delta(inst);
    let p = inst.power;
    let b = sqrt(inst.c_d()) + 2.0 * p * inst.inner;
    if delta < 0.0 || b <= 0.0 {
        return None;
    }
    let root = sqrt(delta);
    let hi = (b + root) / (2.0 * (1.0 + p * inst.norm2));
    // product of the roots is (1 + P||h_1||^2) / (1 + P||h_2||^2)
    let lo = 2.0 * (1.0 + p * inst.norm1) / (b + root);
    Some(GammaInterval { lo, hi })
}

/// `P h_1^T h_2 / sqrt(1 + P(||h_1||^2 + ||h_2||^2)) >= 3/4` for collinear channels.
pub fn simo_collinear_achievable(inst: &SimoInstance) -> Result<bool> {
    if !inst.is_collinear() {
        return Err(Error::NotCollinear);
    }
    let p = inst.power;
    Ok(p * inst.inner / sqrt(1.0 + p * (inst.norm1 + inst.norm2)) >= 0.75)
}

/// `(sqrt(lambda_1 lambda_2) + 2 h_1^T h_2)^2 > 4 ||h_1||^2 ||h_2||^2`.
///
/// Power-independent; when it holds the sum capacity is achievable for every
/// `P >= simo_p_star`.
pub fn simo_noncollinear_condition(inst: &SimoInstance) -> Result<bool> {
    if inst.is_collinear() {
        return Err(Error::Collinear);
    }
    Ok(noncollinear_margin(inst) > 0.0)
}

fn noncollinear_margin(inst: &SimoInstance) -> f64 {
    let s = sqrt(inst.lambda1 * inst.lambda2) + 2.0 * inst.inner;
    s * s - 4.0 * inst.norm1 * inst.norm2
}

/// Largest root of `Delta(P)`.
///
/// Candidates come from the squared form
/// `(4(1 + P n_1)(1 + P n_2) - C_d(P) - 4 P^2 i^2)^2 = 16 P^2 i^2 C_d(P)`,
/// which contains every root of `Delta`; the result is certified by direct
/// evaluation of `Delta`.
pub fn simo_p_star(inst: &SimoInstance) -> Result<f64> {
    let eventually_positive = if inst.is_collinear() {
        inst.inner > 0.0
    } else {
        noncollinear_margin(inst) > 0.0
    };
    if !eventually_positive {
        return Err(Error::NoRoot("Delta(P) stays negative for large P"));
    }
    let (n1, n2, i) = (inst.norm1, inst.norm2, inst.inner);
    let c_d = RealPolynomial::new(vec![1.0, inst.lambda1 + inst.lambda2, inst.lambda1 * inst.lambda2]);
    let four_s = RealPolynomial::new(vec![4.0, 4.0 * (n1 + n2), 4.0 * n1 * n2]);
    let rest = four_s.sub_poly(&c_d).sub_monomial(2, 4.0 * i * i);
    let rhs = c_d.mul(&RealPolynomial::monomial(2, 16.0 * i * i));
    let squared = rest.mul(&rest).sub_poly(&rhs).trimmed(TOL_TRIM_P);
    let delta = |p: f64| simo_delta(&inst.with_power(p));

    let candidates = if squared.is_zero() { vec![] } else { positive_roots(&squared, 1e-15)? };
    let scale = |p: f64| 1.0 + p * p * (n1 + n2) * (n1 + n2);
    let mut best: Option<f64> = None;
    for &c in candidates.iter().rev() {
        let (lo, hi) = (c * (1.0 - 1e-7), c * (1.0 + 1e-7));
        if delta(lo) <= 0.0 && delta(hi) >= 0.0 {
            best = Some(bisect(delta, lo, hi));
            break;
        }
        if delta(c).abs() <= 1e-9 * scale(c) {
            best = Some(c);
            break;
        }
    }
    let p_star = best.ok_or(Error::NoRoot("no sign change of Delta(P)"))?;
    if !(p_star > 0.0) || delta(1.01 * p_star) <= 0.0 {
        return Err(Error::NoRoot("Delta(P) root failed certification"));
    }
    Ok(p_star)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo_neg = f(lo) <= 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) <= 0.0) == f_lo_neg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// 2x2 diagonal channel with diagonal covariances, in the auxiliary
/// parameters `c_lj = h_lj sqrt(k_lj / P)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagInstance {
    /// `h[l][j]`: gain of user `l + 1` on antenna `j + 1`.
    pub h: [[f64; 2]; 2],
    /// `k[l][j]`: power of user `l + 1` on antenna `j + 1`.
    pub k: [[f64; 2]; 2],
    /// `c[l][j] = h[l][j] sqrt(k[l][j] / P)`.
    pub c: [[f64; 2]; 2],
    /// Power budget.
    pub power: f64,
}

impl DiagInstance {
    /// Builds the instance; each user's split must be non-negative and sum to at most `P`.
    pub fn new(h: [[f64; 2]; 2], k: [[f64; 2]; 2], power: f64) -> Result<Self> {
        if !(power > 0.0) || !power.is_finite() {
            return Err(Error::InvalidArgument("power must be positive"));
        }
        let mut c = [[0.0; 2]; 2];
        for l in 0..2 {
            if k[l].iter().any(|&x| !(x >= 0.0)) {
                return Err(Error::InvalidArgument("power split must be non-negative"));
            }
            let trace = k[l][0] + k[l][1];
            if trace > power * (1.0 + crate::model::TOL_TRACE) {
                return Err(Error::PowerExceeded { user: l + 1, trace, power });
            }
            for j in 0..2 {
                if !h[l][j].is_finite() {
                    return Err(Error::NonFinite { context: "diagonal channel" });
                }
                c[l][j] = h[l][j] * sqrt(k[l][j] / power);
            }
        }
        Ok(DiagInstance { h, k, c, power })
    }

    /// Reads the diagonals of a 2x2 diagonal channel and covariance pair.
    pub fn from_channel(ch: &ChannelPair, cov: &CovariancePair) -> Result<Self> {
        if ch.t() != 2 || ch.r() != 2 || !ch.is_diagonal() {
            return Err(Error::Dimension { context: "diagonal instance needs a 2x2 diagonal channel" });
        }
        let d = |m: &Matrix| [m[(0, 0)], m[(1, 1)]];
        DiagInstance::new([d(ch.h1()), d(ch.h2())], [d(cov.k1()), d(cov.k2())], cov.power())
    }

    /// `C_d = prod_i (1 + (c_1i^2 + c_2i^2) P)`.
    pub fn c_d(&self) -> f64 {
        self.c_d_poly().eval(self.power)
    }

    fn c_d_poly(&self) -> RealPolynomial {
        let c = &self.c;
        (0..2)
            .map(|i| RealPolynomial::new(vec![1.0, c[0][i] * c[0][i] + c[1][i] * c[1][i]]))
            .fold(RealPolynomial::monomial(0, 1.0), |acc, x| acc.mul(&x))
    }

    /// `f(gamma) = prod_i (gamma^2 + 1 + (gamma c_2i - c_1i)^2 P)`.
    pub fn f_eval(&self, gamma: f64) -> f64 {
        self.f_in_p(gamma).eval(self.power)
    }

    fn f_in_p(&self, gamma: f64) -> RealPolynomial {
        let c = &self.c;
        (0..2)
            .map(|i| {
                let d = gamma * c[1][i] - c[0][i];
                RealPolynomial::new(vec![gamma * gamma + 1.0, d * d])
            })
            .fold(RealPolynomial::monomial(0, 1.0), |acc, x| acc.mul(&x))
    }

    /// `q(gamma; P)` as a polynomial in `P` with the `c_lj` held fixed.
    pub fn q_in_p(&self, gamma: f64) -> RealPolynomial {
        let f = self.f_in_p(gamma);
        f.mul(&f).sub_poly(&self.c_d_poly().scale(powi(gamma, 4)))
    }

    /// `q(gamma) = f(gamma)^2 - gamma^4 C_d` at the instance power.
    pub fn q_eval(&self, gamma: f64) -> f64 {
        self.q_in_p(gamma).eval(self.power)
    }
}

/// The two antenna-wise sufficient conditions and their prescribed `gamma`.
///
/// A condition is `None` when one of its denominators vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagConditions {
    /// `(c_22/c_21 - c_12/c_11)^2 < sqrt((c_12^2 + c_22^2) / (c_11^2 + c_21^2))`.
    pub cond1: Option<bool>,
    /// `(c_21/c_22 - c_11/c_12)^2 < sqrt((c_11^2 + c_21^2) / (c_12^2 + c_22^2))`.
    pub cond2: Option<bool>,
    /// `c_11 / c_21`.
    pub gamma1: Option<f64>,
    /// `c_12 / c_22`.
    pub gamma2: Option<f64>,
}

impl DiagConditions {
    /// Whether either condition holds.
    pub fn any(&self) -> bool {
        self.cond1 == Some(true) || self.cond2 == Some(true)
    }
}

/// Evaluates both conditions.
pub fn diag_conditions(inst: &DiagInstance) -> DiagConditions {
    let c = &inst.c;
    let one = |i: usize, j: usize| -> (Option<bool>, Option<f64>) {
        if c[0][i] == 0.0 || c[1][i] == 0.0 {
            return (None, None);
        }
        let left = c[1][j] / c[1][i] - c[0][j] / c[0][i];
        let ratio = (c[0][j] * c[0][j] + c[1][j] * c[1][j]) / (c[0][i] * c[0][i] + c[1][i] * c[1][i]);
        (Some(left * left < sqrt(ratio)), Some(c[0][i] / c[1][i]))
    };
    let (cond1, gamma1) = one(0, 1);
    let (cond2, gamma2) = one(1, 0);
    DiagConditions { cond1, cond2, gamma1, gamma2 }
}

/// Power `P_0` beyond which `q(gamma; P) < 0` with the `c_lj` held fixed.
///
/// Returns `None` when the leading coefficient of `q` in `P` is non-negative.
pub fn diag_power_threshold(inst: &DiagInstance, gamma: f64) -> Result<Option<f64>> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidArgument("gamma must be positive"));
    }
    let q = inst.q_in_p(gamma).trimmed(TOL_TRIM_P);
    if q.is_zero() || q.leading() >= 0.0 {
        return Ok(None);
    }
    let roots = positive_roots(&q, 1e-15)?;
    let p0 = *roots.last().ok_or(Error::NoRoot("q(gamma; P) has no positive root"))?;
    if q.eval(1.01 * p0) >= 0.0 || q.eval(0.99 * p0) <= 0.0 {
        return Err(Error::NoRoot("q(gamma; P) root failed certification"));
    }
    Ok(Some(p0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn delta_examples() {
        let inst = SimoInstance::new(&[1.0, 0.0], &[1.0, 0.0], 2.0).unwrap();
        assert!(close(inst.c_d(), 5.0, 1e-14));
        assert!(close(simo_delta(&inst), (5f64.sqrt() + 4.0).powi(2) - 36.0, 1e-12));
        assert!(close(simo_delta(&inst.with_power(1.0)), (3f64.sqrt() + 2.0).powi(2) - 16.0, 1e-12));
        assert_eq!(simo_delta(&inst.with_power(0.0)), -3.0);
        let other = SimoInstance::new(&[0.3, 0.9], &[0.5, 0.2], 0.0).unwrap();
        assert_eq!(simo_delta(&other), -3.0);
    }

    #[test]
    fn gamma_range_examples() {
        let inst = SimoInstance::new(&[1.0, 0.0], &[1.0, 0.0], 2.0).unwrap();
        let r = simo_gamma_range(&inst).unwrap();
        assert!((r.lo - 0.756).abs() < 1e-3 && (r.hi - 1.323).abs() < 1e-3);
        let g = inst.f_poly().sub_monomial(1, inst.c_d().sqrt());
        assert!(g.eval(r.mid()) <= 0.0);
        assert!(g.eval(r.lo).abs() < 1e-12 && g.eval(r.hi).abs() < 1e-12);
        assert!(simo_gamma_range(&inst.with_power(1.0)).is_none());
        let orth = SimoInstance::new(&[1.0, 0.0], &[0.0, 1.0], 1e-9).unwrap();
        assert!(simo_gamma_range(&orth).is_none());
    }

    #[test]
    fn collinear_examples() {
        let inst = SimoInstance::new(&[1.0, 0.0], &[1.0, 0.0], 2.0).unwrap();
        assert!(simo_collinear_achievable(&inst).unwrap());
        assert!(!simo_collinear_achievable(&inst.with_power(1.0)).unwrap());
        let anti = SimoInstance::new(&[1.0, 2.0], &[-1.0, -2.0], 1e6).unwrap();
        assert!(!simo_collinear_achievable(&anti).unwrap());
        let indep = SimoInstance::new(&[1.0, 0.0], &[1.0, 1.0], 1.0).unwrap();
        assert_eq!(simo_collinear_achievable(&indep), Err(Error::NotCollinear));
        assert_eq!(simo_noncollinear_condition(&inst), Err(Error::Collinear));
    }

    #[test]
    fn noncollinear_examples() {
        let a = SimoInstance::new(&[1.0, 0.0], &[1.0, 1.0], 1.0).unwrap();
        assert!(close(a.lambda1 * a.lambda2, 1.0, 1e-12));
        assert!(close(a.lambda1 + a.lambda2, 3.0, 1e-12));
        assert!(simo_noncollinear_condition(&a).unwrap());
        let b = SimoInstance::new(&[1.0, 0.0], &[0.0, 1.0], 1.0).unwrap();
        assert!(!simo_noncollinear_condition(&b).unwrap());
        assert!(simo_p_star(&b).is_err());
    }

    #[test]
    fn p_star_is_last_sign_change() {
        let inst = SimoInstance::new(&[1.0, 0.0], &[1.0, 1.0], 1.0).unwrap();
        let p = simo_p_star(&inst).unwrap();
        assert!(p > 0.0);
        assert!(simo_delta(&inst.with_power(p)).abs() < 1e-8);
        assert!(simo_delta(&inst.with_power(1.01 * p)) > 0.0);
        assert!(simo_delta(&inst.with_power(0.99 * p)) < 0.0);
    }

    #[test]
    fn p_star_collinear_matches_three_quarters() {
        // P i / sqrt(1 + 2P) = 3/4 with i = 1: 16P^2 = 9(1 + 2P)
        let inst = SimoInstance::new(&[1.0], &[1.0], 1.0).unwrap();
        let p = simo_p_star(&inst).unwrap();
        let expected = (18.0 + (18.0f64 * 18.0 + 4.0 * 16.0 * 9.0).sqrt()) / 32.0;
        assert!(close(p, expected, 1e-9));
    }

    #[test]
    fn diag_examples() {
        let s = 0.5f64.sqrt();
        let inst = DiagInstance::new([[1.0, 1.0], [1.0, 1.0]], [[0.5, 0.5], [0.5, 0.5]], 1.0).unwrap();
        for l in 0..2 {
            for j in 0..2 {
                assert!(close(inst.c[l][j], s, 1e-15));
            }
        }
        let cond = diag_conditions(&inst);
        assert_eq!(cond.cond1, Some(true));
        assert!(close(cond.gamma1.unwrap(), 1.0, 1e-15));
        let p0 = diag_power_threshold(&inst, 1.0).unwrap().unwrap();
        let at = |p: f64| inst.q_in_p(1.0).eval(p);
        assert!(at(1.01 * p0) < 0.0 && at(0.99 * p0) > 0.0);

        // c11 = 1, c21 = 1, c12 = 0.1, c22 = 2
        let r = 2f64.sqrt();
        let inst = DiagInstance::new([[r, 0.1 * r], [r, 2.0 * r]], [[0.5, 0.5], [0.5, 0.5]], 1.0).unwrap();
        assert!(close(inst.c[0][1], 0.1, 1e-15) && close(inst.c[1][1], 2.0, 1e-15));
        let cond = diag_conditions(&inst);
        assert_eq!(cond.cond1, Some(false));
        assert!(diag_power_threshold(&inst, cond.gamma1.unwrap()).unwrap().is_none());
    }

    #[test]
    fn diag_unevaluable_and_large_power() {
        let inst = DiagInstance::new([[1.0, 0.8], [0.0, 0.9]], [[0.5, 0.5], [0.0, 1.0]], 1.0).unwrap();
        let cond = diag_conditions(&inst);
        assert_eq!(cond.cond1, None);
        assert!(cond.gamma1.is_none());

        let inst = DiagInstance::new([[0.9, 0.7], [0.8, 0.6]], [[0.5, 0.5], [0.5, 0.5]], 1.0).unwrap();
        let cond = diag_conditions(&inst);
        assert_eq!(cond.cond1, Some(true));
        let q = inst.q_in_p(cond.gamma1.unwrap());
        for p in [1e3, 1e4, 1e5] {
            assert!(q.eval(p) < 0.0);
        }
    }
}
