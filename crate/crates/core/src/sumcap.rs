//! Decides whether CFMA with `a = (1,1)`, `b = (1,0)` reaches the MAC sum
//! capacity.
//!
//! With `B_l*` the Cholesky factors of the water-filled covariances,
//!
//! ```text
//! f(gamma) = |(gamma^2 + 1) I_t + (gamma B_2*^T H_2^T - B_1*^T H_1^T)(gamma H_2 B_2* - H_1 B_1*)|
//! g(gamma) = f(gamma) - gamma^t sqrt(C_d)
//! ```
//!
//! and the sum capacity is achievable with `beta_1 / beta_2 = gamma` for any
//! `gamma > 0` with `g(gamma) <= 0`. `f` is a polynomial of degree `2t` with a
//! positive leading coefficient and `g(0) = f(0) >= 1`, so the feasible set is
//! nonempty exactly when `g` has a positive real root.

use alloc::vec::Vec;

use crate::math::{powi, sqrt};
use crate::model::{ChannelPair, CodingChoice, CovariancePair, RatePairResult};
use crate::poly::{positive_roots, sturm_positive_root_exists, RealPolynomial};
use crate::rate::achievable_pair;
use crate::waterfill::{iterative_waterfill, WaterfillOptions};
use crate::{Error, Result};

/// Relative residual above which the interpolated `f` is rejected.
pub const TOL_INTERPOLATION: f64 = 1e-6;
/// Tangency tolerance: `g(gamma) <= TOL_TANGENCY * sum_i |g_i| gamma^i` counts as `<= 0`.
pub const TOL_TANGENCY: f64 = 1e-9;
/// Allowed gap between the witness sum rate and `C_sum` (bits).
pub const TOL_WITNESS_GAP: f64 = 1e-7;
/// Relative width to which roots of `g` are refined.
const ROOT_REL_TOL: f64 = 1e-14;

/// `f(gamma)` evaluated directly as a determinant.
pub fn f_gamma_eval(ch: &ChannelPair, cov: &CovariancePair, gamma: f64) -> f64 {
    let g1 = ch.h1().mul(cov.b1());
    let g2 = ch.h2().mul(cov.b2());
    let d = g2.scale(gamma).sub(&g1).transpose();
    d.gram().add_identity(gamma * gamma + 1.0).det()
}

/// Coefficients of `f(gamma)` from its values at `gamma = 0, 1, ..., 2t`.
///
/// The result is checked against direct determinant evaluation at two extra
/// nodes.
pub fn f_gamma_poly(ch: &ChannelPair, cov: &CovariancePair) -> Result<RealPolynomial> {
    let t = ch.t();
    let nodes: Vec<f64> = (0..=2 * t).map(|i| i as f64).collect();
    let values: Vec<f64> = nodes.iter().map(|&x| f_gamma_eval(ch, cov, x)).collect();
    let f = RealPolynomial::interpolate(&nodes, &values)?;
    let mut residual = 0.0f64;
    for x in [0.5, 2.0 * t as f64 + 1.5] {
        let direct = f_gamma_eval(ch, cov, x);
        residual = residual.max((f.eval(x) - direct).abs() / direct.abs().max(1.0));
    }
    if !(residual <= TOL_INTERPOLATION) {
        return Err(Error::IllConditioned { residual });
    }
    Ok(f)
}

/// `g(gamma) = f(gamma) - gamma^t sqrt(C_d)`.
pub fn g_gamma_poly(f: &RealPolynomial, c_d: f64, t: usize) -> Result<RealPolynomial> {
    if !(c_d >= 1.0) {
        return Err(Error::InvalidArgument("C_d must be at least 1"));
    }
    Ok(f.sub_monomial(t, sqrt(c_d)))
}

/// `q(gamma) = f(gamma)^2 - gamma^{2t} C_d`, equivalent to `g` in sign for `gamma > 0`.
pub fn q_gamma_poly(f: &RealPolynomial, c_d: f64, t: usize) -> RealPolynomial {
    f.mul(f).sub_monomial(2 * t, c_d)
}

/// Closed interval of feasible `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaInterval {
    /// Left end.
    pub lo: f64,
    /// Right end.
    pub hi: f64,
}

impl GammaInterval {
    /// Midpoint.
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// Whether `gamma` lies inside.
    pub fn contains(&self, gamma: f64) -> bool {
        self.lo <= gamma && gamma <= self.hi
    }
}

/// Sign analysis of `g` on `(0, +inf)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaAnalysis {
    /// Whether `g(gamma) <= 0` for some `gamma > 0`.
    pub achievable: bool,
    /// Distinct positive roots reported by the Sturm chain.
    pub root_count: usize,
    /// Feasible intervals, ascending and disjoint.
    pub intervals: Vec<GammaInterval>,
    /// Midpoint of the first interval.
    pub witness: Option<f64>,
    /// Only tangential contact with zero was found (within [`TOL_TANGENCY`]).
    pub boundary: bool,
    /// The Sturm chain degenerated and dense sampling was used.
    pub sampled: bool,
}

/// Where `g <= 0` on the positive axis.
pub fn analyze_g(g: &RealPolynomial) -> Result<GammaAnalysis> {
    let count = sturm_positive_root_exists(g)?;
    let roots = if count.sampled {
        sampled_roots(g)
    } else if count.exists {
        positive_roots(g, ROOT_REL_TOL)?
    } else {
        Vec::new()
    };

    let mut intervals: Vec<GammaInterval> = Vec::new();
    for w in roots.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if g.eval(mid) < 0.0 {
            match intervals.last_mut() {
                Some(last) if last.hi == w[0] => last.hi = w[1],
                _ => intervals.push(GammaInterval { lo: w[0], hi: w[1] }),
            }
        }
    }
    let mut boundary = false;
    if intervals.is_empty() {
        // Touching roots, or a local minimum sitting just above zero.
        let mut candidates = roots.clone();
        if let Ok(critical) = positive_roots(&g.derivative(), ROOT_REL_TOL) {
            candidates.extend(critical);
        }
        let best = candidates
            .into_iter()
            .filter(|&x| x > 0.0)
            .map(|x| (x, g.eval(x) / g.eval_abs(x)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((x, rel)) = best {
            if rel <= TOL_TANGENCY {
                intervals.push(GammaInterval { lo: x, hi: x });
                boundary = true;
            }
        }
    }
    let witness = intervals.first().map(GammaInterval::mid);
    Ok(GammaAnalysis {
        achievable: !intervals.is_empty(),
        root_count: count.count,
        intervals,
        witness,
        boundary,
        sampled: count.sampled,
    })
}

/// Sign changes of `g` on a log grid, refined by bisection.
fn sampled_roots(g: &RealPolynomial) -> Vec<f64> {
    let n = 100_000;
    let (lo, hi) = (1e-6f64, 1e6f64);
    let ratio = crate::math::ln(hi / lo) / (n - 1) as f64;
    let grid = |i: usize| lo * crate::math::exp(ratio * i as f64);
    let mut roots = Vec::new();
    let mut prev = g.eval(grid(0));
    for i in 1..n {
        let x = grid(i);
        let v = g.eval(x);
        if prev.signum() != v.signum() {
            let (mut a, mut b) = (grid(i - 1), x);
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                if g.eval(m).signum() == g.eval(a).signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev = v;
    }
    roots
}

/// Knobs for [`check_sum_capacity`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CheckOptions {
    /// Water-filling stopping rule and covariance shape.
    pub waterfill: WaterfillOptions,
}

/// Outcome of the sum-capacity check.
#[derive(Debug, Clone, PartialEq)]
pub struct SumCapVerdict {
    /// Whether some `gamma > 0` satisfies `g(gamma) <= 0`.
    pub achievable: bool,
    /// `beta_1 / beta_2` achieving the sum capacity, if any.
    pub gamma_witness: Option<f64>,
    /// Closed intervals of feasible `gamma`.
    pub gamma_intervals: Vec<GammaInterval>,
    /// Distinct positive roots of `g` counted by the Sturm chain.
    pub root_count: usize,
    /// Achievability rests on a tangency within tolerance.
    pub boundary: bool,
    /// The Sturm chain degenerated and the verdict came from sampling.
    pub sampled: bool,
    /// `f(gamma)`.
    pub f_poly: RealPolynomial,
    /// `g(gamma)`.
    pub g_poly: RealPolynomial,
    /// `|I_r + H_1 K_1 H_1^T + H_2 K_2 H_2^T|`.
    pub c_d: f64,
    /// `1/2 log2(C_d)`.
    pub c_sum: f64,
    /// Covariances the check was run with.
    pub covariances: CovariancePair,
    /// Rate pair at `a = (1,1)`, `b = (1,0)`, `beta = (witness, 1)`.
    pub witness_pair: Option<RatePairResult>,
    /// Whether the witness pair is valid and sums to `C_sum` within [`TOL_WITNESS_GAP`].
    pub witness_confirmed: bool,
    /// Whether water-filling met its stopping rule (always true for given covariances).
    pub waterfill_converged: bool,
}

/// Runs the condition for fixed covariances (normally the water-filled ones).
pub fn check_with_covariances(ch: &ChannelPair, cov: &CovariancePair) -> Result<SumCapVerdict> {
    let t = ch.t();
    let c_d = ch.received_covariance(cov).det();
    let f = f_gamma_poly(ch, cov)?;
    let g = g_gamma_poly(&f, c_d, t)?;
    let analysis = analyze_g(&g)?;
    let c_sum = 0.5 * crate::math::log2(c_d);
    let witness_pair = match analysis.witness {
        Some(gamma) => Some(achievable_pair(ch, cov, &CodingChoice::sum_capacity(gamma)?)?),
        None => None,
    };
    let witness_confirmed = witness_pair
        .map_or(false, |p| p.valid && (p.sum() - c_sum).abs() <= TOL_WITNESS_GAP);
    Ok(SumCapVerdict {
        achievable: analysis.achievable,
        gamma_witness: analysis.witness,
        gamma_intervals: analysis.intervals,
        root_count: analysis.root_count,
        boundary: analysis.boundary,
        sampled: analysis.sampled,
        f_poly: f,
        g_poly: g,
        c_d,
        c_sum,
        covariances: cov.clone(),
        witness_pair,
        witness_confirmed,
        waterfill_converged: true,
    })
}

/// Water-fills, builds `f` and `g`, and decides achievability.
pub fn check_sum_capacity(ch: &ChannelPair, power: f64, opts: &CheckOptions) -> Result<SumCapVerdict> {
    let capacity = iterative_waterfill(ch, power, &opts.waterfill)?;
    let mut verdict = check_with_covariances(ch, &capacity.covariances)?;
    verdict.waterfill_converged = capacity.converged;
    Ok(verdict)
}

/// Leading coefficient predicted for `f`: `|I_t + B_2^T H_2^T H_2 B_2|`.
pub fn f_leading_coefficient(ch: &ChannelPair, cov: &CovariancePair) -> f64 {
    let g2 = ch.h2().mul(cov.b2());
    g2.transpose().mul(&g2).add_identity(1.0).det()
}

/// `(gamma^2 + 1)^t`, the value of `f` when both channels vanish.
pub fn channel_free_f(gamma: f64, t: usize) -> f64 {
    powi(gamma * gamma + 1.0, t as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    fn siso(p: f64) -> (ChannelPair, CovariancePair) {
        let ch = ChannelPair::siso(1.0, 1.0).unwrap();
        let k = Matrix::from_diag(&[p]);
        (ch, CovariancePair::new(k.clone(), k, p).unwrap())
    }

    #[test]
    fn siso_f_expansion() {
        // (g^2 + 1) + (g - 1)^2 = 2g^2 - 2g + 2
        let (ch, cov) = siso(1.0);
        let f = f_gamma_poly(&ch, &cov).unwrap();
        let expected = [2.0, -2.0, 2.0];
        for (a, b) in f.coeffs().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        let g = g_gamma_poly(&f, 3.0, 1).unwrap();
        assert!((g.coeff(1) + 2.0 + 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn g_subtracts_middle_term() {
        let f = RealPolynomial::new(alloc::vec![1.0, 1.0, 1.0]);
        assert_eq!(g_gamma_poly(&f, 1.0, 1).unwrap().coeffs(), &[1.0, 0.0, 1.0]);
        let f = RealPolynomial::new(alloc::vec![1.0, 0.0, 1.0]);
        assert_eq!(g_gamma_poly(&f, 4.0, 1).unwrap().coeffs(), &[1.0, -2.0, 1.0]);
        assert!(g_gamma_poly(&f, 0.5, 1).is_err());
    }

    #[test]
    fn channel_free_case() {
        let ch = ChannelPair::new(Matrix::zeros(2, 2), Matrix::zeros(2, 2)).unwrap();
        let cov = CovariancePair::isotropic(2, 1.0).unwrap();
        let f = f_gamma_poly(&ch, &cov).unwrap();
        for x in [0.1, 0.7, 3.0] {
            assert!((f.eval(x) - channel_free_f(x, 2)).abs() < 1e-10);
        }
        let v = check_with_covariances(&ch, &cov).unwrap();
        assert!(!v.achievable);
    }

    #[test]
    fn siso_verdicts() {
        let ch = ChannelPair::siso(1.0, 1.0).unwrap();
        let v = check_sum_capacity(&ch, 2.0, &CheckOptions::default()).unwrap();
        assert!(v.achievable);
        assert_eq!(v.root_count, 2);
        assert!(v.witness_confirmed);
        let v = check_sum_capacity(&ch, 1.0, &CheckOptions::default()).unwrap();
        assert!(!v.achievable);
        assert!(v.gamma_witness.is_none());
    }

    #[test]
    fn tangency_is_achievable_with_flag() {
        // (x - 1)^2 touches zero at 1
        let g = RealPolynomial::new(alloc::vec![1.0, -2.0, 1.0]);
        let a = analyze_g(&g).unwrap();
        assert!(a.achievable);
        assert!(a.boundary);
        assert!((a.witness.unwrap() - 1.0).abs() < 1e-7);
        // lifted slightly above zero: not achievable
        let g = RealPolynomial::new(alloc::vec![1.0 + 1e-6, -2.0, 1.0]);
        assert!(!analyze_g(&g).unwrap().achievable);
    }
}
