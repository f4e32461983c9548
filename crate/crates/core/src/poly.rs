//! Dense real polynomials with Sturm-sequence root counting.
//!
//! Coefficients are stored lowest power first. The Sturm chain is built in
//! floating point; each remainder is trimmed relative to its dividend so that
//! cancellation noise does not masquerade as a nonzero term.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::{Error, Result};

/// Relative trimming threshold applied to every Sturm remainder.
pub const TOL_TRIM: f64 = 1e-12;

/// Univariate polynomial with real coefficients, `coeffs[i]` multiplying `x^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl RealPolynomial {
    /// Builds a polynomial, dropping trailing exact zeros.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        RealPolynomial { coeffs }
    }

    /// The zero polynomial.
    pub fn zero() -> Self {
        RealPolynomial { coeffs: Vec::new() }
    }

    /// `x^n`.
    pub fn monomial(n: usize, c: f64) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = c;
        RealPolynomial::new(coeffs)
    }

    /// Coefficients, lowest power first.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Whether every coefficient is zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Leading coefficient (0 for the zero polynomial).
    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    /// Coefficient of `x^i` (0 beyond the degree).
    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    /// Largest absolute coefficient.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Drops leading coefficients whose magnitude is at most `tol * max|c|`.
    pub fn trimmed(&self, tol: f64) -> Self {
        let cut = tol * self.max_abs_coeff();
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().map_or(false, |c| c.abs() <= cut) {
            coeffs.pop();
        }
        RealPolynomial::new(coeffs)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// `sum |c_i| |x|^i`, the natural rounding scale of `eval(x)`.
    pub fn eval_abs(&self, x: f64) -> f64 {
        let x = x.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c.abs())
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        RealPolynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| i as f64 * c)
                .collect(),
        )
    }

    /// `self - c x^n`.
    pub fn sub_monomial(&self, n: usize, c: f64) -> Self {
        let mut coeffs = self.coeffs.clone();
        if coeffs.len() <= n {
            coeffs.resize(n + 1, 0.0);
        }
        coeffs[n] -= c;
        RealPolynomial::new(coeffs)
    }

    /// `self - rhs`.
    pub fn sub_poly(&self, rhs: &RealPolynomial) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RealPolynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }

    /// Product of two polynomials.
    pub fn mul(&self, rhs: &RealPolynomial) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return RealPolynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RealPolynomial::new(out)
    }

    /// `c * self`.
    pub fn scale(&self, c: f64) -> Self {
        RealPolynomial::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// Remainder of the division by `divisor`, trimmed relative to `self`.
    fn rem_trimmed(&self, divisor: &RealPolynomial, tol: f64) -> RealPolynomial {
        debug_assert!(!divisor.is_zero());
        let mut r = self.coeffs.clone();
        let dd = divisor.degree();
        let lead = divisor.leading();
        let scale = self.max_abs_coeff();
        while r.len() > dd && !r.is_empty() {
            let shift = r.len() - 1 - dd;
            let q = r[r.len() - 1] / lead;
            for (i, &d) in divisor.coeffs.iter().enumerate() {
                r[shift + i] -= q * d;
            }
            r.pop();
        }
        for c in r.iter_mut() {
            if c.abs() <= tol * scale {
                *c = 0.0;
            }
        }
        RealPolynomial::new(r)
    }

    /// Newton-form interpolation through `(nodes[i], values[i])`, expanded
    /// to monomial coefficients. Nodes must be distinct.
    pub fn interpolate(nodes: &[f64], values: &[f64]) -> Result<Self> {
        if nodes.len() != values.len() || nodes.is_empty() {
            return Err(Error::Dimension {
                context: "interpolation nodes and values",
            });
        }
        let n = nodes.len();
        let mut dd = values.to_vec();
        for level in 1..n {
            for i in (level..n).rev() {
                let denom = nodes[i] - nodes[i - level];
                if denom == 0.0 {
                    return Err(Error::InvalidArgument("interpolation nodes must be distinct"));
                }
                dd[i] = (dd[i] - dd[i - 1]) / denom;
            }
        }
        // Horner on the Newton basis: p = dd[n-1]; p = p * (x - x_i) + dd[i]
        let mut coeffs = vec![0.0; n];
        coeffs[0] = dd[n - 1];
        let mut len = 1;
        for i in (0..n - 1).rev() {
            // multiply by (x - nodes[i])
            for k in (0..=len).rev() {
                let shifted = if k > 0 { coeffs[k - 1] } else { 0.0 };
                let here = if k < len { coeffs[k] } else { 0.0 };
                coeffs[k] = shifted - nodes[i] * here;
            }
            len += 1;
            coeffs[0] += dd[i];
        }
        Ok(RealPolynomial::new(coeffs))
    }

    /// Upper bound on the magnitude of every real root (Cauchy).
    pub fn cauchy_bound(&self) -> f64 {
        let lead = self.leading();
        let m = self.coeffs[..self.degree()]
            .iter()
            .fold(0.0f64, |m, c| m.max((c / lead).abs()));
        1.0 + m
    }
}

fn sign(x: f64) -> i8 {
    match x.partial_cmp(&0.0) {
        Some(Ordering::Greater) => 1,
        Some(Ordering::Less) => -1,
        _ => 0,
    }
}

fn variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Sturm chain `p, p', -rem(p, p'), ...`, each member normalized to unit
/// max coefficient.
#[derive(Debug, Clone)]
pub struct SturmChain {
    chain: Vec<RealPolynomial>,
}

impl SturmChain {
    /// Builds the chain of a nonzero polynomial.
    ///
    /// Fails with [`Error::ChainDegenerate`] if a remainder turns non-finite.
    pub fn new(p: &RealPolynomial) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::InvalidArgument("Sturm chain of the zero polynomial"));
        }
        let normalize = |q: RealPolynomial| {
            let m = q.max_abs_coeff();
            if m > 0.0 {
                q.scale(1.0 / m)
            } else {
                q
            }
        };
        let mut chain = vec![normalize(p.clone())];
        let d = p.derivative();
        if !d.is_zero() {
            chain.push(normalize(d));
        }
        while chain.len() >= 2 {
            let n = chain.len();
            let next = chain[n - 2].rem_trimmed(&chain[n - 1], TOL_TRIM).scale(-1.0);
            if next.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::ChainDegenerate);
            }
            if next.is_zero() {
                break;
            }
            chain.push(normalize(next));
        }
        Ok(SturmChain { chain })
    }

    /// Members of the chain.
    pub fn members(&self) -> &[RealPolynomial] {
        &self.chain
    }

    /// Sign variations at a finite point.
    pub fn variations_at(&self, x: f64) -> usize {
        variations(self.chain.iter().map(|q| sign(q.eval(x))))
    }

    /// Sign variations as `x -> 0+`, from the lowest nonzero coefficients.
    pub fn variations_at_zero_plus(&self) -> usize {
        variations(
            self.chain
                .iter()
                .map(|q| q.coeffs.iter().find(|&&c| c != 0.0).map_or(0, |&c| sign(c))),
        )
    }

    /// Sign variations as `x -> +inf`, from the leading coefficients.
    pub fn variations_at_infinity(&self) -> usize {
        variations(self.chain.iter().map(|q| sign(q.leading())))
    }

    /// Distinct roots in `(0, +inf)`.
    pub fn count_positive_roots(&self) -> usize {
        self.variations_at_zero_plus()
            .saturating_sub(self.variations_at_infinity())
    }

    /// Distinct roots in `(lo, hi]`, where `lo == 0.0` stands for `0+`.
    pub fn count_in(&self, lo: f64, hi: f64) -> usize {
        let v_lo = if lo == 0.0 {
            self.variations_at_zero_plus()
        } else {
            self.variations_at(lo)
        };
        v_lo.saturating_sub(self.variations_at(hi))
    }
}

/// Distinct positive roots of `p`, isolated by Sturm bisection and refined to
/// `rel_tol` relative width. Sorted ascending.
pub fn positive_roots(p: &RealPolynomial, rel_tol: f64) -> Result<Vec<f64>> {
    let chain = SturmChain::new(p)?;
    let total = chain.count_positive_roots();
    let mut roots = Vec::with_capacity(total);
    if total == 0 {
        return Ok(roots);
    }
    let upper = p.cauchy_bound();
    // (lo, hi, count); lo = 0.0 means 0+
    let mut stack = vec![(0.0, upper, chain.count_in(0.0, upper))];
    while let Some((lo, hi, count)) = stack.pop() {
        if count == 0 {
            continue;
        }
        let width_ok = hi - lo <= rel_tol * hi.abs().max(f64::MIN_POSITIVE);
        if count == 1 && width_ok || hi - lo <= f64::EPSILON * hi {
            roots.push(0.5 * (lo + hi));
            continue;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            roots.push(mid);
            continue;
        }
        // keep split points off exact roots (nodes with p(mid) = 0 belong to the left half)
        if chain.chain[0].eval(mid) == 0.0 {
            roots.push(mid);
            let left = chain.count_in(lo, mid).saturating_sub(1);
            let right = count.saturating_sub(left + 1);
            let nudge = (hi - lo) * 1e-9;
            let left_hi = mid - nudge;
            if left > 0 && left_hi > lo {
                stack.push((lo, left_hi, chain.count_in(lo, left_hi)));
            }
            if right > 0 {
                stack.push((mid, hi, chain.count_in(mid, hi)));
            }
            continue;
        }
        let left = chain.count_in(lo, mid);
        let right = count.saturating_sub(left);
        stack.push((mid, hi, right));
        stack.push((lo, mid, left));
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= rel_tol * b.abs());
    Ok(roots)
}

/// Verdict of [`sturm_positive_root_exists`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PositiveRootCount {
    /// Whether at least one positive root exists.
    pub exists: bool,
    /// Number of distinct positive roots.
    pub count: usize,
    /// Whether the chain degenerated and dense sampling was used instead.
    pub sampled: bool,
}

/// Counts distinct roots in `(0, +inf)` with Sturm's theorem.
///
/// If the chain degenerates, the count falls back to sign changes of `p` on
/// a dense log-spaced grid and `sampled` is set.
pub fn sturm_positive_root_exists(p: &RealPolynomial) -> Result<PositiveRootCount> {
    if p.is_zero() {
        return Err(Error::InvalidArgument("zero polynomial"));
    }
    match SturmChain::new(p) {
        Ok(chain) => {
            let count = chain.count_positive_roots();
            Ok(PositiveRootCount {
                exists: count > 0,
                count,
                sampled: false,
            })
        }
        Err(Error::ChainDegenerate) => {
            let count = sampled_sign_changes(p, 1e-6, 1e6, 100_000);
            Ok(PositiveRootCount {
                exists: count > 0,
                count,
                sampled: true,
            })
        }
        Err(e) => Err(e),
    }
}

/// Sign changes of `p` over `n` log-spaced points in `[lo, hi]`.
pub fn sampled_sign_changes(p: &RealPolynomial, lo: f64, hi: f64, n: usize) -> usize {
    let ratio = crate::math::ln(hi / lo) / (n.max(2) - 1) as f64;
    variations((0..n).map(|i| sign(p.eval(lo * crate::math::exp(ratio * i as f64)))))
}
