//! JSON reports printed by the `rate` and `check` commands.

use cfma_core::{Matrix, RatePairResult, SumCapVerdict};
use serde::Serialize;

/// Rate pair for one coding choice.
#[derive(Debug, Clone, Serialize)]
pub struct RateReport {
    /// Integer coefficients of the first combination.
    pub a: [i64; 2],
    /// Integer coefficients of the second combination.
    pub b: [i64; 2],
    /// Scaling factors.
    pub beta: [f64; 2],
    /// Rate of user 1.
    pub r1: f64,
    /// Rate of user 2.
    pub r2: f64,
    /// `R_1 + R_2`.
    pub sum_rate: f64,
    /// `r_1(a, beta)`.
    pub r1_a: f64,
    /// `r_2(a, beta)`.
    pub r2_a: f64,
    /// `r_1(b|a, beta)`.
    pub r1_b_given_a: f64,
    /// `r_2(b|a, beta)`.
    pub r2_b_given_a: f64,
    /// Whether every expression the pair depends on is non-negative.
    pub valid: bool,
    /// `1/2 log2 |I + sum_l H_l K_l H_l^T|` at the covariances used.
    pub c_sum: f64,
    /// Covariance of user 1.
    #[serde(rename = "K1")]
    pub k1: Vec<Vec<f64>>,
    /// Covariance of user 2.
    #[serde(rename = "K2")]
    pub k2: Vec<Vec<f64>>,
}

impl RateReport {
    /// Collects the fields.
    pub fn new(
        a: [i64; 2],
        b: [i64; 2],
        beta: [f64; 2],
        pair: &RatePairResult,
        c_sum: f64,
        k1: &Matrix,
        k2: &Matrix,
    ) -> Self {
        RateReport {
            a,
            b,
            beta,
            r1: pair.r1,
            r2: pair.r2,
            sum_rate: pair.sum(),
            r1_a: pair.r1_first,
            r2_a: pair.r2_first,
            r1_b_given_a: pair.r1_second,
            r2_b_given_a: pair.r2_second,
            valid: pair.valid,
            c_sum,
            k1: k1.to_rows(),
            k2: k2.to_rows(),
        }
    }
}

/// Outcome of the sum-capacity test.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    /// Power budget.
    #[serde(rename = "P")]
    pub power: f64,
    /// Whether some `gamma > 0` reaches the sum capacity.
    pub achievable: bool,
    /// A feasible `beta_1 / beta_2`.
    pub gamma_witness: Option<f64>,
    /// Feasible intervals `[lo, hi]`.
    pub gamma_intervals: Vec<[f64; 2]>,
    /// Distinct positive roots of `g`.
    pub root_count: usize,
    /// Achievability rests on a tangency.
    pub boundary: bool,
    /// The verdict came from dense sampling.
    pub sampled: bool,
    /// Sum capacity in bits.
    pub c_sum: f64,
    /// `|I + sum_l H_l K_l H_l^T|`.
    pub c_d: f64,
    /// Coefficients of `f`, constant term first.
    pub f_coefficients: Vec<f64>,
    /// Coefficients of `g`, constant term first.
    pub g_coefficients: Vec<f64>,
    /// Witness rate pair sums to the sum capacity.
    pub witness_confirmed: bool,
    /// Water-filling met its stopping rule.
    pub waterfill_converged: bool,
    /// Covariance of user 1.
    #[serde(rename = "K1")]
    pub k1: Vec<Vec<f64>>,
    /// Covariance of user 2.
    #[serde(rename = "K2")]
    pub k2: Vec<Vec<f64>>,
}

impl CheckReport {
    /// Collects the fields of a verdict.
    pub fn new(power: f64, v: &SumCapVerdict) -> Self {
        CheckReport {
            power,
            achievable: v.achievable,
            gamma_witness: v.gamma_witness,
            gamma_intervals: v.gamma_intervals.iter().map(|i| [i.lo, i.hi]).collect(),
            root_count: v.root_count,
            boundary: v.boundary,
            sampled: v.sampled,
            c_sum: v.c_sum,
            c_d: v.c_d,
            f_coefficients: v.f_poly.coeffs().to_vec(),
            g_coefficients: v.g_poly.coeffs().to_vec(),
            witness_confirmed: v.witness_confirmed,
            waterfill_converged: v.waterfill_converged,
            k1: v.covariances.k1().to_rows(),
            k2: v.covariances.k2().to_rows(),
        }
    }
}
