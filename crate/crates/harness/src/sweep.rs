//! Rate pairs and `g(gamma)` along a grid of `gamma` and `P`.

use cfma_core::waterfill::WaterfillOptions;
use cfma_core::{achievable_pair, check_sum_capacity, CheckOptions, ChannelPair, CodingChoice};
use serde::Serialize;

use crate::{Error, Result};

/// Number of points of the automatic `gamma` grid.
pub const AUTO_GRID_POINTS: usize = 101;

/// One `(P, gamma)` evaluation with `a = (1,1)`, `b = (1,0)`, `beta = (gamma, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    /// Power.
    #[serde(rename = "P")]
    pub power: f64,
    /// `beta_1 / beta_2`.
    pub gamma: f64,
    /// `g(gamma)`.
    pub g: f64,
    /// `r_1(a, beta)`.
    pub r1_a: f64,
    /// `r_2(a, beta)`.
    pub r2_a: f64,
    /// `r_1(b|a, beta)`.
    pub r1_b_given_a: f64,
    /// `r_2(b|a, beta)`.
    pub r2_b_given_a: f64,
    /// `R_1 + R_2` of the case-split pair.
    pub sum_rate: f64,
    /// Sum capacity.
    pub c_sum: f64,
    /// `C_sum - (R_1 + R_2)`.
    pub gap: f64,
    /// Whether the rate pair is valid.
    pub valid: bool,
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && lo.is_finite() && hi.is_finite()) || n == 0 {
        return Err(Error::Input("gamma grid needs 0 < lo <= hi and n >= 1".into()));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi / lo).ln() / (n - 1) as f64;
    Ok((0..n).map(|i| if i == n - 1 { hi } else { lo * (step * i as f64).exp() }).collect())
}

/// Evaluates the rate pair on a grid of `gamma` for each power.
///
/// Covariances are water-filled at each power. Without a `gamma` grid, 101
/// log-spaced points span the feasible set padded by 10% on both sides, or
/// `[0.01, 100]` when nothing is feasible.
pub fn run_sweep(
    ch: &ChannelPair,
    p_grid: &[f64],
    gamma_grid: Option<&[f64]>,
    waterfill: WaterfillOptions,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &power in p_grid {
        let v = check_sum_capacity(ch, power, &CheckOptions { waterfill })?;
        let grid = match gamma_grid {
            Some(g) if !g.is_empty() => g.to_vec(),
            _ => match (v.gamma_intervals.first(), v.gamma_intervals.last()) {
                (Some(first), Some(last)) => log_grid(first.lo / 1.1, last.hi * 1.1, AUTO_GRID_POINTS)?,
                _ => log_grid(1e-2, 1e2, AUTO_GRID_POINTS)?,
            },
        };
        for gamma in grid {
            let choice = CodingChoice::sum_capacity(gamma)?;
            let pair = achievable_pair(ch, &v.covariances, &choice)?;
            rows.push(SweepRow {
                power,
                gamma,
                g: v.g_poly.eval(gamma),
                r1_a: pair.r1_first,
                r2_a: pair.r2_first,
                r1_b_given_a: pair.r1_second,
                r2_b_given_a: pair.r2_second,
                sum_rate: pair.sum(),
                c_sum: v.c_sum,
                gap: v.c_sum - pair.sum(),
                valid: pair.valid,
            });
        }
    }
    Ok(rows)
}
