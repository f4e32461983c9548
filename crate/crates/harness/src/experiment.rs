//! Monte Carlo estimate of how often CFMA reaches the sum capacity on
//! random channels.

use cfma_core::sumcap::{check_with_covariances, SumCapVerdict};
use cfma_core::waterfill::{single_user_waterfill, single_user_waterfill_diagonal, WaterfillOptions};
use cfma_core::{iterative_waterfill, ChannelPair, CovariancePair, Matrix};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Random channel family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// One transmit antenna per user, two receive antennas.
    Simo,
    /// 2x2 diagonal channels with diagonal input covariances.
    #[serde(rename = "diag2x2")]
    #[value(name = "diag2x2")]
    Diag2x2,
    /// Full 2x2 channels with full input covariances.
    #[serde(rename = "generic2x2")]
    #[value(name = "generic2x2")]
    Generic2x2,
}

impl Model {
    /// Name used in files and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Model::Simo => "simo",
            Model::Diag2x2 => "diag2x2",
            Model::Generic2x2 => "generic2x2",
        }
    }

    /// Draws both channels with iid Uniform[0,1) entries: all of `H_1` then
    /// all of `H_2`, row-major, diagonal models drawing only the diagonal.
    pub fn draw(self, rng: &mut impl Rng) -> ChannelPair {
        let mut uniform = |n: usize| -> Vec<f64> { (0..n).map(|_| rng.gen::<f64>()).collect() };
        let pair = match self {
            Model::Simo => {
                let (h1, h2) = (uniform(2), uniform(2));
                ChannelPair::simo(&h1, &h2)
            }
            Model::Diag2x2 => {
                let (h1, h2) = (uniform(2), uniform(2));
                ChannelPair::new(Matrix::from_diag(&h1), Matrix::from_diag(&h2))
            }
            Model::Generic2x2 => {
                let (h1, h2) = (uniform(4), uniform(4));
                ChannelPair::new(
                    Matrix::from_vec(2, 2, h1).expect("2x2"),
                    Matrix::from_vec(2, 2, h2).expect("2x2"),
                )
            }
        };
        pair.expect("uniform draws are finite and well shaped")
    }

    /// Water-filling variant matching the model's covariance constraint.
    pub fn waterfill_options(self) -> WaterfillOptions {
        match self {
            Model::Diag2x2 => WaterfillOptions::diagonal(),
            Model::Simo | Model::Generic2x2 => WaterfillOptions::default(),
        }
    }
}

/// How the input covariances are chosen before the sum-capacity test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CovariancePolicy {
    /// Jointly water-filled sum-capacity optimum.
    #[default]
    Optimal,
    /// `(P/t) I` for both users.
    Isotropic,
    /// Each user water-fills against unit noise, ignoring the other.
    SingleUser,
}

/// Channel entry distribution. Only iid Uniform[0,1] is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ChannelDist {
    /// iid Uniform[0,1] entries.
    #[default]
    #[serde(rename = "uniform01")]
    Uniform01,
}

fn default_trials() -> u64 {
    10_000
}

/// `0, 5, ..., 40` dB.
pub fn default_p_grid_db() -> Vec<f64> {
    (0..=8).map(|i| 5.0 * i as f64).collect()
}

/// Monte Carlo settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Channel family.
    pub model: Model,
    /// Number of channel realizations.
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// Power grid in dB, strictly increasing.
    #[serde(default = "default_p_grid_db")]
    pub p_grid_db: Vec<f64>,
    /// Seed of the per-trial random streams.
    #[serde(default)]
    pub seed: u64,
    /// Channel entry distribution.
    #[serde(default)]
    pub channel_dist: ChannelDist,
    /// Covariance choice.
    #[serde(default)]
    pub covariance: CovariancePolicy,
    /// CSV destination.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
}

impl ExperimentConfig {
    /// Defaults for `model`: 10^4 trials, 0..40 dB in 5 dB steps, seed 0.
    pub fn new(model: Model) -> Self {
        ExperimentConfig {
            model,
            trials: default_trials(),
            p_grid_db: default_p_grid_db(),
            seed: 0,
            channel_dist: ChannelDist::Uniform01,
            covariance: CovariancePolicy::Optimal,
            output_path: None,
        }
    }

    /// Checks trial count and grid.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Input("trials must be at least 1".into()));
        }
        if self.p_grid_db.is_empty() {
            return Err(Error::Input("power grid is empty".into()));
        }
        if self.p_grid_db.iter().any(|p| !p.is_finite()) {
            return Err(Error::Input("power grid has non-finite entries".into()));
        }
        if self.p_grid_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Input("power grid must be strictly increasing".into()));
        }
        Ok(())
    }
}

/// Tally at one power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    /// Power in dB.
    pub p_db: f64,
    /// `10^(p_db / 10)`.
    pub p_linear: f64,
    /// Realizations where the sum capacity is achievable.
    pub achievable_count: u64,
    /// Realizations where achievability rests on a tangency.
    pub boundary_count: u64,
    /// Realizations whose evaluation failed.
    pub failure_count: u64,
    /// Realizations drawn.
    pub trials: u64,
    /// `achievable_count / trials`.
    #[serde(rename = "R_A")]
    pub r_a: f64,
    /// Half-width of the 95% Wilson score interval for `R_A`.
    pub wilson_halfwidth: f64,
}

/// Half-width of the 95% Wilson score interval.
pub fn wilson_halfwidth(successes: u64, trials: u64) -> f64 {
    if trials == 0 {
        return f64::NAN;
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    Z95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt()
}

/// Linear power from dB.
pub fn db_to_linear(p_db: f64) -> f64 {
    10f64.powf(p_db / 10.0)
}

/// Random stream of one trial: ChaCha8 seeded with `seed`, stream number `trial`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Covariances chosen by `policy` for `model`.
pub fn covariances(
    model: Model,
    policy: CovariancePolicy,
    ch: &ChannelPair,
    power: f64,
) -> cfma_core::Result<CovariancePair> {
    match policy {
        CovariancePolicy::Optimal => {
            Ok(iterative_waterfill(ch, power, &model.waterfill_options())?.covariances)
        }
        CovariancePolicy::Isotropic => CovariancePair::isotropic(ch.t(), power),
        CovariancePolicy::SingleUser => {
            let noise = Matrix::identity(ch.r());
            let fill = |h: &Matrix| match model {
                Model::Diag2x2 => single_user_waterfill_diagonal(h, &noise, power),
                Model::Simo | Model::Generic2x2 => single_user_waterfill(h, &noise, power),
            };
            CovariancePair::new(fill(ch.h1())?, fill(ch.h2())?, power)
        }
    }
}

/// Sum-capacity verdict for one channel and power under a model's policy.
pub fn evaluate(
    model: Model,
    policy: CovariancePolicy,
    ch: &ChannelPair,
    power: f64,
) -> cfma_core::Result<SumCapVerdict> {
    let cov = covariances(model, policy, ch, power)?;
    check_with_covariances(ch, &cov)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Achievable { boundary: bool },
    NotAchievable,
    Failed,
}

fn run_trial(cfg: &ExperimentConfig, powers: &[f64], trial: u64) -> Vec<Outcome> {
    let mut rng = trial_rng(cfg.seed, trial);
    let ch = cfg.model.draw(&mut rng);
    powers
        .iter()
        .map(|&p| match evaluate(cfg.model, cfg.covariance, &ch, p) {
            Ok(v) if v.achievable => Outcome::Achievable { boundary: v.boundary },
            Ok(_) => Outcome::NotAchievable,
            Err(_) => Outcome::Failed,
        })
        .collect()
}

/// Runs the experiment.
///
/// Channels are drawn once per trial and reused for every power. Trials run
/// in parallel and are tallied in trial order, so the result does not depend
/// on the number of worker threads.
pub fn run_montecarlo(cfg: &ExperimentConfig) -> Result<Vec<CurvePoint>> {
    cfg.validate()?;
    let powers: Vec<f64> = cfg.p_grid_db.iter().map(|&d| db_to_linear(d)).collect();
    let outcomes: Vec<Vec<Outcome>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| run_trial(cfg, &powers, trial))
        .collect();

    let mut points: Vec<CurvePoint> = cfg
        .p_grid_db
        .iter()
        .zip(&powers)
        .map(|(&p_db, &p_linear)| CurvePoint {
            p_db,
            p_linear,
            achievable_count: 0,
            boundary_count: 0,
            failure_count: 0,
            trials: cfg.trials,
            r_a: 0.0,
            wilson_halfwidth: 0.0,
        })
        .collect();
    for row in &outcomes {
        for (point, outcome) in points.iter_mut().zip(row) {
            match outcome {
                Outcome::Achievable { boundary } => {
                    point.achievable_count += 1;
                    point.boundary_count += u64::from(*boundary);
                }
                Outcome::NotAchievable => {}
                Outcome::Failed => point.failure_count += 1,
            }
        }
    }
    for point in &mut points {
        point.r_a = point.achievable_count as f64 / point.trials as f64;
        point.wilson_halfwidth = wilson_halfwidth(point.achievable_count, point.trials);
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        // p = 0.5, n = 100: 1.96/(1 + 0.0384) * sqrt(0.0025 + 0.0000960)
        let hw = wilson_halfwidth(50, 100);
        assert!((hw - 0.0961).abs() < 1e-3);
        assert!(wilson_halfwidth(0, 10) > 0.0);
        assert!(wilson_halfwidth(0, 0).is_nan());
    }

    #[test]
    fn config_validation() {
        let mut cfg = ExperimentConfig::new(Model::Simo);
        assert!(cfg.validate().is_ok());
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
        cfg.trials = 1;
        cfg.p_grid_db = vec![0.0, 0.0];
        assert!(cfg.validate().is_err());
        cfg.p_grid_db.clear();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_json_defaults() {
        let cfg: ExperimentConfig = serde_json::from_str(r#"{"model":"diag2x2"}"#).unwrap();
        assert_eq!(cfg, ExperimentConfig::new(Model::Diag2x2));
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"model":"x"}"#).is_err());
    }

    #[test]
    fn draws_have_model_shapes() {
        let mut rng = trial_rng(1, 0);
        let simo = Model::Simo.draw(&mut rng);
        assert_eq!((simo.t(), simo.r()), (1, 2));
        let diag = Model::Diag2x2.draw(&mut rng);
        assert!(diag.is_diagonal());
        let full = Model::Generic2x2.draw(&mut rng);
        assert!(full.h1().as_slice().iter().all(|&x| (0.0..1.0).contains(&x)));
    }

    #[test]
    fn trial_streams_are_independent_of_order() {
        let a: f64 = trial_rng(7, 3).gen();
        let _ = trial_rng(7, 2).gen::<f64>();
        let b: f64 = trial_rng(7, 3).gen();
        assert_eq!(a, b);
        assert_ne!(a, trial_rng(7, 4).gen::<f64>());
        assert_ne!(a, trial_rng(8, 3).gen::<f64>());
    }

    #[test]
    fn tallies_are_consistent() {
        let mut cfg = ExperimentConfig::new(Model::Simo);
        cfg.trials = 50;
        let points = run_montecarlo(&cfg).unwrap();
        assert_eq!(points.len(), 9);
        for p in &points {
            assert_eq!(p.failure_count, 0);
            assert!(p.achievable_count <= p.trials);
            assert_eq!(p.r_a, p.achievable_count as f64 / p.trials as f64);
            assert!(((p.p_linear - db_to_linear(p.p_db)) / p.p_linear).abs() <= 1e-12);
        }
    }
}
