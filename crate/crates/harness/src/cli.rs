//! The `cfma` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use crate::experiment::{CovariancePolicy, ExperimentConfig, Model};
use crate::grid::{parse_int_pair, parse_range, parse_real_pair, parse_span};
use crate::output::{write_csv, MontecarloRecord, MONTECARLO_HEADER, SWEEP_HEADER};
use crate::report::{CheckReport, RateReport};
use crate::sweep::log_grid;
use crate::{emit_csv, emit_montecarlo_csv, run_montecarlo, run_sweep, ChannelSpec, Error, Result};
use cfma_core::sumcap::check_with_covariances;
use cfma_core::waterfill::WaterfillOptions;
use cfma_core::{achievable_pair, check_sum_capacity, CheckOptions, CodingChoice};
use clap::{Parser, Subcommand};

/// Compute-forward multiple access on the two-user Gaussian MIMO MAC.
#[derive(Debug, Parser)]
#[command(name = "cfma", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rate pair for one coding choice; prints JSON.
    Rate {
        /// Channel file (JSON).
        #[arg(long)]
        channel: PathBuf,
        /// First coefficient vector.
        #[arg(long, default_value = "1,1", allow_hyphen_values = true)]
        a: String,
        /// Second coefficient vector.
        #[arg(long, default_value = "1,0", allow_hyphen_values = true)]
        b: String,
        /// Scaling factors.
        #[arg(long, default_value = "1.0,1.0")]
        beta: String,
        /// Power budget, overriding the file.
        #[arg(long)]
        power: Option<f64>,
    },
    /// Sum-capacity test; prints JSON.
    ///
    /// Uses K1/K2 from the channel file when present, otherwise water-fills.
    Check {
        /// Channel file (JSON).
        #[arg(long)]
        channel: PathBuf,
        /// Power budget, overriding the file.
        #[arg(long)]
        power: Option<f64>,
        /// Restrict water-filling to diagonal covariances.
        #[arg(long)]
        diagonal: bool,
    },
    /// Fraction of random channels on which the sum capacity is achievable.
    Montecarlo {
        /// Experiment file (JSON); flags below override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Channel family.
        #[arg(long, value_enum)]
        model: Option<Model>,
        /// Number of channel realizations.
        #[arg(long)]
        trials: Option<u64>,
        /// Seed of the per-trial random streams.
        #[arg(long)]
        seed: Option<u64>,
        /// Power grid in dB as start:step:stop or a comma list.
        #[arg(long)]
        p_grid_db: Option<String>,
        /// Covariance choice.
        #[arg(long, value_enum)]
        covariance: Option<CovariancePolicy>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// CSV destination (`-` or absent: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rates and g(gamma) along a gamma grid; writes CSV.
    ///
    /// Covariances are water-filled at each power.
    Sweep {
        /// Channel file (JSON).
        #[arg(long)]
        channel: PathBuf,
        /// Powers as a comma list or start:step:stop (default: P from the file).
        #[arg(long)]
        p: Option<String>,
        /// Log-spaced gamma grid lo:hi:n (default: around the feasible set).
        #[arg(long)]
        gamma_grid: Option<String>,
        /// Restrict water-filling to diagonal covariances.
        #[arg(long)]
        diagonal: bool,
        /// CSV destination (`-` or absent: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn waterfill_options(diagonal: bool) -> WaterfillOptions {
    if diagonal {
        WaterfillOptions::diagonal()
    } else {
        WaterfillOptions::default()
    }
}

fn print_json<T: serde::Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Input(e.to_string()))?;
    writeln!(out, "{text}").map_err(|source| Error::Io { path: "<stdout>".into(), source })
}

fn stdout_csv<R: crate::output::CsvRecord>(out: &mut dyn Write, header: &[&str], rows: &[R]) -> Result<()> {
    write_csv(out, header, rows).map_err(|e| Error::Io { path: "<stdout>".into(), source: e.into() })
}

fn load_config(path: &PathBuf) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.clone(), source })?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path: path.clone(), source })
}

/// `None` and `-` both mean stdout.
fn file_target(out: Option<PathBuf>) -> Option<PathBuf> {
    out.filter(|p| p.as_os_str() != "-")
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<()> {
    match command {
        Command::Rate { channel, a, b, beta, power } => {
            let spec = ChannelSpec::load(&channel)?;
            let power = power.unwrap_or(spec.power);
            let ch = spec.channel()?;
            let cov = spec.covariances(power)?;
            let (a, b, beta) = (parse_int_pair(&a)?, parse_int_pair(&b)?, parse_real_pair(&beta)?);
            let pair = achievable_pair(&ch, &cov, &CodingChoice::new(a, b, beta)?)?;
            let c_sum = 0.5 * ch.received_covariance(&cov).det().log2();
            print_json(stdout, &RateReport::new(a, b, beta, &pair, c_sum, cov.k1(), cov.k2()))
        }
        Command::Check { channel, power, diagonal } => {
            let spec = ChannelSpec::load(&channel)?;
            let power = power.unwrap_or(spec.power);
            let ch = spec.channel()?;
            let verdict = match spec.explicit_covariances(power)? {
                Some(cov) => check_with_covariances(&ch, &cov)?,
                None => check_sum_capacity(&ch, power, &CheckOptions { waterfill: waterfill_options(diagonal) })?,
            };
            print_json(stdout, &CheckReport::new(power, &verdict))
        }
        Command::Montecarlo { config, model, trials, seed, p_grid_db, covariance, threads, out } => {
            let mut cfg = match (&config, model) {
                (Some(path), _) => load_config(path)?,
                (None, Some(model)) => ExperimentConfig::new(model),
                (None, None) => return Err(Error::Input("either --model or --config is required".into())),
            };
            if let Some(model) = model {
                cfg.model = model;
            }
            if let Some(trials) = trials {
                cfg.trials = trials;
            }
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(grid) = p_grid_db {
                cfg.p_grid_db = parse_range(&grid)?;
            }
            if let Some(policy) = covariance {
                cfg.covariance = policy;
            }
            let out = file_target(out.or_else(|| cfg.output_path.as_ref().map(PathBuf::from)));
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.unwrap_or(0))
                .build()
                .map_err(|e| Error::Input(e.to_string()))?;
            let points = pool.install(|| run_montecarlo(&cfg))?;
            match &out {
                Some(path) => emit_montecarlo_csv(path, cfg.model, cfg.seed, &points)?,
                None => {
                    let records: Vec<_> = points
                        .iter()
                        .map(|point| MontecarloRecord { model: cfg.model, seed: cfg.seed, point })
                        .collect();
                    stdout_csv(stdout, &MONTECARLO_HEADER, &records)?;
                }
            }
            let failures: u64 = points.iter().map(|p| p.failure_count).sum();
            if failures > 0 {
                return Err(Error::TrialFailures { failures, trials: cfg.trials * points.len() as u64 });
            }
            Ok(())
        }
        Command::Sweep { channel, p, gamma_grid, diagonal, out } => {
            let spec = ChannelSpec::load(&channel)?;
            let ch = spec.channel()?;
            let powers = match p {
                Some(text) => parse_range(&text)?,
                None => vec![spec.power],
            };
            if powers.iter().any(|&x| !(x > 0.0)) {
                return Err(Error::Input("powers must be positive".into()));
            }
            let grid = match gamma_grid {
                Some(text) => {
                    let (lo, hi, n) = parse_span(&text)?;
                    Some(log_grid(lo, hi, n)?)
                }
                None => None,
            };
            let rows = run_sweep(&ch, &powers, grid.as_deref(), waterfill_options(diagonal))?;
            match file_target(out) {
                Some(path) => emit_csv(&path, &SWEEP_HEADER, &rows),
                None => stdout_csv(stdout, &SWEEP_HEADER, &rows),
            }
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code: 0 on success, 1 for input errors, 2 for numerical
/// failures.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 1;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("cfma").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn write(dir: &Path, name: &str, text: &str) -> String {
        let path = dir.join(name);
        std::fs::write(&path, text).unwrap();
        path.to_str().unwrap().to_string()
    }

    fn json(text: &str) -> serde_json::Value {
        serde_json::from_str(text).unwrap()
    }

    #[test]
    fn rate_prints_pair() {
        let dir = tempfile::tempdir().unwrap();
        let ch = write(dir.path(), "siso.json", r#"{"t":1,"r":1,"H1":[[1]],"H2":[[1]],"P":1.5}"#);
        let (code, out, _) = call(&["rate", "--channel", &ch, "--a", "1,1", "--b", "1,0", "--beta", "1.0,1.0"]);
        assert_eq!(code, 0);
        let v = json(&out);
        assert!((v["r1"].as_f64().unwrap() - 0.5).abs() < 1e-12);
        assert!((v["sum_rate"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(v["valid"], true);
        let (code, _, _) = call(&["rate", "--channel", &ch, "--a", "1,1", "--b", "-2,-2"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn check_reports_verdicts() {
        let dir = tempfile::tempdir().unwrap();
        let ch = write(dir.path(), "siso.json", r#"{"t":1,"r":1,"H1":[[1]],"H2":[[1]],"P":2}"#);
        let (code, out, _) = call(&["check", "--channel", &ch]);
        assert_eq!(code, 0);
        let v = json(&out);
        assert_eq!(v["achievable"], true);
        assert_eq!(v["witness_confirmed"], true);
        let (_, out, _) = call(&["check", "--channel", &ch, "--power", "1"]);
        assert_eq!(json(&out)["achievable"], false);
        assert!(json(&out)["gamma_witness"].is_null());
    }

    #[test]
    fn input_errors_exit_one() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(call(&["check", "--channel", "/nonexistent.json"]).0, 1);
        let bad = write(dir.path(), "bad.json", r#"{"t":1,"r":1,"H1":[[1,2]],"H2":[[1]],"P":2}"#);
        let (code, _, err) = call(&["check", "--channel", &bad]);
        assert_eq!(code, 1);
        assert!(err.contains("H1"));
        let ch = write(dir.path(), "ok.json", r#"{"t":1,"r":1,"H1":[[1]],"H2":[[1]],"P":2}"#);
        assert_eq!(call(&["check", "--channel", &ch, "--power", "-1"]).0, 1);
        assert_eq!(call(&["montecarlo", "--trials", "3"]).0, 1);
        assert_eq!(call(&["montecarlo", "--model", "simo", "--p-grid-db", "10:5:0"]).0, 1);
        assert_eq!(call(&["frobnicate"]).0, 1);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn montecarlo_csv_is_deterministic_across_threads() {
        let dir = tempfile::tempdir().unwrap();
        let mut files = Vec::new();
        for threads in ["1", "3"] {
            let path = dir.path().join(format!("mc{threads}.csv"));
            let p = path.to_str().unwrap();
            let args = ["montecarlo", "--model", "generic2x2", "--trials", "40", "--seed", "9", "--threads", threads, "--out", p];
            assert_eq!(call(&args).0, 0);
            files.push(std::fs::read(&path).unwrap());
        }
        assert_eq!(files[0], files[1]);
        let text = String::from_utf8(files.remove(0)).unwrap();
        let lines: Vec<&str> = text.split('\n').collect();
        assert_eq!(lines[0], "model,p_db,trials,achievable_count,R_A,wilson_halfwidth,seed");
        assert_eq!(lines.len(), 11);
        assert_eq!(lines[10], "");
        assert!(lines[1].starts_with("generic2x2,0,40,"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn montecarlo_reads_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("cfg.csv");
        let cfg = write(
            dir.path(),
            "cfg.json",
            &format!(
                r#"{{"model":"diag2x2","trials":5,"p_grid_db":[10,20],"seed":3,"output_path":{:?}}}"#,
                out.to_str().unwrap()
            ),
        );
        assert_eq!(call(&["montecarlo", "--config", &cfg]).0, 0);
        let text = std::fs::read_to_string(&out).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().nth(2).unwrap().starts_with("diag2x2,20,5,"));
        let (code, stdout, _) = call(&["montecarlo", "--config", &cfg, "--trials", "2", "--out", "-"]);
        assert_eq!(code, 0);
        assert_eq!(stdout.lines().count(), 3);
        assert!(stdout.lines().nth(1).unwrap().starts_with("diag2x2,10,2,"));
    }

    #[test]
    fn sweep_writes_rows() {
        let dir = tempfile::tempdir().unwrap();
        let ch = write(dir.path(), "siso.json", r#"{"t":1,"r":1,"H1":[[1]],"H2":[[1]],"P":2}"#);
        let (code, out, _) = call(&["sweep", "--channel", &ch, "--p", "2", "--gamma-grid", "0.5:2:7"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 8);
        assert!(lines[0].starts_with("P,gamma,g,"));
        let path = dir.path().join("sweep.csv");
        let (code, _, _) = call(&["sweep", "--channel", &ch, "--out", path.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert_eq!(std::fs::read_to_string(path).unwrap().lines().count(), 102);
    }
}
