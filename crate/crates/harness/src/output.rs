//! CSV artifacts.
//!
//! Reals are written with 12 significant digits in their shortest form, so
//! re-parsing a field reproduces the rounded value exactly. Lines end in LF.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::experiment::{CurvePoint, Model};
use crate::sweep::SweepRow;
use crate::{Error, Result};

/// Columns of the Monte Carlo table.
pub const MONTECARLO_HEADER: [&str; 7] =
    ["model", "p_db", "trials", "achievable_count", "R_A", "wilson_halfwidth", "seed"];

/// Columns of the sweep table.
pub const SWEEP_HEADER: [&str; 11] = [
    "P", "gamma", "g", "r1_a", "r2_a", "r1_b_given_a", "r2_b_given_a", "sum_rate", "c_sum", "gap", "valid",
];

/// `x` rounded to 12 significant digits, printed in shortest round-trip form.
pub fn format_real(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

/// A row of a CSV table.
pub trait CsvRecord {
    /// Field values in header order.
    fn fields(&self) -> Vec<String>;
}

/// A Monte Carlo point tagged with its model and seed.
#[derive(Debug, Clone, Copy)]
pub struct MontecarloRecord<'a> {
    /// Channel family.
    pub model: Model,
    /// Seed of the run.
    pub seed: u64,
    /// Tally.
    pub point: &'a CurvePoint,
}

impl CsvRecord for MontecarloRecord<'_> {
    fn fields(&self) -> Vec<String> {
        let p = self.point;
        vec![
            self.model.name().to_string(),
            format_real(p.p_db),
            p.trials.to_string(),
            p.achievable_count.to_string(),
            format_real(p.r_a),
            format_real(p.wilson_halfwidth),
            self.seed.to_string(),
        ]
    }
}

impl CsvRecord for SweepRow {
    fn fields(&self) -> Vec<String> {
        let mut out: Vec<String> = [
            self.power,
            self.gamma,
            self.g,
            self.r1_a,
            self.r2_a,
            self.r1_b_given_a,
            self.r2_b_given_a,
            self.sum_rate,
            self.c_sum,
            self.gap,
        ]
        .into_iter()
        .map(format_real)
        .collect();
        out.push(self.valid.to_string());
        out
    }
}

/// Writes a header and rows to `out`.
pub fn write_csv<W: Write, R: CsvRecord>(out: W, header: &[&str], rows: &[R]) -> csv::Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row.fields())?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes a CSV file, creating or truncating it.
pub fn emit_csv<R: CsvRecord>(path: &Path, header: &[&str], rows: &[R]) -> Result<()> {
    let io_err = |source| Error::Io { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(io_err)?;
    write_csv(BufWriter::new(file), header, rows).map_err(|e| io_err(e.into()))
}

/// Writes the Monte Carlo table.
pub fn emit_montecarlo_csv(path: &Path, model: Model, seed: u64, points: &[CurvePoint]) -> Result<()> {
    let records: Vec<_> = points.iter().map(|point| MontecarloRecord { model, seed, point }).collect();
    emit_csv(path, &MONTECARLO_HEADER, &records)
}
