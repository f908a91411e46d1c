//! CSV serialization of sweep records.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), which parses
//! back to the identical `f64`. Infinities are `inf`/`-inf`, NaN is `nan`,
//! and a missing value is an empty field.

use std::io::{Read, Write};
use std::path::Path;

use lmmse_core::{RecordFlags, SweepRecord};

use crate::error::CliError;

pub const HEADER: [&str; 13] = [
    "scenario",
    "p",
    "p_S",
    "n",
    "M",
    "mode",
    "empirical_mse",
    "stderr",
    "analytic_mse",
    "baseline_mse",
    "gamma",
    "flags",
    "seed",
];

pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

pub fn format_optional(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

fn parse_float(field: &str, column: &str) -> Result<f64, CliError> {
    field
        .parse::<f64>()
        .map_err(|_| CliError::Csv(format!("column {column}: '{field}' is not a number")))
}

fn parse_optional(field: &str, column: &str) -> Result<Option<f64>, CliError> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse_float(field, column).map(Some)
    }
}

fn parse_int<T: std::str::FromStr>(field: &str, column: &str) -> Result<T, CliError> {
    field
        .parse::<T>()
        .map_err(|_| CliError::Csv(format!("column {column}: '{field}' is not an integer")))
}

pub fn record_fields(r: &SweepRecord) -> [String; 13] {
    [
        r.scenario.to_string(),
        r.p.to_string(),
        r.p_s.to_string(),
        r.n.to_string(),
        r.replicates.to_string(),
        r.mode.to_string(),
        format_float(r.empirical_mse),
        format_float(r.stderr),
        format_optional(r.analytic_mse),
        format_optional(r.baseline_mse),
        format_optional(r.gamma),
        r.flags.to_string(),
        r.seed.to_string(),
    ]
}

/// Writes the header and one row per record, in the given order.
pub fn write_records<W: Write>(records: &[SweepRecord], out: W) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER)?;
    for r in records {
        w.write_record(record_fields(r))?;
    }
    w.flush().map_err(|e| CliError::Csv(e.to_string()))?;
    Ok(())
}

pub fn write_csv(records: &[SweepRecord], path: &Path) -> Result<(), CliError> {
    if records.is_empty() {
        return Err(CliError::usage("no records to write"));
    }
    let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    write_records(records, std::io::BufWriter::new(file))
}

/// Inverse of [`write_records`]. The `error` diagnostic is not part of the
/// schema and comes back as `None`.
pub fn parse_csv<R: Read>(input: R) -> Result<Vec<SweepRecord>, CliError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(CliError::Csv(format!("unexpected header {:?}", header.iter().collect::<Vec<_>>())));
    }
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row?;
        let f = |i: usize| row.get(i).unwrap_or("");
        records.push(SweepRecord {
            scenario: f(0).parse().map_err(|e: lmmse_core::Error| CliError::Csv(e.to_string()))?,
            p: parse_int(f(1), HEADER[1])?,
            p_s: parse_int(f(2), HEADER[2])?,
            n: parse_int(f(3), HEADER[3])?,
            replicates: parse_int(f(4), HEADER[4])?,
            mode: f(5).parse().map_err(|e: lmmse_core::Error| CliError::Csv(e.to_string()))?,
            empirical_mse: parse_float(f(6), HEADER[6])?,
            stderr: parse_float(f(7), HEADER[7])?,
            analytic_mse: parse_optional(f(8), HEADER[8])?,
            baseline_mse: parse_optional(f(9), HEADER[9])?,
            gamma: parse_optional(f(10), HEADER[10])?,
            flags: f(11).parse::<RecordFlags>().map_err(|e| CliError::Csv(e.to_string()))?,
            seed: parse_int(f(12), HEADER[12])?,
            error: None,
        });
    }
    Ok(records)
}
