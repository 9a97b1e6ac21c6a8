//! Parameter sweeps, figure tables and oracle verification for the
//! `meterent` command-line tool.

pub mod config;
pub mod record;

use std::io::Write;

use meterent::fock::run_oracle;
use meterent::{Error, Result};
use serde_json::Value;

pub use config::{Format, Overrides, RunConfig};
pub use record::{figure, trajectory, Figure, Row, TrajectoryRecord};

/// Exit status when the oracle disagrees with the closed form.
pub const EXIT_VERIFICATION_FAILED: i32 = 3;

pub fn cmd_trajectory(config: &RunConfig) -> Result<Vec<Row>> {
    Ok(trajectory(config)?.iter().map(TrajectoryRecord::to_row).collect())
}

pub fn cmd_fig(which: Figure, config: &RunConfig) -> Result<Vec<Row>> {
    figure(which, config)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOutcome {
    pub rows: Vec<Row>,
    pub passed: bool,
}

/// Runs the number-basis oracle for every squeeze value on the configured
/// grid.
pub fn cmd_verify(config: &RunConfig, cutoff: Option<usize>) -> Result<VerifyOutcome> {
    config.validate()?;
    let times = config.times();
    let mut rows = Vec::new();
    let mut passed = true;
    for &r in &config.r_list {
        let params = config.params(r)?;
        let report = run_oracle(&params, &times, cutoff)?;
        passed &= report.passed();
        for s in &report.samples {
            let mut row = Row::new();
            row.insert("r".into(), Value::from(r));
            row.insert("t".into(), Value::from(s.t));
            row.insert("gamma_t_half".into(), Value::from(params.scaled_time(s.t)));
            row.insert("cutoff".into(), Value::from(report.cutoff as u64));
            row.insert("step".into(), Value::from(report.step));
            row.insert("trace_distance".into(), Value::from(s.trace_distance));
            row.insert("leakage".into(), Value::from(s.leakage));
            row.insert("trace_drift".into(), Value::from(s.trace_drift));
            rows.push(row);
        }
    }
    Ok(VerifyOutcome { rows, passed })
}

fn csv_field(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_u64() || n.is_i64() => n.to_string(),
        Value::Number(n) => format!("{:.16e}", n.as_f64().unwrap_or(f64::NAN)),
        other => other.to_string(),
    }
}

/// Serializes rows sharing one key order. CSV floats carry 17 significant
/// digits.
pub fn render(rows: &[Row], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(rows).map_err(std::io::Error::other)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            if let Some(first) = rows.first() {
                w.write_record(first.keys()).map_err(std::io::Error::other)?;
            }
            for row in rows {
                w.write_record(row.values().map(csv_field)).map_err(std::io::Error::other)?;
            }
            w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
        }
    }
}

/// Writes to the configured path, or to standard output when none is set.
pub fn emit(bytes: &[u8], config: &RunConfig) -> Result<()> {
    match &config.output_path {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}
