//! Fixed-schema CSV output.

use std::io::Write;
use std::path::Path;

use crate::CliError;

pub const ANALYZE_HEADER: [&str; 8] = ["algo", "K", "N", "epsilon", "method", "efht", "alpha", "seed"];
pub const GRID_HEADER: [&str; 10] =
    ["algo", "K", "N", "epsilon", "method", "metric", "value", "std_error", "seed", "trials"];
pub const COMPLEXITY_HEADER: [&str; 7] = ["K", "N", "full_tel", "full_odl", "reduced", "approx_tel", "approx_odl"];

pub const NA: &str = "NA";

pub fn num(x: f64) -> String {
    x.to_string()
}

pub fn opt<T: ToString>(x: Option<T>) -> String {
    x.map_or_else(|| NA.to_string(), |v| v.to_string())
}

/// One `algo,K,N,epsilon,method,metric,value,std_error,seed,trials` row.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub algo: &'static str,
    pub players: usize,
    pub resources: usize,
    pub epsilon: f64,
    pub method: &'static str,
    pub metric: &'static str,
    pub value: Option<f64>,
    pub std_error: Option<f64>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
}

impl GridRow {
    pub fn record(&self) -> Vec<String> {
        vec![
            self.algo.to_string(),
            self.players.to_string(),
            self.resources.to_string(),
            num(self.epsilon),
            self.method.to_string(),
            self.metric.to_string(),
            opt(self.value),
            opt(self.std_error),
            opt(self.seed),
            opt(self.trials),
        ]
    }
}

/// Write a header and records to `out`, or stdout when `out` is `None`.
pub fn write_csv(out: Option<&Path>, header: &[&str], records: &[Vec<String>]) -> Result<(), CliError> {
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(
            std::fs::File::create(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?,
        ),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    let io = |e: csv::Error| CliError::Validation(format!("writing CSV: {e}"));
    w.write_record(header).map_err(io)?;
    for r in records {
        w.write_record(r).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Validation(format!("writing CSV: {e}")))?;
    Ok(())
}
