use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

/// JSON form of every report.
#[derive(Debug, Serialize)]
pub struct OutputEnvelope<'a> {
    pub tool_version: &'static str,
    pub subcommand: &'a str,
    pub params_echo: Value,
    pub results: Value,
    pub seed: Option<u64>,
}

pub struct Emitter {
    pub json: bool,
    pub seed: Option<u64>,
}

impl Emitter {
    /// Writes `rows` as CSV, or the envelope with `results` (defaulting to
    /// the rows) as JSON.
    pub fn emit<R: Serialize>(
        &self,
        subcommand: &str,
        echo: &impl Serialize,
        rows: &[R],
        results: Option<Value>,
    ) -> Result<(), CliError> {
        let stdout = std::io::stdout();
        let mut out = stdout.lock();
        if self.json {
            let env = OutputEnvelope {
                tool_version: env!("CARGO_PKG_VERSION"),
                subcommand,
                params_echo: to_value(echo)?,
                results: match results {
                    Some(v) => v,
                    None => to_value(&rows)?,
                },
                seed: self.seed,
            };
            serde_json::to_writer_pretty(&mut out, &env).map_err(|e| CliError::Failure(e.to_string()))?;
            writeln!(out).map_err(|e| CliError::Failure(e.to_string()))?;
        } else {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r).map_err(|e| CliError::Failure(e.to_string()))?;
            }
            w.flush().map_err(|e| CliError::Failure(e.to_string()))?;
        }
        Ok(())
    }
}

pub fn to_value(v: &impl Serialize) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Failure(e.to_string()))
}
