//! CSV rows, named checks and the JSON summary.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sphereform::groups::fmt17;
use sphereform::numerics::CertifiedInterval;

use crate::CliError;

pub const CSV_HEADER: &str = "quantity,lower,upper,certified,net_delta,seed,wall_time_ms";

/// One CSV row. `wall_time_ms` is always written empty so that reports are reproducible;
/// timings go to the summary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub quantity: String,
    pub lower: f64,
    pub upper: f64,
    pub certified: bool,
    pub net_delta: Option<f64>,
    pub seed: u64,
}

impl Row {
    pub fn value(quantity: impl Into<String>, v: f64, seed: u64) -> Self {
        Self {
            quantity: quantity.into(),
            lower: v,
            upper: v,
            certified: false,
            net_delta: None,
            seed,
        }
    }

    pub fn range(quantity: impl Into<String>, lower: f64, upper: f64, seed: u64) -> Self {
        Self {
            lower,
            upper,
            ..Self::value(quantity, 0.0, seed)
        }
    }

    pub fn flag(quantity: impl Into<String>, b: bool, seed: u64) -> Self {
        Self {
            certified: true,
            ..Self::value(quantity, if b { 1.0 } else { 0.0 }, seed)
        }
    }

    pub fn interval(quantity: impl Into<String>, iv: &CertifiedInterval, delta: f64, seed: u64) -> Self {
        Self {
            quantity: quantity.into(),
            lower: iv.lower,
            upper: iv.upper,
            certified: iv.certified,
            net_delta: Some(delta),
            seed,
        }
    }

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},",
            self.quantity,
            fmt17(self.lower),
            fmt17(self.upper),
            self.certified,
            self.net_delta.map(fmt17).unwrap_or_default(),
            self.seed
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

/// Everything a command produces.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub rows: Vec<Row>,
    pub checks: Vec<Check>,
    pub messages: Vec<String>,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn row(&mut self, r: Row) {
        self.rows.push(r);
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, pass, detail));
    }

    pub fn say(&mut self, msg: impl Into<String>) {
        self.messages.push(msg.into());
    }

    /// Appends another report with its quantities and check names prefixed.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut r in other.rows {
            r.quantity = format!("{prefix}.{}", r.quantity);
            self.rows.push(r);
        }
        for mut c in other.checks {
            c.name = format!("{prefix}.{}", c.name);
            self.checks.push(c);
        }
        self.messages
            .extend(other.messages.into_iter().map(|m| format!("[{prefix}] {m}")));
    }

    pub fn csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.csv());
            out.push('\n');
        }
        out
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    command: &'a str,
    seed: u64,
    pass: bool,
    wall_time_ms: u128,
    rows: usize,
    checks: &'a [Check],
    messages: &'a [String],
}

/// Writes `<out>/<command>.csv` and `<out>/summary.json`.
pub fn write(out: &Path, command: &str, seed: u64, report: &Report, wall_time_ms: u128) -> Result<(), CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let csv_path = out.join(format!("{command}.csv"));
    let mut f = std::fs::File::create(&csv_path).map_err(|e| CliError::Io(format!("{}: {e}", csv_path.display())))?;
    f.write_all(report.csv().as_bytes())
        .map_err(|e| CliError::Io(e.to_string()))?;
    let summary = Summary {
        command,
        seed,
        pass: report.pass(),
        wall_time_ms,
        rows: report.rows.len(),
        checks: &report.checks,
        messages: &report.messages,
    };
    let text = serde_json::to_string_pretty(&summary).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(out.join("summary.json"), text + "\n").map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}
