//! Batch front end for the `sphereform` library: experiment configuration, command
//! dispatch and report files.

pub mod commands;
pub mod criteria;
pub mod report;
pub mod specs;

use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sphereform::fibrations::Fibration;
use thiserror::Error;

use crate::commands::Extent;
use crate::report::Report;
use crate::specs::build_rep;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] sphereform::Error),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o: {0}")]
    Io(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Radius,
    Diameter,
    Cyclic,
    Decompose,
    Equivalence,
    DualSet,
    FibrationCheck,
    Averages,
    Index,
    CpQuotient,
    Suite,
}

impl Command {
    pub const ALL: [Command; 11] = [
        Self::Radius,
        Self::Diameter,
        Self::Cyclic,
        Self::Decompose,
        Self::Equivalence,
        Self::DualSet,
        Self::FibrationCheck,
        Self::Averages,
        Self::Index,
        Self::CpQuotient,
        Self::Suite,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Radius => "radius",
            Self::Diameter => "diameter",
            Self::Cyclic => "cyclic",
            Self::Decompose => "decompose",
            Self::Equivalence => "equivalence",
            Self::DualSet => "dual-set",
            Self::FibrationCheck => "fibration-check",
            Self::Averages => "averages",
            Self::Index => "index",
            Self::CpQuotient => "cp-quotient",
            Self::Suite => "suite",
        }
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown command {s:?}")))
    }
}

/// One experiment. Every field but `command` is optional in config files; flags override
/// file values.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Option<Command>,
    pub group: Option<String>,
    pub rep: Option<String>,
    /// Second representation for `equivalence`.
    pub other: Option<String>,
    pub fibration: Option<String>,
    /// Sphere dimension for `trivial` and `antipodal` groups.
    pub dim: Option<usize>,
    /// `d` of the involution quotient of `CP^{2d−1}`.
    pub d: Option<usize>,
    pub delta: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub out: Option<PathBuf>,
    pub curvature: Option<f64>,
    pub length: Option<f64>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("bad config: {e}")))
    }

    /// `self` with every field set in `over` replaced.
    pub fn merged(self, over: ExperimentConfig) -> Self {
        Self {
            command: over.command.or(self.command),
            group: over.group.or(self.group),
            rep: over.rep.or(self.rep),
            other: over.other.or(self.other),
            fibration: over.fibration.or(self.fibration),
            dim: over.dim.or(self.dim),
            d: over.d.or(self.d),
            delta: over.delta.or(self.delta),
            seed: over.seed.or(self.seed),
            samples: over.samples.or(self.samples),
            out: over.out.or(self.out),
            curvature: over.curvature.or(self.curvature),
            length: over.length.or(self.length),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("sphereform-report"))
    }

    fn group(&self) -> Result<&str, CliError> {
        self.group
            .as_deref()
            .ok_or_else(|| CliError::Usage("this command needs --group".into()))
    }

    fn rep(&self) -> &str {
        self.rep.as_deref().unwrap_or("d")
    }

    fn dim(&self) -> usize {
        self.dim.unwrap_or(2)
    }
}

/// Runs the configured command without writing files.
pub fn run(config: &ExperimentConfig) -> Result<Report, CliError> {
    let command = config
        .command
        .ok_or_else(|| CliError::Usage("no command given".into()))?;
    let seed = config.seed();
    let samples = |default: usize| config.samples.unwrap_or(default);
    match command {
        Command::Radius | Command::Diameter => {
            let rep = build_rep(config.group()?, config.rep(), config.dim())?;
            let which = if command == Command::Radius {
                Extent::Radius
            } else {
                Extent::Diameter
            };
            commands::extent(rep, which, config.delta.unwrap_or(0.02), seed)
        }
        Command::Cyclic => {
            let rep = build_rep(config.group()?, config.rep(), config.dim())?;
            commands::cyclic(&rep, samples(16), seed)
        }
        Command::Decompose => commands::decompose(&build_rep(config.group()?, config.rep(), config.dim())?, seed),
        Command::Equivalence => {
            let group = config.group()?;
            let other = config
                .other
                .as_deref()
                .ok_or_else(|| CliError::Usage("equivalence needs --other".into()))?;
            let a = build_rep(group, config.rep(), config.dim())?;
            // both sides must share one group object
            let g = specs::GroupSpec::parse(group)?;
            let b = specs::RepSpec::parse(other)?.build(a.group(), &g)?;
            commands::equivalence(&a, &b, seed)
        }
        Command::DualSet => {
            let rep = build_rep(
                config.group.as_deref().unwrap_or("antipodal"),
                config.rep(),
                config.dim(),
            )?;
            commands::dual_sets(rep, config.delta.unwrap_or(0.05), samples(5), seed)
        }
        Command::FibrationCheck => {
            let fs = match &config.fibration {
                Some(name) => vec![Fibration::from_str(name).map_err(|e| CliError::Usage(e.to_string()))?],
                None => commands::DEFAULT_FIBRATIONS.to_vec(),
            };
            commands::fibration_checks(&fs, samples(32), seed)
        }
        Command::Averages => {
            let f = match &config.fibration {
                Some(name) => Fibration::from_str(name).map_err(|e| CliError::Usage(e.to_string()))?,
                None => Fibration::Octonionic,
            };
            commands::averages(f, samples(8), seed)
        }
        Command::Index => {
            let case = match (config.curvature, config.length) {
                (Some(k), Some(l)) => Some((k, l)),
                (None, None) => None,
                _ => return Err(CliError::Usage("--curvature and --length go together".into())),
            };
            commands::index(case, seed)
        }
        Command::CpQuotient => commands::cp_quotient(config.d.unwrap_or(2), samples(10_000), 100, seed),
        Command::Suite => criteria::suite(seed),
    }
}

/// Runs, prints, writes the report files and returns the process exit code.
pub fn execute(config: &ExperimentConfig) -> i32 {
    let start = Instant::now();
    let report = match run(config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let elapsed = start.elapsed().as_millis();
    for m in &report.messages {
        println!("{m}");
    }
    for c in &report.checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let command = config.command.map(|c| c.name()).unwrap_or("run");
    if let Err(e) = report::write(&config.out_dir(), command, config.seed(), &report, elapsed) {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    if report.pass() {
        EXIT_PASS
    } else {
        EXIT_CHECK_FAILED
    }
}

/// Caps the global thread pool from `SPHEREFORM_THREADS`, if set.
pub fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("SPHEREFORM_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("SPHEREFORM_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commands_round_trip() {
        for c in Command::ALL {
            assert_eq!(c.name().parse::<Command>().unwrap(), c);
        }
        assert!("bogus".parse::<Command>().is_err());
    }

    #[test]
    fn flags_override_config_files() {
        let file =
            ExperimentConfig::from_json(r#"{"command": "radius", "group": "z5", "seed": 3, "delta": 0.05}"#).unwrap();
        let flags = ExperimentConfig {
            seed: Some(9),
            ..Default::default()
        };
        let c = file.merged(flags);
        assert_eq!(c.command, Some(Command::Radius));
        assert_eq!(c.seed(), 9);
        assert_eq!(c.delta, Some(0.05));
        assert!(ExperimentConfig::from_json(r#"{"colour": 1}"#).is_err());
    }

    #[test]
    fn missing_arguments_are_usage_errors() {
        let c = ExperimentConfig {
            command: Some(Command::Radius),
            ..Default::default()
        };
        assert!(matches!(run(&c), Err(CliError::Usage(_))));
        assert!(matches!(run(&ExperimentConfig::default()), Err(CliError::Usage(_))));
    }
}
