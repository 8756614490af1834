use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use sphereform_cli::{execute, init_threads, Command, ExperimentConfig, EXIT_USAGE};

/// Radius and diameter of spherical space forms, representation decomposition and Hopf
/// fibration curvature checks.
#[derive(Parser, Debug)]
#[command(name = "sphereform", version)]
struct Args {
    /// radius, diameter, cyclic, decompose, equivalence, dual-set, fibration-check,
    /// averages, index, cp-quotient or suite
    command: Option<String>,
    /// JSON experiment config; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Net resolution in radians
    #[arg(long)]
    delta: Option<f64>,
    /// Output directory for the CSV report and summary.json
    #[arg(long)]
    out: Option<PathBuf>,
    /// complex-<n>, quaternionic-<n> or octonionic
    #[arg(long)]
    fibration: Option<String>,
    /// trivial, antipodal, z<N>, q8, type1:m,n',r,k,l,d or a JSON group file
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    /// Representation terms joined by '+': d, t, r<k>, with optional multipliers
    #[arg(long)]
    rep: Option<String>,
    /// Second representation for equivalence
    #[arg(long)]
    other: Option<String>,
    /// Sphere dimension for trivial and antipodal groups
    #[arg(long)]
    dim: Option<usize>,
    /// d for the involution quotient of CP^(2d-1)
    #[arg(long)]
    d: Option<usize>,
    /// Constant curvature for a single index form
    #[arg(long)]
    curvature: Option<f64>,
    /// Length for a single index form
    #[arg(long)]
    length: Option<f64>,
}

fn config(args: Args) -> Result<ExperimentConfig, sphereform_cli::CliError> {
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| sphereform_cli::CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig::default(),
    };
    let command = args.command.as_deref().map(str::parse::<Command>).transpose()?;
    Ok(file.merged(ExperimentConfig {
        command,
        group: args.group,
        rep: args.rep,
        other: args.other,
        fibration: args.fibration,
        dim: args.dim,
        d: args.d,
        delta: args.delta,
        seed: args.seed,
        samples: args.samples,
        out: args.out,
        curvature: args.curvature,
        length: args.length,
    }))
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = init_threads().and_then(|_| config(args)).map(|c| execute(&c));
    match code {
        Ok(c) => ExitCode::from(c as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
