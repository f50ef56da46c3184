use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use hmfp_core::experiment::{
    cmd_diag, cmd_evolve, cmd_rearrange, cmd_stability, cmd_steady, exit_code, sweep_variants, ExperimentConfig,
    PhiSource, RawConfig,
};
use hmfp_core::{HmfError, Result};

#[derive(Parser)]
#[command(name = "hmfp", version, about = "HMF-Poisson ground states, kinetic evolution and stability experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment config (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Input snapshot.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Run one variant per value, e.g. `perturbation.amplitude=0.001,0.002`.
    #[arg(long)]
    sweep: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a ground state.
    Steady(Common),
    /// Evolve a snapshot.
    Evolve(Common),
    /// Perturb a ground state and track its orbital distance.
    Stability(Common),
    /// Rearrange a snapshot with respect to the microscopic energy.
    Rearrange {
        #[command(flatten)]
        common: Common,
        /// Potential used for the energy: the snapshot's own or zero.
        #[arg(long, default_value = "self")]
        phi: String,
    },
    /// Print diagnostics of a snapshot.
    Diag(Common),
}

fn need_input(common: &Common) -> Result<PathBuf> {
    common
        .input
        .clone()
        .ok_or_else(|| HmfError::InvalidArgument("this command needs --input <snapshot>".into()))
}

fn run_one(command: &Command, raw: RawConfig) -> Result<String> {
    let cfg = ExperimentConfig::from_raw(raw)?;
    match command {
        Command::Steady(_) => Ok(cmd_steady(&cfg)?.display().to_string()),
        Command::Evolve(c) => Ok(cmd_evolve(&cfg, &need_input(c)?)?.display().to_string()),
        Command::Stability(c) => {
            let s = cmd_stability(&cfg, c.input.as_deref())?;
            Ok(format!("{} sup_distance = {}", s.dir.display(), s.sup_distance))
        }
        Command::Rearrange { common, phi } => {
            let phi: PhiSource = phi.parse()?;
            Ok(cmd_rearrange(&cfg, &need_input(common)?, phi)?.display().to_string())
        }
        Command::Diag(c) => {
            let (dir, rec) = cmd_diag(&cfg, &need_input(c)?)?;
            Ok(format!("{}\n{}\n{}", dir.display(), hmfp_core::DiagnosticsRecord::CSV_HEADER, rec.csv_row()))
        }
    }
}

fn common(command: &Command) -> &Common {
    match command {
        Command::Steady(c) | Command::Evolve(c) | Command::Stability(c) | Command::Diag(c) => c,
        Command::Rearrange { common, .. } => common,
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(n) = std::env::var("HMFP_THREADS") {
        let n: usize = n
            .parse()
            .map_err(|_| HmfError::InvalidArgument(format!("HMFP_THREADS must be a positive integer, got {n:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| HmfError::InvalidArgument(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let fail = |e: &HmfError| {
        eprintln!("hmfp: {e}");
        ExitCode::from(exit_code(e) as u8)
    };
    if let Err(e) = configure_threads() {
        return fail(&e);
    }
    let c = common(&cli.command);
    let raw = match RawConfig::load(&c.config) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let variants = match &c.sweep {
        None => vec![raw],
        Some(s) => match sweep_variants(&raw, s) {
            Ok(v) => v,
            Err(e) => return fail(&e),
        },
    };
    let results: Vec<Result<String>> = variants.into_par_iter().map(|r| run_one(&cli.command, r)).collect();
    let mut code = 0;
    for r in &results {
        match r {
            Ok(msg) => println!("{msg}"),
            Err(e) => {
                eprintln!("hmfp: {e}");
                code = code.max(exit_code(e));
            }
        }
    }
    ExitCode::from(code as u8)
}
