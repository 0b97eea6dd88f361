use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fracreg::cli::{self, JobConfig};
use fracreg::error::{Error, Result};

#[derive(Parser)]
#[command(name = "fracreg", version, about = "Optimal regulators for fractional-order oscillators")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gains, closed loop and roots for a configuration
    Synth {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Characteristic polynomial, roots and stability only
    Modes {
        #[arg(long, required_unless_present = "synth", conflicts_with = "synth")]
        config: Option<PathBuf>,
        /// Read the polynomial from a `synth` output document instead
        #[arg(long)]
        synth: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-loop trajectory (CSV) and cost/decay summary
    Respond {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Odd/odd approximation of num/den
    ApproxOrder {
        #[arg(long, allow_hyphen_values = true)]
        num: i64,
        #[arg(long, allow_hyphen_values = true)]
        den: i64,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// Repeat synth over the config's sweep grid
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn run(args: Args) -> Result<()> {
    match args.command {
        Command::Synth { config, out } => {
            let report = cli::run_synth(&JobConfig::load(&config)?)?;
            emit(out.as_deref(), &cli::to_json(&report))
        }
        Command::Modes { config, synth, out } => {
            let report = match (config, synth) {
                (_, Some(doc)) => cli::run_modes_from_synth(&read(&doc)?)?,
                (Some(cfg), None) => cli::run_modes(&JobConfig::load(&cfg)?)?,
                (None, None) => return Err(Error::InvalidInput("modes needs --config or --synth".into())),
            };
            emit(out.as_deref(), &cli::to_json(&report))
        }
        Command::Respond { config, out, csv } => {
            let (traj, summary) = cli::run_respond(&JobConfig::load(&config)?)?;
            emit(csv.as_deref(), &cli::trajectory_csv(&traj))?;
            match out {
                Some(p) => emit(Some(&p), &cli::to_json(&summary)),
                None => {
                    eprint!("{}", cli::to_json(&summary));
                    Ok(())
                }
            }
        }
        Command::ApproxOrder { num, den, tol } => {
            println!("{}", cli::run_approx_order(num, den, tol)?);
            Ok(())
        }
        Command::Sweep { config, csv } => {
            let cfg = JobConfig::load(&config)?;
            let spec = cfg.sweep.ok_or_else(|| Error::InvalidInput("config has no sweep section".into()))?;
            emit(csv.as_deref(), &cli::run_sweep(&cfg, &spec)?)
        }
    }
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if e.is_validation() {
                eprintln!("error: {e}");
            } else {
                eprintln!("{}: {e}", e.name());
            }
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
