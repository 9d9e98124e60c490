use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pinsync::experiment::{self, ExperimentSpec, RunOptions};
use pinsync::Result;

/// Pinning-control experiments on coupled oscillator networks.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run only this seed instead of the spec's list.
    #[arg(long, global = true)]
    seed_override: Option<u64>,
    /// Write outputs here instead of the spec's output_dir.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Force generated networks to 100 nodes.
    #[arg(long, global = true)]
    desk_scale: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate every seed and write traces, reports and a summary.
    Run { spec: PathBuf },
    /// Evaluate the requested criteria without simulating.
    Check { spec: PathBuf },
    /// Write the network of every seed as a triplet file.
    Gen { spec: PathBuf },
}

fn load(cli: &Cli, path: &PathBuf) -> Result<ExperimentSpec> {
    let spec = ExperimentSpec::from_path(path)?;
    RunOptions { seed_override: cli.seed_override, out_dir: cli.out_dir.clone(), desk_scale: cli.desk_scale }
        .apply(&spec)
}

fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run { spec } => {
            let spec = load(cli, spec)?;
            let out = experiment::run(&spec)?;
            println!("seed,final_E,final_c,converged,diverged");
            for r in &out.runs {
                println!(
                    "{},{:.6e},{:.6},{},{}",
                    r.seed,
                    r.result.final_error(),
                    r.result.final_coupling(),
                    r.converged,
                    r.result.diverged()
                );
            }
            eprintln!("wrote {} files to {}", out.files.len(), spec.output_dir.display());
        }
        Command::Check { spec } => {
            let spec = load(cli, spec)?;
            let reports = experiment::check(&spec)?;
            for (seed, list) in &reports {
                for r in list {
                    println!("[seed {seed}]\n{}", r.to_record());
                }
            }
            experiment::write_check_reports(&spec, &reports)?;
        }
        Command::Gen { spec } => {
            let spec = load(cli, spec)?;
            for f in experiment::gen(&spec)? {
                println!("{}", f.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(experiment::exit_code(&e) as u8)
        }
    }
}
