use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fracsteps::model::parse_problem;
use fracsteps::report::{oracle_max_abs_error, RunReport};
use fracsteps::steps::solve;

#[derive(Parser)]
#[command(name = "fracsteps", version, about = "Fractional transform solver for linear Caputo systems with state delays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file segment by segment.
    Solve {
        file: PathBuf,
        /// Write the nonzero series coefficients of every segment here.
        #[arg(long)]
        out_coeffs: Option<PathBuf>,
        /// Write the sampled trajectory here.
        #[arg(long)]
        out_traj: Option<PathBuf>,
        /// Re-solve each segment with the ABM oracle and report the largest deviation.
        #[arg(long)]
        check_oracle: bool,
        /// ABM steps per segment for --check-oracle.
        #[arg(long, default_value_t = 4000)]
        oracle_steps: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn run(cli: Cli) -> Result<(), String> {
    let Command::Solve { file, out_coeffs, out_traj, check_oracle, oracle_steps, format } = cli.command;
    let text = fs::read_to_string(&file).map_err(|e| format!("{}: {e}", file.display()))?;
    let (sys, cfg) = parse_problem(&text).map_err(|e| format!("{}: {e}", file.display()))?;
    let sol = solve(&sys, &cfg).map_err(|e| e.to_string())?;
    if let Some(warning) = cfg.truncation_warning(&sys, sol.plan.num_segments) {
        eprintln!("warning: {warning}");
    }
    let mut report = RunReport::build(&sys, &cfg, &sol).map_err(|e| e.to_string())?;
    if check_oracle {
        if oracle_steps == 0 {
            return Err("--oracle-steps must be positive".into());
        }
        let err = oracle_max_abs_error(&sys, &sol, oracle_steps).map_err(|e| e.to_string())?;
        report.oracle_max_abs_error = Some(err);
    }

    let write = |path: &PathBuf, body: String| {
        fs::write(path, body).map_err(|e| format!("{}: {e}", path.display()))
    };
    if let Some(path) = &out_traj {
        match format {
            Format::Csv => write(path, report.trajectory_csv())?,
            Format::Json => write(path, serde_json::to_string_pretty(&report.trajectory).unwrap())?,
        }
    }
    if let Some(path) = &out_coeffs {
        match format {
            Format::Csv => write(path, report.coefficients_csv())?,
            Format::Json => write(path, serde_json::to_string_pretty(&report.coefficients).unwrap())?,
        }
    }

    if format == Format::Json && out_traj.is_none() && out_coeffs.is_none() {
        println!("{}", report.to_json());
    } else {
        println!(
            "tau_star = {}, segments = {}, alpha = {}",
            sol.plan.tau_star, sol.plan.num_segments, sol.choice.alpha
        );
        if let Some(err) = report.oracle_max_abs_error {
            println!("oracle_max_abs_error = {err:.3e}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
