use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use switchplace::io::{
    load_config, load_network, run_oracle, run_powerflow, run_reliability, run_solve, run_validate, IoError,
    RunConfig, SolveOptions,
};
use switchplace::SwitchPlan;

/// Sectionalizing switch and tie point placement on radial feeders.
#[derive(Parser)]
#[command(name = "switchplace", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Replaces the configured output directory.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize placement and write the front, compromise and reports.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Replaces the configured GA seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Also enumerate the exact front when the instance is small enough.
        #[arg(long)]
        oracle: bool,
        /// Evaluation threads.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Mean-load flow: voltages.csv and losses.csv.
    Powerflow {
        #[command(flatten)]
        common: Common,
    },
    /// Reliability indices of one plan: ens.csv.
    Reliability {
        #[command(flatten)]
        common: Common,
        /// Switch decisions, one 0/1 per switch candidate; none when omitted.
        #[arg(long)]
        switches: Option<String>,
        /// Maneuver decisions, one 0/1 per maneuver candidate; none when omitted.
        #[arg(long)]
        ties: Option<String>,
    },
    /// Exact front by enumeration: true_front.csv.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        max_bits: Option<usize>,
    },
    /// Check a feeder file.
    Validate {
        /// Feeder file (JSON).
        #[arg(long, conflicts_with = "config")]
        feeder: Option<PathBuf>,
        /// Validate the feeder named by this run configuration.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn config(common: &Common) -> Result<RunConfig, IoError> {
    let mut cfg = load_config(&common.config)?;
    if let Some(out) = &common.output {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

fn print_files(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn run(command: Command) -> Result<(), IoError> {
    match command {
        Command::Solve { common, seed, oracle, threads } => {
            let cfg = config(&common)?;
            let summary = run_solve(&cfg, &SolveOptions { seed, oracle, threads })?;
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            let c = &summary.front[summary.compromise];
            println!("front size {}", summary.front.len());
            println!("compromise {} f1 = {} f2 = {}", c.plan, c.f1, c.f2);
            if let Some(exact) = &summary.true_front {
                println!("exact front size {}", exact.len());
            }
            print_files(&summary.files);
        }
        Command::Powerflow { common } => print_files(&run_powerflow(&config(&common)?)?),
        Command::Reliability { common, switches, ties } => {
            let cfg = config(&common)?;
            let net = load_network(&cfg.feeder_file)?;
            let bits = |given: Option<String>, n: usize| given.unwrap_or_else(|| "0".repeat(n));
            let plan = SwitchPlan::from_bitstrings(
                &bits(switches, net.num_switch_sites()),
                &bits(ties, net.num_maneuver_sites()),
            )
            .map_err(|e| IoError::Usage(e.to_string()))?;
            print_files(&run_reliability(&cfg, &plan)?);
        }
        Command::Oracle { common, max_bits } => {
            let cfg = config(&common)?;
            let front = run_oracle(&cfg, max_bits)?;
            println!("exact front size {}", front.len());
            println!("wrote {}", cfg.output_dir.join("true_front.csv").display());
        }
        Command::Validate { feeder, config } => {
            let path = match (feeder, config) {
                (Some(f), _) => f,
                (None, Some(c)) => load_config(&c)?.feeder_file,
                (None, None) => return Err(IoError::Usage("validate needs --feeder or --config".into())),
            };
            println!("{}", run_validate(&path)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
