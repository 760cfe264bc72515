use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use recurrence_lab::cli::{self, CliError, ExperimentConfig, VerifyOptions};
use recurrence_lab::systems::families;

#[derive(Parser)]
#[command(name = "recurrence-lab", version, about = "Entry and return time experiments")]
struct Args {
    /// Worker threads (default: all cores). Results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write CSV curves plus a summary.
    Run { config: PathBuf },
    /// Run a named check and print PASS/FAIL lines.
    Verify {
        check: String,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
    /// List the supported system families.
    ListSystems,
}

fn exec(args: Args) -> Result<bool, CliError> {
    match args.command {
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let out = cli::run(&cfg)?;
            print!("{}", out.summary);
            Ok(out.report.all_pass())
        }
        Command::Verify {
            check,
            alpha,
            samples,
            seed,
        } => {
            let r = cli::verify(&check, &VerifyOptions { alpha, samples, seed })?;
            print!("{r}");
            Ok(r.all_pass())
        }
        Command::ListSystems => {
            for (name, example) in families() {
                println!("{name:<20} {example}");
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match exec(args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::ConfigParse { .. } | CliError::InvalidConfig { .. } | CliError::UnknownCheck(_) | CliError::Io { .. } => {
                    ExitCode::from(2)
                }
                _ => ExitCode::from(1),
            }
        }
    }
}
