use std::path::PathBuf;
use std::process::ExitCode;

use chaoslab::config::parse_config_file;
use chaoslab::suite::run_suite;
use chaoslab_core::experiments::{Params, EXPERIMENTS};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "chaoslab",
    version,
    about = "Monte Carlo checks for Gaussian multiplicative chaos and its inverse"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiments of a config file.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Master seed; overrides the config file.
        #[arg(long, env = "SEED")]
        seed: Option<u64>,
        /// Worker threads.
        #[arg(long, env = "JOBS")]
        jobs: Option<usize>,
    },
    /// List the experiments.
    List,
    /// Show the claim checked by an experiment and its default parameters.
    Describe { experiment: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for (name, claim) in EXPERIMENTS {
                println!("{name:<22} {claim}");
            }
            ExitCode::SUCCESS
        }
        Command::Describe { experiment } => {
            let Some(params) = Params::default_for(&experiment) else {
                eprintln!("unknown experiment `{experiment}`; see `chaoslab list`");
                return ExitCode::from(2);
            };
            let claim = EXPERIMENTS
                .iter()
                .find(|(n, _)| *n == experiment)
                .unwrap()
                .1;
            println!("{experiment}: {claim}\n\ndefaults:");
            let value = serde_json::to_value(&params).expect("params serialize");
            for key in params.keys() {
                let v = &value[*key];
                let shown = match v {
                    serde_json::Value::Array(items) => items
                        .iter()
                        .map(|i| i.to_string())
                        .collect::<Vec<_>>()
                        .join(", "),
                    other => other.to_string(),
                };
                println!("  {key} = {shown}");
            }
            ExitCode::SUCCESS
        }
        Command::Run {
            config,
            out,
            seed,
            jobs,
        } => {
            if let Some(j) = jobs {
                if let Err(e) = rayon::ThreadPoolBuilder::new()
                    .num_threads(j.max(1))
                    .build_global()
                {
                    eprintln!("cannot set worker count: {e}");
                }
            }
            let mut suite = match parse_config_file(&config) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            };
            if let Some(s) = seed {
                suite.seed = s;
            }
            match run_suite(&suite, &out) {
                Ok(manifest) => {
                    for r in &manifest.experiments {
                        let status = if r.passed { "PASS" } else { "FAIL" };
                        match &r.error {
                            Some(e) => println!("{status} {:<22} error: {e}", r.name),
                            None => {
                                println!("{status} {:<22} {:.1}s", r.name, r.wall_clock_seconds)
                            }
                        }
                    }
                    println!("manifest: {}", out.join("manifest.json").display());
                    ExitCode::from(manifest.exit_code() as u8)
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}
