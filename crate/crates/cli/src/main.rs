//! `polytrunc`: run or validate scenario files.
//!
//! Exit codes: 0 all tasks passed, 1 some task failed (reports are still
//! written), 2 parse error, 3 validation failure.

mod report;
mod run;
mod scenario;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "polytrunc", version, about = "Exact-arithmetic combinatorial truncation engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task of a scenario and write reports to a directory.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Base seed (overrides the scenario's `seed`).
        #[arg(long)]
        seed: Option<u64>,
        /// Number of tasks run concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Parse and validate a scenario without running it.
    Validate {
        scenario: PathBuf,
        /// Print the scenario in canonical form.
        #[arg(long)]
        print: bool,
    },
}

const EXIT_TASK_FAILED: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_VALIDATION: u8 = 3;

fn load(path: &PathBuf) -> Result<scenario::Model, ExitCode> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        ExitCode::from(EXIT_PARSE)
    })?;
    let s = scenario::parse_scenario(&text).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        ExitCode::from(EXIT_PARSE)
    })?;
    scenario::validate(s).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        ExitCode::from(EXIT_VALIDATION)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { scenario, print } => {
            let model = match load(&scenario) {
                Ok(m) => m,
                Err(code) => return code,
            };
            if print {
                print!("{}", scenario::to_text(&model.scenario));
            } else {
                println!(
                    "ok: scenario {} ({} rays, {} cones, {} tasks)",
                    model.scenario.name,
                    model.fan.num_rays(),
                    model.fan.cones.len(),
                    model.task_names.len()
                );
            }
            ExitCode::SUCCESS
        }
        Command::Run { scenario, out, seed, jobs } => {
            let model = match load(&scenario) {
                Ok(m) => m,
                Err(code) => return code,
            };
            if let Err(e) = std::fs::create_dir_all(&out) {
                eprintln!("{}: {e}", out.display());
                return ExitCode::from(EXIT_TASK_FAILED);
            }
            let seed = seed.or(model.scenario.seed).unwrap_or(0);
            let outcomes = run::run_tasks(&model, seed, jobs);
            for (i, o) in outcomes.iter().enumerate() {
                if let Err(e) = o.write(&out, i) {
                    eprintln!("{}: {e}", out.display());
                    return ExitCode::from(EXIT_TASK_FAILED);
                }
                println!("{} {} ({})", if o.passed { "PASS" } else { "FAIL" }, o.name, o.kind);
                if let Some((k, m)) = &o.error {
                    println!("  {k}: {m}");
                }
            }
            if let Err(e) = report::write_summary(&out, &model.scenario.name, seed, &outcomes) {
                eprintln!("{}: {e}", out.display());
                return ExitCode::from(EXIT_TASK_FAILED);
            }
            if outcomes.iter().all(|o| o.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_TASK_FAILED)
            }
        }
    }
}
