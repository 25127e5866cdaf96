use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::sync::Mutex;

use clap::{Parser, Subcommand};

use aniflow::scenario::{self, ScenarioError, ScenarioSpec};

const EXIT_UNEXPECTED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

/// Batch runner for anisotropic Gauss curvature flow scenarios.
#[derive(Parser)]
#[command(
    name = "aniflow",
    version,
    after_help = "Artifacts are written below $ANIFLOW_OUTPUT_ROOT (default ./aniflow-out).\n\
                  Exit codes: 0 expected outcome, 1 unexpected outcome, 2 usage or parse error, 3 I/O error."
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario file or a catalog scenario by name.
    Run { config: String },
    /// List the built-in scenarios.
    Catalog,
    /// Run every catalog scenario, each in its own process.
    RunAll {
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        jobs: u32,
    },
    /// Parse and validate a scenario without running it.
    Check { config: String },
}

fn exit_code(e: &ScenarioError) -> u8 {
    match e {
        ScenarioError::Io { .. } => EXIT_IO,
        e if e.is_config_error() => EXIT_USAGE,
        _ => EXIT_UNEXPECTED,
    }
}

fn load(config: &str) -> Result<ScenarioSpec, ScenarioError> {
    let path = Path::new(config);
    if !path.exists() {
        if let Some(text) = scenario::catalog_source(config) {
            return scenario::parse_config(text);
        }
    }
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    scenario::parse_config_in(&text, path.parent().unwrap_or(Path::new(".")))
}

fn fail(e: &ScenarioError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(e))
}

fn run(config: &str) -> ExitCode {
    let spec = match load(config) {
        Ok(spec) => spec,
        Err(e) => return fail(&e),
    };
    match scenario::run_scenario(&spec, &scenario::output_root()) {
        Ok(report) => {
            println!(
                "{}: {} (expected {}) -> {}",
                report.name,
                report.outcome,
                report.expect.label(),
                report.dir.display()
            );
            if report.matched() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_UNEXPECTED)
            }
        }
        Err(e) => fail(&e),
    }
}

fn run_all(jobs: usize) -> ExitCode {
    let exe = match std::env::current_exe() {
        Ok(exe) => exe,
        Err(e) => {
            eprintln!("error: cannot locate own executable: {e}");
            return ExitCode::from(EXIT_IO);
        }
    };
    let queue = Mutex::new(scenario::catalog().into_iter());
    let results = Mutex::new(Vec::new());
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let Some(name) = queue.lock().unwrap().next() else { break };
                let code = match Command::new(&exe).args(["run", name]).status() {
                    Ok(status) => status.code().map_or(EXIT_UNEXPECTED, |c| c as u8),
                    Err(e) => {
                        eprintln!("error: {name}: {e}");
                        EXIT_IO
                    }
                };
                results.lock().unwrap().push((name, code));
            });
        }
    });
    let mut results = results.into_inner().unwrap();
    results.sort();
    let mut worst = 0;
    for (name, code) in &results {
        println!("{name}: exit {code}");
        worst = match (worst, *code) {
            (_, EXIT_IO) | (EXIT_IO, _) => EXIT_IO,
            (w, c) => w.max(c.min(EXIT_UNEXPECTED)),
        };
    }
    ExitCode::from(worst)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Cmd::Run { config } => run(&config),
        Cmd::Catalog => {
            for name in scenario::catalog() {
                println!("{name}");
            }
            ExitCode::SUCCESS
        }
        Cmd::RunAll { jobs } => run_all(jobs as usize),
        Cmd::Check { config } => match load(&config) {
            Ok(spec) => {
                println!("{}: ok", spec.name);
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
    }
}
