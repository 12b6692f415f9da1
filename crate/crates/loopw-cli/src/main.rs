//! Command-line front end: `check`, `run`, and `trace` over `.lw` files.
//!
//! Exit codes: 0 success, 1 type error, 2 stuck configuration, 3 parse
//! error, 4 I/O error, 5 step budget exhausted, 64 usage error.

use clap::{Parser, Subcommand, ValueEnum};
use loopw::driver::{self, RunOutcome, TraceStep};
use loopw::step::rule_path;
use loopw::syntax::{Config, Slot};
use loopw::{check_program, map_batch, parse_program, Program, SourceFile};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_TYPE: u8 = 1;
const EXIT_STUCK: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_BUDGET: u8 = 5;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "loopw",
    version,
    about = "Type checker and small-step interpreter for an Ada-like language \
             with higher-order procedural variables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and type check programs
    Check {
        /// Programs to check
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Worker threads (1 = sequential, 0 = one per core)
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Type check and evaluate a program, printing its top-level results
    Run {
        file: PathBuf,
        /// Step budget (default 1000000, or LOOPW_MAX_STEPS if set)
        #[arg(long)]
        max_steps: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print the configurations of a bounded run, one step per line
    Trace {
        file: PathBuf,
        /// Number of steps to trace
        #[arg(long)]
        max_steps: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Include the rule chain of each step in text output
        #[arg(long)]
        show_rules: bool,
    },
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap prints help/version on stdout with a success status;
            // anything else is a usage error
            if err.exit_code() == 0 {
                let _ = err.print();
                return ExitCode::from(EXIT_OK);
            }
            let _ = err.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let code = match cli.command {
        Command::Check { files, jobs } => cmd_check(&files, jobs),
        Command::Run { file, max_steps, format } => cmd_run(&file, max_steps, format),
        Command::Trace { file, max_steps, format, show_rules } => {
            cmd_trace(&file, max_steps, format, show_rules)
        }
    };
    ExitCode::from(code)
}

/// Read, parse and type check one file, or explain why it fails.
fn load(path: &Path) -> Result<Program, (u8, String)> {
    let source = SourceFile::read(path)
        .map_err(|err| (EXIT_IO, format!("{}: {err}", path.display())))?;
    let program = parse_program(&source)
        .map_err(|err| (EXIT_PARSE, format!("{}:{err}", path.display())))?;
    check_program(&program).map_err(|err| {
        let position = match err.span {
            Some(span) => format!("{}:{span}", path.display()),
            None => path.display().to_string(),
        };
        (EXIT_TYPE, format!("{position}: {err}"))
    })?;
    Ok(program)
}

fn cmd_check(files: &[PathBuf], jobs: usize) -> u8 {
    let single = files.len() == 1;
    let results = map_batch(files.to_vec(), jobs, |path| {
        (path.clone(), load(&path).map(|_| ()))
    });
    let mut code = EXIT_OK;
    for (path, result) in results {
        match result {
            Ok(()) if single => println!("ok"),
            Ok(()) => println!("{}: ok", path.display()),
            Err((c, message)) => {
                eprintln!("{message}");
                if code == EXIT_OK {
                    code = c;
                }
            }
        }
    }
    code
}

fn budget(flag: Option<u64>) -> Result<u64, String> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var("LOOPW_MAX_STEPS") {
        Ok(raw) => raw
            .parse()
            .map_err(|_| format!("LOOPW_MAX_STEPS must be a nonnegative integer, got '{raw}'")),
        Err(_) => Ok(driver::DEFAULT_BUDGET),
    }
}

#[derive(Serialize)]
struct JsonBinding {
    name: String,
    value: String,
}

fn json_store(store: &loopw::Store) -> Vec<JsonBinding> {
    store
        .iter()
        .map(|(name, slot)| JsonBinding {
            name: name.to_string(),
            value: match slot {
                Slot::Value(v) => v.to_string(),
                Slot::Uninit => "?".to_string(),
            },
        })
        .collect()
}

fn cmd_run(file: &Path, max_steps: Option<u64>, format: Format) -> u8 {
    let program = match load(file) {
        Ok(p) => p,
        Err((code, message)) => {
            eprintln!("{message}");
            return code;
        }
    };
    let budget = match budget(max_steps) {
        Ok(b) => b,
        Err(message) => {
            eprintln!("{message}");
            return EXIT_USAGE;
        }
    };
    let report = driver::run_program(&program, budget);
    match &report.outcome {
        RunOutcome::Converged => {
            let results = driver::report_top_level(&report);
            match format {
                Format::Text => {
                    for (name, value) in results {
                        println!("{name} = {value}");
                    }
                }
                Format::Json => {
                    let out: Vec<JsonBinding> = results
                        .iter()
                        .map(|(name, value)| JsonBinding {
                            name: name.to_string(),
                            value: value.to_string(),
                        })
                        .collect();
                    println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
                }
            }
            EXIT_OK
        }
        RunOutcome::Stuck { context, cause } => {
            eprintln!(
                "{}: stuck after {} step(s): {context}",
                file.display(),
                report.steps_taken
            );
            if let Some(cause) = cause {
                eprintln!("cause: {cause}");
            }
            eprintln!("at: {} | {}", report.final_cmd, report.final_store);
            EXIT_STUCK
        }
        RunOutcome::StepBudgetExhausted => {
            eprintln!(
                "{}: step budget of {budget} exhausted",
                file.display()
            );
            EXIT_BUDGET
        }
    }
}

#[derive(Serialize)]
struct JsonTraceStep {
    step: u64,
    rule: String,
    command: String,
    store: Vec<JsonBinding>,
}

fn print_trace(steps: &[TraceStep], format: Format, show_rules: bool) {
    match format {
        Format::Text => {
            for (i, entry) in steps.iter().enumerate() {
                let n = i + 1;
                if show_rules {
                    println!(
                        "step {n} [{}]: {} | {}",
                        rule_path(&entry.rules),
                        entry.config.cmd,
                        entry.config.store
                    );
                } else {
                    println!("step {n}: {} | {}", entry.config.cmd, entry.config.store);
                }
            }
        }
        Format::Json => {
            let out: Vec<JsonTraceStep> = steps
                .iter()
                .enumerate()
                .map(|(i, entry)| JsonTraceStep {
                    step: (i + 1) as u64,
                    rule: rule_path(&entry.rules),
                    command: entry.config.cmd.to_string(),
                    store: json_store(&entry.config.store),
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
        }
    }
}

fn cmd_trace(file: &Path, max_steps: u64, format: Format, show_rules: bool) -> u8 {
    let program = match load(file) {
        Ok(p) => p,
        Err((code, message)) => {
            eprintln!("{message}");
            return code;
        }
    };
    let start = Config::for_program(program.dcl.clone());
    let steps = driver::trace_with_rules(start.clone(), max_steps);
    print_trace(&steps, format, show_rules);
    // A zero-length window asks for nothing, so nothing can have gone wrong.
    if max_steps == 0 {
        return EXIT_OK;
    }
    let report = driver::full_eval(start, max_steps);
    match &report.outcome {
        RunOutcome::Converged => EXIT_OK,
        RunOutcome::Stuck { context, cause } => {
            eprintln!(
                "{}: stuck after {} step(s): {context}",
                file.display(),
                report.steps_taken
            );
            if let Some(cause) = cause {
                eprintln!("cause: {cause}");
            }
            EXIT_STUCK
        }
        RunOutcome::StepBudgetExhausted => EXIT_BUDGET,
    }
}
