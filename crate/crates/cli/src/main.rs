use std::process::ExitCode;

use clap::Parser;
use walsh_tf_cli::config::Cli;
use walsh_tf_cli::{run_experiment, HarnessError};

fn run() -> Result<i32, HarnessError> {
    let cfg = Cli::parse().resolve()?;
    let outcome = run_experiment(&cfg)?;
    let report = &outcome.report;
    if cfg.out.is_none() {
        print!("{}", report.to_csv());
    }
    for c in &report.checks {
        eprintln!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
    }
    for c in &outcome.comparisons {
        let tag = if c.passed { "ok  " } else { "FAIL" };
        eprintln!("{tag} {}: {} (constant {})", c.id, c.value, c.constant);
    }
    if cfg.calibrate {
        for m in &report.measurements {
            eprintln!("recorded {}: {}", m.id, m.value);
        }
    }
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("walsh-tf: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
