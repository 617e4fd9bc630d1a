// `!(x <= y)` is used on purpose so that NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod golden;
mod report;
mod run;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use run::CliError;

fn exit_for(e: &CliError) -> ExitCode {
    match e {
        CliError::Validation(_) => ExitCode::from(2),
        CliError::Internal(_) => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("invalid input: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("internal error: {e}");
            return ExitCode::from(1);
        }
    }
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            exit_for(&e)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<ExitCode, CliError> {
    match &cli.command {
        Command::Verify { golden } => {
            let rows = golden::verify(golden)?;
            let mut failed = 0;
            for row in &rows {
                if row.diffs.is_empty() {
                    println!("PASS  {}", row.name);
                } else {
                    failed += 1;
                    println!("FAIL  {}", row.name);
                    for d in &row.diffs {
                        println!("      {d}");
                    }
                }
            }
            println!("{} of {} golden experiments match", rows.len() - failed, rows.len());
            Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Golden { golden } => {
            for path in golden::record(golden)? {
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        cmd => {
            let report = run::run(cmd)?;
            let path = cli.out.clone().unwrap_or_else(|| report::default_out(cmd.name(), cli.format));
            report::write(&path, &report.render(cli.format))
                .map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))?;
            println!("{}: {} -> {}", cmd.name(), report.summary, path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}
