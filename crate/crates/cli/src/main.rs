use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use emerge_cli::{check_file, run_file, CliError};

/// Run a scenario file and write its CSV outputs.
#[derive(Debug, Parser)]
#[command(name = "emerge", version)]
struct Args {
    /// Scenario file (TOML).
    config: PathBuf,
    /// Output path prefix; overrides `output` in the file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for parallel evaluation.
    #[arg(long)]
    threads: Option<usize>,
    /// Run the invariant suite on the configured model instead of the scenario.
    #[arg(long)]
    check: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(n) = args.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let outcome = if args.check {
        check_file(&args.config).and_then(|results| {
            let mut failed = Vec::new();
            for r in &results {
                println!("{} {}: {}", if r.pass { "ok  " } else { "FAIL" }, r.name, r.detail);
                if !r.pass {
                    failed.push(r.name);
                }
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Check(failed.join(", ")))
            }
        })
    } else {
        run_file(&args.config, args.out.as_deref()).map(|written| {
            for p in written {
                println!("{}", p.display());
            }
        })
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
