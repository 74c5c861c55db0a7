use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coupler_cli::scenario::EXPERIMENTS;
use coupler_cli::{run_file, CliError, Format, Scenario, OUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "coupler", version, about = "Run output-coupler scenarios and emit plot-ready tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its table.
    Run {
        scenario: PathBuf,
        /// Output directory.
        #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Check a scenario without running it.
    Validate { scenario: PathBuf },
    /// Print the experiment kinds a scenario may name.
    ListExperiments,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { scenario, out, format } => {
            let (report, written) = run_file(&scenario, &out, format)?;
            let s = &report.summary;
            let failed = s.checks.iter().filter(|c| !c.passed).count();
            println!(
                "{} [{}]: {} ({} checks, {} failed)",
                scenario.display(),
                s.experiment,
                if s.passed { "PASS" } else { "FAIL" },
                s.checks.len(),
                failed
            );
            for c in &s.checks {
                println!(
                    "  {:<32} {:>14.6e}  limit {:.3e}  {}",
                    c.name,
                    c.value,
                    c.threshold,
                    if c.passed { "ok" } else { "FAIL" }
                );
            }
            for (name, v) in &s.metrics {
                println!("  {name:<32} {v:>14.6e}");
            }
            for p in written {
                println!("wrote {}", p.display());
            }
            Ok(())
        }
        Command::Validate { scenario } => {
            let s = Scenario::load(&scenario)?;
            s.validate()?;
            println!("{}: ok ({})", scenario.display(), s.experiment.kind());
            Ok(())
        }
        Command::ListExperiments => {
            for (name, about) in EXPERIMENTS {
                println!("{name:<20} {about}");
            }
            Ok(())
        }
    }
}
