use clap::{Parser, Subcommand};
use pomega_cli::{expand, oracle, parse_tau, report_line, run_suite, select, suite_exit_code, CliError, Config, Format};
use pomega_core::registry::{run_identity, Overrides, Status};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "pomega", version, about = "Verify overpartition and mock theta identities")]
struct Cli {
    /// TOML file with defaults for d, dz, order, prec, taus and jobs.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Default)]
struct RunFlags {
    #[arg(long)]
    order: Option<i64>,
    #[arg(long)]
    prec: Option<u32>,
    /// Evaluation point u,v for tau = u + iv; repeatable.
    #[arg(long = "tau", value_parser = parse_tau)]
    taus: Vec<(f64, f64)>,
    #[arg(long)]
    tolerance: Option<f64>,
}

impl RunFlags {
    fn overrides(self) -> Overrides {
        Overrides {
            order: self.order,
            prec: self.prec,
            taus: if self.taus.is_empty() { None } else { Some(self.taus) },
            tolerance: self.tolerance,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// List registered identities.
    List,
    /// Verify one identity and print its report.
    Run {
        id: String,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Verify every identity matching a glob, one JSON report per line.
    Suite {
        #[arg(long)]
        filter: Option<String>,
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Print the expansion of an object.
    Expand {
        object: String,
        #[arg(long)]
        order: Option<i64>,
        #[arg(long, default_value = "json")]
        format: Format,
    },
    /// Print brute-force census counts for a family.
    Oracle {
        family: String,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Writes a line to stdout; a closed pipe is not an error.
fn emit(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}").and_then(|_| out.flush());
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    match cli.command {
        Command::List => {
            emit(&pomega_cli::list_lines().join("\n"));
            Ok(0)
        }
        Command::Run { id, flags } => {
            let report = run_identity(&id, &config.overrides(flags.overrides()))?;
            emit(&report_line(&report));
            Ok(if report.status == Status::Pass { 0 } else { 1 })
        }
        Command::Suite { filter, jobs, flags } => {
            let ids = select(filter.as_deref())?;
            let jobs = jobs.or(config.jobs).unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let reports = run_suite(&ids, &config.overrides(flags.overrides()), jobs, |r| emit(&report_line(r)))?;
            Ok(suite_exit_code(&reports))
        }
        Command::Expand { object, order, format } => {
            let order = order
                .or(config.order)
                .ok_or_else(|| CliError::Usage("expand needs --order or an order in the config".into()))?;
            let e = expand(&object, order, config.d, config.dz)?;
            emit(e.render(format).trim_end());
            Ok(0)
        }
        Command::Oracle { family, n, format } => {
            emit(oracle(&family, n, format)?.trim_end());
            Ok(0)
        }
    }
}
