use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use folm::Execution;
use folm_cli::config::{ConfigKind, ExperimentConfig, OutputFormat};
use folm_cli::runner::{self, Overrides};
use folm_cli::selfcheck::{self, CheckContext, Perturbation};
use folm_cli::table;
use folm_cli::CliError;

#[derive(Parser)]
#[command(name = "folm", version, about = "Fiber loop mirror with a magneto-optic sphere: sweeps and self-checks")]
struct Cli {
    /// Evaluate points one after another instead of in parallel.
    #[arg(long, global = true)]
    serial: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario or sweep described by a config file.
    Run {
        config: PathBuf,
        /// Output file; overrides the config, `-` for stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        format: Option<OutputFormat>,
        /// Also evaluate purity by explicit Fock-space partial trace.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        fock_dim: Option<usize>,
    },
    /// Run the built-in invariant and regression checks.
    Check {
        /// Print expected and actual values for passing checks too.
        #[arg(short, long)]
        verbose: bool,
        /// Seed for the randomized checks.
        #[arg(long, default_value_t = selfcheck::DEFAULT_SEED)]
        seed: u64,
        /// Scale one default parameter (`name=factor`) to exercise failure reporting.
        #[arg(long, hide = true)]
        perturb: Option<String>,
    },
    /// Print a config file with every default filled in.
    Defaults {
        #[arg(long, value_enum, default_value = "perpendicular")]
        configuration: Kind,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Kind {
    Parallel,
    Perpendicular,
}

fn execution(serial: bool) -> Execution {
    if serial {
        Execution::Serial
    } else {
        Execution::Parallel
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let exec = execution(cli.serial);
    match cli.command {
        Command::Run {
            config,
            output,
            format,
            oracle,
            fock_dim,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let rows = runner::run(&cfg, Overrides { oracle, fock_dim }, exec)?;
            let format = format.or(cfg.output.format).unwrap_or_default();
            let path = output.or_else(|| cfg.output.path.as_ref().map(PathBuf::from));
            match path {
                Some(p) if p.as_os_str() != "-" => {
                    let mut w = BufWriter::new(File::create(&p)?);
                    table::write_rows(&mut w, &rows, format)?;
                    w.flush()?;
                    log::info!("wrote {} rows to {}", rows.len(), p.display());
                }
                _ => table::write_rows(io::stdout().lock(), &rows, format)?,
            }
            if let Some((k, d)) = runner::probability_violation(&rows) {
                return Err(CliError::Numerical(format!("p_T + p_R - 1 = {d:e} at sweep index {k}")));
            }
            Ok(())
        }
        Command::Check { verbose, seed, perturb } => {
            let mut ctx = CheckContext::new(seed);
            ctx.perturbation = perturb.as_deref().map(str::parse::<Perturbation>).transpose()?;
            let outcomes = selfcheck::run_checks(&ctx, exec);
            let failed = selfcheck::report(&mut io::stdout().lock(), &outcomes, verbose)?;
            if failed > 0 {
                return Err(CliError::CheckFailed { failed });
            }
            Ok(())
        }
        Command::Defaults { configuration } => {
            let kind = match configuration {
                Kind::Parallel => ConfigKind::Parallel,
                Kind::Perpendicular => ConfigKind::Perpendicular,
            };
            print!("{}", ExperimentConfig::defaults(kind).to_toml());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
