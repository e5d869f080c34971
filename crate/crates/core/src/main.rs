use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use fracdiff::harness::output::write_json_17;
use fracdiff::harness::run::{mc_to_output, run_eigs, run_residual, solve_to_output};
use fracdiff::harness::verify::{run_verify, Level, VerifyOptions};
use fracdiff::harness::ExperimentConfig;
use fracdiff::special::mittag_leffler;
use fracdiff::FracError;

#[derive(Parser)]
#[command(
    name = "fracdiff",
    version,
    about = "Space-time fractional diffusion on bounded domains"
)]
struct Cli {
    /// Print a config template with every default spelled out.
    #[arg(long)]
    print_config: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate E_beta(x).
    Ml {
        beta: f64,
        #[arg(allow_hyphen_values = true)]
        x: f64,
    },
    /// Build the Dirichlet eigensystem and write it as JSON.
    Eigs { config: PathBuf },
    /// Spectral, subordination and Monte Carlo solutions as CSV.
    Solve { config: PathBuf },
    /// Monte Carlo estimates only, as JSON.
    Mc { config: PathBuf },
    /// Caputo residual of the Mittag-Leffler time factors.
    Residual { config: PathBuf },
    /// Run the acceptance checks.
    Verify {
        #[arg(long, conflicts_with = "full")]
        fast: bool,
        #[arg(long)]
        full: bool,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

const EXIT_VERIFY: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn fail(e: &FracError) -> ExitCode {
    let body = json!({ "error": e.kind(), "message": e.to_string() });
    eprintln!("{body}");
    ExitCode::from(if e.is_config_error() { EXIT_CONFIG } else { EXIT_NUMERIC })
}

fn init_threads() -> Result<(), FracError> {
    let Ok(v) = std::env::var("FRACDIFF_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| FracError::Config(format!("FRACDIFF_THREADS must be a non-negative integer (got `{v}`)")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| FracError::Config(format!("thread pool: {e}")))
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<(), FracError> {
    let mut out = std::io::stdout().lock();
    write_json_17(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn run(cmd: Command) -> Result<ExitCode, FracError> {
    match cmd {
        Command::Ml { beta, x } => {
            let v = mittag_leffler(beta, x)?;
            print_json(&json!({ "beta": beta, "x": x, "value": v.value, "method": v.method }))?;
        }
        Command::Eigs { config } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let summary = run_eigs(&cfg)?;
            if cfg.eigensystem_path.is_some() {
                print_json(&summary)?;
            }
        }
        Command::Solve { config } => solve_to_output(&ExperimentConfig::from_file(&config)?)?,
        Command::Mc { config } => mc_to_output(&ExperimentConfig::from_file(&config)?)?,
        Command::Residual { config } => print_json(&run_residual(&ExperimentConfig::from_file(&config)?)?)?,
        Command::Verify { full, inject_fault, .. } => {
            let level = if full { Level::Full } else { Level::Fast };
            let results = run_verify(&VerifyOptions { level, inject_fault });
            let mut out = std::io::stdout().lock();
            for r in &results {
                writeln!(out, "{}", r.line())?;
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            writeln!(out, "{} of {} checks passed", results.len() - failed, results.len())?;
            if failed > 0 {
                return Ok(ExitCode::from(EXIT_VERIFY));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        return fail(&e);
    }
    if cli.print_config {
        let text = serde_json::to_string_pretty(&ExperimentConfig::template()).expect("template serialises");
        println!("{text}");
        return ExitCode::SUCCESS;
    }
    let Some(cmd) = cli.command else {
        eprintln!(
            "{}",
            json!({ "error": "config_error", "message": "no subcommand given; see --help" })
        );
        return ExitCode::from(EXIT_CONFIG);
    };
    match run(cmd) {
        Ok(code) => code,
        Err(e) => fail(&e),
    }
}
