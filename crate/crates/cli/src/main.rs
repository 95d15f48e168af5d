use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use twistor_core::verify::{all_passed, emit_report, run_suite, Format, Suite, SuiteConfig};

/// Runs seeded verification suites for twistor spaces of pseudo-spheres.
///
/// Exit status: 0 when every claim passes (or is informational), 1 when any
/// claim fails, 2 on a configuration error.
#[derive(Debug, Parser)]
#[command(name = "twistor-verify", version)]
struct Args {
    /// Suite to run: killing, index, metric14, spectrum, integrability,
    /// weyl, conformal, sphere_curvature, domega_threeway, domega_bundle,
    /// tstar, dvarpi_type, sigma_holo, s64_nearly_kahler or all.
    #[arg(long, default_value = "all")]
    suite: String,

    /// Positive half-dimension of the base; requires --q.
    #[arg(long, requires = "q")]
    p: Option<usize>,

    /// Negative half-dimension of the base; requires --p.
    #[arg(long, requires = "p")]
    q: Option<usize>,

    #[arg(long, default_value_t = 100)]
    trials: usize,

    #[arg(long, default_value_t = 42)]
    seed: u64,

    #[arg(long, default_value_t = 1e-3)]
    fd_step: f64,

    /// Replaces the pinned tolerance of every exact-arithmetic claim.
    #[arg(long)]
    tol: Option<f64>,

    /// Replaces the pinned tolerance of every finite-difference claim.
    #[arg(long)]
    tol_fd: Option<f64>,

    /// json or text.
    #[arg(long, default_value = "text")]
    format: String,

    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn config(args: &Args) -> twistor_core::Result<(SuiteConfig, Format)> {
    let cfg = SuiteConfig {
        suite: args.suite.parse::<Suite>()?,
        signature: args.p.zip(args.q),
        trials: args.trials,
        seed: args.seed,
        fd_step: args.fd_step,
        tol_exact: args.tol,
        tol_fd: args.tol_fd,
    };
    cfg.validate()?;
    Ok((cfg, args.format.parse()?))
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (cfg, format) = match config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let reports = match run_suite(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = emit_report(&cfg, &reports, format);
    match &args.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(if all_passed(&reports) { 0 } else { 1 })
}
