//! Front end for `lmmse-mismatch`: flags, CSV, SVG and the run manifest.

pub mod config;
pub mod csv_io;
pub mod error;
pub mod manifest;
pub mod svg;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};
use lmmse_core::experiment::run_sweep_with_threads;

pub use config::{resolve, Args};
pub use error::{CliError, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE};

/// Parses, sweeps and writes outputs. `threads_env` is the raw value of
/// `LMMSE_THREADS`.
pub fn run(args: &Args, threads_env: Option<&str>) -> Result<(), CliError> {
    let cfg = resolve(args)?;
    let threads = config::threads_from_env(threads_env)?;
    let records = run_sweep_with_threads(&cfg, threads)?;

    match &args.out_csv {
        Some(path) => {
            csv_io::write_csv(&records, path)?;
            let m = manifest::RunManifest::new(&cfg, &records, threads);
            manifest::write_manifest(&m, &manifest::manifest_path(path))?;
        }
        None => csv_io::write_records(&records, std::io::stdout().lock())?,
    }
    if let Some(path) = &args.out_svg {
        svg::render_svg(&records, path)?;
    }

    let failed = records.iter().filter(|r| r.flags.failed).count();
    if failed > 0 {
        for r in records.iter().filter(|r| r.flags.failed) {
            eprintln!(
                "lmmse-mismatch: p_S={} n={}: {}",
                r.p_s,
                r.n,
                r.error.as_deref().unwrap_or("failed")
            );
        }
        return Err(CliError::FailedCells(failed));
    }
    Ok(())
}

/// Full command-line entry point; returns the process exit status.
pub fn main_with<I, T>(argv: I, threads_env: Option<&str>) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    if argv.len() <= 1 {
        let _ = writeln!(std::io::stderr(), "{}", Args::command().render_help());
        return EXIT_USAGE;
    }
    let args = match Args::try_parse_from(&argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match run(&args, threads_env) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("lmmse-mismatch: {e}");
            e.exit_code()
        }
    }
}
