//! The `nmm` command-line tool: grids of densities and kernels, correlation
//! determinants, large-n limits, residual suites, the eigenvalue-gas sampler
//! and figure data, written as JSON or CSV.
//!
//! Exit status: 0 on success, 1 on I/O failure, 2 on invalid input, 3 when a
//! `verify` suite exceeds its tolerance.

pub mod cli;
pub mod commands;
pub mod output;
pub mod spec;
pub mod verify;

use std::ffi::OsString;
use std::fmt;

use clap::Parser;
use nmm_core::Complex64;

use crate::cli::{Cli, Command, FigureKind};
use crate::commands::SampleJob;
use crate::output::write_output;

pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "NKL_THREADS";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    pub fn io(e: impl fmt::Display) -> Self {
        Self { code: EXIT_IO, message: e.to_string() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self { code: EXIT_IO, message: message.into() }
    }
}

impl From<nmm_core::Error> for Failure {
    fn from(e: nmm_core::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, Failure> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let k: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&k| k > 0)
            .ok_or_else(|| Failure::usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
        b = b.num_threads(k);
    }
    b.build().map_err(Failure::io)
}

/// Runs one command line and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = thread_pool().and_then(|pool| pool.install(|| execute(cli.command)));
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {f}");
            f.code
        }
    }
}

fn execute(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Density { model, grid, output } => {
            let r = commands::density_grid(&model.resolve()?, &grid)?;
            write_output(&r.render(output.format)?, output.out.as_deref())?;
        }
        Command::Kernel { model, w_re, w_im, grid, output } => {
            let r = commands::kernel_grid(&model.resolve()?, Complex64::new(w_re, w_im), &grid)?;
            write_output(&r.render(output.format)?, output.out.as_deref())?;
        }
        Command::Correlation { model, points, output } => {
            let r = commands::correlation_points(&model.resolve()?, &points)?;
            write_output(&r.render(output.format)?, output.out.as_deref())?;
        }
        Command::Limits { model, regime, phi, z0_re, z0_im, grid, output } => {
            let r = commands::limits(&model.resolve()?, regime, phi, Complex64::new(z0_re, z0_im), &grid)?;
            write_output(&r.render(output.format)?, output.out.as_deref())?;
        }
        Command::Verify { model, samples, seed, tol, output } => {
            let (r, pass) = commands::verify(&model.resolve()?, samples, seed, &tol)?;
            write_output(&r.render(output.format)?, output.out.as_deref())?;
            if !pass {
                eprintln!("verification failed");
                return Ok(EXIT_VERIFY);
            }
        }
        Command::Sample { model, sweeps, burnin, thin, step, seed, grid, snapshots, output } => {
            let job = SampleJob { sweeps, burnin, thin, step, seed };
            let (r, s) = commands::sample(&model.resolve()?, &job, &grid)?;
            if let Some(path) = snapshots {
                write_output(&s.render(output.format)?, Some(&path))?;
            }
            write_output(&r.render(output.format)?, output.out.as_deref())?;
        }
        Command::Figure { kind } => {
            let (r, output) = match kind {
                FigureKind::FReal { t, range, output } => (commands::figure_f_real(t, &range)?, output),
                FigureKind::Gpm { t, count, output } => (commands::figure_gpm(t, count)?, output),
                FigureKind::ErfcProfile { t, n, phi, range, output } => {
                    (commands::figure_erfc_profile(t, n, phi, &range)?, output)
                }
                FigureKind::GwPhase { t, count, output } => (commands::figure_gw_phase(t, count)?, output),
            };
            write_output(&r.render(output.format)?, output.out.as_deref())?;
        }
    }
    Ok(0)
}
