//! Command-line definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::spec::{GridSpec, RangeSpec};

/// `sqrt(5) - 2`, the parameter used for the reference figures.
pub const FIGURE_T: f64 = 0.236_067_977_499_789_7;

#[derive(Parser, Debug)]
#[command(
    name = "nmm",
    version,
    about = "Kernels, densities, correlation functions and large-n limits of the Gaussian normal matrix model"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Density rho_n on a grid.
    Density {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "-2:2:41:-2:2:41", allow_hyphen_values = true)]
        grid: GridSpec,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Normalized kernel K_n(w, z)/n for fixed w on a grid of z.
    Kernel {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        w_re: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        w_im: f64,
        #[arg(long, default_value = "-2:2:41:-2:2:41", allow_hyphen_values = true)]
        grid: GridSpec,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Correlation determinants of the leading k points, k = 1..m.
    Correlation {
        #[command(flatten)]
        model: ModelArgs,
        /// A point `re,im`; repeat for each point.
        #[arg(long = "point", required = true, allow_hyphen_values = true)]
        points: Vec<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Finite-n density at scaled offsets next to its large-n limit.
    Limits {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value = "edge")]
        regime: RegimeArg,
        /// Boundary parameter of the edge point.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phi: f64,
        /// Base point for the inside and outside regimes.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        z0_re: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        z0_im: f64,
        /// Grid of offsets `a`.
        #[arg(long, default_value = "-2:2:21:-2:2:21", allow_hyphen_values = true)]
        grid: GridSpec,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact-identity and closed-form residual suites.
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        /// Random (w, z) pairs in the disk |z| <= 2.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        tol: Tolerances,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Metropolis sampling of the eigenvalue gas with a density histogram.
    Sample {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 20_000)]
        sweeps: usize,
        /// Defaults to a tenth of the sweeps.
        #[arg(long)]
        burnin: Option<usize>,
        #[arg(long, default_value_t = 1)]
        thin: usize,
        /// Proposal standard deviation; defaults to 1/sqrt(n).
        #[arg(long)]
        step: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "-2:2:20:-2:2:20", allow_hyphen_values = true)]
        grid: GridSpec,
        /// Also write every snapshot to this file, in the same format.
        #[arg(long)]
        snapshots: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Plot data for the reference figures.
    Figure {
        #[command(subcommand)]
        kind: FigureKind,
    },
}

#[derive(Subcommand, Debug)]
pub enum FigureKind {
    /// f on the real line.
    FReal {
        #[arg(long, default_value_t = FIGURE_T)]
        t: f64,
        #[arg(long, default_value = "-3:3:601", allow_hyphen_values = true)]
        range: RangeSpec,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// g+ and g- along the boundary ellipse.
    Gpm {
        #[arg(long, default_value_t = FIGURE_T)]
        t: f64,
        #[arg(long, default_value_t = 360)]
        count: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// 2 pi rho_n across the edge against erfc(sqrt2 a).
    ErfcProfile {
        #[arg(long, default_value_t = 0.3)]
        t: f64,
        #[arg(long, default_value_t = 400)]
        n: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phi: f64,
        #[arg(long, default_value = "-2:2:41", allow_hyphen_values = true)]
        range: RangeSpec,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Phase of -g_w along the boundary ellipse.
    GwPhase {
        #[arg(long, default_value_t = FIGURE_T)]
        t: f64,
        #[arg(long, default_value_t = 360)]
        count: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Either `--t` (canonical potential) or the general potential
/// `t0, t1, t2`; never both.
#[derive(Args, Debug, Clone, Default)]
pub struct ModelArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t1_re: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t1_im: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t2_re: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t2_im: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Inside,
    Edge,
    Outside,
}

#[derive(Args, Debug, Clone)]
pub struct Tolerances {
    /// Kernel identities and the telescoped sum.
    #[arg(long, default_value_t = 1e-8)]
    pub tol_identity: f64,
    /// Single steps of the Christoffel-Darboux recursion.
    #[arg(long, default_value_t = 1e-10)]
    pub tol_recursion: f64,
    /// Recurrence against the Hermite closed form.
    #[arg(long, default_value_t = 1e-9)]
    pub tol_closed_form: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol_derivative: f64,
    /// Relative error of the normalization integral (n <= 16 only).
    #[arg(long, default_value_t = 1e-8)]
    pub tol_normalization: f64,
}
