//! Command-line surface. Every flag takes a single value; list-valued flags
//! are comma-separated strings so that a later occurrence replaces an
//! earlier one (config-file defaults are injected ahead of user flags).

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "hyperglass", version, about = "Geometrical optics of the hyperbolic medium n = 1/y")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trace a unit-speed ray and report conservation diagnostics.
    Trace(TraceArgs),
    /// Sample the horocyclic wave psi = A exp((1/2 - i lambda) <zeta, b>) on a grid.
    Field(FieldArgs),
    /// Constant-phase fronts (horocycles) of normal b.
    Fronts(FrontsArgs),
    /// Table of conical functions P_{-1/2 + i lambda}(cosh r).
    Legendre(LegendreArgs),
    /// Pseudosphere funnel mesh with soliton angle and sine-Gordon residual.
    Pseudosphere(PseudosphereArgs),
    /// Run the built-in verification suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Halfplane,
    Disk,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Output file, or `-` for stdout.
    #[arg(long, default_value = "-")]
    #[serde(skip)]
    pub output: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct TraceArgs {
    /// Half-plane start state `x,y,px,py`; momenta are rescaled to unit speed.
    #[arg(long, conflicts_with = "geodesic", required_unless_present = "geodesic", allow_hyphen_values = true)]
    pub start: Option<String>,
    /// `circle:X0,R` (start at the apex) or `vertical:X0` (start at height 1, moving up).
    #[arg(long)]
    pub geodesic: Option<String>,
    /// Arclength to trace.
    #[arg(long, default_value_t = 10.0)]
    pub smax: f64,
    /// Relative local error tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Emit this many equal arclength intervals instead of every accepted step.
    #[arg(long)]
    pub samples: Option<usize>,
    /// `disk` adds the disk-model image of each sample.
    #[arg(long, value_enum, default_value_t = Model::Halfplane)]
    pub model: Model,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct FieldArgs {
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    /// Normal point: disk angle (disk model) or real abscissa (half-plane), or `inf`.
    #[arg(long, default_value = "0")]
    pub b: String,
    /// Real amplitude constant A.
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    /// Grid coordinates are read in this model.
    #[arg(long, value_enum, default_value_t = Model::Disk)]
    pub model: Model,
    #[arg(long)]
    pub xmin: Option<f64>,
    #[arg(long)]
    pub xmax: Option<f64>,
    #[arg(long)]
    pub ymin: Option<f64>,
    #[arg(long)]
    pub ymax: Option<f64>,
    /// Grid step.
    #[arg(long, default_value_t = 0.05)]
    pub h: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct FrontsArgs {
    /// Comma-separated phase levels `<zeta, b>`.
    #[arg(long, allow_hyphen_values = true)]
    pub levels: String,
    /// Normal point: disk angle (disk model) or real abscissa (half-plane), or `inf`.
    #[arg(long, default_value = "0")]
    pub b: String,
    /// Points per polyline.
    #[arg(long, default_value_t = 128)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = Model::Disk)]
    pub model: Model,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct LegendreArgs {
    /// Comma-separated spectral parameters; each gives nu = 1/2 - i lambda.
    #[arg(long, default_value = "0.5,1,2,5,10", allow_hyphen_values = true)]
    pub lambdas: String,
    /// Comma-separated real exponents nu, tabulated as P_{-nu}.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub nus: String,
    /// Comma-separated radii r >= 0.
    #[arg(long, default_value = "0.1,0.5,1,2,5")]
    pub rs: String,
    /// Node cap of the doubling quadrature; rows that reach it are flagged.
    #[arg(long, default_value_t = 1 << 16)]
    pub max_nodes: usize,
    /// Relative agreement between successive doublings.
    #[arg(long, default_value_t = 1e-13)]
    pub quad_tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct PseudosphereArgs {
    /// Deepest parallel; the mesh runs from here up to the rim p = 0.
    #[arg(long, default_value_t = -3.0)]
    pub pmin: f64,
    /// Parallels.
    #[arg(long, default_value_t = 31)]
    pub np: usize,
    /// Meridians.
    #[arg(long, default_value_t = 32)]
    pub nq: usize,
    /// Step of the curvature spot-checks.
    #[arg(long, default_value_t = 1e-3)]
    pub curvature_h: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated suites: hypmodels, specfun, rays, beltrami.
    #[arg(long)]
    pub only: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

impl Command {
    pub fn output(&self) -> &OutputArgs {
        match self {
            Command::Trace(a) => &a.out,
            Command::Field(a) => &a.out,
            Command::Fronts(a) => &a.out,
            Command::Legendre(a) => &a.out,
            Command::Pseudosphere(a) => &a.out,
            Command::Verify(a) => &a.out,
        }
    }
}
