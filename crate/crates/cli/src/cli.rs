//! Flag definitions and their merge into [`Settings`].
//!
//! Precedence, lowest first: built-in defaults, `--config FILE`, flags.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use landau_core::{GaugeChoice, StencilOrder};

use crate::config::{load_config, AxisSpec, Branch, Settings};
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "landau",
    version,
    about = "Landau levels through canonical oscillator variables",
    allow_negative_numbers = true,
    term_width = 80
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct CommonArgs {
    /// Reduced Planck constant
    #[arg(long, global = true)]
    pub hbar: Option<f64>,

    /// Particle mass
    #[arg(long, global = true)]
    pub mass: Option<f64>,

    /// Elementary charge (positive)
    #[arg(long, global = true)]
    pub charge: Option<f64>,

    /// Speed of light
    #[arg(long, global = true)]
    pub cspeed: Option<f64>,

    /// Magnetic field strength
    #[arg(long = "B", global = true)]
    pub field: Option<f64>,

    /// Vector-potential gauge
    #[arg(long, global = true, value_parser = parse_gauge)]
    pub gauge: Option<GaugeChoice>,

    /// Square grid as min:max:npts, e.g. -10:10:257
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub grid: Option<AxisSpec>,

    /// x axis as min:max:npts (overrides --grid)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub gridx: Option<AxisSpec>,

    /// y axis as min:max:npts (overrides --grid)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub gridy: Option<AxisSpec>,

    /// Finite-difference stencil order
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(2..=4))]
    pub order: Option<u32>,

    /// Seed for randomized starts
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    /// Print the manifest to stdout
    #[arg(long, global = true)]
    pub json: bool,

    /// JSON settings file or a previous run's manifest.json
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

fn parse_gauge(s: &str) -> Result<GaugeChoice, String> {
    s.parse()
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample a closed-form wavefunction on the grid
    Eval(EvalArgs),
    /// Lowest eigenvalues of the hard-wall Hamiltonian
    Spectrum(SpectrumArgs),
    /// Numeric vs analytic integral transform on the probe grid
    Transform(TransformArgs),
    /// Classical cyclotron orbit with its conserved quantities
    Orbit(OrbitArgs),
    /// Run the invariant suite; exit 1 on any failure
    Verify(VerifyArgs),
    /// Print derived constants
    Params(ParamsArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eval(_) => "eval",
            Command::Spectrum(_) => "spectrum",
            Command::Transform(_) => "transform",
            Command::Orbit(_) => "orbit",
            Command::Verify(_) => "verify",
            Command::Params(_) => "params",
        }
    }
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct EvalArgs {
    /// Landau level
    #[arg(long)]
    pub n: Option<usize>,

    /// Eigenvalue of Pbar (plane-wave momentum)
    #[arg(long)]
    pub k: Option<f64>,

    /// beta times the eigenvalue of Qbar (delta-line position)
    #[arg(long)]
    pub kprime: Option<f64>,

    /// Evaluate the two-term non-free state instead of the Landau state
    #[arg(long)]
    pub nonfree: bool,

    /// Plane-wave weight as re,im
    #[arg(long, allow_hyphen_values = true, value_parser = parse_pair)]
    pub c_plane: Option<[f64; 2]>,

    /// Delta-line weight as re,im
    #[arg(long, allow_hyphen_values = true, value_parser = parse_pair)]
    pub c_delta: Option<[f64; 2]>,

    /// Also write density.png
    #[arg(long)]
    pub heatmap: bool,
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [re, im] => Ok([
            re.trim().parse().map_err(|_| format!("bad real part {re:?}"))?,
            im.trim().parse().map_err(|_| format!("bad imaginary part {im:?}"))?,
        ]),
        [re] => Ok([re.trim().parse().map_err(|_| format!("bad number {re:?}"))?, 0.0]),
        _ => Err(format!("expected re,im, got {s:?}")),
    }
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct SpectrumArgs {
    /// Number of eigenvalues
    #[arg(long)]
    pub n_eigs: Option<usize>,

    /// Extra subspace vectors beyond n-eigs
    #[arg(long)]
    pub guard: Option<usize>,

    /// Chebyshev filter degree
    #[arg(long)]
    pub degree: Option<usize>,

    /// Residual tolerance in units of hbar omega_c
    #[arg(long)]
    pub tol: Option<f64>,

    /// Iteration cap
    #[arg(long)]
    pub max_iter: Option<usize>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct TransformArgs {
    #[arg(long, value_enum)]
    pub branch: Option<Branch>,

    #[arg(long)]
    pub n: Option<usize>,

    #[arg(long)]
    pub k: Option<f64>,

    #[arg(long)]
    pub kprime: Option<f64>,

    /// Regulator widths, strictly decreasing, comma separated
    #[arg(long, value_delimiter = ',')]
    pub epsilons: Option<Vec<f64>>,

    /// Quadrature half-width in magnetic lengths
    #[arg(long)]
    pub half_width: Option<f64>,

    /// Quadrature nodes per magnetic length
    #[arg(long)]
    pub nodes_per_unit: Option<usize>,

    /// Largest accepted |numeric - reference|
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct OrbitArgs {
    #[arg(long)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub y0: Option<f64>,
    #[arg(long)]
    pub vx0: Option<f64>,
    #[arg(long)]
    pub vy0: Option<f64>,

    /// Time step (default: cyclotron period / 1000)
    #[arg(long)]
    pub dt: Option<f64>,

    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct VerifyArgs {
    /// Grid spacing of the operator checks
    #[arg(long)]
    pub h: Option<f64>,

    /// Expected convergence order
    #[arg(long)]
    pub expect_order: Option<u32>,

    /// Flip the sign of the Hamiltonian's cross term (fault injection)
    #[arg(long)]
    pub break_gauge: bool,
}

#[derive(Args, Debug)]
pub struct ParamsArgs {
    /// Number of Landau levels to list
    #[arg(long)]
    pub levels: Option<usize>,
}

/// Builds the effective settings for `cli`.
pub fn resolve(cli: &Cli) -> Result<Settings, CliError> {
    let mut s = match &cli.common.config {
        Some(path) => load_config(path, cli.command.name())?,
        None => Settings::default(),
    };
    apply_common(&mut s, &cli.common)?;
    match &cli.command {
        Command::Eval(a) => {
            let e = &mut s.eval;
            set(&mut e.n, a.n.map(Some));
            set(&mut e.k, a.k);
            set(&mut e.kprime, a.kprime);
            e.nonfree |= a.nonfree;
            e.heatmap |= a.heatmap;
            set(&mut e.c_plane, a.c_plane);
            set(&mut e.c_delta, a.c_delta);
        }
        Command::Spectrum(a) => {
            let p = &mut s.spectrum;
            set(&mut p.n_eigs, a.n_eigs);
            set(&mut p.guard, a.guard.map(Some));
            set(&mut p.degree, a.degree);
            set(&mut p.tol, a.tol);
            set(&mut p.max_iter, a.max_iter);
        }
        Command::Transform(a) => {
            let t = &mut s.transform;
            set(&mut t.branch, a.branch);
            set(&mut t.n, a.n);
            set(&mut t.k, a.k);
            set(&mut t.kprime, a.kprime);
            set(&mut t.schedule.epsilons, a.epsilons.clone());
            set(&mut t.schedule.half_width, a.half_width.map(Some));
            set(&mut t.schedule.nodes_per_unit, a.nodes_per_unit);
            set(&mut t.tolerance, a.tolerance);
        }
        Command::Orbit(a) => {
            let o = &mut s.orbit;
            set(&mut o.x0, a.x0);
            set(&mut o.y0, a.y0);
            set(&mut o.vx0, a.vx0);
            set(&mut o.vy0, a.vy0);
            set(&mut o.dt, a.dt.map(Some));
            set(&mut o.steps, a.steps);
        }
        Command::Verify(a) => {
            let v = &mut s.verify;
            set(&mut v.h, a.h);
            set(&mut v.expect_order, a.expect_order.map(Some));
            v.break_gauge |= a.break_gauge;
        }
        Command::Params(a) => set(&mut s.params.levels, a.levels),
    }
    Ok(s)
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn apply_common(s: &mut Settings, c: &CommonArgs) -> Result<(), CliError> {
    set(&mut s.physics.hbar, c.hbar);
    set(&mut s.physics.mass, c.mass);
    set(&mut s.physics.charge, c.charge);
    set(&mut s.physics.cspeed, c.cspeed);
    set(&mut s.physics.field, c.field);
    set(&mut s.gauge, c.gauge);
    set(&mut s.seed, c.seed);
    if let Some(order) = c.order {
        s.order = StencilOrder::from_order(order)
            .ok_or_else(|| CliError::Usage(format!("--order must be 2 or 4, got {order}")))?;
    }
    if let Some(g) = c.grid {
        s.grid.x_min = g.min;
        s.grid.x_max = g.max;
        s.grid.nx = g.n;
        s.grid.y_min = g.min;
        s.grid.y_max = g.max;
        s.grid.ny = g.n;
    }
    if let Some(g) = c.gridx {
        s.grid.x_min = g.min;
        s.grid.x_max = g.max;
        s.grid.nx = g.n;
    }
    if let Some(g) = c.gridy {
        s.grid.y_min = g.min;
        s.grid.y_max = g.max;
        s.grid.ny = g.n;
    }
    Ok(())
}
