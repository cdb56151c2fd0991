//! Command-line front end for the cavity-walk simulator.
//!
//! Each subcommand reads its parameters from `--config <file>` (JSON, or a
//! run manifest from a previous run), with individual flags overriding the
//! file. Angles are given in units of π everywhere. Outputs land in `--out`
//! as deterministic CSV/JSON plus a `run-manifest.json` that replays the run
//! when fed back through `--config`.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 numeric failure,
//! 4 I/O failure.

mod cli;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cli::config::{
    load_spec, BoundarySpec, CoinInit, EigsSpec, MomentScanSpec, PhaseDiagramSpec, SpectrumSpec,
    WalkSpec, WindingSpec,
};
use cli::{run, CliError};

#[derive(Parser)]
#[command(
    name = "cavity-walk",
    version,
    about = "Discrete-time photonic quantum walk simulator"
)]
struct Cli {
    /// JSON experiment config, or a run manifest from a previous run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Size of the worker thread pool (default: number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override the master seed of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Use practical cavity parameters: lossy scattering plus angle noise.
    #[arg(long, global = true)]
    realistic: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct AngleArgs {
    /// θ1 in units of π.
    #[arg(long, allow_negative_numbers = true)]
    theta1: Option<f64>,
    /// θ2 in units of π.
    #[arg(long, allow_negative_numbers = true)]
    theta2: Option<f64>,
}

#[derive(Args, Default)]
struct TwoRegionArgs {
    /// Left-region θ1 in units of π.
    #[arg(long, allow_negative_numbers = true)]
    theta1_left: Option<f64>,
    /// Left-region θ2 in units of π.
    #[arg(long, allow_negative_numbers = true)]
    theta2_left: Option<f64>,
    /// Right-region θ1 in units of π.
    #[arg(long, allow_negative_numbers = true)]
    theta1_right: Option<f64>,
    /// Right-region θ2 in units of π.
    #[arg(long, allow_negative_numbers = true)]
    theta2_right: Option<f64>,
}

#[derive(Args, Default)]
struct NoiseArgs {
    /// Angle-noise half-width in units of π.
    #[arg(long, allow_negative_numbers = true)]
    noise: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a homogeneous walk and record the density over time.
    Walk {
        #[command(flatten)]
        angles: AngleArgs,
        /// Number of walk steps.
        #[arg(long)]
        steps: Option<u32>,
        /// Record the density every this many steps.
        #[arg(long)]
        stride: Option<u32>,
        /// Initial coin state.
        #[arg(long, value_enum)]
        coin: Option<CoinInit>,
        #[command(flatten)]
        noise: NoiseArgs,
    },
    /// Evolve a two-region walk with a domain wall; mean final density.
    Boundary {
        #[command(flatten)]
        angles: TwoRegionArgs,
        /// Number of walk steps.
        #[arg(long)]
        steps: Option<u32>,
        /// Disorder realizations to average over.
        #[arg(long)]
        realizations: Option<u32>,
        #[command(flatten)]
        noise: NoiseArgs,
    },
    /// Bulk band structure E(k) and the planar Bloch vector.
    Spectrum {
        #[command(flatten)]
        angles: AngleArgs,
        /// Number of k samples over k/π ∈ [-1/2, 1/2].
        #[arg(long)]
        k_points: Option<usize>,
    },
    /// Winding-number pair over a (θ1, θ2) grid.
    PhaseDiagram {
        /// Grid points per axis over [-2π, 2π].
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Winding-number pair at one (θ1, θ2).
    Winding {
        #[command(flatten)]
        angles: AngleArgs,
    },
    /// Scan the second moment of the output density over θ2.
    MomentScan {
        /// θ1 in units of π.
        #[arg(long, allow_negative_numbers = true)]
        theta1: Option<f64>,
        /// First θ2 of the scan, in units of π.
        #[arg(long, allow_negative_numbers = true)]
        theta2_start: Option<f64>,
        /// Last θ2 of the scan, in units of π.
        #[arg(long, allow_negative_numbers = true)]
        theta2_end: Option<f64>,
        /// Number of scan points.
        #[arg(long)]
        points: Option<usize>,
        /// Number of walk steps per point.
        #[arg(long)]
        steps: Option<u32>,
        /// Disorder realizations per point.
        #[arg(long)]
        realizations: Option<u32>,
        /// Divide lossy densities by their total before taking the moment.
        #[arg(long)]
        renormalize: bool,
        #[command(flatten)]
        noise: NoiseArgs,
    },
    /// Diagonalize the step operator on a two-wall ring.
    Eigs {
        #[command(flatten)]
        angles: TwoRegionArgs,
        /// Number of ring sites (even, >= 8).
        #[arg(long)]
        ring_size: Option<usize>,
        /// Quasienergy tolerance for E ≈ 0 / E ≈ π classification.
        #[arg(long, allow_negative_numbers = true)]
        e_tol: Option<f64>,
        /// Minimum near-wall probability for a boundary mode.
        #[arg(long, allow_negative_numbers = true)]
        loc_threshold: Option<f64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Walk { .. } => "walk",
            Command::Boundary { .. } => "boundary",
            Command::Spectrum { .. } => "spectrum",
            Command::PhaseDiagram { .. } => "phase-diagram",
            Command::Winding { .. } => "winding",
            Command::MomentScan { .. } => "moment-scan",
            Command::Eigs { .. } => "eigs",
        }
    }
}

/// Spec from `--config` when given, defaults otherwise.
fn base_spec<T>(cli: &Cli) -> Result<T, CliError>
where
    T: serde::de::DeserializeOwned + Default,
{
    match &cli.config {
        Some(path) => load_spec(path, cli.command.name()),
        None => Ok(T::default()),
    }
}

fn set<T: Copy>(target: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *target = v;
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let out = cli.out.clone();
    match &cli.command {
        Command::Walk {
            angles,
            steps,
            stride,
            coin,
            noise,
        } => {
            let mut spec: WalkSpec = base_spec(cli)?;
            set(&mut spec.theta1_over_pi, angles.theta1);
            set(&mut spec.theta2_over_pi, angles.theta2);
            set(&mut spec.steps, *steps);
            set(&mut spec.record_stride, *stride);
            set(&mut spec.coin, *coin);
            set(&mut spec.hardware.noise_half_width_over_pi, noise.noise);
            set(&mut spec.hardware.seed, cli.seed);
            spec.hardware.realistic |= cli.realistic;
            run::run_walk(spec, &out)
        }
        Command::Boundary {
            angles,
            steps,
            realizations,
            noise,
        } => {
            let mut spec: BoundarySpec = base_spec(cli)?;
            set(&mut spec.theta1_left_over_pi, angles.theta1_left);
            set(&mut spec.theta2_left_over_pi, angles.theta2_left);
            set(&mut spec.theta1_right_over_pi, angles.theta1_right);
            set(&mut spec.theta2_right_over_pi, angles.theta2_right);
            set(&mut spec.steps, *steps);
            set(&mut spec.realizations, *realizations);
            set(&mut spec.hardware.noise_half_width_over_pi, noise.noise);
            set(&mut spec.hardware.seed, cli.seed);
            spec.hardware.realistic |= cli.realistic;
            run::run_boundary(spec, &out)
        }
        Command::Spectrum { angles, k_points } => {
            let mut spec: SpectrumSpec = base_spec(cli)?;
            set(&mut spec.theta1_over_pi, angles.theta1);
            set(&mut spec.theta2_over_pi, angles.theta2);
            set(&mut spec.k_points, *k_points);
            run::run_spectrum(spec, &out)
        }
        Command::PhaseDiagram { resolution } => {
            let mut spec: PhaseDiagramSpec = base_spec(cli)?;
            set(&mut spec.resolution, *resolution);
            run::run_phase_diagram(spec, &out)
        }
        Command::Winding { angles } => {
            let mut spec: WindingSpec = base_spec(cli)?;
            set(&mut spec.theta1_over_pi, angles.theta1);
            set(&mut spec.theta2_over_pi, angles.theta2);
            run::run_winding(spec, &out)
        }
        Command::MomentScan {
            theta1,
            theta2_start,
            theta2_end,
            points,
            steps,
            realizations,
            renormalize,
            noise,
        } => {
            let mut spec: MomentScanSpec = base_spec(cli)?;
            set(&mut spec.theta1_over_pi, *theta1);
            set(&mut spec.theta2_start_over_pi, *theta2_start);
            set(&mut spec.theta2_end_over_pi, *theta2_end);
            set(&mut spec.points, *points);
            set(&mut spec.steps, *steps);
            set(&mut spec.realizations, *realizations);
            set(&mut spec.hardware.noise_half_width_over_pi, noise.noise);
            set(&mut spec.hardware.seed, cli.seed);
            spec.renormalize |= *renormalize;
            spec.hardware.realistic |= cli.realistic;
            run::run_moment_scan(spec, &out)
        }
        Command::Eigs {
            angles,
            ring_size,
            e_tol,
            loc_threshold,
        } => {
            let mut spec: EigsSpec = base_spec(cli)?;
            set(&mut spec.theta1_left_over_pi, angles.theta1_left);
            set(&mut spec.theta2_left_over_pi, angles.theta2_left);
            set(&mut spec.theta1_right_over_pi, angles.theta1_right);
            set(&mut spec.theta2_right_over_pi, angles.theta2_right);
            set(&mut spec.ring_size, *ring_size);
            set(&mut spec.e_tol, *e_tol);
            set(&mut spec.loc_threshold, *loc_threshold);
            spec.realistic |= cli.realistic;
            run::run_eigs(spec, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error (config): cannot set thread pool size: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error ({}): {e}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
