//! JSON experiment specifications and their translation into library types.
//!
//! All angles in config files and on the command line are given in units of
//! π (e.g. `"theta1_over_pi": -0.25` means θ1 = -π/4) and converted to
//! radians exactly once, here. A config file is either a bare spec object or
//! a run manifest produced by an earlier run; in the latter case the nested
//! `config` object is used, which makes every manifest replayable as-is.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use cavity_walk::model::{CavityScattering, CoinProfile, NoiseModel, WalkConfig};

use super::CliError;

/// Noise half-width used by the practical-hardware preset, in units of π.
pub const REALISTIC_NOISE_OVER_PI: f64 = 0.05;

fn d_true() -> bool {
    true
}
fn d_steps() -> u32 {
    15
}
fn d_stride() -> u32 {
    3
}
fn d_scan_steps() -> u32 {
    14
}
fn d_points() -> usize {
    201
}
fn d_k_points() -> usize {
    256
}
fn d_resolution() -> usize {
    33
}
fn d_ring_size() -> usize {
    40
}
fn d_realizations() -> u32 {
    1
}
fn d_e_tol() -> f64 {
    cavity_walk::spectral::DEFAULT_E_TOL
}
fn d_loc_threshold() -> f64 {
    cavity_walk::spectral::DEFAULT_LOC_THRESHOLD
}
fn d_theta1() -> f64 {
    -0.25
}
fn d_theta2() -> f64 {
    0.375
}
fn d_theta1_right() -> f64 {
    0.75
}
fn d_theta2_right() -> f64 {
    -0.625
}
fn d_scan_theta1() -> f64 {
    1.0 / 3.0
}
fn d_scan_start() -> f64 {
    -2.0
}
fn d_scan_end() -> f64 {
    2.0
}

/// Initial coin state of the walker.
#[derive(Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CoinInit {
    /// (|R⟩ + |L⟩)/√2.
    #[default]
    Balanced,
    /// |R⟩.
    Right,
    /// |L⟩.
    Left,
}

impl CoinInit {
    pub fn amplitudes(self) -> [C64; 2] {
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        match self {
            CoinInit::Balanced => [h, h],
            CoinInit::Right => [one, z],
            CoinInit::Left => [z, one],
        }
    }
}

/// Noise/loss knobs shared by the dynamical commands.
#[derive(Serialize, Deserialize, Debug, Clone, Copy, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct HardwareSpec {
    /// Use the practical cavity reflection/transmission coefficients
    /// instead of the lossless limit.
    #[serde(default)]
    pub realistic: bool,
    /// Half-width of the uniform per-layer angle fluctuation, in units of π.
    /// When `realistic` is set and this is 0, it defaults to 0.05.
    #[serde(default)]
    pub noise_half_width_over_pi: f64,
    /// Independent noise draw per site (true) or one draw per layer (false).
    #[serde(default = "d_true")]
    pub per_site_noise: bool,
    /// Master seed for the noise stream and ensemble realizations.
    #[serde(default)]
    pub seed: u64,
}

impl Default for HardwareSpec {
    fn default() -> Self {
        Self {
            realistic: false,
            noise_half_width_over_pi: 0.0,
            per_site_noise: true,
            seed: 0,
        }
    }
}

impl HardwareSpec {
    /// Fill in preset-dependent defaults; the result is what the manifest
    /// records.
    pub fn resolved(mut self) -> Self {
        if self.realistic && self.noise_half_width_over_pi == 0.0 {
            self.noise_half_width_over_pi = REALISTIC_NOISE_OVER_PI;
        }
        self
    }

    pub fn scattering(&self) -> CavityScattering {
        if self.realistic {
            CavityScattering::realistic()
        } else {
            CavityScattering::ideal()
        }
    }

    pub fn noise(&self) -> Result<Option<NoiseModel>, CliError> {
        if self.noise_half_width_over_pi == 0.0 {
            return Ok(None);
        }
        Ok(Some(NoiseModel::new(
            self.noise_half_width_over_pi * PI,
            self.per_site_noise,
            self.seed,
        )?))
    }
}

/// Homogeneous-lattice trajectory: density after every recorded step.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct WalkSpec {
    #[serde(default = "d_theta1")]
    pub theta1_over_pi: f64,
    #[serde(default = "d_theta2")]
    pub theta2_over_pi: f64,
    #[serde(default = "d_steps")]
    pub steps: u32,
    /// Record the density every this many steps (step 0 and the final step
    /// are always recorded).
    #[serde(default = "d_stride")]
    pub record_stride: u32,
    #[serde(default)]
    pub x0: i64,
    #[serde(default)]
    pub coin: CoinInit,
    #[serde(default)]
    pub hardware: HardwareSpec,
}

/// Two-region lattice with one domain wall: ensemble-mean final density.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    #[serde(default = "d_theta1")]
    pub theta1_left_over_pi: f64,
    #[serde(default = "d_theta2")]
    pub theta2_left_over_pi: f64,
    #[serde(default = "d_theta1_right")]
    pub theta1_right_over_pi: f64,
    #[serde(default = "d_theta2_right")]
    pub theta2_right_over_pi: f64,
    #[serde(default)]
    pub wall: i64,
    #[serde(default = "d_steps")]
    pub steps: u32,
    #[serde(default = "d_realizations")]
    pub realizations: u32,
    #[serde(default)]
    pub x0: i64,
    #[serde(default)]
    pub coin: CoinInit,
    #[serde(default)]
    pub hardware: HardwareSpec,
}

/// Bulk band structure E(k) with the planar Bloch vector.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSpec {
    #[serde(default = "d_theta1")]
    pub theta1_over_pi: f64,
    #[serde(default = "d_theta2")]
    pub theta2_over_pi: f64,
    /// Number of k samples over k/π ∈ [-1/2, 1/2], endpoints included.
    #[serde(default = "d_k_points")]
    pub k_points: usize,
}

/// Winding-number pair over a (θ1, θ2) grid.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PhaseDiagramSpec {
    /// Grid points per axis over [-2π, 2π], endpoints included.
    #[serde(default = "d_resolution")]
    pub resolution: usize,
}

/// Winding-number pair at a single (θ1, θ2).
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct WindingSpec {
    #[serde(default = "d_theta1")]
    pub theta1_over_pi: f64,
    #[serde(default = "d_theta2")]
    pub theta2_over_pi: f64,
}

/// Second moment of the output density scanned over θ2 at fixed θ1.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MomentScanSpec {
    #[serde(default = "d_scan_theta1")]
    pub theta1_over_pi: f64,
    #[serde(default = "d_scan_start")]
    pub theta2_start_over_pi: f64,
    #[serde(default = "d_scan_end")]
    pub theta2_end_over_pi: f64,
    #[serde(default = "d_points")]
    pub points: usize,
    #[serde(default = "d_scan_steps")]
    pub steps: u32,
    #[serde(default = "d_realizations")]
    pub realizations: u32,
    /// Divide lossy output densities by their total before taking the moment.
    #[serde(default)]
    pub renormalize: bool,
    #[serde(default)]
    pub coin: CoinInit,
    #[serde(default)]
    pub hardware: HardwareSpec,
}

/// Exact diagonalization of the step operator on a two-wall ring.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EigsSpec {
    #[serde(default = "d_ring_size")]
    pub ring_size: usize,
    #[serde(default = "d_theta1")]
    pub theta1_left_over_pi: f64,
    #[serde(default = "d_theta2")]
    pub theta2_left_over_pi: f64,
    #[serde(default = "d_theta1_right")]
    pub theta1_right_over_pi: f64,
    #[serde(default = "d_theta2_right")]
    pub theta2_right_over_pi: f64,
    #[serde(default)]
    pub realistic: bool,
    /// Quasienergy tolerance for classifying a mode as E ≈ 0 or E ≈ π.
    #[serde(default = "d_e_tol")]
    pub e_tol: f64,
    /// Minimum near-wall probability for a mode to count as a boundary mode.
    #[serde(default = "d_loc_threshold")]
    pub loc_threshold: f64,
}

impl WalkSpec {
    pub fn resolved(mut self) -> Self {
        self.hardware = self.hardware.resolved();
        self
    }

    pub fn walk_config(&self) -> Result<WalkConfig, CliError> {
        Ok(WalkConfig {
            profile: CoinProfile::homogeneous(self.theta1_over_pi * PI, self.theta2_over_pi * PI)?,
            scattering: self.hardware.scattering(),
            noise: self.hardware.noise()?,
            steps: self.steps,
            x0: self.x0,
            coin: self.coin.amplitudes(),
        })
    }
}

impl BoundarySpec {
    pub fn resolved(mut self) -> Self {
        self.hardware = self.hardware.resolved();
        self
    }

    pub fn walk_config(&self) -> Result<WalkConfig, CliError> {
        Ok(WalkConfig {
            profile: CoinProfile::new(
                (self.theta1_left_over_pi * PI, self.theta2_left_over_pi * PI),
                (
                    self.theta1_right_over_pi * PI,
                    self.theta2_right_over_pi * PI,
                ),
                self.wall,
            )?,
            scattering: self.hardware.scattering(),
            noise: self.hardware.noise()?,
            steps: self.steps,
            x0: self.x0,
            coin: self.coin.amplitudes(),
        })
    }
}

impl MomentScanSpec {
    pub fn resolved(mut self) -> Self {
        self.hardware = self.hardware.resolved();
        self
    }

    pub fn scan_params(&self) -> Result<cavity_walk::moments::MomentScanParams, CliError> {
        Ok(cavity_walk::moments::MomentScanParams {
            theta1: self.theta1_over_pi * PI,
            theta2_start: self.theta2_start_over_pi * PI,
            theta2_end: self.theta2_end_over_pi * PI,
            points: self.points,
            steps: self.steps,
            scattering: self.hardware.scattering(),
            noise: self.hardware.noise()?,
            realizations: self.realizations,
            renormalize: self.renormalize,
            coin: self.coin.amplitudes(),
        })
    }
}

impl EigsSpec {
    pub fn profile(&self) -> Result<CoinProfile, CliError> {
        // The profile is indexed by ring site; the wall at site 0 comes from
        // the sign convention of CoinProfile, the one at L/2 from ring_angles.
        Ok(CoinProfile::new(
            (self.theta1_left_over_pi * PI, self.theta2_left_over_pi * PI),
            (
                self.theta1_right_over_pi * PI,
                self.theta2_right_over_pi * PI,
            ),
            0,
        )?)
    }

    pub fn scattering(&self) -> CavityScattering {
        if self.realistic {
            CavityScattering::realistic()
        } else {
            CavityScattering::ideal()
        }
    }
}

/// All defaults live in the serde attributes; `Default` is the spec an
/// empty config object deserializes to.
macro_rules! default_from_empty_object {
    ($($t:ty),* $(,)?) => {$(
        impl Default for $t {
            fn default() -> Self {
                serde_json::from_str("{}").expect("empty object satisfies all defaults")
            }
        }
    )*};
}

default_from_empty_object!(
    WalkSpec,
    BoundarySpec,
    SpectrumSpec,
    PhaseDiagramSpec,
    WindingSpec,
    MomentScanSpec,
    EigsSpec,
);

/// Load a spec of type `T` from a JSON file: either a bare spec object or a
/// run manifest whose `command` matches.
pub fn load_spec<T: serde::de::DeserializeOwned>(
    path: &Path,
    command: &str,
) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("invalid JSON in {}: {e}", path.display())))?;
    let spec_value = match value.as_object() {
        Some(obj) if obj.contains_key("command") && obj.contains_key("config") => {
            let found = obj["command"].as_str().unwrap_or("");
            if found != command {
                return Err(CliError::Config(format!(
                    "manifest {} is for command `{found}`, not `{command}`",
                    path.display()
                )));
            }
            obj["config"].clone()
        }
        _ => value,
    };
    serde_json::from_value(spec_value)
        .map_err(|e| CliError::Config(format!("invalid config in {}: {e}", path.display())))
}
