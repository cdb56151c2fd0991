//! Simulator and analysis toolkit for a single-photon discrete-time quantum
//! walk on a 1D cavity network.
//!
//! The walker is a photon with polarization coin {R, L}. One walk step is
//! `R_y(θ1/2) · T · R_y(θ2) · T · R_y(θ1/2)`, where `T` shifts the R component
//! right and the L component left with a π phase, realized physically by
//! cavity reflection/transmission. The crate provides:
//!
//! - [`walk`]: real-space evolution, ideal or lossy, with optional angle
//!   noise and disorder-ensemble averaging;
//! - [`bloch`]: momentum-space bands, chiral Bloch vector, gaps, the
//!   winding-number pair (ν0, νπ) and the (θ1, θ2) phase diagram;
//! - [`moments`]: the second-order moment of the output density, its
//!   momentum-space oracle, infinite-step limit and θ1 = π/3 closed form;
//! - [`spectral`]: exact diagonalization of the step operator on a ring with
//!   two domain walls, and boundary-mode detection at quasienergy 0 and π.

pub mod bloch;
pub mod error;
pub mod model;
pub mod moments;
pub mod rng;
pub mod spectral;
pub mod walk;

pub use error::WalkError;
pub use model::{
    make_initial_state, photon_density, CavityScattering, CoinProfile, DensityProfile, NoiseModel,
    SpinorField, WalkConfig,
};

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, WalkError>;
