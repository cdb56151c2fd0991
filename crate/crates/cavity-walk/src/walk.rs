//! Real-space evolution: coin rotations, cavity translation, the composed
//! one-step operator, multi-step trajectories and disorder ensembles.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::WalkError;
use crate::model::{
    photon_density, CavityScattering, CoinProfile, DensityProfile, SpinorField, WalkConfig,
};
use crate::rng;
use crate::Result;

/// Which rotation layer of the step operator an `apply_coin` call realizes.
///
/// The one-step operator is `R_y(θ1/2) · T · R_y(θ2) · T · R_y(θ1/2)`;
/// the outer layers rotate by half of θ1, the middle one by θ2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoinLayer {
    Theta1Half,
    Theta2,
}

impl CoinLayer {
    fn angle_at(self, profile: &CoinProfile, x: i64) -> f64 {
        match self {
            CoinLayer::Theta1Half => profile.theta1_at(x) / 2.0,
            CoinLayer::Theta2 => profile.theta2_at(x),
        }
    }
}

/// Density and norm bookkeeping for one step of a trajectory.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub step: u32,
    pub density: DensityProfile,
    pub norm_sqr: f64,
}

/// Apply one polarization rotation layer, site by site.
///
/// At each site the coin pair is multiplied by R_y(θ) with rows
/// (cos θ/2, -sin θ/2) and (sin θ/2, cos θ/2), where θ is the layer angle
/// at that site plus its noise offset. `offsets`, when given, must have one
/// entry per window site.
pub fn apply_coin(
    state: &SpinorField,
    profile: &CoinProfile,
    layer: CoinLayer,
    offsets: Option<&[f64]>,
) -> SpinorField {
    if let Some(o) = offsets {
        assert_eq!(o.len(), state.len(), "noise offsets must cover the window");
    }
    let mut out = state.clone();
    let origin = state.origin();
    for (i, a) in out.amps_mut().iter_mut().enumerate() {
        let x = origin + i as i64;
        let theta = layer.angle_at(profile, x) + offsets.map_or(0.0, |o| o[i]);
        let (s, c) = (theta / 2.0).sin_cos();
        let [ar, al] = *a;
        *a = [c * ar - s * al, s * ar + c * al];
    }
    out
}

/// Polarization-dependent translation: the R component moves one site right
/// with factor `r_R`, the L component one site left with factor `t_L`. With
/// ideal scattering this is the shift operator with the π phase on the L
/// branch.
pub fn apply_translation(
    state: &SpinorField,
    scattering: &CavityScattering,
) -> Result<SpinorField> {
    let (lo, hi) = state.site_range();
    let last = hi - 1;
    if state.amp(last)[0] != C64::new(0.0, 0.0) {
        return Err(WalkError::LatticeOverflow { site: last });
    }
    if state.amp(lo)[1] != C64::new(0.0, 0.0) {
        return Err(WalkError::LatticeOverflow { site: lo });
    }
    let mut out = SpinorField::zeros(lo, state.len());
    let n = state.len();
    {
        let src = state.amps();
        let dst = out.amps_mut();
        for i in 0..n - 1 {
            dst[i + 1][0] = scattering.r_r * src[i][0];
        }
        for i in 1..n {
            dst[i - 1][1] = scattering.t_l * src[i][1];
        }
    }
    Ok(out)
}

fn layer_offsets(
    config: &WalkConfig,
    state: &SpinorField,
    step: u32,
    layer: u32,
) -> Option<Vec<f64>> {
    let noise = config.noise.as_ref()?;
    if noise.delta_max == 0.0 {
        return None;
    }
    let origin = state.origin();
    Some(
        (0..state.len())
            .map(|i| noise.offset(step, layer, origin + i as i64))
            .collect(),
    )
}

/// One step of the walk: `R_y(θ1/2) · T · R_y(θ2) · T · R_y(θ1/2)` applied
/// right to left. With noise, each of the three rotation layers draws
/// independent offsets keyed by (seed, step, layer, site).
pub fn walk_step(state: &SpinorField, config: &WalkConfig, step_index: u32) -> Result<SpinorField> {
    let profile = &config.profile;
    let o0 = layer_offsets(config, state, step_index, 0);
    let s = apply_coin(state, profile, CoinLayer::Theta1Half, o0.as_deref());
    let s = apply_translation(&s, &config.scattering)?;
    let o1 = layer_offsets(config, &s, step_index, 1);
    let s = apply_coin(&s, profile, CoinLayer::Theta2, o1.as_deref());
    let s = apply_translation(&s, &config.scattering)?;
    let o2 = layer_offsets(config, &s, step_index, 2);
    Ok(apply_coin(
        &s,
        profile,
        CoinLayer::Theta1Half,
        o2.as_deref(),
    ))
}

/// Evolve `config.steps` steps from the configured initial state, recording
/// the density after every step. Returns N + 1 records, the first being the
/// initial density.
pub fn evolve(config: &WalkConfig) -> Result<Vec<StepRecord>> {
    config.validate()?;
    let mut state = crate::model::make_initial_state(
        config.x0,
        config.coin[0],
        config.coin[1],
        config.lattice_halfwidth(),
    )?;
    let mut records = Vec::with_capacity(config.steps as usize + 1);
    records.push(StepRecord {
        step: 0,
        density: photon_density(&state, 0),
        norm_sqr: state.norm_sqr(),
    });
    for n in 1..=config.steps {
        state = walk_step(&state, config, n - 1)?;
        records.push(StepRecord {
            step: n,
            density: photon_density(&state, n),
            norm_sqr: state.norm_sqr(),
        });
    }
    Ok(records)
}

/// Mean final density over a disorder ensemble.
#[derive(Debug, Clone)]
pub struct EnsembleResult {
    pub mean: DensityProfile,
    /// Master seed of each realization, in realization order.
    pub seeds: Vec<u64>,
}

/// Arithmetic mean of the final density over `realizations` independent
/// noise realizations. Realization r runs with a master seed derived
/// deterministically from (master_seed, r), so results are independent of
/// thread scheduling.
pub fn ensemble_average(config: &WalkConfig, realizations: u32) -> Result<EnsembleResult> {
    if realizations == 0 {
        return Err(WalkError::Validation(
            "ensemble size must be at least 1".into(),
        ));
    }
    let noise = config
        .noise
        .ok_or_else(|| WalkError::Validation("ensemble averaging requires a noise model".into()))?;
    let seeds: Vec<u64> = (0..realizations as u64)
        .map(|r| rng::realization_seed(noise.master_seed, r))
        .collect();
    if noise.delta_max == 0.0 {
        // All realizations are identical; return one of them so the mean is
        // bit-exact rather than a rounded sum-and-divide.
        let mut c = config.clone();
        c.noise = Some(noise.reseeded(seeds[0]));
        let records = evolve(&c)?;
        return Ok(EnsembleResult {
            mean: records.into_iter().last().expect("N + 1 records").density,
            seeds,
        });
    }
    let finals: Vec<DensityProfile> = seeds
        .par_iter()
        .map(|&seed| {
            let mut c = config.clone();
            c.noise = Some(noise.reseeded(seed));
            let records = evolve(&c)?;
            Ok(records.into_iter().last().expect("N + 1 records").density)
        })
        .collect::<Result<_>>()?;
    let origin = finals[0].origin();
    let len = finals[0].values().len();
    let mut mean = vec![0.0; len];
    for d in &finals {
        for (m, &p) in mean.iter_mut().zip(d.values()) {
            *m += p;
        }
    }
    let inv = 1.0 / realizations as f64;
    mean.iter_mut().for_each(|m| *m *= inv);
    Ok(EnsembleResult {
        mean: DensityProfile::from_parts(origin, mean, config.steps),
        seeds,
    })
}
