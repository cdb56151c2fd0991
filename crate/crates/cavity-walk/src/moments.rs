//! Second-order moment of the output density: real-space definition,
//! momentum-space oracle, infinite-step analytic limit, and the θ1 = π/3
//! closed form.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::bloch::{bloch_operator, cos_quasienergy, gap, rotation_y, Mat2};
use crate::error::WalkError;
use crate::model::{
    wrap_angle, CavityScattering, CoinProfile, DensityProfile, NoiseModel, WalkConfig, TWO_PI,
};
use crate::walk::{ensemble_average, evolve};
use crate::Result;

use std::f64::consts::PI;

/// M = Σ_x (x - x0)² P(x, N) / N².
pub fn second_moment(density: &DensityProfile, x0: i64, steps: u32) -> Result<f64> {
    if steps == 0 {
        return Err(WalkError::Validation(
            "second moment is undefined at N = 0".into(),
        ));
    }
    let n2 = (steps as f64) * (steps as f64);
    Ok(density
        .iter()
        .map(|(x, p)| {
            let d = (x - x0) as f64;
            d * d * p
        })
        .sum::<f64>()
        / n2)
}

/// d/dk of the momentum-space translation diag(e^{-ik}, -e^{+ik}).
fn shift_bloch_deriv(k: f64) -> Mat2 {
    let i = C64::new(0.0, 1.0);
    Mat2::diag(-i * C64::from_polar(1.0, -k), -i * C64::from_polar(1.0, k))
}

/// d/dk of the one-step Bloch operator, by the product rule.
fn bloch_operator_deriv(theta1: f64, theta2: f64, k: f64) -> Mat2 {
    let half = rotation_y(theta1 / 2.0);
    let middle = rotation_y(theta2);
    let t = crate::bloch::shift_bloch(k);
    let dt = shift_bloch_deriv(k);
    let inner = dt.mul(&middle).mul(&t).add(&t.mul(&middle).mul(&dt));
    half.mul(&inner).mul(&half)
}

/// Momentum-space evaluation of the second moment for an ideal homogeneous
/// walk: M = (1/2π) ∫ ‖d/dk [U(k)^N φ0]‖² dk / N², the k-space form of the
/// real-space sum after integration by parts. The integrand is a
/// trigonometric polynomial of degree 4N, so the uniform rule is exact once
/// k_samples > 4N.
pub fn second_moment_momentum(
    theta1: f64,
    theta2: f64,
    coin: [C64; 2],
    steps: u32,
    k_samples: usize,
) -> Result<f64> {
    if steps == 0 {
        return Err(WalkError::Validation(
            "second moment is undefined at N = 0".into(),
        ));
    }
    if k_samples < 512 {
        return Err(WalkError::Validation(format!(
            "momentum quadrature needs k_samples >= 512, got {k_samples}"
        )));
    }
    let n = steps as usize;
    let mut total = 0.0;
    for j in 0..k_samples {
        let k = -PI + (j as f64 + 0.5) * TWO_PI / k_samples as f64;
        let u = bloch_operator(theta1, theta2, k);
        let du = bloch_operator_deriv(theta1, theta2, k);
        // powers[j] = U^j
        let mut powers = Vec::with_capacity(n + 1);
        powers.push(Mat2::identity());
        for p in 0..n {
            powers.push(powers[p].mul(&u));
        }
        // (U^N)' = Σ_j U^j U' U^{N-1-j}
        let mut deriv = Mat2([[C64::new(0.0, 0.0); 2]; 2]);
        for p in 0..n {
            deriv = deriv.add(&powers[p].mul(&du).mul(&powers[n - 1 - p]));
        }
        let f = deriv.mul_vec(coin);
        total += f[0].norm_sqr() + f[1].norm_sqr();
    }
    Ok(total / k_samples as f64 / (steps as f64 * steps as f64))
}

/// Momentum-space second moment of a full walk config; defined only for
/// homogeneous, noiseless, ideal-scattering walks.
pub fn second_moment_momentum_config(config: &WalkConfig, k_samples: usize) -> Result<f64> {
    if !config.profile.is_homogeneous() {
        return Err(WalkError::Unsupported(
            "momentum-space moment requires a homogeneous coin profile".into(),
        ));
    }
    if config.noise.is_some_and(|n| n.delta_max > 0.0) {
        return Err(WalkError::Unsupported(
            "momentum-space moment requires a noiseless walk".into(),
        ));
    }
    if config.scattering != CavityScattering::ideal() {
        return Err(WalkError::Unsupported(
            "momentum-space moment requires ideal scattering".into(),
        ));
    }
    second_moment_momentum(
        config.profile.theta1_left,
        config.profile.theta2_left,
        config.coin,
        config.steps,
        k_samples,
    )
}

/// Infinite-step limit M∞ = (1/2π) ∫ (dE/dk)² dk with the analytic band
/// derivative dE/dk = 2·cos(θ2/2)·cos(θ1/2)·sin 2k / sin E. Midpoint rule;
/// samples inside a 1e-6 neighborhood of a band touching are excluded,
/// except removable 0/0 points which take their L'Hôpital limit.
pub fn moment_infinite_limit(theta1: f64, theta2: f64, k_samples: usize) -> Result<f64> {
    if k_samples < 1024 {
        return Err(WalkError::Validation(format!(
            "band-derivative quadrature needs k_samples >= 1024, got {k_samples}"
        )));
    }
    let a = (theta2 / 2.0).cos() * (theta1 / 2.0).cos();
    // The integrand is analytic in a strip whose width shrinks with the
    // gap; grow the sample count near a transition so the midpoint rule
    // stays converged.
    let (g0, gpi) = gap(theta1, theta2, 256);
    let g = g0.min(gpi).max(1e-4);
    let adaptive = ((2048.0 / g) as usize).next_power_of_two().min(1 << 21);
    let samples = k_samples.max(adaptive);
    let mut total = 0.0;
    let mut used = 0usize;
    for j in 0..samples {
        let k = -PI + (j as f64 + 0.5) * TWO_PI / samples as f64;
        let sin_e = (1.0 - cos_quasienergy(theta1, theta2, k).clamp(-1.0, 1.0).powi(2)).sqrt();
        let sin_2k = (2.0 * k).sin();
        let value = if sin_e < 1e-6 {
            if sin_2k.abs() < 1e-6 {
                // removable 0/0 at a band extreme: (dE/dk)² → |4a|
                4.0 * a.abs()
            } else {
                continue; // excluded neighborhood of a band touching
            }
        } else {
            let d = 2.0 * a * sin_2k / sin_e;
            d * d
        };
        total += value;
        used += 1;
    }
    Ok(total / used as f64)
}

const BREAKPOINTS: [f64; 4] = [-5.0 * PI / 3.0, -PI / 3.0, PI / 3.0, 5.0 * PI / 3.0];

/// Closed-form M∞ for θ1 = π/3, five-branch piecewise in θ2 ∈ [-2π, 2π].
/// Interior breakpoints return the common limit value 2.
pub fn moment_closed_form(theta2: f64) -> Result<f64> {
    if !(-TWO_PI..=TWO_PI).contains(&theta2) {
        return Err(WalkError::Validation(format!(
            "theta2 = {theta2} outside [-2π, 2π]"
        )));
    }
    let t = theta2;
    let value = if t < -5.0 * PI / 3.0 {
        2.0
    } else if t < -PI / 3.0 {
        4.0 + 4.0 * (t / 2.0).sin()
    } else if t <= PI / 3.0 {
        2.0
    } else if t <= 5.0 * PI / 3.0 {
        4.0 - 4.0 * (t / 2.0).sin()
    } else {
        2.0
    };
    Ok(value)
}

/// Whether θ2 lies within `window` radians of a phase-transition breakpoint
/// of the θ1 = π/3 closed form.
pub fn near_breakpoint(theta2: f64, window: f64) -> bool {
    BREAKPOINTS.iter().any(|&b| (theta2 - b).abs() < window)
}

/// One θ2 sample of a moment scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSample {
    pub theta2: f64,
    pub m_numeric: f64,
    pub m_analytic: f64,
    pub steps: u32,
}

/// Scan of the second moment over θ2 at fixed θ1.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentScan {
    pub samples: Vec<MomentSample>,
}

/// Parameters of a θ2 scan. `noise` plus `realizations` switch the numeric
/// column to a disorder-ensemble mean; `renormalize` divides lossy output
/// densities by their total before taking the moment (off by default — the
/// moment of the raw output density is the measured signal).
#[derive(Debug, Clone)]
pub struct MomentScanParams {
    pub theta1: f64,
    pub theta2_start: f64,
    pub theta2_end: f64,
    pub points: usize,
    pub steps: u32,
    pub scattering: CavityScattering,
    pub noise: Option<NoiseModel>,
    pub realizations: u32,
    pub renormalize: bool,
    pub coin: [C64; 2],
}

impl MomentScanParams {
    /// Ideal scan over the full θ2 ∈ [-2π, 2π] range with the balanced
    /// initial coin state.
    pub fn ideal(steps: u32, points: usize) -> Self {
        let a = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            theta1: PI / 3.0,
            theta2_start: -TWO_PI,
            theta2_end: TWO_PI,
            points,
            steps,
            scattering: CavityScattering::ideal(),
            noise: None,
            realizations: 1,
            renormalize: false,
            coin: [a, a],
        }
    }

    /// Scan with practical cavity parameters and angle noise.
    pub fn realistic(steps: u32, points: usize, realizations: u32, master_seed: u64) -> Self {
        Self {
            scattering: CavityScattering::realistic(),
            noise: Some(NoiseModel::new(PI / 20.0, true, master_seed).expect("valid half-width")),
            realizations,
            ..Self::ideal(steps, points)
        }
    }
}

/// Evaluate the scan: per θ2 sample, M from a real-space walk (ensemble
/// mean when noisy) next to the analytic value — the θ1 = π/3 closed form,
/// or the band-derivative integral for other θ1. Points run in parallel
/// with per-point derived seeds.
pub fn moment_scan(params: &MomentScanParams) -> Result<MomentScan> {
    if params.points < 2 {
        return Err(WalkError::Validation(format!(
            "scan needs at least 2 points, got {}",
            params.points
        )));
    }
    if params.theta2_end <= params.theta2_start {
        return Err(WalkError::Validation(
            "scan range must be increasing".into(),
        ));
    }
    let closed_form_theta1 = (params.theta1 - PI / 3.0).abs() < 1e-12;
    let samples: Vec<Result<MomentSample>> = (0..params.points)
        .into_par_iter()
        .map(|i| {
            let theta2 = params.theta2_start
                + (params.theta2_end - params.theta2_start) * i as f64 / (params.points - 1) as f64;
            let config = WalkConfig {
                profile: CoinProfile::homogeneous(params.theta1, theta2)?,
                scattering: params.scattering,
                noise: params
                    .noise
                    .map(|n| n.reseeded(crate::rng::mix(n.master_seed, &[i as u64]))),
                steps: params.steps,
                x0: 0,
                coin: params.coin,
            };
            let density = match config.noise {
                Some(_) if params.realizations > 1 => {
                    ensemble_average(&config, params.realizations)?.mean
                }
                _ => {
                    evolve(&config)?
                        .into_iter()
                        .last()
                        .expect("records")
                        .density
                }
            };
            let m_numeric = if params.renormalize {
                let total = density.total();
                second_moment(&density, 0, params.steps)? / total
            } else {
                second_moment(&density, 0, params.steps)?
            };
            let m_analytic = if closed_form_theta1 {
                moment_closed_form(wrap_angle(theta2))?
            } else {
                moment_infinite_limit(params.theta1, theta2, 1 << 14)?
            };
            Ok(MomentSample {
                theta2,
                m_numeric,
                m_analytic,
                steps: params.steps,
            })
        })
        .collect();
    let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(MomentScan { samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_initial_state;
    use crate::model::photon_density;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn balanced() -> [C64; 2] {
        let a = C64::new(FRAC_1_SQRT_2, 0.0);
        [a, a]
    }

    fn ideal_config(theta1: f64, theta2: f64, steps: u32) -> WalkConfig {
        WalkConfig {
            profile: CoinProfile::homogeneous(theta1, theta2).unwrap(),
            scattering: CavityScattering::ideal(),
            noise: None,
            steps,
            x0: 0,
            coin: balanced(),
        }
    }

    fn real_space_m(theta1: f64, theta2: f64, steps: u32) -> f64 {
        let records = evolve(&ideal_config(theta1, theta2, steps)).unwrap();
        second_moment(&records.last().unwrap().density, 0, steps).unwrap()
    }

    #[test]
    fn ballistic_walk_has_m_four() {
        assert_abs_diff_eq!(real_space_m(0.0, 0.0, 5), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn delta_distribution_has_m_zero() {
        let s = make_initial_state(3, C64::new(1.0, 0.0), C64::new(0.0, 0.0), 4).unwrap();
        let d = photon_density(&s, 0);
        assert_eq!(second_moment(&d, 3, 5).unwrap(), 0.0);
    }

    #[test]
    fn zero_steps_is_an_error() {
        let s = make_initial_state(0, C64::new(1.0, 0.0), C64::new(0.0, 0.0), 4).unwrap();
        let d = photon_density(&s, 0);
        assert!(second_moment(&d, 0, 0).is_err());
    }

    #[test]
    fn finite_n_moment_near_infinite_limit() {
        let m = real_space_m(PI / 3.0, PI / 2.0, 14);
        let expect = 4.0 - 4.0 * (PI / 4.0).sin();
        assert!((m - expect).abs() < 0.25, "M = {m}, limit = {expect}");
    }

    #[test]
    fn momentum_oracle_matches_real_space() {
        let m_k = second_moment_momentum(PI / 3.0, PI / 2.0, balanced(), 7, 512).unwrap();
        let m_x = real_space_m(PI / 3.0, PI / 2.0, 7);
        assert_abs_diff_eq!(m_k, m_x, epsilon = 1e-6);
    }

    #[test]
    fn momentum_ballistic_is_four() {
        for steps in [1, 5, 12] {
            let m = second_moment_momentum(0.0, 0.0, balanced(), steps, 512).unwrap();
            assert_abs_diff_eq!(m, 4.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn momentum_flat_band_does_not_spread() {
        let m = second_moment_momentum(PI / 3.0, PI, balanced(), 14, 512).unwrap();
        assert!(m < 1e-6, "flat band moment {m}");
    }

    #[test]
    fn momentum_config_rejects_domain_wall() {
        let mut config = ideal_config(PI / 3.0, PI / 2.0, 7);
        config.profile = CoinProfile::new((0.1, 0.2), (0.3, 0.4), 0).unwrap();
        assert!(matches!(
            second_moment_momentum_config(&config, 512),
            Err(WalkError::Unsupported(_))
        ));
    }

    #[test]
    fn infinite_limit_plateau_value() {
        let m = moment_infinite_limit(PI / 3.0, 0.0, 1 << 14).unwrap();
        assert_abs_diff_eq!(m, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn infinite_limit_flat_band() {
        let m = moment_infinite_limit(PI / 3.0, PI, 1 << 14).unwrap();
        assert!(m.abs() < 1e-9);
    }

    #[test]
    fn infinite_limit_ballistic() {
        let m = moment_infinite_limit(0.0, 0.0, 1 << 14).unwrap();
        assert_abs_diff_eq!(m, 4.0, epsilon = 1e-6);
    }

    #[test]
    fn closed_form_values() {
        assert_abs_diff_eq!(moment_closed_form(0.0).unwrap(), 2.0);
        assert_abs_diff_eq!(
            moment_closed_form(PI / 2.0).unwrap(),
            4.0 - 2.0 * 2.0f64.sqrt(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(moment_closed_form(-PI).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn closed_form_breakpoints_return_two() {
        for b in BREAKPOINTS {
            assert_abs_diff_eq!(moment_closed_form(b).unwrap(), 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn closed_form_rejects_out_of_range() {
        assert!(moment_closed_form(7.0).is_err());
        assert!(moment_closed_form(-7.0).is_err());
    }

    #[test]
    fn closed_form_is_even_in_theta2() {
        for i in 0..50 {
            let t = -TWO_PI + TWO_PI * 2.0 * i as f64 / 49.0;
            assert_abs_diff_eq!(
                moment_closed_form(t).unwrap(),
                moment_closed_form(-t).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn infinite_limit_matches_closed_form_off_breakpoints() {
        for i in 0..20u64 {
            let u = crate::rng::unit_f64(crate::rng::mix(17, &[i]));
            let theta2 = -TWO_PI + 2.0 * TWO_PI * u;
            if near_breakpoint(theta2, 1e-3) {
                continue;
            }
            let numeric = moment_infinite_limit(PI / 3.0, theta2, 1 << 14).unwrap();
            let closed = moment_closed_form(theta2).unwrap();
            assert_abs_diff_eq!(numeric, closed, epsilon = 1e-6);
        }
    }

    #[test]
    fn moment_converges_with_steps() {
        let theta2 = 2.2; // oscillating branch, away from breakpoints
        let limit = moment_closed_form(theta2).unwrap();
        let errs: Vec<f64> = [7u32, 14, 28, 56]
            .iter()
            .map(|&n| (real_space_m(PI / 3.0, theta2, n) - limit).abs())
            .collect();
        for w in errs.windows(2) {
            assert!(w[1] < w[0], "errors not decreasing: {errs:?}");
        }
    }

    #[test]
    fn ideal_scan_plateau_is_flat() {
        let mut params = MomentScanParams::ideal(14, 21);
        params.theta2_start = -PI / 3.0 + 0.2;
        params.theta2_end = PI / 3.0 - 0.2;
        let scan = moment_scan(&params).unwrap();
        let mean =
            scan.samples.iter().map(|s| s.m_numeric).sum::<f64>() / scan.samples.len() as f64;
        let var = scan
            .samples
            .iter()
            .map(|s| (s.m_numeric - mean).powi(2))
            .sum::<f64>()
            / (scan.samples.len() - 1) as f64;
        assert!(var.sqrt() < 0.1, "plateau std {}", var.sqrt());
        for s in &scan.samples {
            assert_abs_diff_eq!(s.m_analytic, 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn scan_is_deterministic_across_runs() {
        let params = MomentScanParams::realistic(5, 4, 3, 42);
        let a = moment_scan(&params).unwrap();
        let b = moment_scan(&params).unwrap();
        assert_eq!(a, b);
    }
}
