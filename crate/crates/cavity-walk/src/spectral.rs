//! Independent verification channel: dense one-step operator on a finite
//! ring with two domain walls, exact diagonalization, and detection of
//! boundary modes at quasienergy 0 and π.
//!
//! Ring layout: sites 0..L/2 carry the profile's right-region angles and
//! sites L/2..L the left-region angles, so the walls sit at x = 0 (as on
//! the line) and at the wrap point x = L/2. A ring keeps the ideal operator
//! exactly unitary without inventing edge terminations.

use ndarray::Array2;
use ndarray_linalg::Eig;
use num_complex::Complex64 as C64;

use crate::error::WalkError;
use crate::model::{CavityScattering, CoinProfile};
use crate::Result;

use std::f64::consts::PI;

/// Angles seen by ring site `x` of an `l`-site ring.
pub fn ring_angles(profile: &CoinProfile, l: usize, x: usize) -> (f64, f64) {
    if x < l / 2 {
        (profile.theta1_right, profile.theta2_right)
    } else {
        (profile.theta1_left, profile.theta2_left)
    }
}

fn basis_index(x: usize, pol: usize) -> usize {
    2 * x + pol
}

fn coin_layer_matrix(l: usize, profile: &CoinProfile, half_theta1: bool) -> Array2<C64> {
    let dim = 2 * l;
    let mut m = Array2::zeros((dim, dim));
    for x in 0..l {
        let (t1, t2) = ring_angles(profile, l, x);
        let theta = if half_theta1 { t1 / 2.0 } else { t2 };
        let (s, c) = (theta / 2.0).sin_cos();
        m[[basis_index(x, 0), basis_index(x, 0)]] = C64::new(c, 0.0);
        m[[basis_index(x, 0), basis_index(x, 1)]] = C64::new(-s, 0.0);
        m[[basis_index(x, 1), basis_index(x, 0)]] = C64::new(s, 0.0);
        m[[basis_index(x, 1), basis_index(x, 1)]] = C64::new(c, 0.0);
    }
    m
}

fn translation_matrix(l: usize, scattering: &CavityScattering) -> Array2<C64> {
    let dim = 2 * l;
    let mut m = Array2::zeros((dim, dim));
    for x in 0..l {
        m[[basis_index((x + 1) % l, 0), basis_index(x, 0)]] = scattering.r_r;
        m[[basis_index((x + l - 1) % l, 1), basis_index(x, 1)]] = scattering.t_l;
    }
    m
}

/// Dense 2L×2L one-step operator on the ring, composed exactly like the
/// real-space step: `C(θ1/2) · T · C(θ2) · T · C(θ1/2)` with periodic wrap.
pub fn build_dense_operator(
    l: usize,
    profile: &CoinProfile,
    scattering: &CavityScattering,
) -> Result<Array2<C64>> {
    if l < 8 || !l.is_multiple_of(2) {
        return Err(WalkError::Validation(format!(
            "ring size must be even and >= 8, got {l}"
        )));
    }
    let half = coin_layer_matrix(l, profile, true);
    let middle = coin_layer_matrix(l, profile, false);
    let t = translation_matrix(l, scattering);
    Ok(half.dot(&t).dot(&middle).dot(&t).dot(&half))
}

/// One eigenmode of the step operator.
#[derive(Debug, Clone)]
pub struct EigenMode {
    /// Quasienergy E = -arg λ, in (-π, π].
    pub quasienergy: f64,
    /// |λ|; 1 for ideal scattering, inside the unit disk for lossy walks.
    pub modulus: f64,
    /// Normalized eigenvector over the (site, coin) basis, index 2x + c.
    pub vector: Vec<C64>,
    /// Site with the largest probability.
    pub center: usize,
    /// Exponential decay scale of the probability around the center, in
    /// sites; from a least-squares fit of log P against ring distance.
    pub localization_length: f64,
}

fn site_probabilities(vector: &[C64]) -> Vec<f64> {
    vector
        .chunks_exact(2)
        .map(|a| a[0].norm_sqr() + a[1].norm_sqr())
        .collect()
}

fn ring_distance(a: usize, b: usize, l: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(l - d)
}

fn fit_localization_length(probs: &[f64], center: usize) -> f64 {
    let l = probs.len();
    // log P vs distance, least squares over sites with non-negligible weight
    let pts: Vec<(f64, f64)> = probs
        .iter()
        .enumerate()
        .filter(|&(_, &p)| p > 1e-14)
        .map(|(x, &p)| (ring_distance(x, center, l) as f64, p.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return f64::INFINITY;
    }
    let slope = (n * sxy - sx * sy) / denom;
    if slope >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / slope
    }
}

/// Full eigendecomposition of the step operator, sorted by quasienergy.
pub fn eigenphases(matrix: &Array2<C64>) -> Result<Vec<EigenMode>> {
    let (values, vectors) = matrix
        .eig()
        .map_err(|e| WalkError::Numeric(format!("eigendecomposition failed: {e}")))?;
    let mut modes: Vec<EigenMode> = values
        .iter()
        .enumerate()
        .map(|(i, lambda)| {
            let col = vectors.column(i);
            let norm = col.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            let vector: Vec<C64> = col.iter().map(|a| a / norm).collect();
            let probs = site_probabilities(&vector);
            let center = probs
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(x, _)| x)
                .unwrap_or(0);
            let mut e = -lambda.arg();
            if e <= -PI {
                e = PI;
            }
            EigenMode {
                quasienergy: e,
                modulus: lambda.norm(),
                localization_length: fit_localization_length(&probs, center),
                center,
                vector,
            }
        })
        .collect();
    modes.sort_by(|a, b| {
        a.quasienergy
            .total_cmp(&b.quasienergy)
            .then(a.modulus.total_cmp(&b.modulus))
    });
    Ok(modes)
}

/// Per-mode attribution of a detected boundary mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryMode {
    /// Index into the sorted mode list handed to the detector.
    pub mode_index: usize,
    pub quasienergy: f64,
    /// Wall holding the largest share of the mode's near-wall probability.
    /// Degenerate eigenvectors can split evenly across both walls, so the
    /// per-wall counts come from summed weights, not from this attribution.
    pub wall_index: usize,
    /// Fraction of the mode's probability within 4 sites of that wall.
    pub wall_weight: f64,
    /// Fraction of the mode's probability within 4 sites of any wall.
    pub total_wall_weight: f64,
    /// True for an E ≈ π mode, false for E ≈ 0.
    pub at_pi: bool,
}

/// Boundary-mode counts at E ≈ 0 and E ≈ π, per wall.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryReport {
    pub walls: Vec<usize>,
    pub zero_counts: Vec<usize>,
    pub pi_counts: Vec<usize>,
    pub modes: Vec<BoundaryMode>,
}

/// Scan eigenmodes for boundary states: a mode qualifies at E ≈ 0 (resp. π)
/// if |E| < `e_tol` (resp. |π - |E|| < `e_tol`) and at least `loc_threshold`
/// of its probability lies within 4 sites of the walls.
///
/// Per-wall counts sum each qualified mode's near-wall weight fractionally
/// and round at the end: degenerate boundary modes come out of the
/// eigensolver as arbitrary combinations split across both walls, so a
/// winner-takes-all attribution would be numerical noise.
pub fn detect_boundary_modes(
    modes: &[EigenMode],
    walls: &[usize],
    ring_size: usize,
    e_tol: f64,
    loc_threshold: f64,
) -> BoundaryReport {
    let mut report = BoundaryReport {
        walls: walls.to_vec(),
        zero_counts: vec![0; walls.len()],
        pi_counts: vec![0; walls.len()],
        modes: Vec::new(),
    };
    let mut zero_fractions = vec![0.0f64; walls.len()];
    let mut pi_fractions = vec![0.0f64; walls.len()];
    for (mode_index, mode) in modes.iter().enumerate() {
        let e = mode.quasienergy;
        let at_zero = e.abs() < e_tol;
        let at_pi = (PI - e.abs()).abs() < e_tol;
        if !at_zero && !at_pi {
            continue;
        }
        let probs = site_probabilities(&mode.vector);
        let weights: Vec<f64> = walls
            .iter()
            .map(|&w| {
                probs
                    .iter()
                    .enumerate()
                    .filter(|&(x, _)| ring_distance(x, w % ring_size, ring_size) <= 4)
                    .map(|(_, &p)| p)
                    .sum()
            })
            .collect();
        let total_wall_weight: f64 = weights.iter().sum();
        if total_wall_weight < loc_threshold {
            continue;
        }
        let fractions = if at_pi {
            &mut pi_fractions
        } else {
            &mut zero_fractions
        };
        for (f, w) in fractions.iter_mut().zip(&weights) {
            *f += w / total_wall_weight;
        }
        let (wall_index, &wall_weight) = weights
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("at least one wall");
        report.modes.push(BoundaryMode {
            mode_index,
            quasienergy: e,
            wall_index,
            wall_weight,
            total_wall_weight,
            at_pi,
        });
    }
    report.zero_counts = zero_fractions.iter().map(|f| f.round() as usize).collect();
    report.pi_counts = pi_fractions.iter().map(|f| f.round() as usize).collect();
    report
}

/// Convenience: diagonalize a two-wall ring and report boundary modes.
/// Walls sit at sites 0 and L/2.
pub fn boundary_mode_report(
    l: usize,
    profile: &CoinProfile,
    scattering: &CavityScattering,
    e_tol: f64,
    loc_threshold: f64,
) -> Result<(Vec<EigenMode>, BoundaryReport)> {
    let u = build_dense_operator(l, profile, scattering)?;
    let modes = eigenphases(&u)?;
    let report = detect_boundary_modes(&modes, &[0, l / 2], l, e_tol, loc_threshold);
    Ok((modes, report))
}

pub const DEFAULT_E_TOL: f64 = 0.05;
pub const DEFAULT_LOC_THRESHOLD: f64 = 0.5;
