//! Momentum-space analysis of the homogeneous walk: Bloch operator,
//! quasienergy bands, chiral Bloch vector, gaps, winding numbers and the
//! (θ1, θ2) phase diagram.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::WalkError;
use crate::model::TWO_PI;
use crate::Result;

/// Minimal 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Self {
        let o = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        Mat2([[o, z], [z, o]])
    }

    pub fn diag(a: C64, b: C64) -> Self {
        let z = C64::new(0.0, 0.0);
        Mat2([[a, z], [z, b]])
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }

    pub fn mul_vec(&self, v: [C64; 2]) -> [C64; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    pub fn adjoint(&self) -> Mat2 {
        Mat2([
            [self.0[0][0].conj(), self.0[1][0].conj()],
            [self.0[0][1].conj(), self.0[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, s: C64) -> Mat2 {
        let mut out = self.0;
        for row in &mut out {
            for e in row {
                *e *= s;
            }
        }
        Mat2(out)
    }

    pub fn add(&self, rhs: &Mat2) -> Mat2 {
        let mut out = self.0;
        for (row, r) in out.iter_mut().zip(&rhs.0) {
            for (e, v) in row.iter_mut().zip(r) {
                *e += v;
            }
        }
        Mat2(out)
    }

    pub fn sub(&self, rhs: &Mat2) -> Mat2 {
        let mut out = self.0;
        for (row, r) in out.iter_mut().zip(&rhs.0) {
            for (e, v) in row.iter_mut().zip(r) {
                *e -= v;
            }
        }
        Mat2(out)
    }

    /// Max absolute entry, used as a cheap matrix distance.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|e| e.norm())
            .fold(0.0, f64::max)
    }
}

/// R_y(θ) = exp(-i σ_y θ/2), real rotation of the coin pair.
pub fn rotation_y(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    let z = |x: f64| C64::new(x, 0.0);
    Mat2([[z(c), z(-s)], [z(s), z(c)]])
}

/// Momentum-space translation: diag(e^{-ik}, -e^{+ik}).
pub fn shift_bloch(k: f64) -> Mat2 {
    Mat2::diag(C64::from_polar(1.0, -k), -C64::from_polar(1.0, k))
}

/// One-step operator at quasimomentum k:
/// `R_y(θ1/2) · T(k) · R_y(θ2) · T(k) · R_y(θ1/2)`.
pub fn bloch_operator(theta1: f64, theta2: f64, k: f64) -> Mat2 {
    let half = rotation_y(theta1 / 2.0);
    let middle = rotation_y(theta2);
    let t = shift_bloch(k);
    half.mul(&t).mul(&middle).mul(&t).mul(&half)
}

/// cos E(k) in closed form: cos(θ2/2)·cos(θ1/2)·cos 2k + sin(θ2/2)·sin(θ1/2).
pub fn cos_quasienergy(theta1: f64, theta2: f64, k: f64) -> f64 {
    let (s1, c1) = (theta1 / 2.0).sin_cos();
    let (s2, c2) = (theta2 / 2.0).sin_cos();
    c2 * c1 * (2.0 * k).cos() + s2 * s1
}

/// Per-k band data: quasienergy E ∈ [0, π] and the unit Bloch vector of the
/// effective Hamiltonian. `n` is `None` at band degeneracies (sin E ≈ 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochData {
    pub k: f64,
    pub e: f64,
    pub n: Option<[f64; 3]>,
}

/// Winding-number pair (ν0, νπ) of a gapped walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseLabel {
    pub nu0: i64,
    pub nu_pi: i64,
}

/// Unnormalized planar Bloch vector (n_y, n_z)·sin E; enough for winding
/// angles since sin E > 0 on the chosen branch.
fn planar_vector(theta1: f64, theta2: f64, k: f64) -> (f64, f64) {
    let (s1, c1) = (theta1 / 2.0).sin_cos();
    let (s2, c2) = (theta2 / 2.0).sin_cos();
    let ny = c2 * s1 * (2.0 * k).cos() - s2 * c1;
    let nz = -c2 * (2.0 * k).sin();
    (ny, nz)
}

/// Quasienergy and Bloch vector at one quasimomentum, from the closed-form
/// band expressions. E takes the branch E ∈ [0, π], sin E >= 0.
pub fn quasienergy_and_vector(theta1: f64, theta2: f64, k: f64) -> BlochData {
    let e = cos_quasienergy(theta1, theta2, k).clamp(-1.0, 1.0).acos();
    let sin_e = e.sin();
    let n = if sin_e < 1e-8 {
        None
    } else {
        let (ny, nz) = planar_vector(theta1, theta2, k);
        Some([0.0, ny / sin_e, nz / sin_e])
    };
    BlochData { k, e, n }
}

fn refine_extremum<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, minimize: bool) -> f64 {
    // Golden-section search; the band is unimodal between adjacent samples.
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    for _ in 0..80 {
        let a = hi - phi * (hi - lo);
        let b = lo + phi * (hi - lo);
        let keep_left = if minimize { f(a) < f(b) } else { f(a) > f(b) };
        if keep_left {
            hi = b;
        } else {
            lo = a;
        }
    }
    f(0.5 * (lo + hi))
}

/// Quasienergy gaps at E = 0 and E = π: (min_k E, π - max_k E), located by
/// sampling one band period plus golden-section refinement.
pub fn gap(theta1: f64, theta2: f64, k_samples: usize) -> (f64, f64) {
    assert!(k_samples >= 64, "need at least 64 k samples");
    let e = |k: f64| cos_quasienergy(theta1, theta2, k).clamp(-1.0, 1.0).acos();
    // E depends on k through cos 2k only; one period is k ∈ [0, π).
    let h = std::f64::consts::PI / k_samples as f64;
    let mut min_i = 0;
    let mut max_i = 0;
    let mut min_e = f64::INFINITY;
    let mut max_e = f64::NEG_INFINITY;
    for i in 0..=k_samples {
        let v = e(i as f64 * h);
        if v < min_e {
            min_e = v;
            min_i = i;
        }
        if v > max_e {
            max_e = v;
            max_i = i;
        }
    }
    let bracket = |i: usize| {
        (
            (i.saturating_sub(1)) as f64 * h,
            ((i + 1).min(k_samples)) as f64 * h,
        )
    };
    let (lo, hi) = bracket(min_i);
    let e_min = refine_extremum(&e, lo, hi, true).min(min_e);
    let (lo, hi) = bracket(max_i);
    let e_max = refine_extremum(&e, lo, hi, false).max(max_e);
    (e_min, std::f64::consts::PI - e_max)
}

/// Winding of the planar vector (n_y, n_z) over one full period of
/// q = 2k, by unwrapped-angle accumulation. Sample count doubles until the
/// rounded integer is stable twice.
fn frame_winding(theta1: f64, theta2: f64) -> Result<i64> {
    let mut samples = 4096usize;
    let mut stable: Option<(i64, u32)> = None;
    loop {
        let mut total = 0.0;
        let mut prev = {
            let (ny, nz) = planar_vector(theta1, theta2, 0.0);
            nz.atan2(ny)
        };
        for j in 1..=samples {
            let q = TWO_PI * j as f64 / samples as f64;
            let (ny, nz) = planar_vector(theta1, theta2, q / 2.0);
            let ang = nz.atan2(ny);
            let mut d = ang - prev;
            if d > std::f64::consts::PI {
                d -= TWO_PI;
            } else if d < -std::f64::consts::PI {
                d += TWO_PI;
            }
            total += d;
            prev = ang;
        }
        let w = total / TWO_PI;
        let rounded = w.round();
        if (w - rounded).abs() > 1e-6 {
            return Err(WalkError::Numeric(format!(
                "winding accumulation did not reach an integer: {w}"
            )));
        }
        let rounded = rounded as i64;
        stable = match stable {
            Some((prev_w, count)) if prev_w == rounded => {
                if count + 1 >= 2 {
                    return Ok(rounded);
                }
                Some((rounded, count + 1))
            }
            _ => Some((rounded, 0)),
        };
        samples *= 2;
        if samples > 1 << 22 {
            return Err(WalkError::Numeric(
                "winding did not stabilize under sample refinement".into(),
            ));
        }
    }
}

/// Minimum gap below which the winding pair is considered undefined.
pub const WINDING_GAP_TOL: f64 = 1e-6;

/// The pair (ν0, νπ) from windings in the two symmetric frames: the native
/// frame `R(θ1/2)·T·R(θ2)·T·R(θ1/2)` and the cyclically shifted frame with
/// θ1 and θ2 exchanged. The combination signs are calibrated once against
/// the four phase labels quoted in the source analysis.
pub fn winding_pair(theta1: f64, theta2: f64) -> Result<PhaseLabel> {
    let (gap0, gap_pi) = gap(theta1, theta2, 256);
    if gap0 <= WINDING_GAP_TOL || gap_pi <= WINDING_GAP_TOL {
        return Err(WalkError::GaplessWinding {
            gap0,
            gap_pi,
            tol: WINDING_GAP_TOL,
        });
    }
    let w_a = frame_winding(theta1, theta2)?;
    let w_b = frame_winding(theta2, theta1)?;
    Ok(PhaseLabel {
        nu0: w_a - w_b,
        nu_pi: w_a + w_b,
    })
}

/// One cell of the (θ1, θ2) phase diagram: `None` where either gap is below
/// the boundary tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseCell {
    pub theta1: f64,
    pub theta2: f64,
    pub label: Option<PhaseLabel>,
}

pub const BOUNDARY_GAP_TOL: f64 = 1e-3;

/// Phase diagram over (θ1, θ2) ∈ [-2π, 2π]² on a `resolution`×`resolution`
/// grid (endpoints included). Cells are evaluated in parallel; output
/// ordering is row-major in θ1 then θ2 and deterministic.
pub fn phase_diagram(resolution: usize) -> Result<Vec<PhaseCell>> {
    if resolution < 16 {
        return Err(WalkError::Validation(format!(
            "phase diagram resolution must be >= 16, got {resolution}"
        )));
    }
    let axis: Vec<f64> = (0..resolution)
        .map(|i| -TWO_PI + 2.0 * TWO_PI * i as f64 / (resolution - 1) as f64)
        .collect();
    let cells: Vec<Result<PhaseCell>> = axis
        .par_iter()
        .flat_map_iter(|&theta1| {
            let axis = axis.clone();
            axis.into_iter().map(move |theta2| {
                let (gap0, gap_pi) = gap(theta1, theta2, 128);
                let label = if gap0 < BOUNDARY_GAP_TOL || gap_pi < BOUNDARY_GAP_TOL {
                    None
                } else {
                    Some(winding_pair(theta1, theta2)?)
                };
                Ok(PhaseCell {
                    theta1,
                    theta2,
                    label,
                })
            })
        })
        .collect();
    cells.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn random_triple(seed: u64, i: u64) -> (f64, f64, f64) {
        let r = |j| rng::unit_f64(rng::mix(seed, &[i, j]));
        (
            (r(0) - 0.5) * 2.0 * TWO_PI,
            (r(1) - 0.5) * 2.0 * TWO_PI,
            (r(2) - 0.5) * TWO_PI,
        )
    }

    #[test]
    fn operator_at_zero_angles_is_double_shift() {
        let k = 0.37;
        let u = bloch_operator(0.0, 0.0, k);
        let expect = Mat2::diag(
            C64::from_polar(1.0, -2.0 * k),
            C64::from_polar(1.0, 2.0 * k),
        );
        assert!(u.sub(&expect).max_abs() < 1e-15);
        assert_abs_diff_eq!(0.5 * u.trace().re, (2.0 * k).cos(), epsilon = 1e-15);
    }

    #[test]
    fn operator_is_unitary() {
        for i in 0..200 {
            let (t1, t2, k) = random_triple(7, i);
            let u = bloch_operator(t1, t2, k);
            let err = u.adjoint().mul(&u).sub(&Mat2::identity()).max_abs();
            assert!(err < 1e-12, "unitarity violated by {err}");
        }
    }

    #[test]
    fn half_trace_matches_closed_form() {
        let mut worst = 0.0f64;
        for i in 0..1000 {
            let (t1, t2, k) = random_triple(13, i);
            let u = bloch_operator(t1, t2, k);
            let err = (0.5 * u.trace().re - cos_quasienergy(t1, t2, k)).abs();
            worst = worst.max(err);
        }
        assert!(worst < 1e-12, "worst trace-identity error {worst}");
    }

    #[test]
    fn quasienergy_at_zero_angles() {
        let d = quasienergy_and_vector(0.0, 0.0, PI / 4.0);
        assert_abs_diff_eq!(d.e, PI / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn flat_band_is_k_independent() {
        for i in 0..32 {
            let k = -PI + PI * i as f64 / 16.0;
            let d = quasienergy_and_vector(PI / 3.0, PI, k);
            assert_abs_diff_eq!(d.e, PI / 3.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn quasienergy_collapses_to_angle_difference_at_k_zero() {
        let d = quasienergy_and_vector(-PI / 4.0, 3.0 * PI / 8.0, 0.0);
        assert_abs_diff_eq!(d.e, (5.0 * PI / 16.0f64).cos().acos(), epsilon = 1e-14);
        assert_abs_diff_eq!(d.e, 0.9817, epsilon = 1e-4);
    }

    #[test]
    fn bloch_vector_is_unit_and_chiral() {
        for i in 0..500 {
            let (t1, t2, k) = random_triple(23, i);
            let d = quasienergy_and_vector(t1, t2, k);
            if d.e.sin() <= 1e-8 {
                assert!(d.n.is_none());
                continue;
            }
            let n = d.n.unwrap();
            assert_eq!(n[0], 0.0);
            let norm = (n[1] * n[1] + n[2] * n[2]).sqrt();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-10);
        }
    }

    /// σ_x · H(k) · σ_x = -H(k) for H built from the band data.
    #[test]
    fn effective_hamiltonian_anticommutes_with_sigma_x() {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let sigma_x = Mat2([[z, o], [o, z]]);
        let sigma_y = Mat2([[z, -i], [i, z]]);
        let sigma_z = Mat2([[o, z], [z, -o]]);
        for t in 0..200 {
            let (t1, t2, k) = random_triple(31, t);
            let d = quasienergy_and_vector(t1, t2, k);
            let Some(n) = d.n else { continue };
            let h = sigma_y
                .scale(C64::new(d.e * n[1], 0.0))
                .add(&sigma_z.scale(C64::new(d.e * n[2], 0.0)));
            let conj = sigma_x.mul(&h).mul(&sigma_x);
            assert!(conj.add(&h).max_abs() < 1e-12);
        }
    }

    /// The operator decomposes on the band data as
    /// U(k) = cos E · I - i sin E (n_y σ_y - n_z σ_z): the closed-form
    /// vector uses the opposite Fourier sign of k, which mirrors n_z and
    /// leaves cos E (and hence the trace identity) unchanged.
    #[test]
    fn operator_decomposes_on_band_data() {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let sigma_y = Mat2([[z, -i], [i, z]]);
        let sigma_z = Mat2([[o, z], [z, -o]]);
        for t in 0..200 {
            let (t1, t2, k) = random_triple(41, t);
            let d = quasienergy_and_vector(t1, t2, k);
            let Some(n) = d.n else { continue };
            let u = bloch_operator(t1, t2, k);
            let rebuilt = Mat2::identity()
                .scale(C64::new(d.e.cos(), 0.0))
                .add(&sigma_y.scale(C64::new(0.0, -d.e.sin() * n[1])))
                .add(&sigma_z.scale(C64::new(0.0, d.e.sin() * n[2])));
            assert!(u.sub(&rebuilt).max_abs() < 1e-10);
        }
    }

    #[test]
    fn gap_closes_at_zero_for_equal_angles() {
        let (g0, gpi) = gap(PI / 3.0, PI / 3.0, 128);
        assert!(g0 < 1e-10);
        assert!(gpi > 0.5);
    }

    #[test]
    fn gap_closes_at_pi_for_opposite_angles() {
        let (g0, gpi) = gap(PI / 3.0, -PI / 3.0, 128);
        assert!(gpi < 1e-10);
        assert!(g0 > 0.5);
    }

    #[test]
    fn gapped_point_has_both_gaps() {
        let (g0, gpi) = gap(PI / 3.0, 0.0, 128);
        assert!(g0 > 0.2 && gpi > 0.2);
    }

    /// Band extremes sit at cos 2k = ±1, so the gaps have closed forms.
    #[test]
    fn gap_matches_band_extreme_analysis() {
        for i in 0..100 {
            let (t1, t2, _) = random_triple(53, i);
            let e1 = ((t1 - t2) / 2.0).cos().clamp(-1.0, 1.0).acos();
            let e2 = (-((t1 + t2) / 2.0).cos()).clamp(-1.0, 1.0).acos();
            let (g0, gpi) = gap(t1, t2, 128);
            assert_abs_diff_eq!(g0, e1.min(e2), epsilon = 1e-9);
            assert_abs_diff_eq!(gpi, PI - e1.max(e2), epsilon = 1e-9);
        }
    }

    #[test]
    fn winding_labels_match_published_phases() {
        let cases = [
            ((-PI / 4.0, 3.0 * PI / 8.0), (1, -1)),
            ((3.0 * PI / 4.0, -5.0 * PI / 8.0), (-1, -1)),
            ((-3.0 * PI / 4.0, -5.0 * PI / 8.0), (1, 1)),
            ((PI / 3.0, 0.0), (-1, -1)),
        ];
        for ((t1, t2), (nu0, nu_pi)) in cases {
            let label = winding_pair(t1, t2).unwrap();
            assert_eq!(label, PhaseLabel { nu0, nu_pi }, "at ({t1}, {t2})");
        }
    }

    #[test]
    fn winding_rejects_gapless_input() {
        assert!(matches!(
            winding_pair(PI / 3.0, PI / 3.0),
            Err(WalkError::GaplessWinding { .. })
        ));
    }

    /// The two symmetric frames are similar matrices, so their quasienergy
    /// bands coincide.
    #[test]
    fn frames_share_the_spectrum() {
        for i in 0..200 {
            let (t1, t2, k) = random_triple(61, i);
            let tr_a = bloch_operator(t1, t2, k).trace();
            let tr_b = bloch_operator(t2, t1, k).trace();
            assert!((tr_a - tr_b).norm() < 1e-12);
        }
    }

    #[test]
    fn phase_diagram_boundaries_match_analytic_lines() {
        let cells = phase_diagram(33).unwrap();
        for cell in &cells {
            let e1 = ((cell.theta1 - cell.theta2) / 2.0)
                .cos()
                .clamp(-1.0, 1.0)
                .acos();
            let e2 = (-((cell.theta1 + cell.theta2) / 2.0).cos())
                .clamp(-1.0, 1.0)
                .acos();
            let g0 = e1.min(e2);
            let gpi = PI - e1.max(e2);
            let analytic_boundary = g0 < BOUNDARY_GAP_TOL || gpi < BOUNDARY_GAP_TOL;
            assert_eq!(
                cell.label.is_none(),
                analytic_boundary,
                "cell ({}, {})",
                cell.theta1,
                cell.theta2
            );
        }
    }

    #[test]
    fn labels_are_4pi_periodic() {
        for i in 0..20 {
            let (t1, t2, _) = random_triple(71, i);
            let Ok(a) = winding_pair(t1, t2) else {
                continue;
            };
            let b = winding_pair(t1 + 2.0 * TWO_PI, t2).unwrap();
            let c = winding_pair(t1, t2 - 2.0 * TWO_PI).unwrap();
            assert_eq!(a, b);
            assert_eq!(a, c);
        }
    }
}
