//! Domain types and elementary state constructors/observables.
//!
//! Coin basis ordering is fixed crate-wide as (|R⟩, |L⟩) ↔ component
//! indices (0, 1); every matrix in the crate uses this order.

use num_complex::Complex64 as C64;

use crate::error::WalkError;
use crate::Result;

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Complex two-component amplitudes over a finite contiguous 1D lattice
/// window. Index 0 of each pair is the R polarization, index 1 the L.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    /// Site index of the first array entry.
    origin: i64,
    amps: Vec<[C64; 2]>,
}

impl SpinorField {
    /// Zero state over the window `[origin, origin + len)`.
    pub fn zeros(origin: i64, len: usize) -> Self {
        assert!(len >= 1, "lattice length must be >= 1");
        Self {
            origin,
            amps: vec![[C64::new(0.0, 0.0); 2]; len],
        }
    }

    pub fn origin(&self) -> i64 {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    /// Inclusive first site, exclusive last site of the window.
    pub fn site_range(&self) -> (i64, i64) {
        (self.origin, self.origin + self.amps.len() as i64)
    }

    /// Amplitude pair at site `x`; zero outside the window.
    pub fn amp(&self, x: i64) -> [C64; 2] {
        match self.index_of(x) {
            Some(i) => self.amps[i],
            None => [C64::new(0.0, 0.0); 2],
        }
    }

    pub fn index_of(&self, x: i64) -> Option<usize> {
        if x < self.origin {
            return None;
        }
        let i = (x - self.origin) as usize;
        (i < self.amps.len()).then_some(i)
    }

    pub fn amps(&self) -> &[[C64; 2]] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [[C64; 2]] {
        &mut self.amps
    }

    /// Squared 2-norm, Σ |a(x, c)|².
    pub fn norm_sqr(&self) -> f64 {
        self.amps
            .iter()
            .map(|a| a[0].norm_sqr() + a[1].norm_sqr())
            .sum()
    }

    /// Checks the type invariants: finite amplitudes, squared norm ≤ 1 + 1e-9.
    pub fn validate(&self) -> Result<()> {
        for a in &self.amps {
            if !a[0].is_finite() || !a[1].is_finite() {
                return Err(WalkError::Validation(
                    "spinor field contains a non-finite amplitude".into(),
                ));
            }
        }
        let n2 = self.norm_sqr();
        if n2 > 1.0 + 1e-9 {
            return Err(WalkError::Validation(format!(
                "spinor field squared norm {n2} exceeds 1"
            )));
        }
        Ok(())
    }
}

/// Wrap an angle into the canonical storage range [-2π, 2π].
///
/// Half-angle formulas are 4π-periodic, so angles are reduced mod 4π and
/// then shifted into the symmetric interval.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta % (2.0 * TWO_PI);
    if t > TWO_PI {
        t -= 2.0 * TWO_PI;
    } else if t < -TWO_PI {
        t += 2.0 * TWO_PI;
    }
    t
}

/// Per-site rotation angles (θ1, θ2): piecewise constant with one wall.
/// Sites `x < wall_position` use the left angles, `x >= wall_position` the
/// right angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinProfile {
    pub theta1_left: f64,
    pub theta2_left: f64,
    pub theta1_right: f64,
    pub theta2_right: f64,
    pub wall_position: i64,
}

impl CoinProfile {
    pub fn new(left: (f64, f64), right: (f64, f64), wall_position: i64) -> Result<Self> {
        for t in [left.0, left.1, right.0, right.1] {
            if !t.is_finite() {
                return Err(WalkError::Validation("coin angle is not finite".into()));
            }
        }
        Ok(Self {
            theta1_left: wrap_angle(left.0),
            theta2_left: wrap_angle(left.1),
            theta1_right: wrap_angle(right.0),
            theta2_right: wrap_angle(right.1),
            wall_position,
        })
    }

    /// Profile with equal angles everywhere.
    pub fn homogeneous(theta1: f64, theta2: f64) -> Result<Self> {
        Self::new((theta1, theta2), (theta1, theta2), 0)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.theta1_left == self.theta1_right && self.theta2_left == self.theta2_right
    }

    pub fn theta1_at(&self, x: i64) -> f64 {
        if x < self.wall_position {
            self.theta1_left
        } else {
            self.theta1_right
        }
    }

    pub fn theta2_at(&self, x: i64) -> f64 {
        if x < self.wall_position {
            self.theta2_left
        } else {
            self.theta2_right
        }
    }
}

/// Complex reflection/transmission coefficients of the cavity translation
/// step: `r_R` multiplies the right-moving R branch, `t_L` the left-moving
/// L branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityScattering {
    pub r_r: C64,
    pub t_l: C64,
}

impl CavityScattering {
    pub fn new(r_r: C64, t_l: C64) -> Result<Self> {
        if !r_r.is_finite() || !t_l.is_finite() {
            return Err(WalkError::Validation(
                "scattering coefficient is not finite".into(),
            ));
        }
        if r_r.norm() > 1.0 + 1e-12 || t_l.norm() > 1.0 + 1e-12 {
            return Err(WalkError::Validation(format!(
                "scattering coefficients must have modulus <= 1 (got |r_R| = {}, |t_L| = {})",
                r_r.norm(),
                t_l.norm()
            )));
        }
        Ok(Self { r_r, t_l })
    }

    /// Lossless limit: r_R = 1, t_L = -1 exactly. The -1 carries the π
    /// phase of the L branch of the translation operator.
    pub fn ideal() -> Self {
        Self {
            r_r: C64::new(1.0, 0.0),
            t_l: C64::new(-1.0, 0.0),
        }
    }

    /// Practical cavity parameters: 0.98·e^{i·0.05π} and 0.98·e^{i·0.95π}.
    pub fn realistic() -> Self {
        Self {
            r_r: C64::from_polar(0.98, 0.05 * std::f64::consts::PI),
            t_l: C64::from_polar(0.98, 0.95 * std::f64::consts::PI),
        }
    }
}

/// Uniform angle fluctuation applied to every rotation layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    /// Half-width of the fluctuation interval, in radians.
    pub delta_max: f64,
    /// Independent draw per site (true) vs one shared draw per rotation
    /// layer (false).
    pub per_site: bool,
    pub master_seed: u64,
}

impl NoiseModel {
    pub fn new(delta_max: f64, per_site: bool, master_seed: u64) -> Result<Self> {
        if !delta_max.is_finite() || delta_max < 0.0 {
            return Err(WalkError::Validation(format!(
                "delta_max must be finite and >= 0, got {delta_max}"
            )));
        }
        Ok(Self {
            delta_max,
            per_site,
            master_seed,
        })
    }

    /// Angle fluctuation for one (step, rotation layer, site) cell.
    pub fn offset(&self, step: u32, layer: u32, site: i64) -> f64 {
        if self.delta_max == 0.0 {
            return 0.0;
        }
        let site_key = if self.per_site { site as u64 } else { 0 };
        crate::rng::uniform_symmetric(
            self.master_seed,
            &[step as u64, layer as u64, site_key],
            self.delta_max,
        )
    }

    /// Same noise model keyed to a different master seed.
    pub fn reseeded(&self, master_seed: u64) -> Self {
        Self {
            master_seed,
            ..*self
        }
    }
}

/// Full specification of one walk run. The step time is fixed at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkConfig {
    pub profile: CoinProfile,
    pub scattering: CavityScattering,
    pub noise: Option<NoiseModel>,
    pub steps: u32,
    pub x0: i64,
    /// Initial coin amplitudes (a_R, a_L); must be normalized.
    pub coin: [C64; 2],
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        let n2 = self.coin[0].norm_sqr() + self.coin[1].norm_sqr();
        if (n2 - 1.0).abs() > 1e-12 {
            return Err(WalkError::Validation(format!(
                "initial coin amplitudes must satisfy |a_R|^2 + |a_L|^2 = 1, got {n2}"
            )));
        }
        Ok(())
    }

    /// Window half-width that keeps every translation strictly inside the
    /// lattice: the light cone reaches x0 ± 2N, plus margin.
    pub fn lattice_halfwidth(&self) -> i64 {
        2 * self.steps as i64 + 2
    }
}

/// Per-site probability distribution P(x) at a given step.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    origin: i64,
    p: Vec<f64>,
    pub step: u32,
}

impl DensityProfile {
    pub fn from_parts(origin: i64, p: Vec<f64>, step: u32) -> Self {
        Self { origin, p, step }
    }

    pub fn origin(&self) -> i64 {
        self.origin
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }

    pub fn site_range(&self) -> (i64, i64) {
        (self.origin, self.origin + self.p.len() as i64)
    }

    /// P(x); zero outside the window.
    pub fn at(&self, x: i64) -> f64 {
        if x < self.origin {
            return 0.0;
        }
        let i = (x - self.origin) as usize;
        self.p.get(i).copied().unwrap_or(0.0)
    }

    /// Total probability; < 1 for lossy walks.
    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }

    /// Iterate over (site, probability).
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.p
            .iter()
            .enumerate()
            .map(move |(i, &p)| (self.origin + i as i64, p))
    }

    /// Site with the largest probability (smallest site on ties).
    pub fn argmax(&self) -> i64 {
        let mut best = (self.origin, f64::NEG_INFINITY);
        for (x, p) in self.iter() {
            if p > best.1 {
                best = (x, p);
            }
        }
        best.0
    }
}

/// State with amplitude (a_R, a_L) at `x0` and zero elsewhere, over the
/// window `[x0 - halfwidth, x0 + halfwidth]`.
pub fn make_initial_state(
    x0: i64,
    a_r: C64,
    a_l: C64,
    lattice_halfwidth: i64,
) -> Result<SpinorField> {
    if lattice_halfwidth < 1 {
        return Err(WalkError::Validation(format!(
            "lattice halfwidth must be >= 1, got {lattice_halfwidth}"
        )));
    }
    let n2 = a_r.norm_sqr() + a_l.norm_sqr();
    if (n2 - 1.0).abs() > 1e-12 {
        return Err(WalkError::Validation(format!(
            "coin amplitudes must satisfy |a_R|^2 + |a_L|^2 = 1, got {n2}"
        )));
    }
    let origin = x0 - lattice_halfwidth;
    let len = (2 * lattice_halfwidth + 1) as usize;
    let mut state = SpinorField::zeros(origin, len);
    let i = state.index_of(x0).expect("x0 inside window");
    state.amps_mut()[i] = [a_r, a_l];
    Ok(state)
}

/// P(x) = |a(x, R)|² + |a(x, L)|².
pub fn photon_density(state: &SpinorField, step: u32) -> DensityProfile {
    let p = state
        .amps()
        .iter()
        .map(|a| a[0].norm_sqr() + a[1].norm_sqr())
        .collect();
    DensityProfile::from_parts(state.origin(), p, step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn initial_state_balanced_coin() {
        let s = make_initial_state(0, c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0), 32).unwrap();
        let d = photon_density(&s, 0);
        assert_abs_diff_eq!(d.at(0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.total(), 1.0, epsilon = 1e-15);
        assert_eq!(d.iter().filter(|&(_, p)| p != 0.0).count(), 1);
    }

    #[test]
    fn initial_state_basis_r() {
        let s = make_initial_state(0, c(1.0, 0.0), c(0.0, 0.0), 4).unwrap();
        assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-15);
        assert_eq!(s.amp(0)[0], c(1.0, 0.0));
        assert_eq!(s.amp(0)[1], c(0.0, 0.0));
    }

    #[test]
    fn initial_state_basis_l_offsite() {
        let s = make_initial_state(5, c(0.0, 0.0), c(1.0, 0.0), 8).unwrap();
        let d = photon_density(&s, 0);
        assert_abs_diff_eq!(d.at(5), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn initial_state_rejects_unnormalized_coin() {
        let err = make_initial_state(0, c(1.0, 0.0), c(1.0, 0.0), 4).unwrap_err();
        assert!(matches!(err, WalkError::Validation(_)));
    }

    #[test]
    fn density_of_superposition() {
        let mut s = SpinorField::zeros(-4, 9);
        let i0 = s.index_of(0).unwrap();
        let i2 = s.index_of(2).unwrap();
        s.amps_mut()[i0][0] = c(FRAC_1_SQRT_2, 0.0);
        s.amps_mut()[i2][1] = c(FRAC_1_SQRT_2, 0.0);
        let d = photon_density(&s, 0);
        assert_abs_diff_eq!(d.at(0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d.at(2), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn angle_wrapping() {
        assert_abs_diff_eq!(wrap_angle(5.0 * std::f64::consts::PI), std::f64::consts::PI);
        assert_abs_diff_eq!(
            wrap_angle(-5.0 * std::f64::consts::PI),
            -std::f64::consts::PI
        );
        assert_abs_diff_eq!(wrap_angle(TWO_PI), TWO_PI);
    }

    #[test]
    fn profile_regions() {
        let p = CoinProfile::new((0.1, 0.2), (0.3, 0.4), 0).unwrap();
        assert_eq!(p.theta1_at(-1), 0.1);
        assert_eq!(p.theta1_at(0), 0.3);
        assert_eq!(p.theta2_at(-5), 0.2);
        assert_eq!(p.theta2_at(7), 0.4);
    }

    #[test]
    fn scattering_ideal_values() {
        let s = CavityScattering::ideal();
        assert_eq!(s.r_r, c(1.0, 0.0));
        assert_eq!(s.t_l, c(-1.0, 0.0));
    }

    #[test]
    fn scattering_rejects_gain() {
        assert!(CavityScattering::new(c(1.1, 0.0), c(-1.0, 0.0)).is_err());
    }

    #[test]
    fn noise_zero_width_is_exactly_zero() {
        let n = NoiseModel::new(0.0, true, 42).unwrap();
        assert_eq!(n.offset(3, 1, -7), 0.0);
    }

    #[test]
    fn noise_global_draw_ignores_site() {
        let n = NoiseModel::new(0.1, false, 42).unwrap();
        assert_eq!(n.offset(3, 1, -7), n.offset(3, 1, 12));
        assert_ne!(n.offset(3, 1, 0), n.offset(3, 2, 0));
    }

    proptest! {
        #[test]
        fn density_sums_to_squared_norm(
            amps in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 1..40)
        ) {
            let mut s = SpinorField::zeros(-3, amps.len());
            for (i, (ar, ai, br, bi)) in amps.into_iter().enumerate() {
                s.amps_mut()[i] = [c(ar, ai), c(br, bi)];
            }
            let d = photon_density(&s, 0);
            prop_assert!((d.total() - s.norm_sqr()).abs() < 1e-12);
            prop_assert!(d.values().iter().all(|&p| p >= 0.0));
        }
    }
}
