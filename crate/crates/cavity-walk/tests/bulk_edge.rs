//! Cross-module check: boundary-mode counts from exact diagonalization
//! match the winding-number differences across each domain wall.

use cavity_walk::bloch::{gap, winding_pair};
use cavity_walk::model::{CavityScattering, CoinProfile, TWO_PI};
use cavity_walk::rng;
use cavity_walk::spectral::{boundary_mode_report, DEFAULT_E_TOL, DEFAULT_LOC_THRESHOLD};

use std::f64::consts::PI;

fn assert_counts_match(left: (f64, f64), right: (f64, f64), ring: usize) {
    let wl = winding_pair(left.0, left.1).unwrap();
    let wr = winding_pair(right.0, right.1).unwrap();
    let d0 = (wl.nu0 - wr.nu0).unsigned_abs() as usize;
    let dp = (wl.nu_pi - wr.nu_pi).unsigned_abs() as usize;
    let profile = CoinProfile::new(left, right, 0).unwrap();
    let (_, report) = boundary_mode_report(
        ring,
        &profile,
        &CavityScattering::ideal(),
        DEFAULT_E_TOL,
        DEFAULT_LOC_THRESHOLD,
    )
    .unwrap();
    for w in 0..2 {
        assert_eq!(
            report.zero_counts[w], d0,
            "E≈0 count at wall {w} for {left:?} | {right:?}"
        );
        assert_eq!(
            report.pi_counts[w], dp,
            "E≈π count at wall {w} for {left:?} | {right:?}"
        );
    }
}

#[test]
fn paper_cases_obey_bulk_edge_correspondence() {
    assert_counts_match(
        (-PI / 4.0, 3.0 * PI / 8.0),
        (3.0 * PI / 4.0, -5.0 * PI / 8.0),
        40,
    );
    assert_counts_match(
        (-3.0 * PI / 4.0, -5.0 * PI / 8.0),
        (PI / 4.0, 3.0 * PI / 8.0),
        40,
    );
    assert_counts_match((-PI / 4.0, 3.0 * PI / 8.0), (PI / 4.0, 3.0 * PI / 8.0), 40);
}

#[test]
fn random_gapped_pairs_obey_bulk_edge_correspondence() {
    // Seeded draws, filtered to well-gapped phases on both sides so the
    // boundary modes are tightly localized at L = 60.
    let mut found = 0;
    let mut i = 0u64;
    while found < 5 {
        let r = |j: u64| (rng::unit_f64(rng::mix(2024, &[i, j])) - 0.5) * 2.0 * TWO_PI;
        let (left, right) = ((r(0), r(1)), (r(2), r(3)));
        i += 1;
        assert!(i < 1000, "random pair generation exhausted");
        let (gl0, glp) = gap(left.0, left.1, 128);
        let (gr0, grp) = gap(right.0, right.1, 128);
        if gl0.min(glp).min(gr0).min(grp) < 0.4 {
            continue;
        }
        assert_counts_match(left, right, 60);
        found += 1;
    }
}
