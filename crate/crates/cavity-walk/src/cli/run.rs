//! Command execution: resolve the spec, run the experiment, write the
//! output tables and the run manifest.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use cavity_walk::bloch::{gap, phase_diagram, quasienergy_and_vector, winding_pair};
use cavity_walk::moments::moment_scan;
use cavity_walk::spectral::boundary_mode_report;
use cavity_walk::walk::{ensemble_average, evolve};
use cavity_walk::DensityProfile;

use super::config::{
    BoundarySpec, EigsSpec, MomentScanSpec, PhaseDiagramSpec, SpectrumSpec, WalkSpec, WindingSpec,
};
use super::table::{float, int, write_csv, write_json};
use super::CliError;

/// Record of one CLI run, written next to the outputs. Feeding the manifest
/// back as `--config` replays the run with byte-identical outputs.
#[derive(Serialize)]
struct RunManifest<'a, T: Serialize> {
    command: &'a str,
    config: &'a T,
    version: &'a str,
    wall_clock_seconds: f64,
    outputs: &'a [String],
}

fn ensure_out_dir(out: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", out.display())))
}

fn finish<T: Serialize>(
    command: &str,
    spec: &T,
    out: &Path,
    outputs: Vec<PathBuf>,
    started: Instant,
) -> Result<(), CliError> {
    let names: Vec<String> = outputs
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    let manifest = RunManifest {
        command,
        config: spec,
        version: env!("CARGO_PKG_VERSION"),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        outputs: &names,
    };
    write_json(&out.join("run-manifest.json"), &manifest)?;
    for p in &outputs {
        println!("wrote {}", p.display());
    }
    println!("wrote {}", out.join("run-manifest.json").display());
    Ok(())
}

fn density_rows(density: &DensityProfile) -> Vec<Vec<String>> {
    density
        .iter()
        .map(|(x, p)| vec![int(x), float(p)])
        .collect()
}

pub fn run_walk(spec: WalkSpec, out: &Path) -> Result<(), CliError> {
    let started = Instant::now();
    let spec = spec.resolved();
    ensure_out_dir(out)?;
    if spec.record_stride == 0 {
        return Err(CliError::Config("record_stride must be >= 1".into()));
    }
    let records = evolve(&spec.walk_config()?)?;
    let mut rows = Vec::new();
    for r in &records {
        if r.step % spec.record_stride != 0 && r.step != spec.steps {
            continue;
        }
        for (x, p) in r.density.iter() {
            rows.push(vec![int(r.step as i64), int(x), float(p)]);
        }
    }
    let csv = out.join("walk.csv");
    write_csv(&csv, &["step", "x", "p"], rows)?;
    let last = records.last().expect("N + 1 records");
    println!(
        "final step {}: norm^2 = {:.6}, argmax x = {}",
        last.step,
        last.norm_sqr,
        last.density.argmax()
    );
    finish("walk", &spec, out, vec![csv], started)
}

#[derive(Serialize)]
struct BoundarySummary {
    steps: u32,
    realizations: u32,
    total_probability: f64,
    argmax_site: i64,
    max_probability: f64,
    /// Probability within 2 sites of the wall.
    wall_weight: f64,
}

pub fn run_boundary(spec: BoundarySpec, out: &Path) -> Result<(), CliError> {
    let started = Instant::now();
    let spec = spec.resolved();
    ensure_out_dir(out)?;
    let config = spec.walk_config()?;
    let mean = if spec.realizations > 1 {
        ensemble_average(&config, spec.realizations)?.mean
    } else {
        evolve(&config)?
            .into_iter()
            .last()
            .expect("N + 1 records")
            .density
    };
    let csv = out.join("boundary_density.csv");
    write_csv(&csv, &["x", "p"], density_rows(&mean))?;
    let wall_weight: f64 = ((spec.wall - 2)..=(spec.wall + 2))
        .map(|x| mean.at(x))
        .sum();
    let summary = BoundarySummary {
        steps: spec.steps,
        realizations: spec.realizations,
        total_probability: mean.total(),
        argmax_site: mean.argmax(),
        max_probability: mean.at(mean.argmax()),
        wall_weight,
    };
    let json = out.join("boundary_summary.json");
    write_json(&json, &summary)?;
    println!(
        "argmax x = {}, wall weight = {:.4}, total = {:.4}",
        summary.argmax_site, summary.wall_weight, summary.total_probability
    );
    finish("boundary", &spec, out, vec![csv, json], started)
}

pub fn run_spectrum(spec: SpectrumSpec, out: &Path) -> Result<(), CliError> {
    let started = Instant::now();
    ensure_out_dir(out)?;
    if spec.k_points < 2 {
        return Err(CliError::Config("k_points must be >= 2".into()));
    }
    let theta1 = spec.theta1_over_pi * PI;
    let theta2 = spec.theta2_over_pi * PI;
    let rows: Vec<Vec<String>> = (0..spec.k_points)
        .map(|i| {
            let k_over_pi = -0.5 + i as f64 / (spec.k_points - 1) as f64;
            let data = quasienergy_and_vector(theta1, theta2, k_over_pi * PI);
            let (ny, nz) = match data.n {
                Some(n) => (n[1], n[2]),
                None => (f64::NAN, f64::NAN),
            };
            vec![float(k_over_pi), float(data.e / PI), float(ny), float(nz)]
        })
        .collect();
    let csv = out.join("spectrum.csv");
    write_csv(&csv, &["k_over_pi", "e_over_pi", "n_y", "n_z"], rows)?;
    let (g0, gp) = gap(theta1, theta2, 512);
    println!("gap at E=0: {g0:.6}, gap at E=pi: {gp:.6}");
    finish("spectrum", &spec, out, vec![csv], started)
}

pub fn run_phase_diagram(spec: PhaseDiagramSpec, out: &Path) -> Result<(), CliError> {
    let started = Instant::now();
    ensure_out_dir(out)?;
    let cells = phase_diagram(spec.resolution)?;
    let rows: Vec<Vec<String>> = cells
        .iter()
        .map(|c| {
            let (nu0, nu_pi, boundary) = match c.label {
                Some(l) => (l.nu0, l.nu_pi, 0),
                None => (0, 0, 1),
            };
            vec![
                float(c.theta1 / PI),
                float(c.theta2 / PI),
                int(nu0),
                int(nu_pi),
                int(boundary),
            ]
        })
        .collect();
    let boundary_cells = cells.iter().filter(|c| c.label.is_none()).count();
    let csv = out.join("phase_diagram.csv");
    write_csv(
        &csv,
        &[
            "theta1_over_pi",
            "theta2_over_pi",
            "nu0",
            "nuPi",
            "boundary_flag",
        ],
        rows,
    )?;
    println!(
        "{} cells, {} on or near a phase boundary",
        cells.len(),
        boundary_cells
    );
    finish("phase-diagram", &spec, out, vec![csv], started)
}

#[derive(Serialize)]
struct WindingResult {
    theta1_over_pi: f64,
    theta2_over_pi: f64,
    nu0: i64,
    nu_pi: i64,
    gap_zero: f64,
    gap_pi: f64,
}

pub fn run_winding(spec: WindingSpec, out: &Path) -> Result<(), CliError> {
    let started = Instant::now();
    ensure_out_dir(out)?;
    let theta1 = spec.theta1_over_pi * PI;
    let theta2 = spec.theta2_over_pi * PI;
    let label = winding_pair(theta1, theta2)?;
    let (gap_zero, gap_pi) = gap(theta1, theta2, 512);
    let result = WindingResult {
        theta1_over_pi: spec.theta1_over_pi,
        theta2_over_pi: spec.theta2_over_pi,
        nu0: label.nu0,
        nu_pi: label.nu_pi,
        gap_zero,
        gap_pi,
    };
    let json = out.join("winding.json");
    write_json(&json, &result)?;
    println!("nu0 = {}, nuPi = {}", label.nu0, label.nu_pi);
    finish("winding", &spec, out, vec![json], started)
}

pub fn run_moment_scan(spec: MomentScanSpec, out: &Path) -> Result<(), CliError> {
    let started = Instant::now();
    let spec = spec.resolved();
    ensure_out_dir(out)?;
    let scan = moment_scan(&spec.scan_params()?)?;
    let rows: Vec<Vec<String>> = scan
        .samples
        .iter()
        .map(|s| {
            vec![
                float(s.theta2 / PI),
                float(s.m_numeric),
                float(s.m_analytic),
            ]
        })
        .collect();
    let csv = out.join("moment_scan.csv");
    write_csv(&csv, &["theta2_over_pi", "m_numeric", "m_analytic"], rows)?;
    let max_err = scan
        .samples
        .iter()
        .map(|s| (s.m_numeric - s.m_analytic).abs())
        .fold(0.0f64, f64::max);
    println!(
        "{} points, max |numeric - analytic| = {max_err:.4}",
        scan.samples.len()
    );
    finish("moment-scan", &spec, out, vec![csv], started)
}

#[derive(Serialize)]
struct EigsSummary {
    ring_size: usize,
    walls: Vec<usize>,
    zero_counts: Vec<usize>,
    pi_counts: Vec<usize>,
}

pub fn run_eigs(spec: EigsSpec, out: &Path) -> Result<(), CliError> {
    let started = Instant::now();
    ensure_out_dir(out)?;
    let (modes, report) = boundary_mode_report(
        spec.ring_size,
        &spec.profile()?,
        &spec.scattering(),
        spec.e_tol,
        spec.loc_threshold,
    )?;
    let rows: Vec<Vec<String>> = modes
        .iter()
        .enumerate()
        .map(|(i, m)| {
            vec![
                int(i as i64),
                float(m.quasienergy / PI),
                float(m.modulus),
                int(m.center as i64),
                float(m.localization_length),
            ]
        })
        .collect();
    let csv = out.join("eigs.csv");
    write_csv(
        &csv,
        &[
            "index",
            "e_over_pi",
            "modulus",
            "center",
            "localization_length",
        ],
        rows,
    )?;
    let summary = EigsSummary {
        ring_size: spec.ring_size,
        walls: report.walls.clone(),
        zero_counts: report.zero_counts.clone(),
        pi_counts: report.pi_counts.clone(),
    };
    let json = out.join("boundary_report.json");
    write_json(&json, &summary)?;
    println!(
        "boundary modes per wall: E~0 {:?}, E~pi {:?}",
        report.zero_counts, report.pi_counts
    );
    finish("eigs", &spec, out, vec![csv, json], started)
}
