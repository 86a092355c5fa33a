#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use astrogibbs::filaments::synthetic::{planted_line, uniform_points};
use astrogibbs::filaments::{BisousParams, Window};
use astrogibbs::heavytail::{simulate, ParetoTail, ScaledBeta, Tail, TailMixture};
use astrogibbs::orbit::KeplerOrbit;
use astrogibbs::{rng, AnnealingSchedule};
use astrogibbs_cli::{try_main, FilamentSettings, Manifest};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn run_cli(args: &[&str]) -> i32 {
    match try_main(std::iter::once("astrogibbs").chain(args.iter().copied())) {
        Ok(_) => 0,
        Err(e) => e.exit_code(),
    }
}

pub fn manifest(out: &Path) -> Manifest {
    serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap()
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

pub fn reference_orbit() -> KeplerOrbit {
    KeplerOrbit {
        period: 56.5330,
        semi_major_axis: 4936.0,
        eccentricity: 0.4958,
        inclination: 46.883,
        ascending_node: 75.125,
        arg_periapsis: 43.152,
        time_periapsis: 54314.26,
    }
}

/// 20 epochs over 120 days with 5 km Gaussian noise on each axis.
pub fn write_observations(path: &Path, seed: u64) {
    let truth = reference_orbit();
    let mut r = rng::from_seed(seed);
    let mut text = String::from("epoch_rjd,dx_km,dy_km,sigma_km\n");
    for k in 0..20 {
        let t = 54300.0 + 120.0 * k as f64 / 19.0;
        let (x, y) = truth.propagate(t).unwrap();
        let nx: f64 = r.sample(StandardNormal);
        let ny: f64 = r.sample(StandardNormal);
        writeln!(text, "{t},{},{},5", x + 5.0 * nx, y + 5.0 * ny).unwrap();
    }
    fs::write(path, text).unwrap();
}

pub fn write_prior(path: &Path) {
    let prior = r#"{
  "period": [56.0, 57.0],
  "semi_major_axis": [4500.0, 5500.0],
  "eccentricity": [0.3, 0.7],
  "inclination": [30.0, 60.0],
  "time_periapsis": [54290.0, 54340.0]
}
"#;
    fs::write(path, prior).unwrap();
}

pub fn window() -> Window {
    Window::new([0.0; 3], [30.0; 3]).unwrap()
}

/// A line of 100 points along x through the middle of the box, over 200
/// uniform points; noise only when `line` is false.
pub fn write_catalog(path: &Path, line: bool, seed: u64) {
    let w = window();
    let mut r = rng::from_seed(seed);
    let mut pts = Vec::new();
    if line {
        pts.extend(
            planted_line(&w, [5.0, 15.0, 15.0], [25.0, 15.0, 15.0], 100, 0.1, &mut r).unwrap(),
        );
    }
    pts.extend(uniform_points(&w, 200, &mut r));
    let mut text = String::from("x,y,z\n");
    for p in pts {
        writeln!(text, "{},{},{}", p[0], p[1], p[2]).unwrap();
    }
    fs::write(path, text).unwrap();
}

pub fn filament_params() -> BisousParams {
    BisousParams {
        half_length: [3.0, 3.0],
        radius: 0.3,
        hard_core: Some(3.0),
        alignment_deg: 20.0,
        rewards: [-1.0, 0.5, 1.5],
        min_count: 5.0,
        contrast: 1.5,
        penalty: 5.0,
        ..Default::default()
    }
}

pub fn filament_settings(steps_per_level: usize) -> FilamentSettings {
    FilamentSettings {
        model: filament_params(),
        window: Some(window()),
        schedule: AnnealingSchedule::new(10.0, 0.95, steps_per_level, 0.01).unwrap(),
        ..Default::default()
    }
}

pub fn write_json<T: serde::Serialize>(path: &Path, v: &T) {
    fs::write(path, serde_json::to_string_pretty(v).unwrap()).unwrap();
}

pub fn heavy_truth() -> TailMixture {
    TailMixture {
        center: ScaledBeta::new(2.0, 2.0, -1.0, 1.0).unwrap(),
        left: Tail::Pareto(ParetoTail::new(1.0, 1.5).unwrap()),
        right: Tail::Pareto(ParetoTail::new(1.0, 1.5).unwrap()),
        split_lo: -1.0,
        split_hi: 1.0,
        weights: [0.05, 0.9, 0.05],
    }
}

/// Heavy mixture whose center density stays positive at the splits.
pub fn flat_heavy_truth(index: f64) -> TailMixture {
    TailMixture {
        center: ScaledBeta::new(1.2, 1.2, -1.0, 1.0).unwrap(),
        left: Tail::Pareto(ParetoTail::new(1.0, index).unwrap()),
        right: Tail::Pareto(ParetoTail::new(1.0, index).unwrap()),
        ..heavy_truth()
    }
}

pub fn light_truth() -> TailMixture {
    TailMixture {
        center: ScaledBeta::new(2.5, 1.5, 0.0, 4.0).unwrap(),
        left: Tail::Beta(ScaledBeta::new(3.0, 1.0, -1.0, 0.0).unwrap()),
        right: Tail::Beta(ScaledBeta::new(1.0, 2.0, 4.0, 6.0).unwrap()),
        split_lo: 0.0,
        split_hi: 4.0,
        weights: [0.05, 0.9, 0.05],
    }
}

pub fn write_values(path: &Path, values: &[f64]) {
    let mut text = String::from("value\n");
    for v in values {
        writeln!(text, "{v}").unwrap();
    }
    fs::write(path, text).unwrap();
}

/// Inclinations 20, 60, 100 and perihelion arguments every 20°; heavy
/// tails only at w = 20 and w = 160.
pub fn write_planted_map(path: &Path, per_cell: usize) {
    let mut text = String::from("i_deg,w_deg,value\n");
    for i in [20.0, 60.0, 100.0] {
        for step in 0..18 {
            let w = 20.0 * step as f64;
            let law = if w == 20.0 || w == 160.0 {
                flat_heavy_truth(1.2)
            } else {
                light_truth()
            };
            let mut g = rng::stream(7, &format!("planted/{i}/{w}"));
            for v in simulate(&law, per_cell, &mut g) {
                writeln!(text, "{i},{w},{v}").unwrap();
            }
        }
    }
    fs::write(path, text).unwrap();
}

/// Result files of a run (everything listed in its manifest).
pub fn result_bytes(out: &Path) -> Vec<(String, Vec<u8>)> {
    manifest(out)
        .outputs
        .iter()
        .map(|o| (o.file.clone(), fs::read(out.join(&o.file)).unwrap()))
        .collect()
}

pub fn dir(root: &Path, name: &str) -> PathBuf {
    root.join(name)
}
