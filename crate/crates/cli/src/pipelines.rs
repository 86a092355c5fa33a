use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use astrogibbs::filaments::{detect, FilamentStats, Segment, Window};
use astrogibbs::heavytail::{
    build_coverage_map, fit_mixture_detailed, percentile_coverage_test, CoverageResult, FitConfig,
    Regime, TailIndex, TailMixture,
};
use astrogibbs::io;
use astrogibbs::orbit::{fit_orbit, OrbitMcmc, PriorBox, PriorSpec, SummaryRow};
use astrogibbs::rng::derive_seed;
use serde::Serialize;

use crate::config::{FilamentSettings, Pipeline, RunConfig, TailsSettings};
use crate::error::Result;

/// Runs the pipeline and returns the names of the files written to
/// `config.out`, in write order.
pub fn execute(config: &RunConfig) -> Result<Vec<String>> {
    fs::create_dir_all(&config.out)?;
    let out = config.out.as_path();
    let seed = config.seed;
    match &config.pipeline {
        Pipeline::Filaments { catalog, settings } => filaments(catalog, settings, out, seed),
        Pipeline::Orbit {
            observations,
            prior,
            mcmc,
        } => orbit(observations, prior, mcmc, out, seed),
        Pipeline::TailsFit { values, fit } => tails_fit(values, fit, out),
        Pipeline::TailsValidate {
            values,
            model,
            settings,
        } => tails_validate(values, model.as_deref(), settings, out, seed),
        Pipeline::TailsMap {
            perturbations,
            settings,
        } => tails_map(perturbations, settings, out, seed),
    }
}

fn create(out: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(out.join(name))?))
}

#[derive(Serialize)]
struct DetectionReport<'a> {
    stats: FilamentStats,
    best_energy: f64,
    acceptance_rate: f64,
    n_proposed: usize,
    intensity: f64,
    window: Window,
    segments: &'a [Segment],
}

fn filaments(catalog: &Path, s: &FilamentSettings, out: &Path, seed: u64) -> Result<Vec<String>> {
    let catalog = io::parse_catalog(catalog, s.window)?;
    let d = detect(
        &catalog,
        &s.model,
        &s.schedule,
        s.moves,
        s.record_every,
        derive_seed(seed, "filaments/detect"),
    )?;
    let summary = d.summary();
    io::write_json(
        &out.join("detection.json"),
        &DetectionReport {
            stats: summary.stats,
            best_energy: summary.best_energy,
            acceptance_rate: summary.acceptance_rate,
            n_proposed: summary.n_proposed,
            intensity: d.intensity,
            window: catalog.window,
            segments: &d.config.segments,
        },
    )?;
    io::write_segments_csv(
        create(out, "segments.csv")?,
        &d.config,
        s.model.connection_distance(),
        s.model.alignment_deg.to_radians(),
    )?;
    d.record.write_csv(create(out, "trace.csv")?)?;
    io::write_json(
        &out.join("trace.json"),
        &d.record
            .sidecar(s.record_every, Some(&s.schedule), Some(&s.moves)),
    )?;
    Ok(names(&[
        "detection.json",
        "segments.csv",
        "trace.csv",
        "trace.json",
    ]))
}

#[derive(Serialize)]
struct OrbitDiagnostics<'a> {
    prior: &'a PriorBox,
    initial: astrogibbs::orbit::KeplerOrbit,
    scales: [f64; 7],
    acceptance: &'a [f64],
    system_mass_kg: &'a SummaryRow,
}

fn orbit(
    observations: &Path,
    prior: &PriorSpec,
    mcmc: &OrbitMcmc,
    out: &Path,
    seed: u64,
) -> Result<Vec<String>> {
    let obs = io::parse_observations(observations)?;
    let prior = prior.resolve(&obs)?;
    let fit = fit_orbit(&obs, &prior, mcmc, derive_seed(seed, "orbit/fit"))?;
    let mut files = names(&["summary.json", "diagnostics.json"]);
    io::write_json(&out.join("summary.json"), &fit.summary)?;
    io::write_json(
        &out.join("diagnostics.json"),
        &OrbitDiagnostics {
            prior: &prior,
            initial: fit.initial,
            scales: fit.scales,
            acceptance: &fit.acceptance,
            system_mass_kg: &fit.mass_summary,
        },
    )?;
    for (k, chain) in fit.chains.iter().enumerate() {
        let csv = format!("chain_{k}.csv");
        let side = format!("chain_{k}.json");
        chain.write_csv(create(out, &csv)?)?;
        io::write_json(
            &out.join(&side),
            &chain.sidecar(mcmc.record_every, None, None),
        )?;
        files.push(csv);
        files.push(side);
    }
    Ok(files)
}

#[derive(Serialize)]
struct FitReport {
    n_values: usize,
    regime: Regime,
    tail_index: Option<TailIndex>,
}

fn fit_values(values: &[f64], fit: &FitConfig, out: &Path) -> Result<TailMixture> {
    let (mixture, tail_index) = fit_mixture_detailed(values, fit)?;
    io::write_json(&out.join("mixture.json"), &mixture)?;
    io::write_json(
        &out.join("fit.json"),
        &FitReport {
            n_values: values.len(),
            regime: mixture.regime(),
            tail_index,
        },
    )?;
    Ok(mixture)
}

fn tails_fit(values: &Path, fit: &FitConfig, out: &Path) -> Result<Vec<String>> {
    let values = io::parse_values(values)?;
    fit_values(&values, fit, out)?;
    Ok(names(&["mixture.json", "fit.json"]))
}

#[derive(Serialize)]
struct ValidationReport<'a> {
    fraction: f64,
    model: &'static str,
    regime: Regime,
    n_rep: usize,
    ci_level: f64,
    result: &'a CoverageResult,
}

fn tails_validate(
    values: &Path,
    model: Option<&Path>,
    s: &TailsSettings,
    out: &Path,
    seed: u64,
) -> Result<Vec<String>> {
    let values = io::parse_values(values)?;
    let mut files = Vec::new();
    let (mixture, source) = match model {
        Some(path) => {
            let m: TailMixture = io::read_json(path)?;
            m.validate()?;
            (m, "fixed")
        }
        None => {
            files = names(&["mixture.json", "fit.json"]);
            (fit_values(&values, &s.fit, out)?, "fitted")
        }
    };
    let result = percentile_coverage_test(
        &values,
        &mixture,
        &s.coverage,
        derive_seed(seed, "tails/validate"),
    )?;
    io::write_json(
        &out.join("coverage.json"),
        &ValidationReport {
            fraction: result.fraction,
            model: source,
            regime: mixture.regime(),
            n_rep: s.coverage.n_rep,
            ci_level: s.coverage.ci_level,
            result: &result,
        },
    )?;
    files.push("coverage.json".into());
    Ok(files)
}

fn tails_map(
    perturbations: &Path,
    s: &TailsSettings,
    out: &Path,
    seed: u64,
) -> Result<Vec<String>> {
    let samples = io::parse_perturbations(perturbations, s.perihelion_distance)?;
    let map = build_coverage_map(
        &samples,
        &s.fit,
        &s.coverage,
        derive_seed(seed, "tails/map"),
    )?;
    io::write_map_csv(create(out, "map.csv")?, &map)?;
    io::write_json(&out.join("map.json"), &map)?;
    Ok(names(&["map.csv", "map.json"]))
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}
