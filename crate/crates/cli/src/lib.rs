//! Command-line runner for the astrogibbs pipelines.
//!
//! Every run writes its result files plus a `manifest.json` that echoes the
//! full configuration, the seed and SHA-256 digests of all inputs and
//! outputs. `replay` feeds a manifest back in and fails unless every output
//! is reproduced byte for byte.

mod cli;
mod config;
mod error;
mod manifest;
mod pipelines;

use std::ffi::OsString;
use std::path::{self, Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use astrogibbs::io::{read_json, write_json};
use clap::Parser;

pub use cli::{Cli, Command, Request};
pub use config::{FilamentSettings, Pipeline, RunConfig, TailsSettings};
pub use error::{CliError, Result};
pub use manifest::{sha256_file, InputFile, Manifest, OutputFile, MANIFEST_FILE};

fn absolute(p: &Path) -> Result<PathBuf> {
    Ok(path::absolute(p)?)
}

fn absolutize(config: &RunConfig) -> Result<RunConfig> {
    let mut c = config.clone();
    c.out = absolute(&c.out)?;
    match &mut c.pipeline {
        Pipeline::Filaments { catalog: p, .. }
        | Pipeline::Orbit {
            observations: p, ..
        }
        | Pipeline::TailsFit { values: p, .. }
        | Pipeline::TailsMap {
            perturbations: p, ..
        } => *p = absolute(p)?,
        Pipeline::TailsValidate { values, model, .. } => {
            *values = absolute(values)?;
            if let Some(m) = model {
                *m = absolute(m)?;
            }
        }
    }
    Ok(c)
}

fn hash_inputs(config: &RunConfig) -> Result<Vec<InputFile>> {
    config
        .pipeline
        .inputs()
        .into_iter()
        .map(|(role, path)| {
            let sha256 = sha256_file(&path).map_err(|e| match e {
                CliError::Core(astrogibbs::Error::Io(io)) => {
                    CliError::Usage(format!("cannot read {role} file {}: {io}", path.display()))
                }
                other => other,
            })?;
            Ok(InputFile {
                role: role.to_string(),
                path,
                sha256,
            })
        })
        .collect()
}

/// Runs one pipeline and writes its manifest next to the outputs.
pub fn run(config: &RunConfig) -> Result<Manifest> {
    let start = Instant::now();
    let config = absolutize(config)?;
    let inputs = hash_inputs(&config)?;
    let files = pipelines::execute(&config)?;
    let outputs = files
        .into_iter()
        .map(|file| {
            let sha256 = sha256_file(&config.out.join(&file))?;
            Ok(OutputFile { file, sha256 })
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = Manifest {
        tool: "astrogibbs".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        core_version: astrogibbs::VERSION.into(),
        pipeline: config.pipeline.name().into(),
        seed: config.seed,
        inputs,
        outputs,
        wall_time_s: start.elapsed().as_secs_f64(),
        finished_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        config,
    };
    write_json(&manifest.config.out.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}

/// Re-runs the configuration recorded in `manifest_path`, optionally into
/// another directory, and checks inputs and outputs against its digests.
pub fn replay(manifest_path: &Path, out: Option<&Path>) -> Result<Manifest> {
    let old: Manifest = read_json(manifest_path)?;
    for input in &old.inputs {
        let now = sha256_file(&input.path).ok();
        if now.as_deref() != Some(input.sha256.as_str()) {
            return Err(CliError::InputChanged {
                path: input.path.display().to_string(),
            });
        }
    }
    let mut config = old.config.clone();
    if let Some(o) = out {
        config.out = o.to_path_buf();
    }
    let new = run(&config)?;
    let mut files: Vec<String> = old
        .outputs
        .iter()
        .filter(|o| !new.outputs.contains(o))
        .map(|o| o.file.clone())
        .collect();
    files.extend(
        new.outputs
            .iter()
            .filter(|o| !old.outputs.iter().any(|p| p.file == o.file))
            .map(|o| o.file.clone()),
    );
    if files.is_empty() {
        Ok(new)
    } else {
        Err(CliError::ReplayMismatch { files })
    }
}

/// Parses `args` and runs the request. Returns `None` when clap printed
/// help or version text instead.
pub fn try_main<I, T>(args: I) -> Result<Option<Manifest>>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return Ok(None);
        }
        Err(e) => return Err(CliError::Usage(e.to_string().trim_end().to_string())),
    };
    let manifest = match cli.command.into_request()? {
        Request::Run(config) => run(&config)?,
        Request::Replay { manifest, out } => replay(&manifest, out.as_deref())?,
    };
    Ok(Some(manifest))
}

/// Binary entry point: prints the manifest path on success and a JSON
/// error report on stderr otherwise; returns the process exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match try_main(args) {
        Ok(Some(m)) => {
            println!("{}", m.config.out.join(MANIFEST_FILE).display());
            0
        }
        Ok(None) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
