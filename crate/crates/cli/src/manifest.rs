//! Writing a run directory: tables plus `manifest.toml`.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::{Experiment, RunConfig};
use crate::error::{HarnessError, Result};
use crate::experiments::{execute, Check, Table};

pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedSource {
    Config,
    Env,
    Flag,
}

/// Environment variable that overrides the configured seed.
pub const SEED_ENV: &str = "SEED_OVERRIDE";

/// Picks the seed by precedence flag > environment > config.
pub fn resolve_seed(config: &mut RunConfig, flag: Option<u64>, env: Option<&str>) -> Result<SeedSource> {
    if let Some(s) = flag {
        config.seed = s;
        return Ok(SeedSource::Flag);
    }
    if let Some(text) = env {
        config.seed = text
            .trim()
            .parse()
            .map_err(|_| HarnessError::validation(SEED_ENV, format!("expected an unsigned integer, got `{text}`")))?;
        return Ok(SeedSource::Env);
    }
    Ok(SeedSource::Config)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub experiment: Experiment,
    pub seed: u64,
    pub seed_source: SeedSource,
    pub wall_time_s: f64,
    pub passed: bool,
    pub failures: Vec<String>,
    pub artifacts: Vec<String>,
    pub checks: Vec<Check>,
    pub config: RunConfig,
}

impl Manifest {
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(|_| HarnessError::MissingArtifact(path.clone()))?;
        toml::from_str(&text).map_err(|e| HarnessError::MalformedArtifact {
            path,
            message: e.message().to_string(),
        })
    }

    /// `failures = [...]` as a standalone TOML document.
    pub fn failure_report(&self) -> String {
        #[derive(Serialize)]
        struct Failures<'a> {
            failures: &'a [String],
        }
        toml::to_string(&Failures { failures: &self.failures }).expect("strings serialize")
    }
}

pub(crate) fn write_table(dir: &Path, table: &Table) -> Result<()> {
    let file = fs::File::create(dir.join(table.file_name()))?;
    let mut out = std::io::BufWriter::new(file);
    let header: Vec<&str> = table.header.iter().map(String::as_str).collect();
    rdm_core::io::write_table(&mut out, &header, table.rows.iter().cloned())?;
    std::io::Write::flush(&mut out)?;
    Ok(())
}

/// Output directory: `--out`, then the config's `output`, then `runs/<experiment>`.
pub fn output_dir(config: &RunConfig, flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from("runs").join(config.experiment.name()))
}

/// Runs the experiment and writes every table and the manifest into `dir`.
pub fn run(config: &RunConfig, seed_source: SeedSource, dir: &Path) -> Result<Manifest> {
    let start = Instant::now();
    let outcome = execute(config)?;
    fs::create_dir_all(dir)?;
    for t in &outcome.tables {
        write_table(dir, t)?;
    }
    let failures: Vec<String> = outcome.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        experiment: config.experiment,
        seed: config.seed,
        seed_source,
        wall_time_s: start.elapsed().as_secs_f64(),
        passed: failures.is_empty(),
        failures,
        artifacts: outcome.tables.iter().map(Table::file_name).collect(),
        checks: outcome.checks,
        config: config.clone(),
    };
    let text = toml::to_string(&manifest).map_err(|e| HarnessError::MalformedArtifact {
        path: dir.join(MANIFEST_FILE),
        message: e.to_string(),
    })?;
    fs::write(dir.join(MANIFEST_FILE), text)?;
    Ok(manifest)
}
