//! Run configuration.
//!
//! A config is a TOML document. Every key is checked: unknown keys are parse
//! errors and sections that do not apply to the chosen experiment are
//! validation errors. Missing values are filled from per-experiment defaults:
//!
//! | key                | evolve   | sample   | reconstruct | fourbox | contrast | convergence |
//! |--------------------|----------|----------|-------------|---------|----------|-------------|
//! | `grid.length`      | 40       | 20       | 40          | 32      | 32       | 40          |
//! | `grid.n`           | 512      | 128      | 512         | 256     | 1024     | 128         |
//! | `time.dt`          | 1e-3     | 1e-3     | 1e-3        | 4e-3    | 5e-4     | 1e-3        |
//! | `time.t_final`     | 1.0      | 4e-3     | 0.5         | 1.6     | 1.6      | 0.2         |
//! | `time.stride`      | 50       | 1        | 100         | 10      | 40       | 8           |
//! | `physics.softening`| 2·dx     | 2·dx     | 2·dx        | 0.25    | 2.5      | 2·dx        |
//!
//! `physics.mass` and `physics.hbar` default to 1, `physics.lambda` and
//! `physics.q1q2` to 0 (fourbox: `q1q2 = -40`), `seed` to 0.
//! For `convergence` the grid and stride describe the coarsest rung.

use std::path::{Path, PathBuf};

use rdm_core::dynamics::{default_softening, Evolve, ExternalPotential, PotentialSpec};
use rdm_core::grid::{box_ground_state, gaussian_packet, harmonic_ground_state, two_box_state};
use rdm_core::scenarios::{
    build_four_box, BranchDynamicsParams, ContrastParams, FourBoxMode, FourBoxScenario, CONTRAST_SWEEP,
};
use rdm_core::{Error as CoreError, Grid1D, WaveFunction1D};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Evolve,
    Sample,
    Reconstruct,
    Fourbox,
    Contrast,
    Convergence,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::Evolve => "evolve",
            Self::Sample => "sample",
            Self::Reconstruct => "reconstruct",
            Self::Fourbox => "fourbox",
            Self::Contrast => "contrast",
            Self::Convergence => "convergence",
        }
    }

    fn single_particle_state(self) -> bool {
        matches!(self, Self::Evolve | Self::Sample | Self::Reconstruct | Self::Convergence)
    }
}

/// Starting wave function for the single-particle experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    Gaussian {
        center: f64,
        sigma: f64,
        #[serde(default)]
        k0: f64,
    },
    Harmonic {
        center: f64,
        omega: f64,
    },
    Box {
        center: f64,
        width: f64,
    },
    TwoBox {
        centers: [f64; 2],
        width: f64,
        #[serde(default)]
        phase: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub length: f64,
    pub n: usize,
}

impl GridConfig {
    pub fn grid(&self) -> Result<Grid1D> {
        Grid1D::centered(self.length, self.n).map_err(|e| HarnessError::validation("grid", e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicsConfig {
    pub mass: f64,
    pub hbar: f64,
    pub q1q2: f64,
    pub softening: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_final: f64,
    pub stride: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    /// Draws in each snapshot interval.
    pub draws_per_snapshot: usize,
    /// Independent trajectories; member `i` uses seed `seed + i`.
    pub members: usize,
    pub cells_per_bin: usize,
    /// Snapshot intervals per time slab.
    pub slab_snapshots: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconstructConfig {
    /// Velocity floor relative to the density peak.
    pub floor: f64,
    /// Largest accepted per-component phase-minimized error.
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourBoxConfig {
    pub centers: [f64; 4],
    pub width: f64,
    pub mode: FourBoxMode,
    pub well_omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastConfig {
    pub centers: [f64; 2],
    pub width: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub well_omega: Option<f64>,
    pub lambdas: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceConfig {
    /// Each rung halves `dx` and the snapshot spacing.
    pub rungs: usize,
}

/// Fully resolved and validated run description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub grid: GridConfig,
    pub physics: PhysicsConfig,
    pub time: TimeConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialState>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<ExternalPotential>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reconstruct: Option<ReconstructConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fourbox: Option<FourBoxConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contrast: Option<ContrastConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceConfig>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Option<Experiment>,
    seed: Option<u64>,
    output: Option<PathBuf>,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    physics: RawPhysics,
    #[serde(default)]
    time: RawTime,
    initial: Option<InitialState>,
    potential: Option<ExternalPotential>,
    sample: Option<RawSample>,
    reconstruct: Option<RawReconstruct>,
    fourbox: Option<RawFourBox>,
    contrast: Option<RawContrast>,
    convergence: Option<RawConvergence>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    length: Option<f64>,
    n: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhysics {
    mass: Option<f64>,
    hbar: Option<f64>,
    q1q2: Option<f64>,
    softening: Option<f64>,
    lambda: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTime {
    dt: Option<f64>,
    t_final: Option<f64>,
    stride: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSample {
    draws_per_snapshot: Option<usize>,
    members: Option<usize>,
    cells_per_bin: Option<usize>,
    slab_snapshots: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReconstruct {
    floor: Option<f64>,
    tolerance: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFourBox {
    centers: Option<[f64; 4]>,
    width: Option<f64>,
    mode: Option<FourBoxMode>,
    well_omega: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawContrast {
    centers: Option<[f64; 2]>,
    width: Option<f64>,
    well_omega: Option<f64>,
    lambdas: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConvergence {
    rungs: Option<usize>,
}

/// 1-based line and column of a byte offset.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parses and validates `text`.
///
/// `experiment` comes from the subcommand; when the text also names one, the two must agree.
pub fn parse_config(text: &str, experiment: Option<Experiment>) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
        HarnessError::Parse {
            line,
            column,
            message: e.message().trim().to_string(),
        }
    })?;
    let experiment = match (raw.experiment, experiment) {
        (Some(a), Some(b)) if a != b => {
            return Err(HarnessError::validation(
                "experiment",
                format!("config is for `{}` but `{}` was requested", a.name(), b.name()),
            ))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(HarnessError::validation("experiment", "no experiment given")),
    };
    resolve(raw, experiment)
}

pub fn load_config(path: &Path, experiment: Option<Experiment>) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text, experiment)
}

/// Defaults for an experiment with nothing configured.
pub fn default_config(experiment: Experiment) -> RunConfig {
    resolve(RawConfig::default(), experiment).expect("defaults are valid")
}

/// Accepts an unused value only when it equals the one the run implicitly uses.
fn fixed(value: Option<f64>, only: f64, field: &str, reason: &str) -> Result<()> {
    match value {
        Some(v) if v != only => Err(HarnessError::validation(field, reason)),
        _ => Ok(()),
    }
}

fn reject<T>(value: &Option<T>, field: &str, reason: &str) -> Result<()> {
    match value {
        Some(_) => Err(HarnessError::validation(field, reason)),
        None => Ok(()),
    }
}

fn positive(v: f64, field: &str) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(HarnessError::validation(field, format!("must be positive and finite, got {v}")))
    }
}

fn at_least(v: usize, min: usize, field: &str) -> Result<usize> {
    if v >= min {
        Ok(v)
    } else {
        Err(HarnessError::validation(field, format!("must be at least {min}, got {v}")))
    }
}

fn resolve(raw: RawConfig, experiment: Experiment) -> Result<RunConfig> {
    use Experiment::*;
    let (length, n, dt, t_final, stride) = match experiment {
        Evolve => (40.0, 512, 1e-3, 1.0, 50),
        Sample => (20.0, 128, 1e-3, 4e-3, 1),
        Reconstruct => (40.0, 512, 1e-3, 0.5, 100),
        Fourbox => (32.0, 256, 4e-3, 1.6, 10),
        Contrast => (32.0, 1024, 5e-4, 1.6, 40),
        Convergence => (40.0, 128, 1e-3, 0.2, 8),
    };
    let grid = GridConfig {
        length: positive(raw.grid.length.unwrap_or(length), "grid.length")?,
        n: raw.grid.n.unwrap_or(n),
    };
    if grid.n < rdm_core::grid::MIN_POINTS || !grid.n.is_power_of_two() {
        return Err(HarnessError::validation(
            "grid.n",
            format!("must be a power of two >= {}, got {}", rdm_core::grid::MIN_POINTS, grid.n),
        ));
    }
    let g = grid.grid()?;

    let p = &raw.physics;
    if !experiment.single_particle_state() {
        let why = "the scenario runs in units with m = hbar = 1";
        fixed(p.mass, 1.0, "physics.mass", why)?;
        fixed(p.hbar, 1.0, "physics.hbar", why)?;
    }
    if experiment != Fourbox {
        fixed(p.q1q2, 0.0, "physics.q1q2", "only the fourbox experiment has two particles")?;
    }
    match experiment {
        Fourbox => fixed(p.lambda, 0.0, "physics.lambda", "self coupling applies to single-particle states only")?,
        Contrast => fixed(p.lambda, 0.0, "physics.lambda", "use contrast.lambdas")?,
        _ => {}
    }
    let softening = match experiment {
        Fourbox => 0.25,
        Contrast => ContrastParams::calibrated().softening,
        _ => default_softening(&g),
    };
    let physics = PhysicsConfig {
        mass: positive(p.mass.unwrap_or(1.0), "physics.mass")?,
        hbar: positive(p.hbar.unwrap_or(1.0), "physics.hbar")?,
        q1q2: p.q1q2.unwrap_or(if experiment == Fourbox { -40.0 } else { 0.0 }),
        softening: positive(p.softening.unwrap_or(softening), "physics.softening")?,
        lambda: p.lambda.unwrap_or(0.0),
    };
    if !physics.q1q2.is_finite() {
        return Err(HarnessError::validation("physics.q1q2", "must be finite"));
    }
    if !(physics.lambda >= 0.0 && physics.lambda.is_finite()) {
        return Err(HarnessError::validation(
            "physics.lambda",
            format!("must be finite and >= 0, got {}", physics.lambda),
        ));
    }

    let time = TimeConfig {
        dt: positive(raw.time.dt.unwrap_or(dt), "time.dt")?,
        t_final: positive(raw.time.t_final.unwrap_or(t_final), "time.t_final")?,
        stride: at_least(raw.time.stride.unwrap_or(stride), 1, "time.stride")?,
    };
    let steps = rdm_core::dynamics::step_count(time.t_final, time.dt)
        .map_err(|e| HarnessError::validation("time.dt", e.to_string()))?;
    if steps % time.stride != 0 {
        return Err(HarnessError::validation(
            "time.stride",
            format!("{} does not divide the {steps} steps", time.stride),
        ));
    }

    let section = |present: bool, name: &str, owner: Experiment| -> Result<()> {
        if present && experiment != owner {
            Err(HarnessError::validation(
                name,
                format!("section only applies to the `{}` experiment", owner.name()),
            ))
        } else {
            Ok(())
        }
    };
    section(raw.sample.is_some(), "sample", Sample)?;
    section(raw.reconstruct.is_some(), "reconstruct", Reconstruct)?;
    section(raw.fourbox.is_some(), "fourbox", Fourbox)?;
    section(raw.contrast.is_some(), "contrast", Contrast)?;
    section(raw.convergence.is_some(), "convergence", Convergence)?;
    if !experiment.single_particle_state() {
        reject(&raw.initial, "initial", "the scenario builds its own state")?;
        reject(&raw.potential, "potential", "the scenario builds its own wells")?;
    }

    let mut config = RunConfig {
        experiment,
        seed: raw.seed.unwrap_or(0),
        output: raw.output,
        grid,
        physics,
        time,
        initial: None,
        potential: None,
        sample: None,
        reconstruct: None,
        fourbox: None,
        contrast: None,
        convergence: None,
    };

    match experiment {
        Evolve | Sample | Reconstruct | Convergence => {
            config.initial = Some(raw.initial.unwrap_or(match experiment {
                Evolve => InitialState::Gaussian { center: -2.0, sigma: 1.0, k0: 2.0 },
                Sample => InitialState::Harmonic { center: 0.0, omega: 1.0 },
                Reconstruct => InitialState::Gaussian { center: -1.0, sigma: 1.3, k0: 1.7 },
                _ => InitialState::Gaussian { center: -2.0, sigma: 1.0, k0: 1.5 },
            }));
            config.potential = Some(raw.potential.unwrap_or(match experiment {
                Sample => ExternalPotential::Harmonic { center: 0.0, omega: 1.0 },
                _ => ExternalPotential::Zero,
            }));
        }
        _ => {}
    }

    match experiment {
        Sample => {
            let s = raw.sample.unwrap_or_default();
            let cfg = SampleConfig {
                draws_per_snapshot: at_least(s.draws_per_snapshot.unwrap_or(10_000), 1, "sample.draws_per_snapshot")?,
                members: at_least(s.members.unwrap_or(4), 2, "sample.members")?,
                cells_per_bin: at_least(s.cells_per_bin.unwrap_or(1), 1, "sample.cells_per_bin")?,
                slab_snapshots: at_least(s.slab_snapshots.unwrap_or(1), 1, "sample.slab_snapshots")?,
            };
            if grid.n % cfg.cells_per_bin != 0 {
                return Err(HarnessError::validation(
                    "sample.cells_per_bin",
                    format!("must divide grid.n = {}", grid.n),
                ));
            }
            let snapshots = steps / time.stride + 1;
            if snapshots % cfg.slab_snapshots != 0 {
                return Err(HarnessError::validation(
                    "sample.slab_snapshots",
                    format!("must divide the {snapshots} snapshots"),
                ));
            }
            config.sample = Some(cfg);
        }
        Reconstruct => {
            let r = raw.reconstruct.unwrap_or_default();
            config.reconstruct = Some(ReconstructConfig {
                floor: positive(r.floor.unwrap_or(1e-10), "reconstruct.floor")?,
                tolerance: positive(r.tolerance.unwrap_or(1e-8), "reconstruct.tolerance")?,
            });
        }
        Fourbox => {
            let f = raw.fourbox.unwrap_or_default();
            let calibrated = BranchDynamicsParams::calibrated();
            config.fourbox = Some(FourBoxConfig {
                centers: f.centers.unwrap_or(calibrated.scenario.centers),
                width: positive(f.width.unwrap_or(calibrated.scenario.width), "fourbox.width")?,
                mode: f.mode.unwrap_or(FourBoxMode::Entangled),
                well_omega: positive(f.well_omega.unwrap_or(calibrated.well_omega), "fourbox.well_omega")?,
            });
        }
        Contrast => {
            let c = raw.contrast.unwrap_or_default();
            let calibrated = ContrastParams::calibrated();
            let lambdas = c.lambdas.unwrap_or_else(|| CONTRAST_SWEEP.to_vec());
            if !lambdas.contains(&0.0) {
                return Err(HarnessError::validation("contrast.lambdas", "must include 0"));
            }
            if let Some(bad) = lambdas.iter().find(|l| !(**l >= 0.0 && l.is_finite())) {
                return Err(HarnessError::validation(
                    "contrast.lambdas",
                    format!("values must be finite and >= 0, got {bad}"),
                ));
            }
            if let Some(w) = c.well_omega {
                positive(w, "contrast.well_omega")?;
            }
            config.contrast = Some(ContrastConfig {
                centers: c.centers.unwrap_or(calibrated.centers),
                width: positive(c.width.unwrap_or(calibrated.width), "contrast.width")?,
                well_omega: c.well_omega.or(calibrated.well_omega),
                lambdas,
            });
        }
        Convergence => {
            let c = raw.convergence.unwrap_or_default();
            let rungs = at_least(c.rungs.unwrap_or(3), 2, "convergence.rungs")?;
            let halvings = 1usize << (rungs - 1);
            if time.stride % halvings != 0 {
                return Err(HarnessError::validation(
                    "time.stride",
                    format!("must be divisible by {halvings} to halve the snapshot spacing {} times", rungs - 1),
                ));
            }
            config.convergence = Some(ConvergenceConfig { rungs });
        }
        Evolve => {}
    }

    validate_physics(&config)?;
    Ok(config)
}

fn initial_field(e: &CoreError) -> &'static str {
    match e {
        CoreError::SigmaTooSmall { .. } => "initial.sigma",
        CoreError::BoxTooNarrow { .. } => "initial.width",
        CoreError::BoxOutOfDomain { .. } | CoreError::TailTruncation { .. } => "initial.center",
        _ => "initial",
    }
}

fn timestep_field(e: CoreError, fallback: &str) -> HarnessError {
    let field = match e {
        CoreError::TimestepTooLarge { .. } => "time.dt",
        _ => fallback,
    };
    HarnessError::validation(field, e.to_string())
}

/// Builds every object the run will need so upstream invariants fail here, not mid-run.
fn validate_physics(config: &RunConfig) -> Result<()> {
    match config.experiment {
        Experiment::Fourbox => {
            let g = config.grid.grid()?;
            let params = config.branch_params()?;
            params
                .scenario
                .validate()
                .map_err(|e| HarnessError::validation("fourbox.centers", e.to_string()))?;
            let psi = build_four_box(&params.scenario, &g, &g)
                .map_err(|e| HarnessError::validation("fourbox", e.to_string()))?;
            let pot = params.potential().map_err(|e| HarnessError::validation("physics", e.to_string()))?;
            psi.propagator(&pot, config.time.dt).map(drop).map_err(|e| timestep_field(e, "physics"))
        }
        Experiment::Contrast => {
            let params = config.contrast_params()?;
            let psi = two_box_state(&params.grid, params.centers, params.width, 0.0)
                .map_err(|e| HarnessError::validation("contrast", e.to_string()))?;
            let pot = PotentialSpec::new(params.external(), 0.0, params.softening)
                .map_err(|e| HarnessError::validation("physics.softening", e.to_string()))?;
            psi.propagator(&pot, config.time.dt).map(drop).map_err(|e| timestep_field(e, "physics"))
        }
        _ => {
            let mut grids = vec![config.grid.grid()?];
            if let Some(c) = config.convergence {
                let n = config.grid.n << (c.rungs - 1);
                grids.push(GridConfig { n, ..config.grid }.grid()?);
            }
            for g in grids {
                let psi = config.initial_state(&g)?;
                let pot = config.potential_spec(&g)?;
                psi.propagator(&pot, config.time.dt).map(drop).map_err(|e| timestep_field(e, "physics"))?;
            }
            Ok(())
        }
    }
}

impl RunConfig {
    /// Initial single-particle state on `grid`, carrying the configured units.
    pub fn initial_state(&self, grid: &Grid1D) -> Result<WaveFunction1D> {
        let init = self
            .initial
            .as_ref()
            .ok_or_else(|| HarnessError::validation("initial", "experiment has no single-particle state"))?;
        let (m, hbar) = (self.physics.mass, self.physics.hbar);
        let psi = match *init {
            InitialState::Gaussian { center, sigma, k0 } => gaussian_packet(grid, center, sigma, k0),
            InitialState::Harmonic { center, omega } => harmonic_ground_state(grid, center, omega, m, hbar),
            InitialState::Box { center, width } => box_ground_state(grid, center, width),
            InitialState::TwoBox { centers, width, phase } => two_box_state(grid, centers, width, phase),
        };
        psi.and_then(|p| p.with_units(m, hbar))
            .map_err(|e| HarnessError::validation(initial_field(&e), e.to_string()))
    }

    pub fn potential_spec(&self, grid: &Grid1D) -> Result<PotentialSpec> {
        let external = self.potential.clone().unwrap_or(ExternalPotential::Zero);
        external
            .sample(grid, self.physics.mass)
            .map_err(|e| HarnessError::validation("potential", e.to_string()))?;
        PotentialSpec::new(external, 0.0, self.physics.softening)
            .and_then(|p| p.with_self_coupling(self.physics.lambda))
            .map_err(|e| HarnessError::validation("physics", e.to_string()))
    }

    pub fn branch_params(&self) -> Result<BranchDynamicsParams> {
        let f = self
            .fourbox
            .ok_or_else(|| HarnessError::validation("fourbox", "not a fourbox config"))?;
        Ok(BranchDynamicsParams {
            grid: self.grid.grid()?,
            scenario: FourBoxScenario {
                centers: f.centers,
                width: f.width,
                q1q2: self.physics.q1q2,
                softening: self.physics.softening,
                mode: f.mode,
            },
            well_omega: f.well_omega,
            dt: self.time.dt,
            t_final: self.time.t_final,
            stride: self.time.stride,
        })
    }

    pub fn contrast_params(&self) -> Result<ContrastParams> {
        let c = self
            .contrast
            .as_ref()
            .ok_or_else(|| HarnessError::validation("contrast", "not a contrast config"))?;
        Ok(ContrastParams {
            grid: self.grid.grid()?,
            centers: c.centers,
            width: c.width,
            softening: self.physics.softening,
            well_omega: c.well_omega,
            dt: self.time.dt,
            t_final: self.time.t_final,
            stride: self.time.stride,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
