//! Random discontinuous trajectories and the cell measures built from them.
//!
//! A trajectory holds one position per instant `t_i = t₀ + i·dt`. Each position
//! is drawn independently from `|ψ(·, t_i)|²·dx` (a grid cell), then placed
//! uniformly inside that cell. Successive positions carry no memory of each
//! other, so the path jumps discontinuously between instants.
//!
//! The measure of a space-time cell `[x_j, x_j+Δx) × [t_i, t_i+Δt)` is the
//! total time the trajectory spends there: the number of instants in the slab
//! whose position falls in the cell, times `dt`. Because every instant is
//! credited to exactly one spatial cell, the measures of a slab add up to `Δt`.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::density::{density_from_wavefunction, DensityField};
use crate::dynamics::EvolutionResult;
use crate::error::{Error, Result};
use crate::grid::{Grid1D, WaveFunction1D, WaveFunction2D};
use crate::io::sci;

/// Counter-addressable uniform stream: draw `i` is the pair of `f64`s at
/// ChaCha8 word position `4·i` of the stream keyed by `seed`.
///
/// Reading the stream sequentially yields the same values as random access,
/// so any draw can be regenerated independently of the others.
#[derive(Clone)]
pub struct CounterStream {
    rng: ChaCha8Rng,
}

impl CounterStream {
    const WORDS_PER_DRAW: u128 = 4;

    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Random access to draw `index`.
    pub fn draw_at(&mut self, index: u64) -> [f64; 2] {
        self.rng.set_word_pos(index as u128 * Self::WORDS_PER_DRAW);
        self.next_draw()
    }

    /// The draw following the previous one.
    pub fn next_draw(&mut self) -> [f64; 2] {
        [self.rng.random::<f64>(), self.rng.random::<f64>()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub step: usize,
    pub t: f64,
    pub cell: usize,
    /// Position inside the cell in units of `dx`, in `[0, 1)`.
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub seed: u64,
    pub grid: Grid1D,
    pub t0: f64,
    pub dt: f64,
    pub points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn position(&self, i: usize) -> f64 {
        let p = &self.points[i];
        self.grid.x_min() + (p.cell as f64 + p.offset) * self.grid.dx()
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points.len()).map(move |i| self.position(i))
    }

    /// Comma-separated export: `step,t,cell_index,x`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "step,t,cell_index,x")?;
        for (i, p) in self.points.iter().enumerate() {
            writeln!(out, "{},{},{},{}", p.step, sci(p.t), p.cell, sci(self.position(i)))?;
        }
        Ok(())
    }

    fn same_cadence(&self, other: &Self) -> bool {
        self.grid == other.grid && self.t0 == other.t0 && self.dt == other.dt && self.len() == other.len()
    }
}

/// Cumulative distribution of `|ψ|²` over cells, normalized to end at 1.
fn cell_cdf(values: &[f64]) -> Vec<f64> {
    let total: f64 = values.iter().sum();
    let mut acc = 0.0;
    values
        .iter()
        .map(|v| {
            acc += v;
            acc / total
        })
        .collect()
}

fn pick(cdf: &[f64], u: f64) -> usize {
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// One draw per snapshot of `evolution`.
pub fn sample_trajectory(evolution: &EvolutionResult<WaveFunction1D>, seed: u64) -> Result<Trajectory> {
    sample_trajectory_dense(evolution, seed, 1)
}

/// `draws_per_snapshot` evenly spaced draws per snapshot interval, each from
/// the density of the snapshot that opens the interval.
pub fn sample_trajectory_dense(
    evolution: &EvolutionResult<WaveFunction1D>,
    seed: u64,
    draws_per_snapshot: usize,
) -> Result<Trajectory> {
    let first = evolution.snapshots.first().ok_or(Error::EmptyEvolution)?;
    if draws_per_snapshot == 0 {
        return Err(Error::InvalidParameter("draws_per_snapshot must be >= 1".into()));
    }
    let grid = *first.state.grid();
    let dt = evolution.spacing() / draws_per_snapshot as f64;
    let t0 = first.t;
    let mut stream = CounterStream::new(seed);
    let mut points = Vec::with_capacity(evolution.len() * draws_per_snapshot);
    for snap in &evolution.snapshots {
        let cdf = cell_cdf(&density_from_wavefunction(&snap.state).values);
        for _ in 0..draws_per_snapshot {
            let step = points.len();
            let [u, offset] = stream.next_draw();
            points.push(TrajectoryPoint {
                step,
                t: t0 + step as f64 * dt,
                cell: pick(&cdf, u),
                offset,
            });
        }
    }
    Ok(Trajectory {
        seed,
        grid,
        t0,
        dt,
        points,
    })
}

/// Cell-index draws on the two-particle configuration grid, one per snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigurationSamples {
    pub seed: u64,
    pub dt: f64,
    /// `(t, i_a, i_b)`
    pub points: Vec<(f64, usize, usize)>,
}

pub fn sample_configuration_cells(
    evolution: &EvolutionResult<WaveFunction2D>,
    seed: u64,
) -> Result<ConfigurationSamples> {
    if evolution.is_empty() {
        return Err(Error::EmptyEvolution);
    }
    let mut stream = CounterStream::new(seed);
    let mut points = Vec::with_capacity(evolution.len());
    for snap in &evolution.snapshots {
        let nb = snap.state.grid_b().len();
        let dens: Vec<f64> = snap.state.amp().iter().map(|a| a.norm_sqr()).collect();
        let idx = pick(&cell_cdf(&dens), stream.next_draw()[0]);
        points.push((snap.t, idx / nb, idx % nb));
    }
    Ok(ConfigurationSamples {
        seed,
        dt: evolution.spacing(),
        points,
    })
}

/// Per-slab, per-bin time measures `M(x_j, t_i)` stored as instant counts.
#[derive(Debug, Clone, PartialEq)]
pub struct CellMeasureTable {
    pub x_min: f64,
    pub bin_width: f64,
    pub cells_per_bin: usize,
    pub slab_duration: f64,
    pub steps_per_slab: usize,
    pub t0: f64,
    pub dt: f64,
    /// `counts[slab][bin]`
    pub counts: Vec<Vec<u64>>,
}

impl CellMeasureTable {
    pub fn n_slabs(&self) -> usize {
        self.counts.len()
    }

    pub fn n_bins(&self) -> usize {
        self.counts.first().map_or(0, Vec::len)
    }

    pub fn measure(&self, slab: usize, bin: usize) -> f64 {
        self.counts[slab][bin] as f64 * self.dt
    }

    /// `Σ_j M(x_j, t_i)` for one slab.
    pub fn slab_total(&self, slab: usize) -> f64 {
        (0..self.n_bins()).map(|j| self.measure(slab, j)).sum()
    }

    pub fn slab_start(&self, slab: usize) -> f64 {
        self.t0 + (slab * self.steps_per_slab) as f64 * self.dt
    }
}

fn aligned_multiple(span: f64, unit: f64, what: &str) -> Result<usize> {
    let ratio = span / unit;
    let m = ratio.round();
    if !(m >= 1.0) || (ratio - m).abs() > 1e-9 * ratio {
        return Err(Error::MisalignedPartition(format!(
            "{what} {span} is not a positive multiple of {unit}"
        )));
    }
    Ok(m as usize)
}

/// Tabulates the time the trajectory spends in each `(Δx, Δt)` cell.
///
/// `Δx` must tile the grid and `Δt` must be a multiple of the trajectory step;
/// a trailing partial slab is dropped.
pub fn cell_measures(traj: &Trajectory, bin_width: f64, slab_duration: f64) -> Result<CellMeasureTable> {
    let cells_per_bin = aligned_multiple(bin_width, traj.grid.dx(), "bin width")?;
    if traj.grid.len() % cells_per_bin != 0 {
        return Err(Error::MisalignedPartition(format!(
            "{cells_per_bin} cells per bin do not tile {} grid cells",
            traj.grid.len()
        )));
    }
    let steps_per_slab = aligned_multiple(slab_duration, traj.dt, "slab duration")?;
    let n_slabs = traj.len() / steps_per_slab;
    if n_slabs == 0 {
        return Err(Error::MisalignedPartition(format!(
            "trajectory of {} instants is shorter than one slab of {steps_per_slab}",
            traj.len()
        )));
    }
    let n_bins = traj.grid.len() / cells_per_bin;
    let counts = traj.points[..n_slabs * steps_per_slab]
        .chunks(steps_per_slab)
        .map(|slab| {
            let mut c = vec![0u64; n_bins];
            for p in slab {
                c[p.cell / cells_per_bin] += 1;
            }
            c
        })
        .collect();
    Ok(CellMeasureTable {
        x_min: traj.grid.x_min(),
        bin_width: cells_per_bin as f64 * traj.grid.dx(),
        cells_per_bin,
        slab_duration: steps_per_slab as f64 * traj.dt,
        steps_per_slab,
        t0: traj.t0,
        dt: traj.dt,
        counts,
    })
}

/// Density on a partition of `bin_width` cells, constant over one time slab.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedDensity {
    pub x_min: f64,
    pub bin_width: f64,
    pub t_start: f64,
    pub duration: f64,
    pub values: Vec<f64>,
}

impl BinnedDensity {
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.bin_width
    }

    pub fn bin_center(&self, j: usize) -> f64 {
        self.x_min + (j as f64 + 0.5) * self.bin_width
    }

    /// `Σ_j |ρ̂_j − ref_j|·Δx`
    pub fn l1_distance(&self, reference: &[f64]) -> f64 {
        self.values
            .iter()
            .zip(reference)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            * self.bin_width
    }
}

/// `ρ̂ = M / (Δx·Δt)` for every slab.
pub fn empirical_density(table: &CellMeasureTable) -> Vec<BinnedDensity> {
    let scale = 1.0 / (table.bin_width * table.slab_duration);
    (0..table.n_slabs())
        .map(|s| BinnedDensity {
            x_min: table.x_min,
            bin_width: table.bin_width,
            t_start: table.slab_start(s),
            duration: table.slab_duration,
            values: (0..table.n_bins()).map(|j| table.measure(s, j) * scale).collect(),
        })
        .collect()
}

/// Average of a grid density over bins of `cells_per_bin` cells.
pub fn bin_average(density: &DensityField, cells_per_bin: usize) -> Vec<f64> {
    density
        .values
        .chunks(cells_per_bin)
        .map(|c| c.iter().sum::<f64>() / c.len() as f64)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSlab {
    pub t_start: f64,
    pub mean: Vec<f64>,
    pub std_error: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleDensity {
    pub x_min: f64,
    pub bin_width: f64,
    pub duration: f64,
    pub members: usize,
    pub slabs: Vec<EnsembleSlab>,
}

impl EnsembleDensity {
    pub fn mean_density(&self, slab: usize) -> BinnedDensity {
        BinnedDensity {
            x_min: self.x_min,
            bin_width: self.bin_width,
            t_start: self.slabs[slab].t_start,
            duration: self.duration,
            values: self.slabs[slab].mean.clone(),
        }
    }

    /// Root-mean-square standard error over all bins and slabs.
    ///
    /// Averaging variances rather than standard errors keeps the estimate
    /// unbiased for small ensembles (`E[s]` alone is 0.80σ at two members).
    pub fn mean_std_error(&self) -> f64 {
        let (sum, n) = self
            .slabs
            .iter()
            .flat_map(|s| s.std_error.iter())
            .fold((0.0, 0usize), |(s, n), v| (s + v * v, n + 1));
        (sum / n as f64).sqrt()
    }
}

/// Mean of the per-trajectory `ρ̂` with its standard error `s/√n` per bin.
pub fn ensemble_density(
    trajectories: &[Trajectory],
    bin_width: f64,
    slab_duration: f64,
) -> Result<EnsembleDensity> {
    if trajectories.len() < 2 {
        return Err(Error::TooFewTrajectories(trajectories.len()));
    }
    if trajectories.iter().any(|t| !t.same_cadence(&trajectories[0])) {
        return Err(Error::CadenceMismatch);
    }
    let per_member: Vec<Vec<BinnedDensity>> = trajectories
        .iter()
        .map(|t| cell_measures(t, bin_width, slab_duration).map(|m| empirical_density(&m)))
        .collect::<Result<_>>()?;
    let n = per_member.len() as f64;
    let first = &per_member[0];
    let slabs = (0..first.len())
        .map(|s| {
            let bins = first[s].values.len();
            let mut mean = vec![0.0; bins];
            for m in &per_member {
                for (acc, v) in mean.iter_mut().zip(&m[s].values) {
                    *acc += v / n;
                }
            }
            let std_error = (0..bins)
                .map(|j| {
                    let var = per_member
                        .iter()
                        .map(|m| (m[s].values[j] - mean[j]).powi(2))
                        .sum::<f64>()
                        / (n - 1.0);
                    (var / n).sqrt()
                })
                .collect();
            EnsembleSlab {
                t_start: first[s].t_start,
                mean,
                std_error,
            }
        })
        .collect();
    Ok(EnsembleDensity {
        x_min: first[0].x_min,
        bin_width: first[0].bin_width,
        duration: first[0].duration,
        members: trajectories.len(),
        slabs,
    })
}
