//! Four-box experiments: two particles, each superposed over two disjoint boxes.
//!
//! Particle A occupies boxes 1 and 2 (packets ψ₁, ψ₂, branch labels A1, A2),
//! particle B boxes 3 and 4 (φ₁, φ₂, labels B1, B2). The product mode is
//! `½(ψ₁+ψ₂)(φ₁+φ₂)`, the entangled mode `(ψ₁φ₁ + ψ₂φ₂)/√2`.
//!
//! Interactions are examined two ways. Energetically, `⟨Ψ|V_int|Ψ⟩` is split
//! over the product branches of Ψ. Dynamically, packet centres are tracked
//! while boxes are held by flat-bottomed wells, so any drift comes from
//! forces between packets rather than from dispersion.
//!
//! The calibrated parameter sets used by the acceptance runs live in
//! [`ContrastParams::calibrated`] and [`BranchDynamicsParams::calibrated`];
//! `examples/calibrate_*.rs` regenerate the sweeps behind them.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::density::{configuration_density, density_from_wavefunction, DensityField};
use crate::dynamics::{evolve, EvolutionResult, ExternalPotential, PotentialSpec};
use crate::dynamics::soft_coulomb;
use crate::error::{Error, Result};
use crate::grid::{box_ground_state, two_box_state, Grid1D, State, WaveFunction1D, WaveFunction2D};

/// Largest branch-expansion residual accepted by [`branch_interaction_matrix`].
pub const BRANCH_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FourBoxMode {
    Product,
    Entangled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourBoxScenario {
    /// Box centres: 1, 2 for particle A; 3, 4 for particle B.
    pub centers: [f64; 4],
    pub width: f64,
    pub q1q2: f64,
    pub softening: f64,
    pub mode: FourBoxMode,
}

/// One product term `a(x_A)·b(x_B)` of a branch expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub label: String,
    pub a: WaveFunction1D,
    pub b: WaveFunction1D,
}

impl FourBoxScenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.softening > 0.0) {
            return Err(Error::NonpositiveSoftening(self.softening));
        }
        if !(self.width > 0.0) {
            return Err(Error::InvalidParameter(format!("box width must be positive, got {}", self.width)));
        }
        for i in 0..4 {
            for j in i + 1..4 {
                let gap = (self.centers[i] - self.centers[j]).abs() - self.width;
                if gap < 4.0 * self.softening {
                    return Err(Error::OverlappingBoxes { first: i + 1, second: j + 1 });
                }
            }
        }
        Ok(())
    }

    /// Smallest edge-to-edge distance between any two boxes.
    pub fn min_gap(&self) -> f64 {
        let mut gap = f64::INFINITY;
        for i in 0..4 {
            for j in i + 1..4 {
                gap = gap.min((self.centers[i] - self.centers[j]).abs() - self.width);
            }
        }
        gap
    }

    /// `[ψ₁, ψ₂, φ₁, φ₂]`
    pub fn packets(&self, grid_a: &Grid1D, grid_b: &Grid1D) -> Result<[WaveFunction1D; 4]> {
        self.validate()?;
        Ok([
            box_ground_state(grid_a, self.centers[0], self.width)?,
            box_ground_state(grid_a, self.centers[1], self.width)?,
            box_ground_state(grid_b, self.centers[2], self.width)?,
            box_ground_state(grid_b, self.centers[3], self.width)?,
        ])
    }

    /// Product branches spanning the scenario state.
    pub fn branches(&self, grid_a: &Grid1D, grid_b: &Grid1D) -> Result<Vec<Branch>> {
        let [p1, p2, f1, f2] = self.packets(grid_a, grid_b)?;
        let branch = |label: &str, a: &WaveFunction1D, b: &WaveFunction1D| Branch {
            label: label.to_string(),
            a: a.clone(),
            b: b.clone(),
        };
        Ok(match self.mode {
            FourBoxMode::Product => vec![
                branch("A1B1", &p1, &f1),
                branch("A1B2", &p1, &f2),
                branch("A2B1", &p2, &f1),
                branch("A2B2", &p2, &f2),
            ],
            FourBoxMode::Entangled => vec![branch("A1B1", &p1, &f1), branch("A2B2", &p2, &f2)],
        })
    }

    /// Box centres mirrored about the origin (boxes 1↔2 and 3↔4 keep their roles).
    pub fn mirrored(&self) -> Self {
        let mut out = self.clone();
        for c in out.centers.iter_mut() {
            *c = -*c;
        }
        out
    }
}

pub fn build_four_box(scenario: &FourBoxScenario, grid_a: &Grid1D, grid_b: &Grid1D) -> Result<WaveFunction2D> {
    let [p1, p2, f1, f2] = scenario.packets(grid_a, grid_b)?;
    let one = Complex64::new(1.0, 0.0);
    match scenario.mode {
        FourBoxMode::Product => {
            let a = WaveFunction1D::superpose(&[(one, &p1), (one, &p2)])?.normalize()?;
            let b = WaveFunction1D::superpose(&[(one, &f1), (one, &f2)])?.normalize()?;
            WaveFunction2D::product(&a, &b)
        }
        FourBoxMode::Entangled => {
            let t1 = WaveFunction2D::product(&p1, &f1)?;
            let t2 = WaveFunction2D::product(&p2, &f2)?;
            WaveFunction2D::superpose(&[(one, &t1), (one, &t2)])?.normalize()
        }
    }
}

/// Decomposition `⟨Ψ|V|Ψ⟩ = Σ_kl c_k* c_l ⟨k|V|l⟩` over labelled product branches.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchInteractionMatrix {
    pub labels: Vec<String>,
    pub coefficients: Vec<Complex64>,
    /// Row-major `n × n` entries.
    pub values: Vec<Complex64>,
    /// `⟨Ψ|V|Ψ⟩` evaluated directly on the configuration grid.
    pub direct: f64,
    /// `‖Ψ − Σ c_k·branch_k‖`
    pub residual: f64,
}

impl BranchInteractionMatrix {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn entry(&self, k: usize, l: usize) -> Complex64 {
        self.values[k * self.len() + l]
    }

    pub fn entry_by_label(&self, row: &str, col: &str) -> Option<Complex64> {
        let k = self.labels.iter().position(|l| l == row)?;
        let l = self.labels.iter().position(|l| l == col)?;
        Some(self.entry(k, l))
    }

    pub fn total(&self) -> Complex64 {
        self.values.iter().sum()
    }

    /// `|Σ entries − direct| / |direct|` (absolute when the direct value vanishes).
    pub fn completeness_error(&self) -> f64 {
        let diff = (self.total() - Complex64::new(self.direct, 0.0)).norm();
        if self.direct != 0.0 {
            diff / self.direct.abs()
        } else {
            diff
        }
    }

    pub fn max_diagonal(&self) -> f64 {
        (0..self.len()).map(|k| self.entry(k, k).norm()).fold(0.0, f64::max)
    }

    pub fn min_diagonal(&self) -> f64 {
        (0..self.len()).map(|k| self.entry(k, k).norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.len();
        (0..n)
            .flat_map(|k| (0..n).filter(move |&l| l != k).map(move |l| (k, l)))
            .map(|(k, l)| self.entry(k, l).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.len();
        (0..n).all(|k| (0..n).all(|l| (self.entry(k, l) - self.entry(l, k).conj()).norm() <= tol))
    }
}

fn interaction_table(grid_a: &Grid1D, grid_b: &Grid1D, q1q2: f64, softening: f64) -> Result<Vec<f64>> {
    let mut v = Vec::with_capacity(grid_a.len() * grid_b.len());
    for xa in grid_a.points() {
        for xb in grid_b.points() {
            v.push(soft_coulomb(xa - xb, q1q2, softening)?);
        }
    }
    Ok(v)
}

/// `∬ f(x_A)·g(x_B)·V(x_A − x_B)` on the grid.
fn pair_integral(f: &[Complex64], g: &[Complex64], v: &[f64], dv: f64) -> Complex64 {
    let nb = g.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for (ia, fa) in f.iter().enumerate() {
        if fa.norm_sqr() == 0.0 {
            continue;
        }
        let row = &v[ia * nb..(ia + 1) * nb];
        let inner: Complex64 = g.iter().zip(row).map(|(gb, vv)| gb * vv).sum();
        acc += fa * inner;
    }
    acc * dv
}

pub fn branch_interaction_matrix(
    psi: &WaveFunction2D,
    branches: &[Branch],
    q1q2: f64,
    softening: f64,
) -> Result<BranchInteractionMatrix> {
    if branches.is_empty() {
        return Err(Error::IncompleteBranchBasis { residual: psi.norm() });
    }
    let (ga, gb) = (psi.grid_a(), psi.grid_b());
    if branches.iter().any(|b| b.a.grid() != ga || b.b.grid() != gb) {
        return Err(Error::GridMismatch);
    }
    let n = branches.len();
    let (dxa, dxb) = (ga.dx(), gb.dx());

    // expansion coefficients from the Gram system G c = ⟨k|Ψ⟩
    let mut gram = DMatrix::<Complex64>::zeros(n, n);
    let mut rhs = DVector::<Complex64>::zeros(n);
    for (k, bk) in branches.iter().enumerate() {
        for (l, bl) in branches.iter().enumerate() {
            gram[(k, l)] = bk.a.inner_product(&bl.a)? * bk.b.inner_product(&bl.b)?;
        }
        let nb = gb.len();
        let mut s = Complex64::new(0.0, 0.0);
        for (ia, a) in bk.a.amp().iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let row = &psi.amp()[ia * nb..(ia + 1) * nb];
            let inner: Complex64 = bk.b.amp().iter().zip(row).map(|(b, p)| b.conj() * p).sum();
            s += a.conj() * inner;
        }
        rhs[k] = s * dxa * dxb;
    }
    let coeffs = gram
        .lu()
        .solve(&rhs)
        .ok_or(Error::IncompleteBranchBasis { residual: f64::INFINITY })?;
    let coefficients: Vec<Complex64> = coeffs.iter().copied().collect();

    let mut rebuilt = psi.clone();
    rebuilt.amplitudes_mut().iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
    let nb = gb.len();
    for (c, br) in coefficients.iter().zip(branches) {
        let amp = rebuilt.amplitudes_mut();
        for (ia, a) in br.a.amp().iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            for (ib, b) in br.b.amp().iter().enumerate() {
                amp[ia * nb + ib] += c * a * b;
            }
        }
    }
    let residual = psi.distance(&rebuilt)?;
    if residual > BRANCH_RESIDUAL_TOL {
        return Err(Error::IncompleteBranchBasis { residual });
    }

    let vtab = interaction_table(ga, gb, q1q2, softening)?;
    let dv = dxa * dxb;
    let mut values = vec![Complex64::new(0.0, 0.0); n * n];
    for (k, bk) in branches.iter().enumerate() {
        for (l, bl) in branches.iter().enumerate() {
            let f: Vec<Complex64> = bk.a.amp().iter().zip(bl.a.amp()).map(|(x, y)| x.conj() * y).collect();
            let g: Vec<Complex64> = bk.b.amp().iter().zip(bl.b.amp()).map(|(x, y)| x.conj() * y).collect();
            values[k * n + l] = coefficients[k].conj() * coefficients[l] * pair_integral(&f, &g, &vtab, dv);
        }
    }
    let direct = psi
        .amp()
        .iter()
        .zip(&vtab)
        .map(|(a, v)| a.norm_sqr() * v)
        .sum::<f64>()
        * dv;
    Ok(BranchInteractionMatrix {
        labels: branches.iter().map(|b| b.label.clone()).collect(),
        coefficients,
        values,
        direct,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Particle {
    A,
    B,
}

/// Position density of one particle.
pub trait Marginal {
    fn marginal(&self, particle: Particle) -> DensityField;
}

impl Marginal for WaveFunction1D {
    /// A single-particle state has one density whichever particle is asked for.
    fn marginal(&self, _particle: Particle) -> DensityField {
        density_from_wavefunction(self)
    }
}

impl Marginal for WaveFunction2D {
    fn marginal(&self, particle: Particle) -> DensityField {
        let c = configuration_density(self);
        match particle {
            Particle::A => c.marginal_a,
            Particle::B => c.marginal_b,
        }
    }
}

/// Interval `[lo, hi)` of one particle's coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub label: String,
    pub particle: Particle,
    pub lo: f64,
    pub hi: f64,
}

impl Region {
    pub fn new(label: impl Into<String>, particle: Particle, lo: f64, hi: f64) -> Self {
        Self {
            label: label.into(),
            particle,
            lo,
            hi,
        }
    }

    /// `(probability, first moment)` of the density restricted to the region.
    fn moments(&self, rho: &DensityField) -> (f64, f64) {
        let dx = rho.grid.dx();
        rho.grid
            .points()
            .zip(&rho.values)
            .filter(|(x, _)| *x >= self.lo && *x < self.hi)
            .fold((0.0, 0.0), |(p, m), (x, r)| (p + r * dx, m + x * r * dx))
    }
}

/// Normalized first moment of a region over time.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterTrack {
    pub label: String,
    pub particle: Particle,
    pub times: Vec<f64>,
    pub centers: Vec<f64>,
    /// Region probability relative to its value at the first snapshot.
    pub containment: Vec<f64>,
    /// Containment dropped below 99% at some snapshot.
    pub leakage_warning: bool,
}

impl CenterTrack {
    /// `max_t |c(t) − c(0)|`
    pub fn max_drift(&self) -> f64 {
        let c0 = self.centers[0];
        self.centers.iter().map(|c| (c - c0).abs()).fold(0.0, f64::max)
    }
}

pub fn packet_center_tracking<S: State + Marginal>(
    evolution: &EvolutionResult<S>,
    regions: &[Region],
) -> Result<Vec<CenterTrack>> {
    if evolution.is_empty() {
        return Err(Error::EmptyEvolution);
    }
    for (i, r) in regions.iter().enumerate() {
        if !(r.hi > r.lo) {
            return Err(Error::InvalidParameter(format!("region `{}` is empty", r.label)));
        }
        for s in &regions[i + 1..] {
            if s.particle == r.particle && s.lo < r.hi && r.lo < s.hi {
                return Err(Error::InvalidParameter(format!(
                    "regions `{}` and `{}` overlap",
                    r.label, s.label
                )));
            }
        }
    }
    let mut tracks: Vec<CenterTrack> = regions
        .iter()
        .map(|r| CenterTrack {
            label: r.label.clone(),
            particle: r.particle,
            times: Vec::with_capacity(evolution.len()),
            centers: Vec::with_capacity(evolution.len()),
            containment: Vec::with_capacity(evolution.len()),
            leakage_warning: false,
        })
        .collect();
    let mut initial = vec![0.0; regions.len()];
    for (si, snap) in evolution.snapshots.iter().enumerate() {
        let rho_a = snap.state.marginal(Particle::A);
        let rho_b = snap.state.marginal(Particle::B);
        for (i, r) in regions.iter().enumerate() {
            let rho = match r.particle {
                Particle::A => &rho_a,
                Particle::B => &rho_b,
            };
            let (p, m) = r.moments(rho);
            if p < 1e-6 {
                return Err(Error::EmptyRegion(r.label.clone()));
            }
            if si == 0 {
                initial[i] = p;
            }
            let t = &mut tracks[i];
            t.times.push(snap.t);
            t.centers.push(m / p);
            t.containment.push(p / initial[i]);
            if p / initial[i] < 0.99 {
                t.leakage_warning = true;
            }
        }
    }
    Ok(tracks)
}

/// Single particle in two boxes, optionally held by harmonic wells at the box centres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastParams {
    pub grid: Grid1D,
    pub centers: [f64; 2],
    pub width: f64,
    pub softening: f64,
    /// Frequency of the holding wells; `None` runs without external potential.
    pub well_omega: Option<f64>,
    pub dt: f64,
    pub t_final: f64,
    pub stride: usize,
}

/// Self-coupling at which the calibrated contrast run must show a large drift.
pub const CALIBRATED_LAMBDA: f64 = 100.0;

/// Coupling values swept by the calibrated contrast run.
pub const CONTRAST_SWEEP: [f64; 5] = [0.0, 25.0, 50.0, 75.0, CALIBRATED_LAMBDA];

impl ContrastParams {
    /// Two boxes of width 4 at ±3.5 in harmonic wells of `ω = 2`, run for about
    /// half a well period. The wide softening keeps each packet from blowing
    /// itself apart while leaving the force between the boxes nearly intact.
    pub fn calibrated() -> Self {
        Self {
            grid: Grid1D::centered(32.0, 1024).expect("valid grid"),
            centers: [-3.5, 3.5],
            width: 4.0,
            softening: 2.5,
            well_omega: Some(2.0),
            dt: 5e-4,
            t_final: 1.6,
            stride: 40,
        }
    }

    pub fn external(&self) -> ExternalPotential {
        self.wells(&self.centers)
    }

    fn wells(&self, centers: &[f64]) -> ExternalPotential {
        match self.well_omega {
            Some(omega) => ExternalPotential::HarmonicWells {
                centers: centers.to_vec(),
                omega,
            },
            None => ExternalPotential::Zero,
        }
    }

    /// Regions reaching halfway to the neighbouring box.
    pub fn regions(&self) -> [Region; 2] {
        let half = 0.5 * (self.centers[1] - self.centers[0]).abs();
        [
            Region::new("left", Particle::A, self.centers[0] - half, self.centers[0] + half),
            Region::new("right", Particle::A, self.centers[1] - half, self.centers[1] + half),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContrastRow {
    pub lambda: f64,
    pub left_shift: f64,
    pub right_shift: f64,
    /// Larger of the two packet-centre drifts.
    pub displacement: f64,
    /// Drift of a lone packet in the left box, held by its own well only, under the same coupling.
    pub single_box_shift: f64,
    pub leakage: bool,
    /// Worst norm drift of the two-box and single-box runs.
    pub norm_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContrastReport {
    pub dx: f64,
    pub rows: Vec<ContrastRow>,
}

impl ContrastReport {
    pub fn row(&self, lambda: f64) -> Option<&ContrastRow> {
        self.rows.iter().find(|r| r.lambda == lambda)
    }

    /// Displacement never decreases with `λ` by more than `noise`.
    pub fn is_monotone(&self, noise: f64) -> bool {
        let mut rows = self.rows.clone();
        rows.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        rows.windows(2).all(|w| w[1].displacement >= w[0].displacement - noise)
    }
}

/// Runs the two-box state with the mean-field self-potential at each `λ`.
///
/// Linear dynamics (`λ = 0`) leaves both packet centres in place; a
/// self-interacting field pushes the packets apart.
pub fn self_interaction_contrast(params: &ContrastParams, lambdas: &[f64]) -> Result<ContrastReport> {
    if !lambdas.contains(&0.0) {
        return Err(Error::InvalidParameter("lambda values must include 0".into()));
    }
    let two = two_box_state(&params.grid, params.centers, params.width, 0.0)?;
    let one = box_ground_state(&params.grid, params.centers[0], params.width)?;
    let regions = params.regions();
    let rows = lambdas
        .iter()
        .map(|&lambda| {
            let pot = PotentialSpec::new(params.external(), 0.0, params.softening)?.with_self_coupling(lambda)?;
            let run = evolve(&two, &pot, params.t_final, params.dt, params.stride)?;
            let tracks = packet_center_tracking(&run, &regions)?;
            let lone = PotentialSpec::new(params.wells(&params.centers[..1]), 0.0, params.softening)?
                .with_self_coupling(lambda)?;
            let single = evolve(&one, &lone, params.t_final, params.dt, params.stride)?;
            let single_track = packet_center_tracking(&single, &regions[..1])?;
            let (l, r) = (tracks[0].max_drift(), tracks[1].max_drift());
            Ok(ContrastRow {
                lambda,
                left_shift: l,
                right_shift: r,
                displacement: l.max(r),
                single_box_shift: single_track[0].max_drift(),
                leakage: tracks.iter().any(|t| t.leakage_warning),
                norm_drift: run.max_norm_drift.max(single.max_norm_drift),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ContrastReport {
        dx: params.grid.dx(),
        rows,
    })
}

/// Four-box run held in harmonic wells, plus a control with box A2 emptied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchDynamicsParams {
    pub grid: Grid1D,
    pub scenario: FourBoxScenario,
    /// Frequency of the harmonic wells holding each box.
    pub well_omega: f64,
    pub dt: f64,
    pub t_final: f64,
    pub stride: usize,
}

impl BranchDynamicsParams {
    /// Attractive entangled run on a 256-point grid per particle, about half a well period long.
    pub fn calibrated() -> Self {
        Self {
            grid: Grid1D::centered(32.0, 256).expect("valid grid"),
            scenario: FourBoxScenario {
                centers: [-11.5, 4.5, -4.5, 11.5],
                width: 4.0,
                q1q2: -40.0,
                softening: 0.25,
                mode: FourBoxMode::Entangled,
            },
            well_omega: 2.0,
            dt: 0.004,
            t_final: 1.6,
            stride: 10,
        }
    }

    pub fn potential(&self) -> Result<PotentialSpec> {
        PotentialSpec::new(
            ExternalPotential::HarmonicWells {
                centers: self.scenario.centers.to_vec(),
                omega: self.well_omega,
            },
            self.scenario.q1q2,
            self.scenario.softening,
        )
    }

    /// Four regions, each reaching halfway to the nearest other box.
    pub fn regions(&self) -> Vec<Region> {
        let c = self.scenario.centers;
        let reach = |i: usize| {
            let nearest = (0..4)
                .filter(|&j| j != i)
                .map(|j| (c[i] - c[j]).abs())
                .fold(f64::INFINITY, f64::min);
            0.5 * nearest
        };
        let labels = ["A1", "A2", "B1", "B2"];
        let particles = [Particle::A, Particle::A, Particle::B, Particle::B];
        (0..4)
            .map(|i| Region::new(labels[i], particles[i], c[i] - reach(i), c[i] + reach(i)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchDynamicsReport {
    pub dx: f64,
    /// Tracks for A1, A2, B1, B2 in the entangled run.
    pub tracks: Vec<CenterTrack>,
    /// Tracks for A1 and B1 with box A2 emptied.
    pub control: Vec<CenterTrack>,
    /// Worst norm drift over both runs.
    pub max_norm_drift: f64,
}

impl BranchDynamicsReport {
    fn track(&self, label: &str) -> &CenterTrack {
        self.tracks.iter().find(|t| t.label == label).expect("track present")
    }

    /// Largest decrease of `|c_B − c_A|` over the run for a pair of tracks.
    pub fn approach(&self, a: &str, b: &str) -> f64 {
        let (ta, tb) = (self.track(a), self.track(b));
        let sep0 = (tb.centers[0] - ta.centers[0]).abs();
        ta.centers
            .iter()
            .zip(&tb.centers)
            .map(|(ca, cb)| sep0 - (cb - ca).abs())
            .fold(0.0, f64::max)
    }

    /// Largest difference between the entangled and control A1/B1 centres.
    pub fn control_deviation(&self) -> f64 {
        self.control
            .iter()
            .map(|c| {
                let t = self.track(&c.label);
                t.centers
                    .iter()
                    .zip(&c.centers)
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    pub fn any_leakage(&self) -> bool {
        self.tracks.iter().chain(&self.control).any(|t| t.leakage_warning)
    }
}

/// Evolves the scenario as configured and, as a control, the single branch `ψ1φ1`.
pub fn branch_local_dynamics(params: &BranchDynamicsParams) -> Result<BranchDynamicsReport> {
    let scenario = &params.scenario;
    let g = params.grid;
    let psi = build_four_box(scenario, &g, &g)?;
    let [p1, _, f1, _] = scenario.packets(&g, &g)?;
    let control_state = WaveFunction2D::product(&p1, &f1)?;
    let pot = params.potential()?;
    let regions = params.regions();

    let run = evolve(&psi, &pot, params.t_final, params.dt, params.stride)?;
    let tracks = packet_center_tracking(&run, &regions)?;
    let drift = run.max_norm_drift;
    drop(run);
    let control_run = evolve(&control_state, &pot, params.t_final, params.dt, params.stride)?;
    let control_regions: Vec<Region> = regions
        .iter()
        .filter(|r| r.label == "A1" || r.label == "B1")
        .cloned()
        .collect();
    let control = packet_center_tracking(&control_run, &control_regions)?;
    Ok(BranchDynamicsReport {
        dx: g.dx(),
        tracks,
        control,
        max_norm_drift: drift.max(control_run.max_norm_drift),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(mode: FourBoxMode) -> FourBoxScenario {
        FourBoxScenario {
            centers: [-11.0, 4.0, -4.0, 11.0],
            width: 3.0,
            q1q2: 1.0,
            softening: 0.25,
            mode,
        }
    }

    #[test]
    fn rejects_close_boxes() {
        let mut s = scenario(FourBoxMode::Product);
        s.centers[1] = -9.5;
        assert_eq!(s.validate(), Err(Error::OverlappingBoxes { first: 1, second: 2 }));
    }

    #[test]
    fn product_and_entangled_structure() {
        let g = Grid1D::centered(32.0, 128).unwrap();
        let p = build_four_box(&scenario(FourBoxMode::Product), &g, &g).unwrap();
        assert!((p.norm() - 1.0).abs() < 1e-12);
        let e = build_four_box(&scenario(FourBoxMode::Entangled), &g, &g).unwrap();
        assert!((e.norm() - 1.0).abs() < 1e-12);
        let c = configuration_density(&e);
        let s = scenario(FourBoxMode::Entangled);
        let [p1, p2, _, _] = s.packets(&g, &g).unwrap();
        for (k, m) in c.marginal_a.values.iter().enumerate() {
            let expected = 0.5 * (p1.amp()[k].norm_sqr() + p2.amp()[k].norm_sqr());
            assert!((m - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_charge_gives_zero_matrix() {
        let g = Grid1D::centered(32.0, 128).unwrap();
        let mut s = scenario(FourBoxMode::Product);
        s.q1q2 = 0.0;
        let psi = build_four_box(&s, &g, &g).unwrap();
        let m = branch_interaction_matrix(&psi, &s.branches(&g, &g).unwrap(), 0.0, s.softening).unwrap();
        assert!(m.values.iter().all(|v| v.norm() <= 1e-14));
    }

    #[test]
    fn incomplete_basis_is_reported() {
        let g = Grid1D::centered(32.0, 128).unwrap();
        let s = scenario(FourBoxMode::Product);
        let psi = build_four_box(&s, &g, &g).unwrap();
        let mut branches = s.branches(&g, &g).unwrap();
        branches.pop();
        assert!(matches!(
            branch_interaction_matrix(&psi, &branches, 1.0, 0.25),
            Err(Error::IncompleteBranchBasis { .. })
        ));
    }

    #[test]
    fn region_checks() {
        let g = Grid1D::centered(32.0, 128).unwrap();
        let psi = box_ground_state(&g, -5.0, 4.0).unwrap();
        let run = EvolutionResult::single(psi, 0.01, 1);
        let overlapping = [Region::new("a", Particle::A, -8.0, 0.0), Region::new("b", Particle::A, -1.0, 3.0)];
        assert!(packet_center_tracking(&run, &overlapping).is_err());
        let empty = [Region::new("far", Particle::A, 5.0, 9.0)];
        assert_eq!(packet_center_tracking(&run, &empty), Err(Error::EmptyRegion("far".into())));
        let ok = packet_center_tracking(&run, &[Region::new("box", Particle::A, -8.0, -2.0)]).unwrap();
        assert!((ok[0].centers[0] + 5.0).abs() < 1e-12);
    }
}
