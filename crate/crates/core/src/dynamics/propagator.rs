//! Second-order symmetric (Strang) split-step propagation.
//!
//! One step applies `exp(−iV dt/2ħ) · F⁻¹ exp(−iħk²dt/2m) F · exp(−iV dt/2ħ)`.
//! Every factor is a pointwise phase, so the step is unitary up to rounding.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::potential::{soft_coulomb_unchecked, PotentialSpec, SelfPotentialSolver};
use crate::error::{Error, Result};
use crate::grid::{Grid1D, State, WaveFunction1D, WaveFunction2D};

pub trait Propagator<S> {
    fn step(&mut self, state: &mut S);
    fn dt(&self) -> f64;
}

/// States that know how to build their own split-step propagator.
pub trait Evolve: State + Sized {
    type Propagator: Propagator<Self>;

    fn propagator(&self, potential: &PotentialSpec, dt: f64) -> Result<Self::Propagator>;
}

/// Largest |dt| accepted for a kinetic spectrum topping out at `e_max`.
fn check_timestep(dt: f64, e_max: f64, hbar: f64) -> Result<()> {
    let limit = PI * hbar / e_max;
    if dt == 0.0 || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!("time step must be nonzero, got {dt}")));
    }
    if dt.abs() >= limit {
        return Err(Error::TimestepTooLarge { dt, limit });
    }
    Ok(())
}

fn kinetic_max(grid: &Grid1D, mass: f64, hbar: f64) -> f64 {
    let k = grid.k_max();
    hbar * hbar * k * k / (2.0 * mass)
}

fn phase(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}

pub struct SplitStep1D {
    dt: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    kinetic: Vec<Complex64>,
    external: Vec<f64>,
    external_half: Vec<Complex64>,
    self_coupling: f64,
    solver: Option<SelfPotentialSolver>,
    dx: f64,
    half_over_hbar: f64,
    self_potential: Vec<f64>,
    scratch: Vec<Complex64>,
}

impl SplitStep1D {
    pub fn new(grid: &Grid1D, mass: f64, hbar: f64, potential: &PotentialSpec, dt: f64) -> Result<Self> {
        potential.validate()?;
        check_timestep(dt, kinetic_max(grid, mass, hbar), hbar)?;
        let n = grid.len();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let kinetic = grid
            .wavenumbers()
            .into_iter()
            .map(|k| phase(-hbar * k * k * dt / (2.0 * mass)))
            .collect();
        let external = potential.external.sample(grid, mass)?;
        let half_over_hbar = 0.5 * dt / hbar;
        let external_half = external.iter().map(|v| phase(-v * half_over_hbar)).collect();
        let solver = (potential.self_coupling != 0.0).then(|| SelfPotentialSolver::new(grid, potential.softening));
        let scratch_len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        Ok(Self {
            dt,
            fwd,
            inv,
            kinetic,
            external,
            external_half,
            self_coupling: potential.self_coupling,
            solver,
            dx: grid.dx(),
            half_over_hbar,
            self_potential: vec![0.0; n],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        })
    }

    fn half_potential(&mut self, amp: &mut [Complex64]) {
        if let Some(solver) = self.solver.as_mut() {
            // density is frozen over the half step; the phase does not change |ψ|²
            solver.apply(amp, self.self_coupling * self.dx, &mut self.self_potential);
            for ((a, v), u) in amp.iter_mut().zip(&self.external).zip(&self.self_potential) {
                *a *= phase(-(v + u) * self.half_over_hbar);
            }
        } else {
            for (a, p) in amp.iter_mut().zip(&self.external_half) {
                *a *= p;
            }
        }
    }

    fn kinetic(&mut self, amp: &mut [Complex64]) {
        self.fwd.process_with_scratch(amp, &mut self.scratch);
        let norm = 1.0 / amp.len() as f64;
        for (a, p) in amp.iter_mut().zip(&self.kinetic) {
            *a *= p * norm;
        }
        self.inv.process_with_scratch(amp, &mut self.scratch);
    }
}

impl Propagator<WaveFunction1D> for SplitStep1D {
    fn step(&mut self, state: &mut WaveFunction1D) {
        let amp = state.amplitudes_mut();
        self.half_potential(amp);
        self.kinetic(amp);
        self.half_potential(amp);
    }

    fn dt(&self) -> f64 {
        self.dt
    }
}

impl Evolve for WaveFunction1D {
    type Propagator = SplitStep1D;

    fn propagator(&self, potential: &PotentialSpec, dt: f64) -> Result<SplitStep1D> {
        SplitStep1D::new(self.grid(), self.mass(), self.hbar(), potential, dt)
    }
}

/// Split-step propagator on the `(x_A, x_B)` configuration grid.
pub struct SplitStep2D {
    dt: f64,
    na: usize,
    nb: usize,
    fwd_a: Arc<dyn Fft<f64>>,
    inv_a: Arc<dyn Fft<f64>>,
    fwd_b: Arc<dyn Fft<f64>>,
    inv_b: Arc<dyn Fft<f64>>,
    /// kinetic phases in transposed (`i_b`-major) layout
    kinetic_t: Vec<Complex64>,
    potential_half: Vec<Complex64>,
    transposed: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl SplitStep2D {
    pub fn new(
        grid_a: &Grid1D,
        grid_b: &Grid1D,
        mass: f64,
        hbar: f64,
        potential: &PotentialSpec,
        dt: f64,
    ) -> Result<Self> {
        potential.validate()?;
        if potential.self_coupling != 0.0 {
            return Err(Error::InvalidParameter(
                "self coupling is only defined for single-particle states".into(),
            ));
        }
        let e_max = kinetic_max(grid_a, mass, hbar) + kinetic_max(grid_b, mass, hbar);
        check_timestep(dt, e_max, hbar)?;
        let (na, nb) = (grid_a.len(), grid_b.len());
        let mut planner = FftPlanner::new();
        let fwd_a = planner.plan_fft_forward(na);
        let inv_a = planner.plan_fft_inverse(na);
        let fwd_b = planner.plan_fft_forward(nb);
        let inv_b = planner.plan_fft_inverse(nb);

        let ka = grid_a.wavenumbers();
        let kb = grid_b.wavenumbers();
        let mut kinetic_t = Vec::with_capacity(na * nb);
        for kb in &kb {
            for ka in &ka {
                kinetic_t.push(phase(-hbar * (ka * ka + kb * kb) * dt / (2.0 * mass)));
            }
        }

        let va = potential.external.sample(grid_a, mass)?;
        let vb = potential.external.sample(grid_b, mass)?;
        let half_over_hbar = 0.5 * dt / hbar;
        let mut potential_half = Vec::with_capacity(na * nb);
        for (ia, xa) in grid_a.points().enumerate() {
            for (ib, xb) in grid_b.points().enumerate() {
                let v = va[ia] + vb[ib] + soft_coulomb_unchecked(xa - xb, potential.q1q2, potential.softening);
                potential_half.push(phase(-v * half_over_hbar));
            }
        }
        let scratch_len = [&fwd_a, &inv_a, &fwd_b, &inv_b]
            .iter()
            .map(|f| f.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        Ok(Self {
            dt,
            na,
            nb,
            fwd_a,
            inv_a,
            fwd_b,
            inv_b,
            kinetic_t,
            potential_half,
            transposed: vec![Complex64::new(0.0, 0.0); na * nb],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        })
    }

    fn kinetic(&mut self, amp: &mut [Complex64]) {
        let (na, nb) = (self.na, self.nb);
        // rows are contiguous along x_B
        self.fwd_b.process_with_scratch(amp, &mut self.scratch);
        transpose(amp, &mut self.transposed, na, nb);
        self.fwd_a.process_with_scratch(&mut self.transposed, &mut self.scratch);
        let norm = 1.0 / (na * nb) as f64;
        for (a, p) in self.transposed.iter_mut().zip(&self.kinetic_t) {
            *a *= p * norm;
        }
        self.inv_a.process_with_scratch(&mut self.transposed, &mut self.scratch);
        transpose(&self.transposed, amp, nb, na);
        self.inv_b.process_with_scratch(amp, &mut self.scratch);
    }
}

/// `dst[c * rows + r] = src[r * cols + c]`
fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    for r in 0..rows {
        let row = &src[r * cols..(r + 1) * cols];
        for (c, v) in row.iter().enumerate() {
            dst[c * rows + r] = *v;
        }
    }
}

impl Propagator<WaveFunction2D> for SplitStep2D {
    fn step(&mut self, state: &mut WaveFunction2D) {
        let amp = state.amplitudes_mut();
        for (a, p) in amp.iter_mut().zip(&self.potential_half) {
            *a *= p;
        }
        self.kinetic(amp);
        for (a, p) in amp.iter_mut().zip(&self.potential_half) {
            *a *= p;
        }
    }

    fn dt(&self) -> f64 {
        self.dt
    }
}

impl Evolve for WaveFunction2D {
    type Propagator = SplitStep2D;

    fn propagator(&self, potential: &PotentialSpec, dt: f64) -> Result<SplitStep2D> {
        SplitStep2D::new(self.grid_a(), self.grid_b(), self.mass(), self.hbar(), potential, dt)
    }
}

/// One Strang step. A negative `dt` steps backwards in time.
pub fn strang_step<S: Evolve>(psi: &S, potential: &PotentialSpec, dt: f64) -> Result<S> {
    let mut prop = psi.propagator(potential, dt)?;
    let mut out = psi.clone();
    prop.step(&mut out);
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Snapshot<S> {
    pub t: f64,
    pub state: S,
}

/// Time-ordered snapshots recorded every `stride` steps of size `dt`.
#[derive(Debug, Clone)]
pub struct EvolutionResult<S> {
    pub snapshots: Vec<Snapshot<S>>,
    pub dt: f64,
    pub stride: usize,
    pub norms: Vec<f64>,
    /// Largest `|‖ψ‖ − ‖ψ₀‖|` seen at any step, recorded or not.
    pub max_norm_drift: f64,
}

impl<S: State> EvolutionResult<S> {
    /// Time between consecutive snapshots.
    pub fn spacing(&self) -> f64 {
        self.dt * self.stride as f64
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.snapshots.iter().map(|s| s.t)
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn final_state(&self) -> Option<&S> {
        self.snapshots.last().map(|s| &s.state)
    }

    /// Wraps a single state, e.g. a known stationary state sampled over `spacing`.
    pub fn single(state: S, dt: f64, stride: usize) -> Self {
        let norm = state.norm();
        Self {
            snapshots: vec![Snapshot { t: 0.0, state }],
            dt,
            stride,
            norms: vec![norm],
            max_norm_drift: 0.0,
        }
    }
}

/// Number of `dt` steps in `t_final`; rejects durations `dt` does not divide.
pub fn step_count(t_final: f64, dt: f64) -> Result<usize> {
    if !(t_final > 0.0) || !t_final.is_finite() {
        return Err(Error::InvalidDuration(format!("t_final must be positive, got {t_final}")));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidDuration(format!("dt must be positive, got {dt}")));
    }
    let steps = (t_final / dt).round();
    if steps < 1.0 || (steps * dt - t_final).abs() > 1e-9 * t_final {
        return Err(Error::InvalidDuration(format!(
            "dt = {dt} does not divide t_final = {t_final}"
        )));
    }
    Ok(steps as usize)
}

/// Propagates `psi0` to `t_final`, recording `t = 0, stride·dt, …, t_final`.
pub fn evolve<S: Evolve>(
    psi0: &S,
    potential: &PotentialSpec,
    t_final: f64,
    dt: f64,
    stride: usize,
) -> Result<EvolutionResult<S>> {
    evolve_with(psi0, potential, t_final, dt, stride, |_, _| {})
}

/// Like [`evolve`], also handing every intermediate state to `observe(step, state)`.
pub fn evolve_with<S: Evolve>(
    psi0: &S,
    potential: &PotentialSpec,
    t_final: f64,
    dt: f64,
    stride: usize,
    mut observe: impl FnMut(usize, &S),
) -> Result<EvolutionResult<S>> {
    let steps = step_count(t_final, dt)?;
    if stride == 0 || steps % stride != 0 {
        return Err(Error::InvalidStride { stride, steps });
    }
    let mut prop = psi0.propagator(potential, dt)?;
    let mut state = psi0.clone();
    let norm0 = state.norm();
    let mut result = EvolutionResult {
        snapshots: vec![Snapshot {
            t: 0.0,
            state: state.clone(),
        }],
        dt,
        stride,
        norms: vec![norm0],
        max_norm_drift: 0.0,
    };
    observe(0, &state);
    for step in 1..=steps {
        prop.step(&mut state);
        let norm = state.norm();
        result.max_norm_drift = result.max_norm_drift.max((norm - norm0).abs());
        observe(step, &state);
        if step % stride == 0 {
            result.snapshots.push(Snapshot {
                t: step as f64 * dt,
                state: state.clone(),
            });
            result.norms.push(norm);
        }
    }
    Ok(result)
}
