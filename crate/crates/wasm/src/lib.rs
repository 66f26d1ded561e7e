//! Browser bindings for three small demos.
//!
//! Build with `wasm-pack build crates/wasm --target web --out-dir www/pkg`
//! and serve `crates/wasm/www`.

use rdm_core::density::{density_from_wavefunction, flux_from_wavefunction, velocity_field};
use rdm_core::dynamics::{evolve, Evolve, ExternalPotential, PotentialSpec, Propagator, SplitStep1D};
use rdm_core::grid::{gaussian_packet, two_box_state, Grid1D};
use rdm_core::reconstruct::{component_phase_distance, global_phase_distance, reconstruct_wavefunction};
use rdm_core::sampler::sample_trajectory_dense;
use rdm_core::scenarios::ContrastParams;
use rdm_core::WaveFunction1D;
use wasm_bindgen::prelude::*;

fn js(e: rdm_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Probability-weighted mean position over `[lo, hi)`.
fn center(grid: &Grid1D, rho: &[f64], lo: f64, hi: f64) -> f64 {
    let (mut p, mut m) = (0.0, 0.0);
    for (x, r) in grid.points().zip(rho) {
        if x >= lo && x < hi {
            p += r;
            m += x * r;
        }
    }
    if p > 0.0 {
        m / p
    } else {
        f64::NAN
    }
}

/// One particle split over two held boxes, stepped frame by frame.
///
/// With `lambda = 0` the density stays put; `lambda > 0` adds a mean-field
/// self-potential that pushes the two packets apart.
#[wasm_bindgen]
pub struct TwoBoxMovie {
    psi: WaveFunction1D,
    prop: SplitStep1D,
    params: ContrastParams,
    t: f64,
    start: [f64; 2],
}

#[wasm_bindgen]
impl TwoBoxMovie {
    #[wasm_bindgen(constructor)]
    pub fn new(lambda: f64) -> Result<TwoBoxMovie, JsError> {
        let params = ContrastParams::calibrated();
        let psi = two_box_state(&params.grid, params.centers, params.width, 0.0).map_err(js)?;
        let pot = PotentialSpec::new(params.external(), 0.0, params.softening)
            .and_then(|p| p.with_self_coupling(lambda))
            .map_err(js)?;
        let prop = psi.propagator(&pot, params.dt).map_err(js)?;
        let mut movie = TwoBoxMovie {
            psi,
            prop,
            params,
            t: 0.0,
            start: [0.0; 2],
        };
        let c = movie.centers();
        movie.start = [c[0], c[1]];
        Ok(movie)
    }

    pub fn advance(&mut self, steps: u32) {
        for _ in 0..steps {
            self.prop.step(&mut self.psi);
        }
        self.t += steps as f64 * self.params.dt;
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn x(&self) -> Vec<f64> {
        self.params.grid.points().collect()
    }

    pub fn density(&self) -> Vec<f64> {
        density_from_wavefunction(&self.psi).values
    }

    /// Packet centres of the left and right box.
    pub fn centers(&self) -> Vec<f64> {
        let rho = self.density();
        self.params
            .regions()
            .iter()
            .map(|r| center(&self.params.grid, &rho, r.lo, r.hi))
            .collect()
    }

    /// Current largest centre drift in grid cells.
    pub fn displacement_dx(&self) -> f64 {
        let c = self.centers();
        let d = (c[0] - self.start[0]).abs().max((c[1] - self.start[1]).abs());
        d / self.params.grid.dx()
    }
}

/// `(t, x)` pairs, interleaved, from one discontinuous trajectory.
///
/// `two_boxes` picks the static two-box state; otherwise a Gaussian
/// oscillates in a harmonic well for one period.
#[wasm_bindgen]
pub fn trajectory_scatter(seed: u64, draws_per_snapshot: u32, two_boxes: bool) -> Result<Vec<f64>, JsError> {
    let g = Grid1D::centered(24.0, 256).map_err(js)?;
    let (psi, external) = if two_boxes {
        let centers = [-4.0, 4.0];
        (
            two_box_state(&g, centers, 3.0, 0.0),
            ExternalPotential::HarmonicWells {
                centers: centers.to_vec(),
                omega: 2.0,
            },
        )
    } else {
        (
            gaussian_packet(&g, -4.0, 0.7, 0.0),
            ExternalPotential::Harmonic { center: 0.0, omega: 1.0 },
        )
    };
    let psi = psi.map_err(js)?;
    let pot = PotentialSpec::new(external, 0.0, 0.5).map_err(js)?;
    let period = 2.0 * std::f64::consts::PI;
    let run = evolve(&psi, &pot, period, period / 2000.0, 20).map_err(js)?;
    let traj = sample_trajectory_dense(&run, seed, draws_per_snapshot.max(1) as usize).map_err(js)?;
    Ok(traj
        .points
        .iter()
        .enumerate()
        .flat_map(|(i, p)| [p.t, traj.position(i)])
        .collect())
}

/// Two-box state with a chosen relative phase, rebuilt from `(ρ, v)`.
#[wasm_bindgen]
pub struct ReconstructionDemo {
    x: Vec<f64>,
    rho: Vec<f64>,
    truth: WaveFunction1D,
    rebuilt: WaveFunction1D,
    components: Vec<(usize, usize)>,
}

#[wasm_bindgen]
impl ReconstructionDemo {
    #[wasm_bindgen(constructor)]
    pub fn new(relative_phase: f64) -> Result<ReconstructionDemo, JsError> {
        let g = Grid1D::centered(32.0, 512).map_err(js)?;
        let truth = two_box_state(&g, [-6.0, 6.0], 3.0, relative_phase).map_err(js)?;
        let rho = density_from_wavefunction(&truth);
        let v = velocity_field(&rho, &flux_from_wavefunction(&truth), 1e-10 * rho.peak()).map_err(js)?;
        let rec = reconstruct_wavefunction(&rho, &v, 1.0, 1.0).map_err(js)?;
        Ok(ReconstructionDemo {
            x: g.points().collect(),
            rho: rho.values,
            truth,
            rebuilt: rec.wavefunction,
            components: rec.components.iter().map(|c| (c.start, c.end)).collect(),
        })
    }

    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }

    pub fn density(&self) -> Vec<f64> {
        self.rho.clone()
    }

    pub fn re_true(&self) -> Vec<f64> {
        self.truth.amp().iter().map(|a| a.re).collect()
    }

    pub fn re_rebuilt(&self) -> Vec<f64> {
        self.rebuilt.amp().iter().map(|a| a.re).collect()
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// Distance after removing one global phase; nonzero when the boxes disagree.
    pub fn global_error(&self) -> f64 {
        global_phase_distance(&self.truth, &self.rebuilt).unwrap_or(f64::NAN)
    }

    /// Worst distance after removing one phase per component.
    pub fn component_error(&self) -> f64 {
        self.components
            .iter()
            .map(|&(s, e)| component_phase_distance(&self.truth, &self.rebuilt, s, e).unwrap_or(f64::NAN))
            .fold(0.0, f64::max)
    }
}
