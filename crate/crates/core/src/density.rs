//! Position density `ρ = |ψ|²`, flux `j = (ħ/m)·Im(ψ*∂ψ)`, the local density
//! velocity `v = j/ρ`, and their two-particle counterparts.
//!
//! `v` is the velocity of the local density, not of any particle; below a
//! density floor it is masked rather than extrapolated.

use crate::dynamics::EvolutionResult;
use crate::error::{Error, Result};
use crate::grid::{Grid1D, State, WaveFunction1D, WaveFunction2D};
use crate::spectral;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub grid: Grid1D,
    pub values: Vec<f64>,
    pub t: f64,
}

impl DensityField {
    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx()
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluxField {
    pub grid: Grid1D,
    pub values: Vec<f64>,
    pub t: f64,
}

impl FluxField {
    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }
}

/// `v = j/ρ` where `ρ ≥ floor`; `mask[k]` is true where the value is defined.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    pub grid: Grid1D,
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
    pub t: f64,
}

impl VelocityField {
    pub fn unmasked_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }
}

pub fn density_from_wavefunction(psi: &WaveFunction1D) -> DensityField {
    DensityField {
        grid: *psi.grid(),
        values: psi.amp().iter().map(|a| a.norm_sqr()).collect(),
        t: 0.0,
    }
}

/// Probability flux with a spectral derivative.
pub fn flux_from_wavefunction(psi: &WaveFunction1D) -> FluxField {
    let d = spectral::derivative(psi.grid(), psi.amp());
    let scale = psi.hbar() / psi.mass();
    FluxField {
        grid: *psi.grid(),
        values: psi
            .amp()
            .iter()
            .zip(&d)
            .map(|(a, da)| scale * (a.conj() * da).im)
            .collect(),
        t: 0.0,
    }
}

/// Default floor: `1e-10` of the density peak.
pub fn default_density_floor(rho: &DensityField) -> f64 {
    1e-10 * rho.peak()
}

pub fn velocity_field(rho: &DensityField, j: &FluxField, floor: f64) -> Result<VelocityField> {
    if rho.grid != j.grid {
        return Err(Error::GridMismatch);
    }
    if !(floor > 0.0) {
        return Err(Error::InvalidParameter(format!("density floor must be positive, got {floor}")));
    }
    let mask: Vec<bool> = rho.values.iter().map(|&r| r >= floor).collect();
    if !mask.iter().any(|&m| m) {
        return Err(Error::AllMasked);
    }
    let values = rho
        .values
        .iter()
        .zip(&j.values)
        .zip(&mask)
        .map(|((r, j), &m)| if m { j / r } else { 0.0 })
        .collect();
    Ok(VelocityField {
        grid: rho.grid,
        values,
        mask,
        t: rho.t,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualSample {
    pub t: f64,
    /// `sqrt(Σ r²·dx)` with `r = ∂ρ/∂t + ∂j/∂x`
    pub norm: f64,
}

/// L2 norm of the continuity residual at every interior snapshot.
///
/// `∂ρ/∂t` is a centred difference over neighbouring snapshots; `∂j/∂x` is spectral.
pub fn continuity_residual(result: &EvolutionResult<WaveFunction1D>) -> Result<Vec<ResidualSample>> {
    let snaps = &result.snapshots;
    if snaps.len() < 3 {
        return Err(Error::TooFewSnapshots(snaps.len()));
    }
    let h = result.spacing();
    let grid = *snaps[0].state.grid();
    let densities: Vec<DensityField> = snaps.iter().map(|s| density_from_wavefunction(&s.state)).collect();
    let mut out = Vec::with_capacity(snaps.len() - 2);
    for k in 1..snaps.len() - 1 {
        let j = flux_from_wavefunction(&snaps[k].state);
        let dj = spectral::derivative_real(&grid, &j.values);
        let sum: f64 = densities[k + 1]
            .values
            .iter()
            .zip(&densities[k - 1].values)
            .zip(&dj)
            .map(|((rp, rm), dj)| {
                let r = (rp - rm) / (2.0 * h) + dj;
                r * r
            })
            .sum();
        out.push(ResidualSample {
            t: snaps[k].t,
            norm: (sum * grid.dx()).sqrt(),
        });
    }
    Ok(out)
}

/// `ρ(x_A, x_B) = |Ψ|²`, row-major like the amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField2D {
    pub grid_a: Grid1D,
    pub grid_b: Grid1D,
    pub values: Vec<f64>,
    pub t: f64,
}

impl DensityField2D {
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid_a.dx() * self.grid_b.dx()
    }

    pub fn at(&self, ia: usize, ib: usize) -> f64 {
        self.values[ia * self.grid_b.len() + ib]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigurationDensity {
    pub joint: DensityField2D,
    pub marginal_a: DensityField,
    pub marginal_b: DensityField,
}

pub fn configuration_density(psi: &WaveFunction2D) -> ConfigurationDensity {
    let (ga, gb) = (*psi.grid_a(), *psi.grid_b());
    let (na, nb) = (ga.len(), gb.len());
    let values: Vec<f64> = psi.amp().iter().map(|a| a.norm_sqr()).collect();
    let mut ma = vec![0.0; na];
    let mut mb = vec![0.0; nb];
    for ia in 0..na {
        for ib in 0..nb {
            let r = values[ia * nb + ib];
            ma[ia] += r * gb.dx();
            mb[ib] += r * ga.dx();
        }
    }
    ConfigurationDensity {
        joint: DensityField2D {
            grid_a: ga,
            grid_b: gb,
            values,
            t: 0.0,
        },
        marginal_a: DensityField {
            grid: ga,
            values: ma,
            t: 0.0,
        },
        marginal_b: DensityField {
            grid: gb,
            values: mb,
            t: 0.0,
        },
    }
}

/// `max |ρ(x_A, x_B) − ρ_A(x_A)·ρ_B(x_B)|` over the configuration grid.
pub fn product_factorization_check(psi: &WaveFunction2D) -> f64 {
    let c = configuration_density(psi);
    let nb = psi.grid_b().len();
    c.joint
        .values
        .iter()
        .enumerate()
        .map(|(idx, r)| (r - c.marginal_a.values[idx / nb] * c.marginal_b.values[idx % nb]).abs())
        .fold(0.0, f64::max)
}
