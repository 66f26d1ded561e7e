//! Rebuilding `ψ = sqrt(ρ)·exp(iS/ħ)` with `S(x) = m∫v dx'` from a density and
//! its velocity field.
//!
//! `(ρ, v)` fix `ψ` only up to a constant phase on each connected region where
//! `v` is defined. With a single region that is one global phase; across
//! regions separated by nodes the relative phases are lost, and the
//! reconstruction reports each region with its own anchor.

use num_complex::Complex64;

use crate::density::{DensityField, VelocityField};
use crate::error::{Error, Result};
use crate::grid::{Grid1D, State, WaveFunction1D};

/// Action `S` along the grid; zero at `reference_point` and at masked points.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField {
    pub grid: Grid1D,
    pub values: Vec<f64>,
    pub reference_point: usize,
}

/// Maximal runs `[start, end)` of unmasked points in grid order.
pub fn unmasked_components(mask: &[bool]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (k, &m) in mask.iter().enumerate() {
        match (m, start) {
            (true, None) => start = Some(k),
            (false, Some(s)) => {
                out.push((s, k));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, mask.len()));
    }
    out
}

/// Cumulative trapezoid of `m·v` outward from `anchor` within `[start, end)`.
fn integrate_component(v: &VelocityField, mass: f64, (start, end): (usize, usize), anchor: usize, out: &mut [f64]) {
    let half = 0.5 * mass * v.grid.dx();
    out[anchor] = 0.0;
    for k in anchor + 1..end {
        out[k] = out[k - 1] + half * (v.values[k - 1] + v.values[k]);
    }
    for k in (start..anchor).rev() {
        out[k] = out[k + 1] - half * (v.values[k] + v.values[k + 1]);
    }
}

/// `S(x) = m·∫_ref^x v dx'` by cumulative trapezoidal quadrature.
///
/// The unmasked points must form one contiguous run containing the reference;
/// use [`reconstruct_wavefunction`] for supports split by nodes.
pub fn phase_from_velocity(v: &VelocityField, mass: f64, reference_point: usize) -> Result<PhaseField> {
    if reference_point >= v.values.len() {
        return Err(Error::InvalidParameter(format!(
            "reference point {reference_point} outside grid of {}",
            v.values.len()
        )));
    }
    if !v.mask[reference_point] {
        return Err(Error::MaskedReference(reference_point));
    }
    let comps = unmasked_components(&v.mask);
    if comps.len() > 1 {
        return Err(Error::DisconnectedSupport {
            components: comps.len(),
        });
    }
    let mut values = vec![0.0; v.values.len()];
    integrate_component(v, mass, comps[0], reference_point, &mut values);
    Ok(PhaseField {
        grid: v.grid,
        values,
        reference_point,
    })
}

/// One connected region of the reconstruction and the point where its phase is pinned to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseComponent {
    pub start: usize,
    pub end: usize,
    /// Highest-density point of the region.
    pub anchor: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub wavefunction: WaveFunction1D,
    pub phase: Vec<f64>,
    /// Regions whose mutual phases are not determined by `(ρ, v)`.
    pub components: Vec<PhaseComponent>,
}

impl Reconstruction {
    pub fn relative_phase_ambiguous(&self) -> bool {
        self.components.len() > 1
    }
}

/// `ψ = sqrt(ρ)·exp(iS/ħ)`, anchoring each connected unmasked region at its density peak.
pub fn reconstruct_wavefunction(
    rho: &DensityField,
    v: &VelocityField,
    mass: f64,
    hbar: f64,
) -> Result<Reconstruction> {
    if rho.grid != v.grid {
        return Err(Error::GridMismatch);
    }
    let comps = unmasked_components(&v.mask);
    if comps.is_empty() {
        return Err(Error::AllMasked);
    }
    let mut phase = vec![0.0; rho.values.len()];
    let components = comps
        .iter()
        .map(|&(start, end)| {
            let anchor = (start..end)
                .max_by(|&a, &b| rho.values[a].total_cmp(&rho.values[b]))
                .unwrap_or(start);
            integrate_component(v, mass, (start, end), anchor, &mut phase);
            PhaseComponent { start, end, anchor }
        })
        .collect();
    let amp = rho
        .values
        .iter()
        .zip(&phase)
        .map(|(r, s)| Complex64::from_polar(r.max(0.0).sqrt(), s / hbar))
        .collect();
    let wavefunction = WaveFunction1D::from_amplitudes(rho.grid, amp)?.with_units(mass, hbar)?;
    Ok(Reconstruction {
        wavefunction,
        phase,
        components,
    })
}

/// `min_θ ‖a − e^{iθ}b‖`, attained at `θ = arg⟨b|a⟩`.
///
/// Evaluated as an explicit difference so that tiny distances do not suffer
/// the cancellation of `sqrt(2 − 2|⟨a|b⟩|)`.
pub fn global_phase_distance(a: &WaveFunction1D, b: &WaveFunction1D) -> Result<f64> {
    let overlap = b.inner_product(a)?;
    let rot = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let s: f64 = a
        .amp()
        .iter()
        .zip(b.amp())
        .map(|(x, y)| (x - rot * y).norm_sqr())
        .sum();
    Ok((s * a.grid().dx()).sqrt())
}

/// Global-phase distance restricted to the points `[start, end)`.
pub fn component_phase_distance(a: &WaveFunction1D, b: &WaveFunction1D, start: usize, end: usize) -> Result<f64> {
    if !a.same_grid(b) {
        return Err(Error::GridMismatch);
    }
    let (xa, xb) = (&a.amp()[start..end], &b.amp()[start..end]);
    let overlap: Complex64 = xb.iter().zip(xa).map(|(y, x)| y.conj() * x).sum();
    let rot = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let s: f64 = xa.iter().zip(xb).map(|(x, y)| (x - rot * y).norm_sqr()).sum();
    Ok((s * a.grid().dx()).sqrt())
}
