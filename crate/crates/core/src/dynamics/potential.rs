use num_complex::Complex64;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid1D, State, WaveFunction1D};

/// Regularized pair interaction `q1q2 / sqrt(r² + ε²)`.
pub fn soft_coulomb(separation: f64, q1q2: f64, softening: f64) -> Result<f64> {
    if !(softening > 0.0) {
        return Err(Error::NonpositiveSoftening(softening));
    }
    Ok(soft_coulomb_unchecked(separation, q1q2, softening))
}

#[inline]
pub(crate) fn soft_coulomb_unchecked(separation: f64, q1q2: f64, softening: f64) -> f64 {
    q1q2 / (separation * separation + softening * softening).sqrt()
}

/// Single-particle potential, identical for every particle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExternalPotential {
    Zero,
    /// `½ m ω² (x − center)²`
    Harmonic { center: f64, omega: f64 },
    /// Flat-bottomed wells of equal width: 0 inside any well, `depth` elsewhere.
    SquareWells {
        centers: Vec<f64>,
        width: f64,
        depth: f64,
    },
    /// `½ m ω² (x − c)²` for the nearest centre `c`.
    HarmonicWells { centers: Vec<f64>, omega: f64 },
    Sampled { values: Vec<f64> },
}

impl ExternalPotential {
    pub fn sample(&self, grid: &Grid1D, mass: f64) -> Result<Vec<f64>> {
        match self {
            Self::Zero => Ok(vec![0.0; grid.len()]),
            Self::Harmonic { center, omega } => Ok(grid
                .points()
                .map(|x| 0.5 * mass * omega * omega * (x - center).powi(2))
                .collect()),
            Self::SquareWells {
                centers,
                width,
                depth,
            } => {
                if !(*width > 0.0) || !depth.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "square wells need positive width and finite depth, got {width}, {depth}"
                    )));
                }
                Ok(grid
                    .points()
                    .map(|x| {
                        if centers.iter().any(|c| (x - c).abs() < 0.5 * width) {
                            0.0
                        } else {
                            *depth
                        }
                    })
                    .collect())
            }
            Self::HarmonicWells { centers, omega } => {
                if centers.is_empty() || !omega.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "harmonic wells need at least one centre and finite omega, got {omega}"
                    )));
                }
                Ok(grid
                    .points()
                    .map(|x| {
                        let d = centers.iter().map(|c| (x - c).abs()).fold(f64::INFINITY, f64::min);
                        0.5 * mass * omega * omega * d * d
                    })
                    .collect())
            }
            Self::Sampled { values } => {
                if values.len() != grid.len() {
                    return Err(Error::LengthMismatch {
                        expected: grid.len(),
                        got: values.len(),
                    });
                }
                Ok(values.clone())
            }
        }
    }
}

/// Everything the propagator needs to know about forces.
///
/// For two-particle states the potential is
/// `V_ext(x_A) + V_ext(x_B) + soft_coulomb(x_A − x_B)`; the self-coupling `λ`
/// only applies to single-particle states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub external: ExternalPotential,
    pub q1q2: f64,
    pub softening: f64,
    pub self_coupling: f64,
}

impl PotentialSpec {
    pub fn new(external: ExternalPotential, q1q2: f64, softening: f64) -> Result<Self> {
        if !(softening > 0.0) {
            return Err(Error::NonpositiveSoftening(softening));
        }
        Ok(Self {
            external,
            q1q2,
            softening,
            self_coupling: 0.0,
        })
    }

    /// No forces at all; softening set to the default `2·dx`.
    pub fn free(grid: &Grid1D) -> Self {
        Self {
            external: ExternalPotential::Zero,
            q1q2: 0.0,
            softening: default_softening(grid),
            self_coupling: 0.0,
        }
    }

    pub fn with_self_coupling(mut self, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "self coupling must be finite and >= 0, got {lambda}"
            )));
        }
        self.self_coupling = lambda;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.softening > 0.0) {
            return Err(Error::NonpositiveSoftening(self.softening));
        }
        if !(self.self_coupling >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "self coupling must be >= 0, got {}",
                self.self_coupling
            )));
        }
        Ok(())
    }
}

pub fn default_softening(grid: &Grid1D) -> f64 {
    2.0 * grid.dx()
}

/// Periodic soft-Coulomb kernel `K[m] = 1/sqrt(d_m² + ε²)` with minimum-image `d_m`.
/// Linear (open-boundary) convolution of `|ψ|²` with the soft-Coulomb kernel.
///
/// The density is zero-padded to twice the grid length so that no periodic
/// image of the field acts back on the grid.
pub(crate) struct SelfPotentialSolver {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    kernel_hat: Vec<Complex64>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl SelfPotentialSolver {
    pub(crate) fn new(grid: &Grid1D, softening: f64) -> Self {
        let n = grid.len();
        let m = 2 * n;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        let dx = grid.dx();
        let mut kernel_hat: Vec<Complex64> = (0..m)
            .map(|j| {
                let d = if j < n { j as f64 } else { j as f64 - m as f64 } * dx;
                Complex64::new(soft_coulomb_unchecked(d, 1.0, softening), 0.0)
            })
            .collect();
        fwd.process(&mut kernel_hat);
        let scratch_len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        Self {
            n,
            fwd,
            inv,
            kernel_hat,
            buf: vec![Complex64::new(0.0, 0.0); m],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    /// `out(x) = scale · Σ_x' K(x − x')·|ψ(x')|²`
    pub(crate) fn apply(&mut self, amp: &[Complex64], scale: f64, out: &mut [f64]) {
        debug_assert_eq!(amp.len(), self.n);
        let zero = Complex64::new(0.0, 0.0);
        for (b, a) in self.buf.iter_mut().zip(amp) {
            *b = Complex64::new(a.norm_sqr(), 0.0);
        }
        self.buf[self.n..].iter_mut().for_each(|b| *b = zero);
        self.fwd.process_with_scratch(&mut self.buf, &mut self.scratch);
        for (b, k) in self.buf.iter_mut().zip(&self.kernel_hat) {
            *b *= k;
        }
        self.inv.process_with_scratch(&mut self.buf, &mut self.scratch);
        let norm = scale / self.buf.len() as f64;
        for (o, b) in out.iter_mut().zip(&self.buf) {
            *o = b.re * norm;
        }
    }
}

/// Mean-field self-potential `U(x) = λ Σ_x' K(x − x')·|ψ(x')|²·dx` with open boundaries.
///
/// Linear quantum mechanics has no such term; it is only used to show what a
/// self-interacting field would do.
pub fn hartree_self_potential(psi: &WaveFunction1D, lambda: f64, softening: f64) -> Result<Vec<f64>> {
    if !(softening > 0.0) {
        return Err(Error::NonpositiveSoftening(softening));
    }
    let grid = psi.grid();
    let mut out = vec![0.0; grid.len()];
    if lambda != 0.0 {
        SelfPotentialSolver::new(grid, softening).apply(psi.amplitudes(), lambda * grid.dx(), &mut out);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{gaussian_packet, two_box_state};

    #[test]
    fn soft_coulomb_values() {
        assert_eq!(soft_coulomb(0.0, 3.0, 0.5).unwrap(), 6.0);
        assert_eq!(soft_coulomb(7.0, 0.0, 0.5).unwrap(), 0.0);
        let eps = 0.37;
        let v = soft_coulomb(eps, 1.0, eps).unwrap();
        assert!((v - 1.0 / (eps * 2f64.sqrt())).abs() < 1e-14);
        assert_eq!(soft_coulomb(1.0, 1.0, 0.0), Err(Error::NonpositiveSoftening(0.0)));
        assert_eq!(
            soft_coulomb(-2.5, 1.0, 0.3).unwrap(),
            soft_coulomb(2.5, 1.0, 0.3).unwrap()
        );
    }

    #[test]
    fn hartree_zero_coupling_is_zero() {
        let g = Grid1D::centered(40.0, 256).unwrap();
        let psi = gaussian_packet(&g, 0.0, 1.0, 0.0).unwrap();
        let u = hartree_self_potential(&psi, 0.0, 0.3).unwrap();
        assert!(u.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn hartree_symmetric_for_symmetric_density() {
        let g = Grid1D::centered(40.0, 512).unwrap();
        let psi = two_box_state(&g, [-6.0, 6.0], 3.0, 0.9).unwrap();
        let u = hartree_self_potential(&psi, 2.5, 0.2).unwrap();
        let n = g.len();
        for k in 1..n {
            assert!((u[k] - u[n - k]).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn hartree_matches_direct_quadrature() {
        let g = Grid1D::centered(40.0, 256).unwrap();
        let psi = gaussian_packet(&g, 3.0, 0.8, 1.0).unwrap();
        let (lambda, eps) = (1.7, 0.4);
        let u = hartree_self_potential(&psi, lambda, eps).unwrap();
        for (i, xi) in g.points().enumerate() {
            let direct: f64 = g
                .points()
                .zip(psi.amp())
                .map(|(xj, a)| {
                    let d = xi - xj;
                    lambda * a.norm_sqr() * g.dx() / (d * d + eps * eps).sqrt()
                })
                .sum();
            assert!((u[i] - direct).abs() < 1e-12 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn hartree_far_field_is_point_charge() {
        let g = Grid1D::centered(80.0, 1024).unwrap();
        let (c, sigma) = (-5.0, 0.3);
        let psi = gaussian_packet(&g, c, sigma, 0.0).unwrap();
        let (lambda, eps) = (0.8, 0.25);
        let u = hartree_self_potential(&psi, lambda, eps).unwrap();
        for (k, x) in g.points().enumerate() {
            let r = (x - c).abs();
            // the leading correction to the point-charge field is σ²/r², 1e-2 at r = 10σ
            if r > 35.0 * sigma && r < 30.0 {
                let point = lambda * soft_coulomb(r, 1.0, eps).unwrap();
                assert!((u[k] - point).abs() < 1e-3 * point, "x = {x}");
            }
        }
    }

    #[test]
    fn square_wells_sampling() {
        let g = Grid1D::centered(20.0, 64).unwrap();
        let v = ExternalPotential::SquareWells {
            centers: vec![-5.0, 5.0],
            width: 2.0,
            depth: 9.0,
        }
        .sample(&g, 1.0)
        .unwrap();
        for (x, v) in g.points().zip(&v) {
            let inside = (x + 5.0).abs() < 1.0 || (x - 5.0).abs() < 1.0;
            assert_eq!(*v, if inside { 0.0 } else { 9.0 });
        }
        let h = ExternalPotential::HarmonicWells {
            centers: vec![-5.0, 5.0],
            omega: 2.0,
        }
        .sample(&g, 0.5)
        .unwrap();
        for (x, h) in g.points().zip(&h) {
            let d = (x.abs() - 5.0).abs();
            assert!((h - d * d).abs() < 1e-12);
        }
        let bad = ExternalPotential::Sampled { values: vec![0.0; 3] };
        assert!(bad.sample(&g, 1.0).is_err());
    }
}
