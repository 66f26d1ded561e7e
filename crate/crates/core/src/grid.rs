//! Uniform periodic grids and the wave-function containers that live on them.
//!
//! A [`Grid1D`] stores `n` points `x_min + k·dx`, `k = 0..n`, with `x_max`
//! identified with `x_min`. Two-particle states use one grid per particle and
//! store amplitudes row-major, particle A along rows.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest grid the spectral routines accept.
pub const MIN_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::InvalidGrid(format!(
                "need finite x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n < MIN_POINTS || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "point count {n} must be a power of two >= {MIN_POINTS}"
            )));
        }
        Ok(Self { x_min, x_max, n })
    }

    /// Grid of `n` points centred on the origin with total length `length`.
    pub fn centered(length: f64, n: usize) -> Result<Self> {
        Self::new(-0.5 * length, 0.5 * length, n)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n as f64
    }

    pub fn x(&self, k: usize) -> f64 {
        self.x_min + k as f64 * self.dx()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |k| self.x(k))
    }

    /// Angular wavenumbers in FFT order; the Nyquist mode is reported as `-π/dx`.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let dk = 2.0 * PI / self.length();
        let half = self.n / 2;
        (0..self.n)
            .map(|j| {
                if j < half {
                    j as f64 * dk
                } else {
                    (j as f64 - self.n as f64) * dk
                }
            })
            .collect()
    }

    /// Largest |k| representable on the grid.
    pub fn k_max(&self) -> f64 {
        PI / self.dx()
    }

    /// Index of the cell `[x_k, x_k + dx)` containing `x`, if inside the domain.
    pub fn cell_of(&self, x: f64) -> Option<usize> {
        if x < self.x_min || x >= self.x_max {
            return None;
        }
        let k = ((x - self.x_min) / self.dx()).floor() as usize;
        Some(k.min(self.n - 1))
    }

    /// Shortest periodic displacement `a - b`, wrapped into `[-L/2, L/2]`.
    pub fn periodic_separation(&self, a: f64, b: f64) -> f64 {
        let l = self.length();
        let d = a - b;
        d - l * (d / l).round()
    }
}

/// Shared behaviour of one- and two-particle states.
pub trait State: Clone {
    fn amplitudes(&self) -> &[Complex64];
    fn amplitudes_mut(&mut self) -> &mut [Complex64];
    /// Volume element (`dx` or `dx₁·dx₂`).
    fn cell_volume(&self) -> f64;
    fn mass(&self) -> f64;
    fn hbar(&self) -> f64;
    fn same_grid(&self, other: &Self) -> bool;

    fn norm_sqr(&self) -> f64 {
        self.amplitudes().iter().map(|a| a.norm_sqr()).sum::<f64>() * self.cell_volume()
    }

    fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    fn inner_product(&self, other: &Self) -> Result<Complex64> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        let sum: Complex64 = self
            .amplitudes()
            .iter()
            .zip(other.amplitudes())
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(sum * self.cell_volume())
    }

    /// Rescale to unit norm. The returned amplitudes are a positive multiple of the input.
    fn normalize(mut self) -> Result<Self> {
        let norm = self.norm();
        if !(norm > 1e-300) {
            return Err(Error::ZeroNorm);
        }
        let inv = 1.0 / norm;
        self.amplitudes_mut().iter_mut().for_each(|a| *a *= inv);
        Ok(self)
    }

    /// L2 norm of `self - other`.
    fn distance(&self, other: &Self) -> Result<f64> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        let s: f64 = self
            .amplitudes()
            .iter()
            .zip(other.amplitudes())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok((s * self.cell_volume()).sqrt())
    }
}

/// Free function form of [`State::inner_product`]: `Σ conj(a)·b·dV`.
pub fn inner_product<S: State>(a: &S, b: &S) -> Result<Complex64> {
    a.inner_product(b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction1D {
    grid: Grid1D,
    amp: Vec<Complex64>,
    mass: f64,
    hbar: f64,
}

impl WaveFunction1D {
    /// Wraps raw amplitudes in natural units (`m = ħ = 1`) without normalizing.
    pub fn from_amplitudes(grid: Grid1D, amp: Vec<Complex64>) -> Result<Self> {
        if amp.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: amp.len(),
            });
        }
        Ok(Self {
            grid,
            amp,
            mass: 1.0,
            hbar: 1.0,
        })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Self {
        let amp = grid.points().map(f).collect();
        Self {
            grid,
            amp,
            mass: 1.0,
            hbar: 1.0,
        }
    }

    pub fn with_units(mut self, mass: f64, hbar: f64) -> Result<Self> {
        if !(mass > 0.0 && hbar > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mass and hbar must be positive, got m = {mass}, hbar = {hbar}"
            )));
        }
        self.mass = mass;
        self.hbar = hbar;
        Ok(self)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn amp(&self) -> &[Complex64] {
        &self.amp
    }

    pub fn expectation_x(&self) -> f64 {
        let w: f64 = self.amp.iter().map(|a| a.norm_sqr()).sum();
        let s: f64 = self
            .amp
            .iter()
            .zip(self.grid.points())
            .map(|(a, x)| a.norm_sqr() * x)
            .sum();
        s / w
    }

    pub fn variance_x(&self) -> f64 {
        let mean = self.expectation_x();
        let w: f64 = self.amp.iter().map(|a| a.norm_sqr()).sum();
        let s: f64 = self
            .amp
            .iter()
            .zip(self.grid.points())
            .map(|(a, x)| a.norm_sqr() * (x - mean).powi(2))
            .sum();
        s / w
    }

    /// `Σ c_i ψ_i` over states on a common grid.
    pub fn superpose(terms: &[(Complex64, &WaveFunction1D)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty superposition".into()))?;
        let mut out = (*first).clone();
        out.amp.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
        for (c, psi) in terms {
            if !out.same_grid(psi) {
                return Err(Error::GridMismatch);
            }
            if psi.mass != out.mass || psi.hbar != out.hbar {
                return Err(Error::UnequalMasses);
            }
            for (o, a) in out.amp.iter_mut().zip(&psi.amp) {
                *o += c * a;
            }
        }
        Ok(out)
    }

    /// Reflection `x -> -x` about the origin; requires a grid symmetric about 0.
    pub fn mirrored(&self) -> Self {
        let n = self.grid.len();
        let mut out = self.clone();
        for k in 0..n {
            out.amp[(n - k) % n] = self.amp[k];
        }
        out
    }
}

impl State for WaveFunction1D {
    fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amp
    }

    fn cell_volume(&self) -> f64 {
        self.grid.dx()
    }

    fn mass(&self) -> f64 {
        self.mass
    }

    fn hbar(&self) -> f64 {
        self.hbar
    }

    fn same_grid(&self, other: &Self) -> bool {
        self.grid == other.grid
    }
}

/// Two-particle amplitude `Ψ(x_A, x_B)` stored as `amp[i_a * n_b + i_b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction2D {
    grid_a: Grid1D,
    grid_b: Grid1D,
    amp: Vec<Complex64>,
    mass: f64,
    hbar: f64,
}

impl WaveFunction2D {
    pub fn from_amplitudes(grid_a: Grid1D, grid_b: Grid1D, amp: Vec<Complex64>) -> Result<Self> {
        let expected = grid_a.len() * grid_b.len();
        if amp.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: amp.len(),
            });
        }
        Ok(Self {
            grid_a,
            grid_b,
            amp,
            mass: 1.0,
            hbar: 1.0,
        })
    }

    pub fn from_fn(grid_a: Grid1D, grid_b: Grid1D, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let mut amp = Vec::with_capacity(grid_a.len() * grid_b.len());
        for xa in grid_a.points() {
            for xb in grid_b.points() {
                amp.push(f(xa, xb));
            }
        }
        Self {
            grid_a,
            grid_b,
            amp,
            mass: 1.0,
            hbar: 1.0,
        }
    }

    /// Tensor product `ψ_A(x_A)·ψ_B(x_B)`.
    pub fn product(a: &WaveFunction1D, b: &WaveFunction1D) -> Result<Self> {
        if a.mass != b.mass || a.hbar != b.hbar {
            return Err(Error::UnequalMasses);
        }
        let mut amp = Vec::with_capacity(a.amp.len() * b.amp.len());
        for ua in &a.amp {
            for ub in &b.amp {
                amp.push(ua * ub);
            }
        }
        Ok(Self {
            grid_a: a.grid,
            grid_b: b.grid,
            amp,
            mass: a.mass,
            hbar: a.hbar,
        })
    }

    pub fn superpose(terms: &[(Complex64, &WaveFunction2D)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty superposition".into()))?;
        let mut out = (*first).clone();
        out.amp.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
        for (c, psi) in terms {
            if !out.same_grid(psi) {
                return Err(Error::GridMismatch);
            }
            if psi.mass != out.mass || psi.hbar != out.hbar {
                return Err(Error::UnequalMasses);
            }
            for (o, a) in out.amp.iter_mut().zip(&psi.amp) {
                *o += c * a;
            }
        }
        Ok(out)
    }

    pub fn with_units(mut self, mass: f64, hbar: f64) -> Result<Self> {
        if !(mass > 0.0 && hbar > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mass and hbar must be positive, got m = {mass}, hbar = {hbar}"
            )));
        }
        self.mass = mass;
        self.hbar = hbar;
        Ok(self)
    }

    pub fn grid_a(&self) -> &Grid1D {
        &self.grid_a
    }

    pub fn grid_b(&self) -> &Grid1D {
        &self.grid_b
    }

    pub fn amp(&self) -> &[Complex64] {
        &self.amp
    }

    pub fn at(&self, ia: usize, ib: usize) -> Complex64 {
        self.amp[ia * self.grid_b.len() + ib]
    }
}

impl State for WaveFunction2D {
    fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amp
    }

    fn cell_volume(&self) -> f64 {
        self.grid_a.dx() * self.grid_b.dx()
    }

    fn mass(&self) -> f64 {
        self.mass
    }

    fn hbar(&self) -> f64 {
        self.hbar
    }

    fn same_grid(&self, other: &Self) -> bool {
        self.grid_a == other.grid_a && self.grid_b == other.grid_b
    }
}

/// Ground mode of an infinite well: `sqrt(2/w)·cos(π(x−c)/w)` inside the box, exactly zero outside.
pub fn box_ground_state(grid: &Grid1D, center: f64, width: f64) -> Result<WaveFunction1D> {
    let min = 8.0 * grid.dx();
    if !(width >= min) {
        return Err(Error::BoxTooNarrow { width, min });
    }
    let (lo, hi) = (center - 0.5 * width, center + 0.5 * width);
    if lo < grid.x_min() || hi > grid.x_max() {
        return Err(Error::BoxOutOfDomain { lo, hi });
    }
    let peak = (2.0 / width).sqrt();
    WaveFunction1D::from_fn(*grid, |x| {
        let u = x - center;
        if u.abs() < 0.5 * width {
            Complex64::new(peak * (PI * u / width).cos(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
    .normalize()
}

/// Normalized Gaussian envelope of standard deviation `sigma` in `|ψ|²`, times `exp(i·k0·x)`.
pub fn gaussian_packet(grid: &Grid1D, center: f64, sigma: f64, k0: f64) -> Result<WaveFunction1D> {
    let min = 2.0 * grid.dx();
    if !(sigma >= min) {
        return Err(Error::SigmaTooSmall { sigma, min });
    }
    let prefactor = (2.0 * PI * sigma * sigma).powf(-0.25);
    let envelope = |x: f64| prefactor * (-(x - center).powi(2) / (4.0 * sigma * sigma)).exp();
    let edge = envelope(grid.x_min()).max(envelope(grid.x_max()));
    if edge > 1e-10 {
        return Err(Error::TailTruncation { edge });
    }
    WaveFunction1D::from_fn(*grid, |x| envelope(x) * Complex64::from_polar(1.0, k0 * x)).normalize()
}

/// Ground state of `½ m ω² (x−c)²`, a Gaussian with `σ² = ħ/(2mω)`.
pub fn harmonic_ground_state(
    grid: &Grid1D,
    center: f64,
    omega: f64,
    mass: f64,
    hbar: f64,
) -> Result<WaveFunction1D> {
    if !(omega > 0.0) {
        return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
    }
    let sigma = (hbar / (2.0 * mass * omega)).sqrt();
    gaussian_packet(grid, center, sigma, 0.0)?.with_units(mass, hbar)
}

/// Plane wave `exp(i·k·x)/sqrt(L)` for the grid-compatible wavenumber `k = 2π·mode/L`.
pub fn plane_wave(grid: &Grid1D, mode: i64) -> WaveFunction1D {
    let k = 2.0 * PI * mode as f64 / grid.length();
    let a = 1.0 / grid.length().sqrt();
    WaveFunction1D::from_fn(*grid, |x| Complex64::from_polar(a, k * x))
}

/// `(ψ₁ + e^{iθ}ψ₂)/√2` with two box ground states.
pub fn two_box_state(
    grid: &Grid1D,
    centers: [f64; 2],
    width: f64,
    relative_phase: f64,
) -> Result<WaveFunction1D> {
    let left = box_ground_state(grid, centers[0], width)?;
    let right = box_ground_state(grid, centers[1], width)?;
    WaveFunction1D::superpose(&[
        (Complex64::new(1.0, 0.0), &left),
        (Complex64::from_polar(1.0, relative_phase), &right),
    ])?
    .normalize()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid1D {
        Grid1D::centered(40.0, 512).unwrap()
    }

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(Grid1D::new(0.0, 1.0, 100).is_err());
        assert!(Grid1D::new(0.0, 1.0, 8).is_err());
        assert!(Grid1D::new(1.0, 0.0, 64).is_err());
        let g = Grid1D::new(0.0, 1.0, 64).unwrap();
        assert_eq!(g.dx(), 1.0 / 64.0);
        assert_eq!(g.x(0), 0.0);
    }

    #[test]
    fn normalize_rescales_and_rejects_zero() {
        let g = grid();
        let base = gaussian_packet(&g, 1.0, 1.5, 0.3).unwrap();
        let mut doubled = base.clone();
        doubled.amplitudes_mut().iter_mut().for_each(|a| *a *= 2.0);
        let back = doubled.normalize().unwrap();
        assert!(back.distance(&base).unwrap() < 1e-12);
        let again = base.clone().normalize().unwrap();
        assert!(again.distance(&base).unwrap() < 1e-12);
        let zero = WaveFunction1D::from_fn(g, |_| Complex64::new(0.0, 0.0));
        assert_eq!(zero.normalize(), Err(Error::ZeroNorm));
    }

    #[test]
    fn box_peak_and_support() {
        let g = grid();
        let w = 5.0;
        let psi = box_ground_state(&g, 0.0, w).unwrap();
        let k0 = g.cell_of(0.0).unwrap();
        assert!((psi.amp()[k0].re - (2.0 / w).sqrt()).abs() < 1e-12);
        for (k, x) in g.points().enumerate() {
            if x.abs() >= 0.5 * w {
                assert_eq!(psi.amp()[k], Complex64::new(0.0, 0.0));
            }
            assert!(psi.amp()[k].re >= 0.0 && psi.amp()[k].im == 0.0);
        }
        assert!((psi.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn box_errors() {
        let g = grid();
        assert!(matches!(box_ground_state(&g, 0.0, 0.3), Err(Error::BoxTooNarrow { .. })));
        assert!(matches!(box_ground_state(&g, 19.0, 4.0), Err(Error::BoxOutOfDomain { .. })));
    }

    #[test]
    fn disjoint_boxes_are_orthogonal() {
        let g = grid();
        let a = box_ground_state(&g, -5.0, 3.0).unwrap();
        let b = box_ground_state(&g, 5.0, 3.0).unwrap();
        assert_eq!(a.inner_product(&b).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn box_norm_by_independent_quadrature() {
        // fine midpoint quadrature of the unnormalized cos² profile sampled on the grid nodes
        let g = grid();
        for &(c, w) in &[(0.3, 2.7), (-7.1, 5.3), (2.0, 1.0)] {
            let psi = box_ground_state(&g, c, w).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-12);
            let raw: f64 = g
                .points()
                .filter(|x| (x - c).abs() < 0.5 * w)
                .map(|x| (2.0 / w) * (PI * (x - c) / w).cos().powi(2) * g.dx())
                .sum();
            // grid quadrature of cos² is within O(dx²) of the exact value 1
            assert!((raw - 1.0).abs() < 10.0 * g.dx() * g.dx());
        }
    }

    #[test]
    fn gaussian_moments() {
        let g = grid();
        let sigma = 1.3;
        let real = gaussian_packet(&g, 0.0, sigma, 0.0).unwrap();
        let n = g.len();
        for k in 1..n {
            assert_eq!(real.amp()[k].im, 0.0);
            assert!((real.amp()[k].re - real.amp()[n - k].re).abs() < 1e-15);
        }
        let psi = gaussian_packet(&g, 2.5, sigma, 1.7).unwrap();
        assert!((psi.expectation_x() - 2.5).abs() < 1e-10);
        assert!((psi.variance_x() - sigma * sigma).abs() < 1e-8);
    }

    #[test]
    fn gaussian_errors() {
        let g = grid();
        assert!(matches!(gaussian_packet(&g, 0.0, 0.1, 0.0), Err(Error::SigmaTooSmall { .. })));
        assert!(matches!(gaussian_packet(&g, 0.0, 5.0, 0.0), Err(Error::TailTruncation { .. })));
    }

    #[test]
    fn gaussian_overlap_matches_closed_form() {
        let g = grid();
        let sigma = 1.1;
        for &d in &[0.0, 0.5, 1.7, 3.0] {
            let a = gaussian_packet(&g, -0.5 * d, sigma, 0.0).unwrap();
            let b = gaussian_packet(&g, 0.5 * d, sigma, 0.0).unwrap();
            let ov = inner_product(&a, &b).unwrap();
            let expected = (-d * d / (8.0 * sigma * sigma)).exp();
            // σ is the standard deviation of |ψ|², hence d²/(8σ²) in the exponent
            assert!((ov.re - expected).abs() < 1e-8, "d = {d}: {} vs {expected}", ov.re);
            assert!(ov.im.abs() < 1e-14);
        }
    }

    #[test]
    fn grid_mismatch() {
        let a = gaussian_packet(&grid(), 0.0, 1.0, 0.0).unwrap();
        let b = gaussian_packet(&Grid1D::centered(40.0, 256).unwrap(), 0.0, 1.0, 0.0).unwrap();
        assert_eq!(a.inner_product(&b), Err(Error::GridMismatch));
    }

    #[test]
    fn product_state_norm_and_mass_check() {
        let g = grid();
        let a = gaussian_packet(&g, -3.0, 1.0, 0.5).unwrap();
        let b = box_ground_state(&g, 4.0, 3.0).unwrap();
        let p = WaveFunction2D::product(&a, &b).unwrap();
        assert!((p.norm() - 1.0).abs() < 1e-12);
        let heavy = b.clone().with_units(2.0, 1.0).unwrap();
        assert_eq!(WaveFunction2D::product(&a, &heavy), Err(Error::UnequalMasses));
    }
}
