use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::grid::Grid1D;

/// First derivative by FFT; the unpaired Nyquist mode is dropped.
pub(crate) fn derivative(grid: &Grid1D, values: &[Complex64]) -> Vec<Complex64> {
    let n = grid.len();
    let mut planner = FftPlanner::new();
    let mut buf = values.to_vec();
    planner.plan_fft_forward(n).process(&mut buf);
    let ks = grid.wavenumbers();
    let norm = 1.0 / n as f64;
    for (j, (b, k)) in buf.iter_mut().zip(&ks).enumerate() {
        *b = if j == n / 2 {
            Complex64::new(0.0, 0.0)
        } else {
            *b * Complex64::new(0.0, k * norm)
        };
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf
}

pub(crate) fn derivative_real(grid: &Grid1D, values: &[f64]) -> Vec<f64> {
    let c: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    derivative(grid, &c).into_iter().map(|v| v.re).collect()
}
