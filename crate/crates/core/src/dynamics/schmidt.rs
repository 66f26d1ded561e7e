use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::grid::{State, WaveFunction2D};

#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtSummary {
    /// `Σs⁴ / (Σs²)²`, 1 for product states.
    pub purity: f64,
    /// `1 / purity`, the effective number of product terms.
    pub schmidt_number: f64,
    /// Schmidt coefficients in decreasing order, including the `sqrt(dx_A·dx_B)` measure.
    pub singular_values: Vec<f64>,
}

/// Schmidt decomposition of `Ψ(x_A, x_B)` via the SVD of its amplitude matrix.
pub fn schmidt_purity(psi: &WaveFunction2D) -> SchmidtSummary {
    let (na, nb) = (psi.grid_a().len(), psi.grid_b().len());
    let w = psi.cell_volume().sqrt();
    let m = DMatrix::<Complex64>::from_row_slice(na, nb, psi.amp()).map(|a| a * w);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    let p2: f64 = s.iter().map(|v| v * v).sum();
    let p4: f64 = s.iter().map(|v| v.powi(4)).sum();
    let purity = p4 / (p2 * p2);
    SchmidtSummary {
        purity,
        schmidt_number: 1.0 / purity,
        singular_values: s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{box_ground_state, gaussian_packet, Grid1D};

    #[test]
    fn product_state_has_unit_purity() {
        let g = Grid1D::centered(40.0, 128).unwrap();
        let a = gaussian_packet(&g, -2.0, 1.0, 0.7).unwrap();
        let b = gaussian_packet(&g, 3.0, 1.4, -0.2).unwrap();
        let s = schmidt_purity(&WaveFunction2D::product(&a, &b).unwrap());
        assert!((s.purity - 1.0).abs() < 1e-10);
    }

    #[test]
    fn equal_superposition_of_orthogonal_products() {
        let g = Grid1D::centered(32.0, 64).unwrap();
        let p1 = box_ground_state(&g, -10.0, 4.0).unwrap();
        let p2 = box_ground_state(&g, -3.0, 4.0).unwrap();
        let f1 = box_ground_state(&g, 3.0, 4.0).unwrap();
        let f2 = box_ground_state(&g, 10.0, 4.0).unwrap();
        let t1 = WaveFunction2D::product(&p1, &f1).unwrap();
        let t2 = WaveFunction2D::product(&p2, &f2).unwrap();
        let c = Complex64::new(0.5f64.sqrt(), 0.0);
        let psi = WaveFunction2D::superpose(&[(c, &t1), (c, &t2)]).unwrap();
        let s = schmidt_purity(&psi);
        assert!((s.schmidt_number - 2.0).abs() < 1e-6);
        // independent check: the two leading coefficients equal 1/√2
        assert!((s.singular_values[0] - c.re).abs() < 1e-10);
        assert!((s.singular_values[1] - c.re).abs() < 1e-10);
    }

    #[test]
    fn n_equal_terms_give_schmidt_number_n() {
        // Ψ = (1/√n) Σ_k e_k(x_A) e_k(x_B) with grid delta functions
        let g = Grid1D::centered(16.0, 16).unwrap();
        let n = g.len();
        let mut amp = vec![Complex64::new(0.0, 0.0); n * n];
        for k in 0..n {
            amp[k * n + k] = Complex64::new(1.0, 0.0);
        }
        let psi = WaveFunction2D::from_amplitudes(g, g, amp).unwrap().normalize().unwrap();
        let s = schmidt_purity(&psi);
        assert!((s.schmidt_number - n as f64).abs() < 1e-6);
    }
}
