use num_complex::Complex64;
use rdm_core::density::{
    configuration_density, continuity_residual, density_from_wavefunction, flux_from_wavefunction,
    product_factorization_check, velocity_field,
};
use rdm_core::dynamics::{evolve, ExternalPotential, PotentialSpec};
use rdm_core::grid::{
    box_ground_state, gaussian_packet, harmonic_ground_state, plane_wave, two_box_state, Grid1D, State,
};
use rdm_core::reconstruct::{component_phase_distance, global_phase_distance, reconstruct_wavefunction};
use rdm_core::scenarios::{build_four_box, FourBoxMode, FourBoxScenario};

#[test]
fn stationary_state_has_negligible_continuity_residual() {
    let g = Grid1D::centered(20.0, 256).unwrap();
    let psi = harmonic_ground_state(&g, 0.0, 1.0, 1.0, 1.0).unwrap();
    let pot = PotentialSpec::new(ExternalPotential::Harmonic { center: 0.0, omega: 1.0 }, 0.0, 0.3).unwrap();
    let run = evolve(&psi, &pot, 0.2, 0.0005, 40).unwrap();
    for r in continuity_residual(&run).unwrap() {
        assert!(r.norm <= 1e-8, "t = {}, residual = {}", r.t, r.norm);
    }
}

#[test]
fn plane_wave_has_zero_continuity_residual() {
    let g = Grid1D::centered(10.0, 64).unwrap();
    let run = evolve(&plane_wave(&g, 3), &PotentialSpec::free(&g), 0.1, 0.001, 10).unwrap();
    for r in continuity_residual(&run).unwrap() {
        assert!(r.norm <= 1e-10);
    }
}

#[test]
fn boxes_mask_the_gap_but_not_their_interiors() {
    let g = Grid1D::centered(32.0, 512).unwrap();
    let (centers, w) = ([-6.0, 6.0], 3.0);
    let psi = two_box_state(&g, centers, w, 0.0).unwrap();
    let rho = density_from_wavefunction(&psi);
    let v = velocity_field(&rho, &flux_from_wavefunction(&psi), 1e-10).unwrap();
    let (mut inside, mut kept) = (0, 0);
    for (x, m) in g.points().zip(&v.mask) {
        let in_box = centers.iter().any(|c| (x - c).abs() < 0.5 * w);
        if in_box {
            inside += 1;
            kept += usize::from(*m);
        } else if x.abs() < 4.0 {
            assert!(!m, "gap point {x} unmasked");
        }
    }
    assert!(kept as f64 >= 0.99 * inside as f64);
}

#[test]
fn entangled_four_box_does_not_factorize() {
    let g = Grid1D::centered(32.0, 128).unwrap();
    let s = FourBoxScenario {
        centers: [-11.0, 4.0, -4.0, 11.0],
        width: 3.0,
        q1q2: 1.0,
        softening: 0.25,
        mode: FourBoxMode::Entangled,
    };
    let psi = build_four_box(&s, &g, &g).unwrap();
    let c = configuration_density(&psi);
    let peak = c.joint.values.iter().cloned().fold(0.0, f64::max);
    assert!(product_factorization_check(&psi) > 0.1 * peak);
    assert!((c.marginal_a.integral() - 1.0).abs() < 1e-9);
    assert!((c.marginal_b.integral() - 1.0).abs() < 1e-9);
    let product = build_four_box(&FourBoxScenario { mode: FourBoxMode::Product, ..s }, &g, &g).unwrap();
    assert!(product_factorization_check(&product) <= 1e-10);
}

#[test]
fn boosted_gaussian_round_trip() {
    let g = Grid1D::centered(40.0, 512).unwrap();
    let psi = gaussian_packet(&g, -1.0, 1.3, 1.7).unwrap();
    let rho = density_from_wavefunction(&psi);
    // only the far tails, where |ψ| is below 1e-15, fall under this floor
    let v = velocity_field(&rho, &flux_from_wavefunction(&psi), 1e-30 * rho.peak()).unwrap();
    let rec = reconstruct_wavefunction(&rho, &v, 1.0, 1.0).unwrap();
    assert_eq!(rec.components.len(), 1);
    assert!(global_phase_distance(&psi, &rec.wavefunction).unwrap() <= 1e-8);
    assert!((rec.wavefunction.norm() - 1.0).abs() <= 1e-9);
}

#[test]
fn inter_box_phase_is_invisible_to_density_and_velocity() {
    let g = Grid1D::centered(32.0, 512).unwrap();
    let even = two_box_state(&g, [-6.0, 6.0], 3.0, 0.0).unwrap();
    let odd = two_box_state(&g, [-6.0, 6.0], 3.0, std::f64::consts::PI).unwrap();
    assert!(global_phase_distance(&even, &odd).unwrap() > 1.0);

    let fields = |psi| {
        let rho = density_from_wavefunction(psi);
        let v = velocity_field(&rho, &flux_from_wavefunction(psi), 1e-10 * rho.peak()).unwrap();
        (rho, v)
    };
    let (rho_e, v_e) = fields(&even);
    let (rho_o, v_o) = fields(&odd);
    for (a, b) in rho_e.values.iter().zip(&rho_o.values) {
        assert!((a - b).abs() <= 1e-15);
    }
    assert_eq!(v_e.mask, v_o.mask);
    for (a, b) in v_e.values.iter().zip(&v_o.values) {
        assert!((a - b).abs() <= 1e-12);
    }

    let rec = reconstruct_wavefunction(&rho_e, &v_e, 1.0, 1.0).unwrap();
    assert!(rec.relative_phase_ambiguous());
    assert_eq!(rec.components.len(), 2);
    for target in [&even, &odd] {
        for c in &rec.components {
            let d = component_phase_distance(target, &rec.wavefunction, c.start, c.end).unwrap();
            assert!(d <= 1e-8, "component {c:?}: {d}");
        }
    }
}

#[test]
fn single_box_reconstructs_exactly() {
    let g = Grid1D::centered(20.0, 256).unwrap();
    let psi = box_ground_state(&g, 1.25, 2.5).unwrap();
    let rho = density_from_wavefunction(&psi);
    let v = velocity_field(&rho, &flux_from_wavefunction(&psi), 1e-10 * rho.peak()).unwrap();
    let rec = reconstruct_wavefunction(&rho, &v, 1.0, 1.0).unwrap();
    assert_eq!(rec.components.len(), 1);
    let d = global_phase_distance(&psi, &rec.wavefunction).unwrap();
    assert!(d <= 1e-8, "{d}");
    let expected: Vec<Complex64> = psi.amp().to_vec();
    for (a, b) in rec.wavefunction.amp().iter().zip(&expected) {
        assert!((a.norm() - b.norm()).abs() <= 1e-12);
    }
}
