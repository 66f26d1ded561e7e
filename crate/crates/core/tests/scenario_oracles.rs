use std::f64::consts::PI;

use rdm_core::density::configuration_density;
use rdm_core::dynamics::{evolve, schmidt_purity, PotentialSpec};
use rdm_core::grid::{box_ground_state, gaussian_packet, Grid1D};
use rdm_core::scenarios::{
    branch_interaction_matrix, build_four_box, packet_center_tracking, BranchDynamicsParams, FourBoxMode,
    FourBoxScenario, Particle, Region,
};

fn scenario(mode: FourBoxMode) -> FourBoxScenario {
    FourBoxScenario {
        centers: [-11.0, 4.0, -4.0, 11.0],
        width: 3.0,
        q1q2: 1.3,
        softening: 0.25,
        mode,
    }
}

/// Analytic box density `(2/w)·cos²(π(x − c)/w)` inside the box.
fn box_density(x: f64, c: f64, w: f64) -> f64 {
    if (x - c).abs() < 0.5 * w {
        2.0 / w * (PI * (x - c) / w).cos().powi(2)
    } else {
        0.0
    }
}

/// `∬ ρ_a(x)·ρ_b(y)·q/sqrt((x − y)² + ε²)` by a plain double sum.
fn pair_energy(g: &Grid1D, ca: f64, cb: f64, w: f64, q: f64, eps: f64) -> f64 {
    let dx = g.dx();
    let mut total = 0.0;
    for x in g.points() {
        let ra = box_density(x, ca, w);
        if ra == 0.0 {
            continue;
        }
        for y in g.points() {
            let rb = box_density(y, cb, w);
            total += ra * rb * q / ((x - y).powi(2) + eps * eps).sqrt();
        }
    }
    total * dx * dx
}

#[test]
fn entangled_branch_matrix_matches_quadrature() {
    let g = Grid1D::centered(32.0, 128).unwrap();
    let s = scenario(FourBoxMode::Entangled);
    assert!(s.min_gap() >= 10.0 * s.softening);
    let psi = build_four_box(&s, &g, &g).unwrap();
    let m = branch_interaction_matrix(&psi, &s.branches(&g, &g).unwrap(), s.q1q2, s.softening).unwrap();
    assert_eq!(m.labels, ["A1B1", "A2B2"]);
    for (label, ca, cb) in [("A1B1", s.centers[0], s.centers[2]), ("A2B2", s.centers[1], s.centers[3])] {
        let e_box = pair_energy(&g, ca, cb, s.width, s.q1q2, s.softening);
        let entry = m.entry_by_label(label, label).unwrap();
        assert!((entry.re - 0.5 * e_box).abs() <= 1e-6 * 0.5 * e_box, "{label}");
        assert!(entry.im.abs() <= 1e-15);
        assert!(m.max_off_diagonal() <= 1e-8 * e_box);
    }
    assert!(m.completeness_error() <= 1e-10);
    assert!(m.is_hermitian(1e-15));
    assert!(m.residual <= 1e-12);
}

#[test]
fn product_branch_matrix_has_four_quarter_weight_pairs() {
    let g = Grid1D::centered(32.0, 128).unwrap();
    let s = scenario(FourBoxMode::Product);
    let psi = build_four_box(&s, &g, &g).unwrap();
    let m = branch_interaction_matrix(&psi, &s.branches(&g, &g).unwrap(), s.q1q2, s.softening).unwrap();
    let pairs = [
        ("A1B1", s.centers[0], s.centers[2]),
        ("A1B2", s.centers[0], s.centers[3]),
        ("A2B1", s.centers[1], s.centers[2]),
        ("A2B2", s.centers[1], s.centers[3]),
    ];
    for (label, ca, cb) in pairs {
        let oracle = 0.25 * pair_energy(&g, ca, cb, s.width, s.q1q2, s.softening);
        let entry = m.entry_by_label(label, label).unwrap().re;
        assert!((entry - oracle).abs() <= 1e-6 * oracle, "{label}: {entry} vs {oracle}");
    }
    assert!(m.completeness_error() <= 1e-10);
}

#[test]
fn four_box_schmidt_structure() {
    let g = Grid1D::centered(32.0, 128).unwrap();
    let product = build_four_box(&scenario(FourBoxMode::Product), &g, &g).unwrap();
    assert!((schmidt_purity(&product).purity - 1.0).abs() <= 1e-10);
    let entangled = build_four_box(&scenario(FourBoxMode::Entangled), &g, &g).unwrap();
    assert!((schmidt_purity(&entangled).schmidt_number - 2.0).abs() <= 1e-6);
    let s = scenario(FourBoxMode::Product);
    let [p1, p2, _, _] = s.packets(&g, &g).unwrap();
    for psi in [&product, &entangled] {
        let c = configuration_density(psi);
        for (k, m) in c.marginal_a.values.iter().enumerate() {
            let expected = 0.5 * (p1.amp()[k].norm_sqr() + p2.amp()[k].norm_sqr());
            assert!((m - expected).abs() <= 1e-10);
        }
    }
}

#[test]
fn symmetric_box_keeps_its_center() {
    let g = Grid1D::centered(32.0, 512).unwrap();
    let psi = box_ground_state(&g, 0.0, 3.0).unwrap();
    let run = evolve(&psi, &PotentialSpec::free(&g), 0.2, 0.001, 20).unwrap();
    // endpoints placed between grid points so the region is mirror symmetric
    let half = 8.0 + 0.5 * g.dx();
    let tracks = packet_center_tracking(&run, &[Region::new("box", Particle::A, -half, half)]).unwrap();
    assert!(tracks[0].max_drift() <= 1e-10);
}

#[test]
fn tracked_center_moves_at_group_velocity() {
    let g = Grid1D::centered(60.0, 1024).unwrap();
    let k0 = 1.5;
    let psi = gaussian_packet(&g, -4.0, 1.0, k0).unwrap();
    let run = evolve(&psi, &PotentialSpec::free(&g), 2.0, 0.002, 500).unwrap();
    let tracks = packet_center_tracking(&run, &[Region::new("all", Particle::A, -25.0, 25.0)]).unwrap();
    let t = &tracks[0];
    let n = t.centers.len() - 1;
    let velocity = (t.centers[n] - t.centers[0]) / (t.times[n] - t.times[0]);
    assert!((velocity - k0).abs() <= 1e-4 * k0);
    assert!(!t.leakage_warning);
}

#[test]
fn mirrored_scenario_mirrors_tracked_centers() {
    let mut params = BranchDynamicsParams::calibrated();
    params.t_final = 0.4;
    // shifted by half a cell so every grid point has a mirror partner on the grid
    let dx = params.grid.dx();
    params.grid = Grid1D::new(-16.0 + 0.5 * dx, 16.0 + 0.5 * dx, 256).unwrap();
    let g = params.grid;
    let pot = params.potential().unwrap();
    let regions = |s: &FourBoxScenario| -> Vec<Region> {
        let labels = ["A1", "A2", "B1", "B2"];
        let parts = [Particle::A, Particle::A, Particle::B, Particle::B];
        (0..4)
            .map(|i| Region::new(labels[i], parts[i], s.centers[i] - 3.3, s.centers[i] + 3.3))
            .collect()
    };
    let run = |s: &FourBoxScenario, pot: &PotentialSpec| {
        let psi = build_four_box(s, &g, &g).unwrap();
        let run = evolve(&psi, pot, params.t_final, params.dt, params.stride).unwrap();
        packet_center_tracking(&run, &regions(s)).unwrap()
    };
    let base = run(&params.scenario, &pot);
    let mirror_params = BranchDynamicsParams {
        scenario: params.scenario.mirrored(),
        ..params.clone()
    };
    let mirrored = run(&mirror_params.scenario, &mirror_params.potential().unwrap());
    for (a, b) in base.iter().zip(&mirrored) {
        assert_eq!(a.label, b.label);
        for (ca, cb) in a.centers.iter().zip(&b.centers) {
            assert!((ca + cb).abs() <= 1e-10, "{}: {ca} vs {cb}", a.label);
        }
    }
}
