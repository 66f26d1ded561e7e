//! One function per experiment. Each returns its tables and invariant checks;
//! nothing here touches the file system.

use rdm_core::density::{continuity_residual, density_from_wavefunction, flux_from_wavefunction, velocity_field};
use rdm_core::dynamics::{evolve, schmidt_purity};
use rdm_core::io::sci;
use rdm_core::reconstruct::{component_phase_distance, reconstruct_wavefunction};
use rdm_core::sampler::{bin_average, cell_measures, empirical_density, ensemble_density, sample_trajectory_dense};
use rdm_core::scenarios::{
    branch_interaction_matrix, branch_local_dynamics, build_four_box, self_interaction_contrast, CenterTrack, FourBoxMode,
};
use rdm_core::State;
use serde::{Deserialize, Serialize};

use crate::config::{Experiment, GridConfig, RunConfig};
use crate::error::Result;

/// Largest norm drift accepted over any run.
pub const NORM_TOLERANCE: f64 = 1e-9;
/// Relative tolerance of the exact slab partition.
pub const PARTITION_TOLERANCE: f64 = 1e-12;
pub const COMPLETENESS_TOLERANCE: f64 = 1e-10;
/// Accepted band for the residual reduction per convergence rung.
pub const RATIO_BAND: [f64; 2] = [3.5, 4.5];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    /// `"<= 1e-9"`, `"in [3.5, 4.5]"`, ...
    pub criterion: String,
}

impl Check {
    pub fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            passed: value <= limit,
            value,
            criterion: format!("<= {limit:e}"),
        }
    }

    pub fn within(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            passed: (lo..=hi).contains(&value),
            value,
            criterion: format!("in [{lo}, {hi}]"),
        }
    }

    /// Boolean check; `value` is 1 on success.
    pub fn holds(name: &str, ok: bool, criterion: &str) -> Self {
        Self {
            name: name.into(),
            passed: ok,
            value: if ok { 1.0 } else { 0.0 },
            criterion: criterion.into(),
        }
    }
}

/// A delimited table destined for `<name>.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
}

pub fn execute(config: &RunConfig) -> Result<Outcome> {
    match config.experiment {
        Experiment::Evolve => run_evolve(config),
        Experiment::Sample => run_sample(config),
        Experiment::Reconstruct => run_reconstruct(config),
        Experiment::Fourbox => run_fourbox(config),
        Experiment::Contrast => run_contrast(config),
        Experiment::Convergence => run_convergence(config),
    }
}

fn run_evolve(config: &RunConfig) -> Result<Outcome> {
    let g = config.grid.grid()?;
    let psi = config.initial_state(&g)?;
    let t = config.time;
    let run = evolve(&psi, &config.potential_spec(&g)?, t.t_final, t.dt, t.stride)?;

    let mut obs = Table::new("observables", &["t", "norm", "mean_x", "sigma_x"]);
    let mut dens = Table::new("density", &["t", "x", "rho"]);
    for s in &run.snapshots {
        let st = &s.state;
        obs.push(vec![sci(s.t), sci(st.norm()), sci(st.expectation_x()), sci(st.variance_x().sqrt())]);
        for (x, a) in g.points().zip(st.amp()) {
            dens.push(vec![sci(s.t), sci(x), sci(a.norm_sqr())]);
        }
    }
    let mut tables = vec![obs, dens];
    if run.len() >= 3 {
        let mut res = Table::new("residual", &["t", "residual"]);
        for r in continuity_residual(&run)? {
            res.push(vec![sci(r.t), sci(r.norm)]);
        }
        tables.push(res);
    }
    Ok(Outcome {
        tables,
        checks: vec![Check::at_most("norm_conservation", run.max_norm_drift, NORM_TOLERANCE)],
    })
}

fn run_sample(config: &RunConfig) -> Result<Outcome> {
    let g = config.grid.grid()?;
    let s = config.sample.expect("sample section");
    let t = config.time;
    let run = evolve(&config.initial_state(&g)?, &config.potential_spec(&g)?, t.t_final, t.dt, t.stride)?;
    let members = (0..s.members as u64)
        .map(|i| sample_trajectory_dense(&run, config.seed.wrapping_add(i), s.draws_per_snapshot))
        .collect::<rdm_core::Result<Vec<_>>>()?;
    let bin = s.cells_per_bin as f64 * g.dx();
    let slab = s.slab_snapshots as f64 * run.spacing();

    let mut partition: f64 = 0.0;
    let mut normalization: f64 = 0.0;
    for m in &members {
        let table = cell_measures(m, bin, slab)?;
        for k in 0..table.n_slabs() {
            partition = partition.max((table.slab_total(k) - table.slab_duration).abs() / table.slab_duration);
        }
        for d in empirical_density(&table) {
            normalization = normalization.max((d.integral() - 1.0).abs());
        }
    }

    let mut traj = Table::new("trajectory", &["step", "t", "cell_index", "x"]);
    let first = &members[0];
    for (i, p) in first.points.iter().enumerate() {
        traj.push(vec![p.step.to_string(), sci(p.t), p.cell.to_string(), sci(first.position(i))]);
    }

    let ens = ensemble_density(&members, bin, slab)?;
    let mut dens = Table::new("density", &["slab", "t_start", "x", "rho_hat", "psi2", "stderr"]);
    for (k, sl) in ens.slabs.iter().enumerate() {
        // |ψ|² averaged over the snapshots opening each interval of the slab
        let snaps = &run.snapshots[k * s.slab_snapshots..(k + 1) * s.slab_snapshots];
        let mut exact = vec![0.0; sl.mean.len()];
        for snap in snaps {
            let b = bin_average(&density_from_wavefunction(&snap.state), s.cells_per_bin);
            for (e, v) in exact.iter_mut().zip(b) {
                *e += v / snaps.len() as f64;
            }
        }
        for j in 0..sl.mean.len() {
            let x = ens.x_min + (j as f64 + 0.5) * ens.bin_width;
            dens.push(vec![
                k.to_string(),
                sci(sl.t_start),
                sci(x),
                sci(sl.mean[j]),
                sci(exact[j]),
                sci(sl.std_error[j]),
            ]);
        }
    }

    Ok(Outcome {
        tables: vec![traj, dens],
        checks: vec![
            Check::at_most("norm_conservation", run.max_norm_drift, NORM_TOLERANCE),
            Check::at_most("slab_partition", partition, PARTITION_TOLERANCE),
            Check::at_most("density_normalization", normalization, PARTITION_TOLERANCE),
        ],
    })
}

fn run_reconstruct(config: &RunConfig) -> Result<Outcome> {
    let g = config.grid.grid()?;
    let r = config.reconstruct.expect("reconstruct section");
    let t = config.time;
    let run = evolve(&config.initial_state(&g)?, &config.potential_spec(&g)?, t.t_final, t.dt, t.stride)?;
    let psi = run.final_state().expect("at least one snapshot");
    let rho = density_from_wavefunction(psi);
    let v = velocity_field(&rho, &flux_from_wavefunction(psi), r.floor * rho.peak())?;
    let rec = reconstruct_wavefunction(&rho, &v, psi.mass(), psi.hbar())?;

    let mut table = Table::new(
        "reconstruction",
        &["x", "rho", "velocity", "unmasked", "re_psi", "im_psi", "re_rec", "im_rec"],
    );
    let mut modulus: f64 = 0.0;
    for k in 0..g.len() {
        let (a, b) = (psi.amp()[k], rec.wavefunction.amp()[k]);
        modulus = modulus.max((b.norm() - rho.values[k].sqrt()).abs());
        table.push(vec![
            sci(g.x(k)),
            sci(rho.values[k]),
            sci(v.values[k]),
            u8::from(v.mask[k]).to_string(),
            sci(a.re),
            sci(a.im),
            sci(b.re),
            sci(b.im),
        ]);
    }
    let mut comps = Table::new("components", &["start", "end", "x_start", "x_end", "phase_error"]);
    let mut worst: f64 = 0.0;
    for c in &rec.components {
        let d = component_phase_distance(psi, &rec.wavefunction, c.start, c.end)?;
        worst = worst.max(d);
        comps.push(vec![c.start.to_string(), c.end.to_string(), sci(g.x(c.start)), sci(g.x(c.end - 1)), sci(d)]);
    }
    Ok(Outcome {
        tables: vec![table, comps],
        checks: vec![
            Check::at_most("norm_conservation", run.max_norm_drift, NORM_TOLERANCE),
            Check::at_most("modulus", modulus, 1e-12),
            Check::at_most("component_phase", worst, r.tolerance),
        ],
    })
}

fn center_table(name: &str, tracks: &[CenterTrack]) -> Table {
    let mut header = vec!["t".to_string()];
    header.extend(tracks.iter().map(|t| format!("center_{}", t.label)));
    let mut table = Table {
        name: name.into(),
        header,
        rows: Vec::new(),
    };
    for (k, t) in tracks[0].times.iter().enumerate() {
        let mut row = vec![sci(*t)];
        row.extend(tracks.iter().map(|tr| sci(tr.centers[k])));
        table.push(row);
    }
    table
}

fn run_fourbox(config: &RunConfig) -> Result<Outcome> {
    let params = config.branch_params()?;
    let g = params.grid;
    let s = &params.scenario;
    let psi = build_four_box(s, &g, &g)?;
    let m = branch_interaction_matrix(&psi, &s.branches(&g, &g)?, s.q1q2, s.softening)?;
    let schmidt = schmidt_purity(&psi);

    let mut matrix = Table::new("branch_matrix", &["row", "col", "re", "im"]);
    for k in 0..m.len() {
        for l in 0..m.len() {
            let e = m.entry(k, l);
            matrix.push(vec![m.labels[k].clone(), m.labels[l].clone(), sci(e.re), sci(e.im)]);
        }
    }

    let report = branch_local_dynamics(&params)?;
    let mut summary = Table::new("summary", &["metric", "value"]);
    let metrics = [
        ("dx", report.dx),
        ("direct_energy", m.direct),
        ("purity", schmidt.purity),
        ("schmidt_number", schmidt.schmidt_number),
        ("approach_A1B1", report.approach("A1", "B1")),
        ("approach_A2B2", report.approach("A2", "B2")),
        ("control_deviation", report.control_deviation()),
    ];
    for (k, v) in metrics {
        summary.push(vec![k.to_string(), sci(v)]);
    }

    let expected_rank = match s.mode {
        FourBoxMode::Product => 1.0,
        FourBoxMode::Entangled => 2.0,
    };
    let mut checks = vec![
        Check::at_most("branch_completeness", m.completeness_error(), COMPLETENESS_TOLERANCE),
        Check::holds(
            "branch_hermitian",
            m.is_hermitian(1e-12 * m.max_diagonal().max(f64::MIN_POSITIVE)),
            "|M - M^H| <= 1e-12 max|M_kk|",
        ),
        Check::within("schmidt_number", schmidt.schmidt_number, expected_rank - 1e-6, expected_rank + 1e-6),
        Check::at_most("norm_conservation", report.max_norm_drift, NORM_TOLERANCE),
        Check::holds("containment", !report.any_leakage(), "every region keeps >= 99% of its probability"),
    ];
    if s.mode == FourBoxMode::Entangled {
        checks.push(Check::at_most("branch_locality", report.control_deviation(), report.dx));
    }
    Ok(Outcome {
        tables: vec![
            matrix,
            center_table("centers", &report.tracks),
            center_table("control_centers", &report.control),
            summary,
        ],
        checks,
    })
}

fn run_contrast(config: &RunConfig) -> Result<Outcome> {
    let params = config.contrast_params()?;
    let lambdas = &config.contrast.as_ref().expect("contrast section").lambdas;
    let report = self_interaction_contrast(&params, lambdas)?;
    let mut table = Table::new(
        "contrast",
        &["lambda", "left_shift", "right_shift", "displacement", "displacement_dx", "single_box_shift", "leakage"],
    );
    for r in &report.rows {
        table.push(vec![
            sci(r.lambda),
            sci(r.left_shift),
            sci(r.right_shift),
            sci(r.displacement),
            sci(r.displacement / report.dx),
            sci(r.single_box_shift),
            u8::from(r.leakage).to_string(),
        ]);
    }
    let drift = report.rows.iter().map(|r| r.norm_drift).fold(0.0, f64::max);
    let baseline = report.row(0.0).expect("lambda 0 present").displacement;
    Ok(Outcome {
        tables: vec![table],
        checks: vec![
            Check::at_most("norm_conservation", drift, NORM_TOLERANCE),
            Check::holds(
                "containment",
                report.rows.iter().all(|r| !r.leakage),
                "every region keeps >= 99% of its probability",
            ),
            Check::at_most("linear_baseline_dx", baseline / report.dx, 2.0),
        ],
    })
}

/// One rung of the residual ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rung {
    pub n: usize,
    pub dx: f64,
    pub spacing: f64,
    /// Largest residual L2 norm over the interior snapshots.
    pub residual: f64,
}

/// Continuity residual on `rungs` grids, each halving `dx` and the snapshot spacing.
pub fn residual_ladder(config: &RunConfig, rungs: usize) -> Result<Vec<Rung>> {
    let t = config.time;
    (0..rungs)
        .map(|r| {
            let g = GridConfig {
                n: config.grid.n << r,
                ..config.grid
            }
            .grid()?;
            let stride = t.stride >> r;
            let run = evolve(&config.initial_state(&g)?, &config.potential_spec(&g)?, t.t_final, t.dt, stride)?;
            let residual = continuity_residual(&run)?.iter().map(|s| s.norm).fold(0.0, f64::max);
            Ok(Rung {
                n: g.len(),
                dx: g.dx(),
                spacing: run.spacing(),
                residual,
            })
        })
        .collect()
}

fn run_convergence(config: &RunConfig) -> Result<Outcome> {
    let rungs = residual_ladder(config, config.convergence.expect("convergence section").rungs)?;
    let mut table = Table::new("convergence", &["rung", "n", "dx", "spacing", "residual", "ratio"]);
    let mut checks = Vec::new();
    for (k, r) in rungs.iter().enumerate() {
        let ratio = (k > 0).then(|| rungs[k - 1].residual / r.residual);
        table.push(vec![
            k.to_string(),
            r.n.to_string(),
            sci(r.dx),
            sci(r.spacing),
            sci(r.residual),
            ratio.map(sci).unwrap_or_default(),
        ]);
        if let Some(q) = ratio {
            checks.push(Check::within(&format!("residual_ratio_{k}"), q, RATIO_BAND[0], RATIO_BAND[1]));
        }
    }
    Ok(Outcome {
        tables: vec![table],
        checks,
    })
}
