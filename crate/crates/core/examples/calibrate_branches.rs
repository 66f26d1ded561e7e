//! Entangled four-box run with attraction: prints the A1/B1 approach and the
//! deviation from the run with box A2 emptied, both in grid units.
//!
//! `cargo run --release -p rdm-core --example calibrate_branches [q1q2 omega]`

use rdm_core::scenarios::{branch_local_dynamics, BranchDynamicsParams};

fn main() -> rdm_core::Result<()> {
    let mut params = BranchDynamicsParams::calibrated();
    let arg = |i: usize| std::env::args().nth(i).and_then(|s| s.parse::<f64>().ok());
    if let Some(q) = arg(1) {
        params.scenario.q1q2 = q;
    }
    if let Some(w) = arg(2) {
        params.well_omega = w;
    }
    let start = std::time::Instant::now();
    let report = branch_local_dynamics(&params)?;
    println!(
        "q1q2 = {}, omega = {}, dx = {}, wall = {:.1}s",
        params.scenario.q1q2,
        params.well_omega,
        report.dx,
        start.elapsed().as_secs_f64()
    );
    println!("approach_A1B1_dx = {:.3}", report.approach("A1", "B1") / report.dx);
    println!("approach_A2B2_dx = {:.3}", report.approach("A2", "B2") / report.dx);
    println!("control_deviation_dx = {:.3e}", report.control_deviation() / report.dx);
    println!("leakage = {}", report.any_leakage());
    Ok(())
}
