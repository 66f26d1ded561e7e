//! Sweeps the self-coupling strength for the two-box contrast run and prints
//! packet-centre displacements in grid units.
//!
//! `cargo run --release -p rdm-core --example calibrate_contrast [softening omega lambda...]`

use rdm_core::scenarios::{self_interaction_contrast, ContrastParams, CONTRAST_SWEEP};

fn main() -> rdm_core::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|s| s.parse().expect("numeric argument"))
        .collect();
    let mut params = ContrastParams::calibrated();
    if let Some(&eps) = args.first() {
        params.softening = eps;
    }
    if let Some(&omega) = args.get(1) {
        params.well_omega = Some(omega);
    }
    let lambdas = if args.len() > 2 { args[2..].to_vec() } else { CONTRAST_SWEEP.to_vec() };
    let report = self_interaction_contrast(&params, &lambdas)?;
    println!(
        "# softening = {}, omega = {:?}, t_final = {}, dx = {}",
        params.softening, params.well_omega, params.t_final, report.dx
    );
    println!("lambda,displacement_dx,single_box_dx,leakage");
    for r in &report.rows {
        println!(
            "{},{:.3},{:.3},{}",
            r.lambda,
            r.displacement / report.dx,
            r.single_box_shift / report.dx,
            r.leakage
        );
    }
    Ok(())
}
