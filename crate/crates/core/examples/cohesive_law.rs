//! Prints the traction-separation envelope and an unload-reload cycle.
//!
//! `cargo run --example cohesive_law`

use gcem::cohesive::{commit, traction_components, CohesiveParams, CohesiveState};

fn main() -> gcem::Result<()> {
    let params = CohesiveParams::new(3.0, 0.1)?;
    println!(
        "f_t = {} MPa, G_f = {} N/mm, threshold opening {:.4e} mm",
        params.tensile_strength(),
        params.fracture_energy(),
        params.threshold_opening()
    );

    println!("\nenvelope");
    println!("{:>12} {:>12}", "zeta_mm", "T_MPa");
    for k in 0..=12 {
        let zeta = 0.01 * k as f64;
        println!("{zeta:>12.4e} {:>12.4e}", params.envelope(zeta));
    }

    // open to 0.02 mm, close to 0.005 mm, then reopen to 0.04 mm
    println!("\ncycle");
    println!("{:>12} {:>12} {:>10}", "zeta_mm", "T_MPa", "branch");
    let mut history = CohesiveState::default();
    let path = (0..=8).map(|k| 0.0025 * k as f64)
        .chain((0..=6).map(|k| 0.02 - 0.0025 * k as f64))
        .chain((0..=14).map(|k| 0.005 + 0.0025 * k as f64));
    for zeta in path {
        let trial = CohesiveState { zeta_n: zeta, zeta_t: 0.0, ..history };
        let branch = trial.branch();
        let (t, _) = traction_components(&trial, &params, branch)?;
        println!("{zeta:>12.4e} {t:>12.4e} {branch:>10?}");
        history = commit(&trial, &params);
    }
    Ok(())
}
