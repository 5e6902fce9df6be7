//! L-shaped panel benchmark with the preset parameters.
//!
//! `cargo run --release --example l_panel -- [steps] [output dir]`

use std::path::{Path, PathBuf};

use gcem::io::{benchmark_config, run_config};

fn main() -> gcem::Result<()> {
    let mut args = std::env::args().skip(1);
    let steps = args.next().map_or("80".to_string(), |s| s);
    let mut cfg = benchmark_config("l-panel", &[format!("load.steps={steps}")])?;
    cfg.output.directory = args.next().map_or_else(|| PathBuf::from("output/l-panel"), PathBuf::from);
    cfg.output.vtk_every = 10;

    let outcome = run_config(&cfg, Path::new("."), |solver, r| {
        println!(
            "step {:>3}  d = {:.3} mm  F = {:.4} kN/mm  iterations {:>4}  cracked {}",
            r.step,
            r.d,
            r.reaction / 1000.0,
            r.iterations,
            solver.cracked().iter().filter(|c| **c).count()
        );
    })?;
    if let Some(p) = &outcome.summary.peak {
        println!("peak {:.4} kN/mm at d = {:.3} mm", p.force_kn_per_mm, p.d_mm);
    }
    println!("results in {}", outcome.output_dir.display());
    Ok(())
}
