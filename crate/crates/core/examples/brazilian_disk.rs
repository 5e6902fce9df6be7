//! Slotted Brazilian disk under diametral compression.
//!
//! `cargo run --release --example brazilian_disk -- [single|double] [alpha] [h]`

use std::path::Path;

use gcem::io::{benchmark_config, run_config};

fn main() -> gcem::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let layout = args.first().map_or("single", String::as_str);
    let alpha = args.get(1).map_or("30", String::as_str);
    let h = args.get(2).map_or("5", String::as_str);
    let name = format!("disk-{layout}-{alpha}");
    let cfg = benchmark_config(&name, &[format!("mesh.h={h}"), "output.vtk_every=20".into()])?;

    let outcome = run_config(&cfg, Path::new("."), |_, r| {
        if r.step % 10 == 0 || !r.new_cracks.is_empty() {
            println!(
                "step {:>4}  d = {:.4e} mm  F = {:.4e} kN/mm  iterations {:>4}  new cracks {:?}",
                r.step,
                r.d,
                r.reaction / 1000.0,
                r.iterations,
                r.new_cracks
            );
        }
    })?;
    let s = &outcome.summary;
    println!("{} elements, {} steps", s.elements, s.steps_completed);
    if let (Some(p), Some(n)) = (&s.peak, s.normalized_peak) {
        println!("largest load {:.4e} kN/mm, {n:.3} of the intact splitting load", p.force_kn_per_mm);
    }
    if let Some(f) = &s.failure {
        println!("stopped: {f}");
    }
    Ok(())
}
