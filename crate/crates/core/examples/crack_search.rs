//! Crack orientation and stress excess for a few strain states, and the
//! region split around a cracked element.
//!
//! `cargo run --example crack_search`

use gcem::crack::{classify_regions, crack_orientation, phi_rk, Region};
use gcem::material::Elasticity;
use gcem::mesh::generate_l_panel;
use nalgebra::Vector3;

fn main() -> gcem::Result<()> {
    let c = Elasticity::plane_stress(25850.0, 0.18)?.matrix();
    let f_t = 2.7;
    println!("{:>28} {:>11} {:>18} {:>10}", "strain (xx, yy, xy)", "eps1", "normal", "phi");
    for eps in [
        Vector3::new(1.2e-4, 0.0, 0.0),
        Vector3::new(0.0, 1.2e-4, 0.0),
        Vector3::new(0.0, 0.0, 2.4e-4),
        Vector3::new(4e-5, -2e-5, 6e-5),
    ] {
        let o = crack_orientation(&eps)?;
        let phi = phi_rk(&c, &eps, &o.normal, f_t);
        println!(
            "{:>28} {:>11.3e} {:>18} {phi:>10.3}",
            format!("({:.1e}, {:.1e}, {:.1e})", eps[0], eps[1], eps[2]),
            o.eps1,
            format!("({:.3}, {:.3})", o.normal.x, o.normal.y)
        );
    }

    let (mesh, _) = generate_l_panel(50.0)?;
    let mut cracked = vec![false; mesh.element_count()];
    cracked[mesh.element_count() / 2] = true;
    let regions = classify_regions(&mesh.edge_adjacency(), &cracked);
    for r in [Region::Cracked, Region::Propagation, Region::RootSearch] {
        println!("{r:?}: {} elements", regions.members(r).count());
    }
    Ok(())
}
