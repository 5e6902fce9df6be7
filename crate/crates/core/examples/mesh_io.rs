//! Generates the benchmark meshes, writes them as mesh documents and reads
//! them back.
//!
//! `cargo run --example mesh_io -- [output dir]`

use std::path::PathBuf;

use gcem::mesh::{generate_disk, generate_l_panel, load_mesh, write_mesh, SlotLayout};

fn main() -> gcem::Result<()> {
    let dir = std::env::args().nth(1).map_or_else(|| PathBuf::from("output/meshes"), PathBuf::from);
    std::fs::create_dir_all(&dir)?;
    let meshes = [
        ("l-panel-h20", generate_l_panel(20.0)?),
        ("disk-single-30", generate_disk(SlotLayout::Single, 30.0, 5.0)?),
        ("disk-double-60", generate_disk(SlotLayout::Double, 60.0, 5.0)?),
    ];
    for (name, (mesh, bc)) in meshes {
        let text = write_mesh(&mesh, &bc);
        let path = dir.join(format!("{name}.mesh"));
        std::fs::write(&path, &text)?;
        let (back, back_bc) = load_mesh(&text)?;
        println!(
            "{}: {} elements, {} nodes, area {:.2} mm^2, {} prescribed components, round trip {}",
            path.display(),
            mesh.element_count(),
            mesh.node_count(),
            mesh.area()?,
            bc.dirichlet.len(),
            if back == mesh && back_bc == bc { "exact" } else { "differs" }
        );
    }
    Ok(())
}
