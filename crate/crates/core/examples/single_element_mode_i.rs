//! One element pulled apart until the crack is traction free; compares the
//! dissipated energy with the fracture energy.
//!
//! `cargo run --example single_element_mode_i`

use gcem::cohesive::CohesiveParams;
use gcem::element::ElementGeometry;
use gcem::material::Elasticity;
use gcem::mesh::{BoundarySet, Component, Dirichlet, Mesh};
use gcem::solver::{Problem, Solver, SolverConfig};
use nalgebra::Point2;

fn main() -> gcem::Result<()> {
    let (f_t, g_f) = (3.0, 0.1);
    let geom = ElementGeometry::from_corners(
        0,
        [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0), Point2::new(0.0, 1.0)],
        1.0,
    );
    let mesh = Mesh::new((1..=9).collect(), geom.nodes.to_vec(), vec![1], vec![[0, 1, 2, 3, 4, 5, 6, 7, 8]], 1.0)?;
    let mut boundary = BoundarySet::default();
    for (node, p) in mesh.nodes.iter().enumerate() {
        let mut fix = |component, value| boundary.dirichlet.push(Dirichlet { node, component, value });
        if p.y == 0.0 {
            fix(Component::Y, 0.0);
        }
        if p.x == 0.0 && p.y == 0.0 {
            fix(Component::X, 0.0);
        }
        if p.y == 1.0 {
            fix(Component::Y, 1.0);
        }
    }
    boundary.probe = mesh
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, p)| p.y == 1.0)
        .map(|(n, _)| (n, Component::Y))
        .collect();
    let problem = Problem {
        mesh,
        boundary,
        elasticity: Elasticity::plane_stress(1000.0, 0.0)?,
        cohesive: CohesiveParams::new(f_t, g_f)?,
        strength_overrides: vec![],
    };
    let mut solver = Solver::new(problem, SolverConfig::default())?;

    let (dd, steps) = (5e-4, 700);
    let (mut work, mut prev, mut peak) = ((0.0), (0.0, 0.0), 0.0f64);
    for k in 0..steps {
        let r = solver.run_load_step(dd)?;
        work += 0.5 * (r.reaction + prev.1) * (r.d - prev.0);
        prev = (r.d, r.reaction);
        peak = peak.max(r.reaction);
        if k % 50 == 0 || !r.new_cracks.is_empty() {
            println!("d = {:.4e} mm  F = {:.4e} N  iterations {}", r.d, r.reaction, r.iterations);
        }
    }
    let dissipated = work - solver.total_energy();
    println!("peak {peak:.4} N, final {:.3e} N", prev.1);
    println!("dissipated {dissipated:.5} N/mm over a unit crack, G_f = {g_f}");
    Ok(())
}
