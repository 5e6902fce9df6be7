//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use gcem::cohesive::CohesiveParams;
use gcem::element::ElementGeometry;
use gcem::material::Elasticity;
use gcem::mesh::{BoundarySet, Component, Dirichlet, Mesh};
use gcem::solver::Problem;
use nalgebra::Point2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn square(a: f64) -> ElementGeometry {
    ElementGeometry::from_corners(
        0,
        [
            Point2::new(0.0, 0.0),
            Point2::new(a, 0.0),
            Point2::new(a, a),
            Point2::new(0.0, a),
        ],
        1.0,
    )
}

/// Single-element mesh of a geometry.
pub fn single_element_mesh(geom: &ElementGeometry) -> Mesh {
    Mesh::new((1..=9).collect(), geom.nodes.to_vec(), vec![1], vec![[0, 1, 2, 3, 4, 5, 6, 7, 8]], geom.thickness)
        .unwrap()
}

/// Unit square under uniaxial tension: bottom edge held vertically, its
/// left corner held horizontally, top edge pulled up and probed.
pub fn tension_problem(youngs_modulus: f64, poisson_ratio: f64, f_t: f64, g_f: f64) -> Problem {
    let mesh = single_element_mesh(&square(1.0));
    let mut bc = BoundarySet::default();
    for (n, p) in mesh.nodes.iter().enumerate() {
        if p.y == 0.0 {
            bc.dirichlet.push(Dirichlet { node: n, component: Component::Y, value: 0.0 });
        }
        if p.x == 0.0 && p.y == 0.0 {
            bc.dirichlet.push(Dirichlet { node: n, component: Component::X, value: 0.0 });
        }
        if p.y == 1.0 {
            bc.dirichlet.push(Dirichlet { node: n, component: Component::Y, value: 1.0 });
            bc.probe.push((n, Component::Y));
        }
    }
    Problem {
        mesh,
        boundary: bc,
        elasticity: Elasticity::plane_stress(youngs_modulus, poisson_ratio).unwrap(),
        cohesive: CohesiveParams::new(f_t, g_f).unwrap(),
        strength_overrides: vec![],
    }
}

/// Trapezoidal work of a load-displacement series starting from the origin.
pub fn external_work(series: &[(f64, f64)]) -> f64 {
    let mut prev = (0.0, 0.0);
    let mut w = 0.0;
    for &(d, f) in series {
        w += 0.5 * (f + prev.1) * (d - prev.0);
        prev = (d, f);
    }
    w
}
