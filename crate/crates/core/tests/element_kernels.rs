mod common;

use gcem::cohesive::{self, CohesiveParams, CohesiveState};
use gcem::element::{
    b_zeta, center_strain, characteristic_length, pseudo_q9, residual_cracked, Basis, CrackFrame, ElementGeometry,
    ElementIntegrals, ElementVector, GaussRule,
};
use gcem::material::Elasticity;
use nalgebra::{DMatrix, Matrix2, Point2, SVector, SymmetricEigen, Vector2, Vector3};
use proptest::prelude::*;
use rand::Rng;

fn random_quad(rng: &mut impl Rng) -> ElementGeometry {
    let jitter = |rng: &mut dyn rand::RngCore, x: f64, y: f64| {
        Point2::new(x + rng.random_range(-0.2..0.2), y + rng.random_range(-0.2..0.2))
    };
    ElementGeometry::from_corners(
        0,
        [
            jitter(rng, 0.0, 0.0),
            jitter(rng, 2.0, 0.0),
            jitter(rng, 2.0, 1.5),
            jitter(rng, 0.0, 1.5),
        ],
        1.0,
    )
}

fn random_vector<const N: usize>(rng: &mut impl Rng) -> SVector<f64, N> {
    SVector::from_fn(|_, _| rng.random_range(-1.0..1.0))
}

fn plane_stress() -> nalgebra::Matrix3<f64> {
    Elasticity::plane_stress(25850.0, 0.18).unwrap().matrix()
}

/// Displacement at a natural point from nodal values.
fn interpolate(basis: Basis, u: &ElementVector, xi: f64, eta: f64) -> Vector2<f64> {
    let s = basis.eval(xi, eta);
    s.values()
        .iter()
        .enumerate()
        .map(|(i, n)| Vector2::new(u[2 * i], u[2 * i + 1]) * *n)
        .sum()
}

#[test]
fn strain_matches_finite_differences_of_the_field() {
    let mut rng = common::rng(11);
    for _ in 0..10 {
        let geom = random_quad(&mut rng);
        let u: ElementVector = random_vector(&mut rng);
        for basis in [Basis::Q8, Basis::Q9] {
            let (xi, eta) = (rng.random_range(-0.8..0.8), rng.random_range(-0.8..0.8));
            let (b, _) = geom.b_matrix(basis, xi, eta).unwrap();
            let h = 1e-6;
            // natural derivatives of position and displacement
            let dx = |f: &dyn Fn(f64, f64) -> Vector2<f64>| {
                let d_xi = (f(xi + h, eta) - f(xi - h, eta)) / (2.0 * h);
                let d_eta = (f(xi, eta + h) - f(xi, eta - h)) / (2.0 * h);
                Matrix2::from_columns(&[d_xi, d_eta])
            };
            let jac = dx(&|a, b| geom.map(basis, a, b).coords);
            let du = dx(&|a, b| interpolate(basis, &u, a, b));
            let grad = du * jac.try_inverse().unwrap();
            let fd = Vector3::new(grad[(0, 0)], grad[(1, 1)], grad[(0, 1)] + grad[(1, 0)]);
            let exact = b * u;
            assert!((exact - fd).norm() < 1e-5 * exact.norm(), "{exact} vs {fd}");
        }
    }
}

#[test]
fn opening_operator_hand_values() {
    let f = CrackFrame { normal: Vector2::new(1.0, 0.0), tangent: Vector2::new(0.0, 1.0), l_c: 2.0 };
    let expected = nalgebra::Matrix3x2::new(1.0, 0.0, 0.0, 0.0, 0.0, 1.0) * -0.5;
    assert_eq!(b_zeta(&f), expected);
    let f = CrackFrame { normal: Vector2::new(0.0, 1.0), tangent: Vector2::new(-1.0, 0.0), l_c: 1.0 };
    let expected = -nalgebra::Matrix3x2::new(0.0, 0.0, 1.0, 0.0, 0.0, -1.0);
    assert_eq!(b_zeta(&f), expected);
}

/// Chord of a convex quadrilateral through a point, by bisection on the
/// inside test along each direction.
fn bisection_chord(corners: &[Point2<f64>; 4], origin: Point2<f64>, dir: Vector2<f64>) -> f64 {
    let inside = |p: Point2<f64>| {
        (0..4).all(|i| {
            let (a, b) = (corners[i], corners[(i + 1) % 4]);
            let e = b - a;
            e.x * (p.y - a.y) - e.y * (p.x - a.x) >= 0.0
        })
    };
    let reach = |d: Vector2<f64>| {
        let (mut lo, mut hi) = (0.0, 100.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if inside(origin + d * mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    reach(dir) + reach(-dir)
}

#[test]
fn characteristic_length_on_convex_quads() {
    let mut rng = common::rng(12);
    for _ in 0..50 {
        let geom = random_quad(&mut rng);
        let a = rng.random_range(0.0..std::f64::consts::PI);
        let t = Vector2::new(a.cos(), a.sin());
        let l_c = characteristic_length(&geom, t).unwrap();
        let chord = bisection_chord(&geom.corners(), geom.center(Basis::Q8), t);
        let area = geom.volume(Basis::Q8, &GaussRule::default()).unwrap();
        let oracle = area / chord;
        assert!((l_c - oracle).abs() < 1e-6 * oracle);
    }
    let sq = common::square(3.0);
    assert!((characteristic_length(&sq, Vector2::new(1.0, 1.0)).unwrap() - 3.0 / 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn center_strain_recomposes_from_parts() {
    let mut rng = common::rng(13);
    let geom = random_quad(&mut rng);
    let frame = CrackFrame::for_element(&geom, Vector2::new(0.6, 0.8)).unwrap();
    let u: SVector<f64, 16> = random_vector(&mut rng);
    let zeta = Vector2::new(0.3, -0.2);
    let got = center_strain(&geom, &frame, &u, zeta).unwrap();
    let (b, _) = geom.b_matrix(Basis::Q8, 0.0, 0.0).unwrap();
    let mut expected = b * pseudo_q9(&u, Vector2::zeros());
    let (n, t) = (frame.normal, frame.tangent);
    let jump = (n * n.transpose()) * zeta.x + (n * t.transpose() + t * n.transpose()) * (0.5 * zeta.y);
    expected -= Vector3::new(jump[(0, 0)], jump[(1, 1)], 2.0 * jump[(0, 1)]) / frame.l_c;
    assert!((got - expected).norm() < 1e-12 * expected.norm());
}

#[test]
fn unit_square_has_three_zero_modes() {
    let c = Elasticity::plane_stress(1.0, 0.0).unwrap().matrix();
    let k = ElementIntegrals::new(&common::square(1.0), &GaussRule::default()).unwrap().stiffness_intact(&c);
    let eig = SymmetricEigen::new(DMatrix::from_column_slice(18, 18, k.as_slice()));
    let max = eig.eigenvalues.amax();
    let zero = eig.eigenvalues.iter().filter(|v| v.abs() < 1e-12 * max).count();
    assert_eq!(zero, 3);
}

#[test]
fn three_point_rule_is_exact_on_affine_geometry() {
    let geom = ElementGeometry::from_corners(
        0,
        [Point2::new(0.0, 0.0), Point2::new(2.0, 0.5), Point2::new(2.5, 2.0), Point2::new(0.5, 1.5)],
        1.0,
    );
    // a parallelogram keeps the Jacobian constant
    let para = ElementGeometry::from_corners(
        0,
        [Point2::new(0.0, 0.0), Point2::new(2.0, 0.5), Point2::new(2.7, 2.0), Point2::new(0.7, 1.5)],
        1.0,
    );
    let c = plane_stress();
    let k3 = ElementIntegrals::new(&para, &GaussRule::new(3)).unwrap().stiffness_intact(&c);
    let k5 = ElementIntegrals::new(&para, &GaussRule::new(5)).unwrap().stiffness_intact(&c);
    assert!((k3 - k5).norm() < 1e-9 * k5.norm());
    let v3 = geom.volume(Basis::Q9, &GaussRule::new(3)).unwrap();
    let v5 = geom.volume(Basis::Q9, &GaussRule::new(5)).unwrap();
    assert!((v3 - v5).abs() < 1e-12 * v5);
}

#[test]
fn tangent_is_symmetric_while_the_residual_operator_is_not() {
    let mut rng = common::rng(14);
    let geom = random_quad(&mut rng);
    let ints = ElementIntegrals::new(&geom, &GaussRule::default()).unwrap();
    let c = plane_stress();
    let frame = CrackFrame::for_element(&geom, Vector2::new(0.8, 0.6)).unwrap();
    let p = CohesiveParams::new(2.7, 0.065).unwrap();
    let s = CohesiveState::with_openings(5.0 * p.threshold_opening(), p.threshold_opening());
    let d = cohesive::tangent(&s, &p, s.branch()).unwrap();
    let k_sym = ints.tangent_cracked(&frame, &c, &d);
    assert!((k_sym - k_sym.transpose()).abs().max() < 1e-12 * k_sym.norm());
    let k_new = ints.k_new_cracked(&frame, &c);
    assert!((k_new - k_new.transpose()).abs().max() > 1e-6 * k_new.norm());
    // the residual operator reproduces the assembled internal force
    let u: ElementVector = random_vector(&mut rng) * 1e-3;
    let f = ints.residual_cracked(&frame, &c, &u, Vector2::zeros());
    assert!((k_new * u - f).norm() < 1e-10 * f.norm());
}

#[test]
fn opening_rows_vanish_when_traction_balances_stress() {
    let mut rng = common::rng(15);
    let geom = random_quad(&mut rng);
    let c = plane_stress();
    let frame = CrackFrame::for_element(&geom, Vector2::new(-0.3, 0.9)).unwrap();
    let ints = ElementIntegrals::new(&geom, &GaussRule::default()).unwrap();
    let u: ElementVector = random_vector(&mut rng) * 1e-3;
    let sigma = c * ints.cracked_strain(&frame, &u);
    let traction = -(b_zeta(&frame).transpose() * sigma) * frame.l_c;
    let f = ints.residual_cracked(&frame, &c, &u, traction);
    assert!(f[16].abs().max(f[17].abs()) < 1e-12 * sigma.norm() * ints.volume(Basis::Q8));
}

#[test]
fn uniaxial_stretch_matches_a_scalar_root_find() {
    let (e, f_t, g_f, d) = (1000.0, 3.0, 0.1, 0.02);
    let geom = common::square(1.0);
    let c = Elasticity::plane_stress(e, 0.0).unwrap().matrix();
    let p = CohesiveParams::new(f_t, g_f).unwrap();
    let frame = CrackFrame::for_element(&geom, Vector2::new(0.0, 1.0)).unwrap();
    assert!((frame.l_c - 1.0).abs() < 1e-14);

    // E (d - zeta) = L2(zeta), by scalar Newton
    let mut z = d;
    for _ in 0..50 {
        let g = e * (d - z) - p.softening_branch(z);
        let dg = -e + f_t / (g_f - p.threshold_energy()) * p.softening_branch(z);
        z -= g / dg;
    }
    assert!(z > p.threshold_opening());

    let mut u = SVector::<f64, 16>::zeros();
    for i in 0..8 {
        u[2 * i + 1] = d * geom.nodes[i].y;
    }
    let s = CohesiveState::with_openings(z, 0.0);
    let (tn, tt) = cohesive::traction_components(&s, &p, s.branch()).unwrap();
    let f = residual_cracked(&geom, &frame, &c, &u, Vector2::new(z, 0.0), Vector2::new(tn, tt)).unwrap();
    // free rows: every x row, the y rows of the mid-height nodes, both openings
    let mut free: Vec<usize> = (0..8).map(|i| 2 * i).collect();
    free.extend([2 * 5 + 1, 2 * 7 + 1, 16, 17]);
    for r in free {
        assert!(f[r].abs() < 1e-10, "row {r}: {}", f[r]);
    }
    // the top edge carries the cohesive traction
    let top: f64 = [2usize, 3, 6].iter().map(|&i| f[2 * i + 1]).sum();
    assert!((top - tn).abs() < 1e-10);
}

proptest! {
    #[test]
    fn intact_stiffness_annihilates_rigid_motion(seed in 0u64..1000, tx in -1.0..1.0f64, ty in -1.0..1.0f64, w in -1.0..1.0f64) {
        let geom = random_quad(&mut common::rng(seed));
        let k = ElementIntegrals::new(&geom, &GaussRule::default()).unwrap().stiffness_intact(&plane_stress());
        let u = ElementVector::from_fn(|i, _| {
            let x = geom.nodes[i / 2];
            if i % 2 == 0 { tx - w * x.y } else { ty + w * x.x }
        });
        prop_assert!((k * u).norm() < 1e-9 * k.norm() * u.norm().max(1e-12));
    }

    #[test]
    fn opening_operator_is_the_symmetric_dyad(a in 0.0..6.3f64, l_c in 0.01..50.0f64) {
        let f = CrackFrame::from_normal(Vector2::new(a.cos(), a.sin()), l_c);
        let bz = b_zeta(&f);
        let (n, t) = (f.normal, f.tangent);
        for (col, m) in [n * n.transpose(), (n * t.transpose() + t * n.transpose()) * 0.5].iter().enumerate() {
            let v = Vector3::new(m[(0, 0)], m[(1, 1)], 2.0 * m[(0, 1)]) / -l_c;
            prop_assert!((bz.column(col) - v).abs().max() < 1e-14 / l_c.min(1.0));
        }
    }
}
