use gcem::crack::{classify_regions, crack_orientation, search_and_activate, CandidateScore, Region, SearchContext};
use gcem::mesh::generate_l_panel;
use gcem::Error;
use nalgebra::{Rotation2, Vector2, Vector3};
use proptest::prelude::*;

/// Voigt strain rotated by `theta`.
fn rotate(eps: &Vector3<f64>, theta: f64) -> Vector3<f64> {
    let r = Rotation2::new(theta).into_inner();
    let t = nalgebra::Matrix2::new(eps[0], eps[2] / 2.0, eps[2] / 2.0, eps[1]);
    let t = r * t * r.transpose();
    Vector3::new(t[(0, 0)], t[(1, 1)], 2.0 * t[(0, 1)])
}

fn parallel(a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    (a.x * b.y - a.y * b.x).abs()
}

#[test]
fn pure_shear_opens_along_the_diagonal() {
    let e = 2.5e-4;
    let o = crack_orientation(&Vector3::new(0.0, 0.0, 2.0 * e)).unwrap();
    assert!((o.eps1 - e).abs() < 1e-18);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((o.normal - Vector2::new(h, h)).norm() < 1e-15);
}

proptest! {
    #[test]
    fn orientation_follows_rotation(ex in -1.0..1.0f64, ey in -1.0..1.0f64, g in -1.0..1.0f64, theta in -3.0..3.0f64) {
        let eps = Vector3::new(ex, ey, g);
        let (Ok(a), Ok(b)) = (crack_orientation(&eps), crack_orientation(&rotate(&eps, theta))) else {
            return Ok(());
        };
        let gap = ((ex - ey).powi(2) + g * g).sqrt();
        prop_assume!(gap > 1e-6);
        let expected = Rotation2::new(theta) * a.normal;
        prop_assert!(parallel(&expected, &b.normal) < 1e-9 / gap);
        prop_assert!((a.eps1 - b.eps1).abs() < 1e-12);
        prop_assert!(b.normal.y > 0.0 || (b.normal.y == 0.0 && b.normal.x > 0.0));
    }

    #[test]
    fn orientation_ignores_positive_scaling(ex in -1.0..1.0f64, ey in -1.0..1.0f64, g in -1.0..1.0f64, s in 1e-6..1e6f64) {
        let eps = Vector3::new(ex, ey, g);
        prop_assume!(((ex - ey).powi(2) + g * g).sqrt() > 1e-6);
        let a = crack_orientation(&eps).unwrap();
        let b = crack_orientation(&(eps * s)).unwrap();
        prop_assert!((a.normal - b.normal).norm() < 1e-9);
        prop_assert!((b.eps1 - s * a.eps1).abs() <= 1e-12 * s);
    }

    #[test]
    fn regions_partition_the_mesh(flags in proptest::collection::vec(prop::bool::weighted(0.1), 75)) {
        let (mesh, _) = generate_l_panel(50.0).unwrap();
        prop_assert_eq!(mesh.element_count(), flags.len());
        let adjacency = mesh.edge_adjacency();
        let regions = classify_regions(&adjacency, &flags);
        let count = |r| regions.members(r).count();
        prop_assert_eq!(count(Region::Cracked) + count(Region::Propagation) + count(Region::RootSearch), flags.len());
        for e in regions.members(Region::Propagation) {
            prop_assert!(!flags[e] && adjacency[e].iter().any(|&n| flags[n]));
        }
        for e in regions.members(Region::RootSearch) {
            prop_assert!(!flags[e] && adjacency[e].iter().all(|&n| !flags[n]));
        }
    }
}

/// A chain of elements whose scores are fixed until they crack.
struct Chain {
    adjacency: Vec<Vec<usize>>,
    cracked: Vec<bool>,
    phi: Vec<f64>,
    solves: usize,
}

impl Chain {
    fn new(phi: Vec<f64>) -> Self {
        let n = phi.len();
        let adjacency = (0..n)
            .map(|i| [i.checked_sub(1), (i + 1 < n).then_some(i + 1)].into_iter().flatten().collect())
            .collect();
        Self { adjacency, cracked: vec![false; n], phi, solves: 0 }
    }
}

impl SearchContext for Chain {
    fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    fn cracked(&self) -> &[bool] {
        &self.cracked
    }

    fn scores(&self) -> Vec<Option<CandidateScore>> {
        (0..self.phi.len())
            .map(|e| {
                (!self.cracked[e]).then_some(CandidateScore { element: e, phi_rk: self.phi[e], normal: Vector2::y() })
            })
            .collect()
    }

    fn activate(&mut self, c: &CandidateScore) -> gcem::Result<bool> {
        self.cracked[c.element] = true;
        Ok(true)
    }

    fn equilibrate(&mut self) -> gcem::Result<()> {
        self.solves += 1;
        Ok(())
    }
}

#[test]
fn propagation_region_is_searched_before_new_roots() {
    // once 1 cracks, its neighbour 2 goes before the stronger root 6
    let mut chain = Chain::new(vec![-1.0, 2.0, 0.5, -1.0, 3.0, -1.0, 0.9]);
    let order = search_and_activate(&mut chain, 10).unwrap();
    assert_eq!(order, vec![4, 1, 2, 6]);
    assert_eq!(chain.solves, 4);
}

#[test]
fn equal_scores_pick_the_lowest_index() {
    let mut chain = Chain::new(vec![-1.0, 1.0, -1.0, 1.0, -1.0]);
    assert_eq!(search_and_activate(&mut chain, 10).unwrap(), vec![1, 3]);
}

#[test]
fn activation_cap_is_enforced() {
    let mut chain = Chain::new(vec![1.0; 6]);
    let err = search_and_activate(&mut chain, 3).unwrap_err();
    assert!(matches!(err, Error::ActivationLimit { limit: 3 }));
}
