//! Element matrices of one distorted quadrilateral, intact and cracked.
//!
//! `cargo run --example element_kernels`

use gcem::cohesive::{tangent, CohesiveParams, CohesiveState};
use gcem::element::{Basis, CrackFrame, ElementGeometry, ElementIntegrals, GaussRule};
use gcem::material::Elasticity;
use nalgebra::{DMatrix, Point2, SymmetricEigen, Vector2};

fn main() -> gcem::Result<()> {
    let geom = ElementGeometry::from_corners(
        0,
        [
            Point2::new(0.0, 0.0),
            Point2::new(20.0, 2.0),
            Point2::new(22.0, 19.0),
            Point2::new(1.0, 21.0),
        ],
        100.0,
    );
    let c = Elasticity::plane_stress(25850.0, 0.18)?.matrix();
    let ints = ElementIntegrals::new(&geom, &GaussRule::default())?;
    println!("volume {:.3} mm^3", ints.volume(Basis::Q9));

    let k = ints.stiffness_intact(&c);
    let eig = SymmetricEigen::new(DMatrix::from_column_slice(18, 18, k.as_slice()));
    let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    println!("intact stiffness: smallest eigenvalues {:.2e} {:.2e} {:.2e}, next {:.2e}", ev[0], ev[1], ev[2], ev[3]);

    for angle in [0.0f64, 30.0, 45.0, 90.0] {
        let a = angle.to_radians();
        let frame = CrackFrame::for_element(&geom, Vector2::new(a.cos(), a.sin()))?;
        println!("normal at {angle:>4} deg: l_c = {:.3} mm", frame.l_c);
    }

    let params = CohesiveParams::new(2.7, 0.065)?;
    let frame = CrackFrame::for_element(&geom, Vector2::new(0.0, 1.0))?;
    let state = CohesiveState::with_openings(0.01, 0.002);
    let d = tangent(&state, &params, state.branch())?;
    let k_sym = ints.tangent_cracked(&frame, &c, &d);
    let k_new = ints.k_new_cracked(&frame, &c);
    println!("cracked tangent asymmetry {:.1e}", (k_sym - k_sym.transpose()).amax());
    println!("residual operator asymmetry {:.1e}", (k_new - k_new.transpose()).amax());
    println!("opening block of the tangent:\n{}", k_sym.fixed_view::<2, 2>(16, 16));
    Ok(())
}
