//! Element-level kernels for intact Q9 and cracked pseudo-Q9 elements.
//!
//! A cracked element interpolates displacements with the eight outer nodes
//! and reuses the two center-node degrees of freedom as the crack openings
//! `(zeta_n, zeta_t)`. Its stress is the constant stress at the center point.

mod frame;
mod geometry;
mod kernels;
mod quadrature;
mod shape;

pub use frame::{b_zeta, characteristic_length, chord_length, BZeta, CrackFrame};
pub use geometry::{b_matrix, BMatrix, ElementGeometry};
pub use kernels::{
    center_strain, pseudo_q9, residual_cracked, stiffness_intact, tangent_cracked,
    ElementIntegrals, ElementMatrix, ElementVector,
};
pub use quadrature::GaussRule;
pub use shape::{shape_q8, shape_q9, Basis, ShapeEval, NATURAL_NODES};
