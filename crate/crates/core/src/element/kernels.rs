use nalgebra::{Matrix3, SMatrix, SVector, Vector2, Vector3};

use super::frame::{b_zeta, CrackFrame};
use super::geometry::{BMatrix, ElementGeometry};
use super::quadrature::GaussRule;
use super::shape::Basis;
use crate::cohesive::TangentD;
use crate::error::Result;

pub type ElementMatrix = SMatrix<f64, 18, 18>;
pub type ElementVector = SVector<f64, 18>;

/// Quadrature data of one element for both bases, computed once per mesh.
///
/// The weights already include `det J` and the thickness, so sums over the
/// samples are volume integrals.
#[derive(Debug, Clone)]
pub struct ElementIntegrals {
    q9: Vec<(BMatrix, f64)>,
    q8: Vec<(BMatrix, f64)>,
    q9_center: BMatrix,
    q8_center: BMatrix,
    /// `int B_Q8 d(e)`.
    q8_b_integral: BMatrix,
    q8_volume: f64,
    q9_volume: f64,
}

impl ElementIntegrals {
    pub fn new(geom: &ElementGeometry, rule: &GaussRule) -> Result<Self> {
        let sample = |basis| -> Result<Vec<(BMatrix, f64)>> {
            rule.iter()
                .map(|(p, w)| {
                    let (b, det) = geom.b_matrix(basis, p[0], p[1])?;
                    Ok((b, det * w * geom.thickness))
                })
                .collect()
        };
        let q9 = sample(Basis::Q9)?;
        let q8 = sample(Basis::Q8)?;
        let q8_b_integral = q8.iter().fold(BMatrix::zeros(), |acc, (b, w)| acc + b * *w);
        let q8_volume = q8.iter().map(|(_, w)| w).sum();
        let q9_volume = q9.iter().map(|(_, w)| w).sum();
        Ok(Self {
            q9_center: geom.b_matrix(Basis::Q9, 0.0, 0.0)?.0,
            q8_center: geom.b_matrix(Basis::Q8, 0.0, 0.0)?.0,
            q9,
            q8,
            q8_b_integral,
            q8_volume,
            q9_volume,
        })
    }

    pub fn volume(&self, basis: Basis) -> f64 {
        match basis {
            Basis::Q8 => self.q8_volume,
            Basis::Q9 => self.q9_volume,
        }
    }

    /// `B` at the center point (the `(0, 0)` point of the 3x3 rule).
    pub fn center_b(&self, basis: Basis) -> &BMatrix {
        match basis {
            Basis::Q8 => &self.q8_center,
            Basis::Q9 => &self.q9_center,
        }
    }

    /// Total strain at the center, ignoring any opening: `B^{(e),1} U`.
    pub fn center_total_strain(&self, basis: Basis, u: &ElementVector) -> Vector3<f64> {
        self.center_b(basis) * u
    }

    pub fn stiffness_intact(&self, c: &Matrix3<f64>) -> ElementMatrix {
        let mut k = ElementMatrix::zeros();
        for (b, w) in &self.q9 {
            k += b.transpose() * (c * b) * *w;
        }
        k
    }

    pub fn internal_force_intact(&self, c: &Matrix3<f64>, u: &ElementVector) -> ElementVector {
        let mut f = ElementVector::zeros();
        for (b, w) in &self.q9 {
            f += b.transpose() * (c * (b * u)) * *w;
        }
        f
    }

    pub fn energy_intact(&self, c: &Matrix3<f64>, u: &ElementVector) -> f64 {
        self.q9
            .iter()
            .map(|(b, w)| {
                let eps = b * u;
                0.5 * eps.dot(&(c * eps)) * w
            })
            .sum()
    }

    /// Strain of the whole cracked element: `B^{(e),1} U + B_zeta zeta`.
    ///
    /// `u` is in the pseudo-Q9 layout; its last two entries are the openings.
    pub fn cracked_strain(&self, frame: &CrackFrame, u: &ElementVector) -> Vector3<f64> {
        self.q8_center * u + b_zeta(frame) * Vector2::new(u[16], u[17])
    }

    /// Symmetric tangent `int [B | B_zeta]^T C [B | B_zeta] + diag(0, V/l_c D)`.
    pub fn tangent_cracked(&self, frame: &CrackFrame, c: &Matrix3<f64>, d: &TangentD) -> ElementMatrix {
        let bz = b_zeta(frame);
        let mut k = ElementMatrix::zeros();
        for (b, w) in &self.q8 {
            let mut bp = *b;
            bp.fixed_view_mut::<3, 2>(0, 16).copy_from(&bz);
            k += bp.transpose() * (c * bp) * *w;
        }
        let scale = self.q8_volume / frame.l_c;
        let mut block = k.fixed_view_mut::<2, 2>(16, 16);
        block += d * scale;
        k
    }

    /// Non-symmetric operator whose product with the state gives the
    /// internal-force part of the cracked-element residual.
    pub fn k_new_cracked(&self, frame: &CrackFrame, c: &Matrix3<f64>) -> ElementMatrix {
        let bz = b_zeta(frame);
        let mut center = self.q8_center;
        center.fixed_view_mut::<3, 2>(0, 16).copy_from(&bz);
        let mut rows = self.q8_b_integral;
        rows.fixed_view_mut::<3, 2>(0, 16).copy_from(&(bz * self.q8_volume));
        rows.transpose() * c * center
    }

    /// Internal force of a cracked element.
    ///
    /// Rows 0..16: `(int B d(e))^T sigma` with the constant center stress.
    /// Rows 16..18: `V B_zeta^T sigma + (V / l_c) T`.
    pub fn residual_cracked(
        &self,
        frame: &CrackFrame,
        c: &Matrix3<f64>,
        u: &ElementVector,
        traction: Vector2<f64>,
    ) -> ElementVector {
        let sigma = c * self.cracked_strain(frame, u);
        let mut f = self.q8_b_integral.transpose() * sigma;
        let v = self.q8_volume;
        let zeta_rows = b_zeta(frame).transpose() * sigma * v + traction * (v / frame.l_c);
        f[16] = zeta_rows[0];
        f[17] = zeta_rows[1];
        f
    }

    pub fn energy_cracked(&self, frame: &CrackFrame, c: &Matrix3<f64>, u: &ElementVector) -> f64 {
        let eps = self.cracked_strain(frame, u);
        0.5 * self.q8_volume * eps.dot(&(c * eps))
    }

    /// Plain Q8 stiffness `int B^T C B` in the pseudo-Q9 layout.
    pub fn stiffness_q8(&self, c: &Matrix3<f64>) -> ElementMatrix {
        let mut k = ElementMatrix::zeros();
        for (b, w) in &self.q8 {
            k += b.transpose() * (c * b) * *w;
        }
        k
    }
}

pub fn stiffness_intact(geom: &ElementGeometry, c: &Matrix3<f64>) -> Result<ElementMatrix> {
    Ok(ElementIntegrals::new(geom, &GaussRule::default())?.stiffness_intact(c))
}

pub fn tangent_cracked(
    geom: &ElementGeometry,
    frame: &CrackFrame,
    c: &Matrix3<f64>,
    d: &TangentD,
) -> Result<ElementMatrix> {
    Ok(ElementIntegrals::new(geom, &GaussRule::default())?.tangent_cracked(frame, c, d))
}

/// `u` holds the 16 outer-node displacements, `zeta` the openings.
pub fn center_strain(
    geom: &ElementGeometry,
    frame: &CrackFrame,
    u: &SVector<f64, 16>,
    zeta: Vector2<f64>,
) -> Result<Vector3<f64>> {
    let b1 = geom.b_matrix(Basis::Q8, 0.0, 0.0)?.0;
    let b1 = b1.fixed_view::<3, 16>(0, 0);
    Ok(b1 * u + b_zeta(frame) * zeta)
}

pub fn residual_cracked(
    geom: &ElementGeometry,
    frame: &CrackFrame,
    c: &Matrix3<f64>,
    u: &SVector<f64, 16>,
    zeta: Vector2<f64>,
    traction: Vector2<f64>,
) -> Result<ElementVector> {
    let ints = ElementIntegrals::new(geom, &GaussRule::default())?;
    Ok(ints.residual_cracked(frame, c, &pseudo_q9(u, zeta), traction))
}

/// Concatenates outer displacements and openings into the pseudo-Q9 vector.
pub fn pseudo_q9(u: &SVector<f64, 16>, zeta: Vector2<f64>) -> ElementVector {
    let mut out = ElementVector::zeros();
    out.fixed_rows_mut::<16>(0).copy_from(u);
    out[16] = zeta.x;
    out[17] = zeta.y;
    out
}
