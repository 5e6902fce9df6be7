use nalgebra::{Matrix2, Point2, SMatrix, Vector2};

use super::quadrature::GaussRule;
use super::shape::Basis;
use crate::error::{Error, Result};

/// Strain-displacement matrix in the pseudo-Q9 column layout: two columns per
/// node, the last pair belonging to the center node. For the Q8 basis those
/// last two columns are zero.
pub type BMatrix = SMatrix<f64, 3, 18>;

const MIN_DET_J: f64 = 1e-14;

/// Nodal coordinates of one nine-node quadrilateral.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementGeometry {
    /// Element index, carried for diagnostics.
    pub id: usize,
    pub nodes: [Point2<f64>; 9],
    pub thickness: f64,
}

impl ElementGeometry {
    pub fn new(id: usize, nodes: [Point2<f64>; 9], thickness: f64) -> Self {
        Self {
            id,
            nodes,
            thickness,
        }
    }

    /// Straight-edged element from four counter-clockwise corners.
    pub fn from_corners(id: usize, corners: [Point2<f64>; 4], thickness: f64) -> Self {
        let mid = |a: usize, b: usize| Point2::from((corners[a].coords + corners[b].coords) * 0.5);
        let center = Point2::from(corners.iter().map(|p| p.coords).sum::<Vector2<f64>>() * 0.25);
        Self::new(
            id,
            [
                corners[0],
                corners[1],
                corners[2],
                corners[3],
                mid(0, 1),
                mid(1, 2),
                mid(2, 3),
                mid(3, 0),
                center,
            ],
            thickness,
        )
    }

    pub fn corners(&self) -> [Point2<f64>; 4] {
        [self.nodes[0], self.nodes[1], self.nodes[2], self.nodes[3]]
    }

    /// Physical position of the natural point `(xi, eta)` under `basis`.
    pub fn map(&self, basis: Basis, xi: f64, eta: f64) -> Point2<f64> {
        let s = basis.eval(xi, eta);
        let mut p = Vector2::zeros();
        for (n, x) in s.values().iter().zip(&self.nodes) {
            p += x.coords * *n;
        }
        Point2::from(p)
    }

    /// Center point used for the crack chord.
    pub fn center(&self, basis: Basis) -> Point2<f64> {
        self.map(basis, 0.0, 0.0)
    }

    /// Jacobian `[dx/dxi dy/dxi; dx/deta dy/deta]`.
    pub fn jacobian(&self, basis: Basis, xi: f64, eta: f64) -> Matrix2<f64> {
        let s = basis.eval(xi, eta);
        let mut j = Matrix2::zeros();
        for (g, x) in s.grads().iter().zip(&self.nodes) {
            j[(0, 0)] += g[0] * x.x;
            j[(0, 1)] += g[0] * x.y;
            j[(1, 0)] += g[1] * x.x;
            j[(1, 1)] += g[1] * x.y;
        }
        j
    }

    /// Physical gradients of the shape functions and `det J`.
    pub fn physical_gradients(
        &self,
        basis: Basis,
        xi: f64,
        eta: f64,
    ) -> Result<([[f64; 2]; 9], f64)> {
        let j = self.jacobian(basis, xi, eta);
        let det = j.determinant();
        if !(det > MIN_DET_J) {
            return Err(Error::geometry(
                self.id,
                format!("non-positive Jacobian determinant {det:.3e} at ({xi}, {eta})"),
            ));
        }
        let inv = j.try_inverse().ok_or_else(|| Error::geometry(self.id, "singular Jacobian"))?;
        let s = basis.eval(xi, eta);
        let mut out = [[0.0; 2]; 9];
        for (o, g) in out.iter_mut().zip(s.grads()) {
            let v = inv * Vector2::new(g[0], g[1]);
            *o = [v.x, v.y];
        }
        Ok((out, det))
    }

    pub fn b_matrix(&self, basis: Basis, xi: f64, eta: f64) -> Result<(BMatrix, f64)> {
        let (grads, det) = self.physical_gradients(basis, xi, eta)?;
        let mut b = BMatrix::zeros();
        for (i, g) in grads.iter().take(basis.node_count()).enumerate() {
            b[(0, 2 * i)] = g[0];
            b[(1, 2 * i + 1)] = g[1];
            b[(2, 2 * i)] = g[1];
            b[(2, 2 * i + 1)] = g[0];
        }
        Ok((b, det))
    }

    /// Element volume (area times thickness) by quadrature of `det J`.
    pub fn volume(&self, basis: Basis, rule: &GaussRule) -> Result<f64> {
        let mut v = 0.0;
        for (p, w) in rule.iter() {
            let det = self.jacobian(basis, p[0], p[1]).determinant();
            if !(det > MIN_DET_J) {
                return Err(Error::geometry(
                    self.id,
                    format!("non-positive Jacobian determinant {det:.3e}"),
                ));
            }
            v += det * w;
        }
        Ok(v * self.thickness)
    }

    /// Checks `det J > 0` at every point of `rule` for both bases.
    pub fn check_jacobian(&self, rule: &GaussRule) -> Result<()> {
        for basis in [Basis::Q9, Basis::Q8] {
            for (p, _) in rule.iter() {
                self.physical_gradients(basis, p[0], p[1])?;
            }
        }
        Ok(())
    }
}

/// Free-function form of [`ElementGeometry::b_matrix`].
pub fn b_matrix(geom: &ElementGeometry, basis: Basis, xi: f64, eta: f64) -> Result<BMatrix> {
    geom.b_matrix(basis, xi, eta).map(|(b, _)| b)
}
