use nalgebra::{Point2, SMatrix, Vector2};

use super::geometry::ElementGeometry;
use super::quadrature::GaussRule;
use super::shape::Basis;
use crate::error::{Error, Result};

/// Maps `(zeta_n, zeta_t)` to Voigt strain.
pub type BZeta = SMatrix<f64, 3, 2>;

/// Crack normal, crack tangent and characteristic length of a cracked element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrackFrame {
    pub normal: Vector2<f64>,
    pub tangent: Vector2<f64>,
    pub l_c: f64,
}

impl CrackFrame {
    /// Frame with `t` obtained by rotating `n` by -90 degrees.
    pub fn from_normal(normal: Vector2<f64>, l_c: f64) -> Self {
        let n = normal.normalize();
        Self {
            normal: n,
            tangent: Vector2::new(n.y, -n.x),
            l_c,
        }
    }

    /// Builds the frame and computes `l_c` from the element shape.
    pub fn for_element(geom: &ElementGeometry, normal: Vector2<f64>) -> Result<Self> {
        let n = normal.normalize();
        let t = Vector2::new(n.y, -n.x);
        let l_c = characteristic_length(geom, t)?;
        Ok(Self {
            normal: n,
            tangent: t,
            l_c,
        })
    }
}

pub fn b_zeta(frame: &CrackFrame) -> BZeta {
    let (n, t) = (frame.normal, frame.tangent);
    BZeta::new(
        n.x * n.x,
        n.x * t.x,
        n.y * n.y,
        n.y * t.y,
        2.0 * n.x * n.y,
        n.x * t.y + n.y * t.x,
    ) * (-1.0 / frame.l_c)
}

/// Length of the chord through `origin` along `dir`, clipped to the polygon.
///
/// Uses the nearest boundary crossing on each side of `origin`.
pub fn chord_length(polygon: &[Point2<f64>], origin: Point2<f64>, dir: Vector2<f64>) -> Option<f64> {
    let mut forward = f64::INFINITY;
    let mut backward = f64::INFINITY;
    let k = polygon.len();
    for i in 0..k {
        let a = polygon[i];
        let b = polygon[(i + 1) % k];
        let e = b - a;
        // origin + s dir = a + u e
        let det = dir.x * (-e.y) - dir.y * (-e.x);
        if det.abs() < 1e-300 {
            continue;
        }
        let r = a - origin;
        let s = (r.x * (-e.y) - r.y * (-e.x)) / det;
        let u = (dir.x * r.y - dir.y * r.x) / det;
        if !(-1e-12..=1.0 + 1e-12).contains(&u) {
            continue;
        }
        if s >= 0.0 {
            forward = forward.min(s);
        }
        if s <= 0.0 {
            backward = backward.min(-s);
        }
    }
    let len = (forward + backward) * dir.norm();
    (len.is_finite() && len > 0.0).then_some(len)
}

/// `l_c = V / A`, with `A` the area of the crack through the element center
/// parallel to `tangent`, clipped to the straight-edged corner polygon.
pub fn characteristic_length(geom: &ElementGeometry, tangent: Vector2<f64>) -> Result<f64> {
    let volume = geom.volume(Basis::Q8, &GaussRule::default())?;
    let chord = chord_length(&geom.corners(), geom.center(Basis::Q8), tangent.normalize())
        .filter(|c| *c > 1e-12)
        .ok_or_else(|| Error::geometry(geom.id, "degenerate crack chord"))?;
    Ok(volume / (chord * geom.thickness))
}
