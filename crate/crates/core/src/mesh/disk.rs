//! Brazilian disk with one or two through-slots.
//!
//! The mesh is built in a frame aligned with the slots: a graded tensor
//! grid covers a central square (slot cells removed) and an O-grid ring maps
//! the square's boundary onto the circle. The result is rotated by the slot
//! inclination, so the loading axis stays vertical.

use nalgebra::{Point2, Rotation2};
use serde::{Deserialize, Serialize};

use super::builder::{graded_axis, QuadBuilder};
use super::{BoundarySet, Component, Dirichlet, Mesh};
use crate::error::{Error, Result};

/// Spacing growth rate away from slot edges.
const GROWTH: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlotLayout {
    Single,
    Double,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiskSpec {
    pub diameter: f64,
    pub thickness: f64,
    /// Slot inclination from the horizontal axis, degrees.
    pub alpha_deg: f64,
    pub layout: SlotLayout,
    pub slot_length: f64,
    pub slot_width: f64,
    /// Distance of each slot center from the disk center (double layout),
    /// measured perpendicular to the slots.
    pub slot_offset: f64,
    pub h_target: f64,
    /// Loaded arc width, as a chord along `x`.
    pub contact_width: f64,
    pub seed: Option<u64>,
}

impl DiskSpec {
    pub fn new(layout: SlotLayout, alpha_deg: f64, h_target: f64) -> Self {
        let (slot_length, slot_offset) = match layout {
            SlotLayout::Single => (30.0, 0.0),
            SlotLayout::Double => (20.0, 15.0),
        };
        Self {
            diameter: 100.0,
            thickness: 1.0,
            alpha_deg,
            layout,
            slot_length,
            slot_width: 1.0,
            slot_offset,
            h_target,
            contact_width: 5.0,
            seed: Some(1),
        }
    }

    /// Slot centers in the slot-aligned frame.
    fn slot_centers(&self) -> Vec<Point2<f64>> {
        match self.layout {
            SlotLayout::Single => vec![Point2::origin()],
            SlotLayout::Double => vec![
                Point2::new(0.0, -self.slot_offset),
                Point2::new(0.0, self.slot_offset),
            ],
        }
    }

    /// Slot rectangles `(x_min, x_max, y_min, y_max)` in the slot-aligned frame.
    pub fn slot_boxes(&self) -> Vec<[f64; 4]> {
        let (hl, hw) = (self.slot_length / 2.0, self.slot_width / 2.0);
        self.slot_centers()
            .into_iter()
            .map(|c| [c.x - hl, c.x + hl, c.y - hw, c.y + hw])
            .collect()
    }

    pub fn rotation(&self) -> Rotation2<f64> {
        Rotation2::new(self.alpha_deg.to_radians())
    }

    /// Slot corners in the global frame.
    pub fn slot_polygons(&self) -> Vec<[Point2<f64>; 4]> {
        let rot = self.rotation();
        self.slot_boxes()
            .into_iter()
            .map(|[x0, x1, y0, y1]| {
                [(x0, y0), (x1, y0), (x1, y1), (x0, y1)].map(|(x, y)| rot * Point2::new(x, y))
            })
            .collect()
    }
}

pub fn generate_disk(layout: SlotLayout, alpha_deg: f64, h_target: f64) -> Result<(Mesh, BoundarySet)> {
    DiskSpec::new(layout, alpha_deg, h_target).generate()
}

impl DiskSpec {
    pub fn generate(&self) -> Result<(Mesh, BoundarySet)> {
        if !(0.0..=90.0).contains(&self.alpha_deg) {
            return Err(Error::Mesh(format!("slot inclination {} outside [0, 90] degrees", self.alpha_deg)));
        }
        let r = self.diameter / 2.0;
        let h = self.h_target;
        if !(h > 0.0) || !h.is_finite() || h > r / 4.0 {
            return Err(Error::Mesh(format!("h_target {h} outside (0, {}]", r / 4.0)));
        }
        let boxes = self.slot_boxes();
        let extent = boxes
            .iter()
            .flat_map(|b| b.iter().map(|v| v.abs()))
            .fold(0.0f64, f64::max);
        for poly in self.slot_polygons() {
            if poly.iter().any(|p| p.coords.norm() >= r) {
                return Err(Error::Mesh("slot geometry exits the disk".into()));
            }
        }
        // core half-size; its corners must leave room for at least one ring layer
        let b = (extent + h.max(2.0 * self.slot_width)).max(0.45 * r);
        if b * std::f64::consts::SQRT_2 > r - h {
            return Err(Error::Mesh(format!(
                "slot geometry (extent {extent}) leaves no room for the outer ring at h_target {h}"
            )));
        }

        let w = self.slot_width.min(h);
        let mut fx: Vec<(f64, f64)> = Vec::new();
        let mut fy: Vec<(f64, f64)> = Vec::new();
        for &[x0, x1, y0, y1] in &boxes {
            fx.extend([(x0, w), (x1, w)]);
            fy.extend([(y0, w), (y1, w)]);
        }
        // put grid lines through the points that map to the load contacts
        let alpha = self.alpha_deg.to_radians();
        let (s, c) = alpha.sin_cos();
        let snap = |list: &mut Vec<(f64, f64)>, v: f64| {
            if v.abs() < b - 0.5 * h && list.iter().all(|(x, _)| (x - v).abs() > 0.5 * h) {
                list.push((v, h));
            }
        };
        if c >= s {
            let v = b * s / c;
            snap(&mut fx, v);
            snap(&mut fx, -v);
        } else {
            let v = b * c / s;
            snap(&mut fy, v);
            snap(&mut fy, -v);
        }
        let xs = graded_axis(-b, b, h, &fx, GROWTH);
        let ys = graded_axis(-b, b, h, &fy, GROWTH);
        let (nx, ny) = (xs.len() - 1, ys.len() - 1);

        let mut builder = QuadBuilder::default();
        for &y in &ys {
            for &x in &xs {
                builder.add_point(Point2::new(x, y));
            }
        }
        let grid = |i: usize, j: usize| j * (nx + 1) + i;
        for j in 0..ny {
            for i in 0..nx {
                let (cx, cy) = ((xs[i] + xs[i + 1]) / 2.0, (ys[j] + ys[j + 1]) / 2.0);
                let in_slot = boxes
                    .iter()
                    .any(|&[x0, x1, y0, y1]| cx > x0 && cx < x1 && cy > y0 && cy < y1);
                if !in_slot {
                    builder.add_quad([grid(i, j), grid(i + 1, j), grid(i + 1, j + 1), grid(i, j + 1)]);
                }
            }
        }

        // counter-clockwise loop around the core boundary
        let mut ring: Vec<usize> = Vec::new();
        ring.extend((0..nx).map(|i| grid(i, 0)));
        ring.extend((0..ny).map(|j| grid(nx, j)));
        ring.extend((1..=nx).rev().map(|i| grid(i, ny)));
        ring.extend((1..=ny).rev().map(|j| grid(0, j)));
        let layers = (((r - b) / h).round() as usize).max(2);
        let mut prev = ring.clone();
        for k in 1..=layers {
            let t = k as f64 / layers as f64;
            let next: Vec<usize> = ring
                .iter()
                .map(|&p| {
                    let inner = builder.points[p];
                    let outer = Point2::from(inner.coords * (r / inner.coords.norm()));
                    builder.add_point(inner + (outer - inner) * t)
                })
                .collect();
            for q in 0..ring.len() {
                let q1 = (q + 1) % ring.len();
                builder.add_quad([prev[q], prev[q1], next[q1], next[q]]);
            }
            prev = next;
        }

        let rot = self.rotation();
        for p in &mut builder.points {
            *p = rot * *p;
        }
        // exact symmetry for points on the vertical axis
        for p in &mut builder.points {
            if p.x.abs() < 1e-12 * r {
                p.x = 0.0;
            }
        }
        if let Some(seed) = self.seed {
            builder.jitter(seed, true);
        }
        let rim_tol = 1e-9 * r;
        let mesh = builder.build(self.thickness, |p| {
            let n = p.coords.norm();
            // a mid-edge node of a rim edge sits just inside the circle
            if n > r * (1.0 - (h / r).powi(2)) - rim_tol {
                Point2::from(p.coords * (r / n))
            } else {
                p
            }
        })?;

        let bc = self.contact_conditions(&mesh)?;
        Ok((mesh, bc))
    }

    fn contact_conditions(&self, mesh: &Mesh) -> Result<BoundarySet> {
        let r = self.diameter / 2.0;
        let centers = mesh.center_nodes();
        let rim: Vec<usize> = (0..mesh.node_count())
            .filter(|&k| !centers[k] && (mesh.nodes[k].coords.norm() - r).abs() < 1e-9 * r)
            .collect();
        let half = self.contact_width / 2.0;
        let mut bc = BoundarySet::default();
        for (top, value) in [(true, -1.0), (false, 0.0)] {
            let side = |k: &usize| (mesh.nodes[*k].y > 0.0) == top;
            let mut arc: Vec<usize> = rim
                .iter()
                .copied()
                .filter(|k| side(k) && mesh.nodes[*k].x.abs() <= half + 1e-9 * r)
                .collect();
            if arc.is_empty() {
                let nearest = rim
                    .iter()
                    .copied()
                    .filter(side)
                    .min_by(|&a, &b| mesh.nodes[a].x.abs().total_cmp(&mesh.nodes[b].x.abs()))
                    .ok_or_else(|| Error::Mesh("no rim nodes found".into()))?;
                arc.push(nearest);
            }
            for k in arc {
                bc.dirichlet.push(Dirichlet { node: k, component: Component::X, value: 0.0 });
                bc.dirichlet.push(Dirichlet { node: k, component: Component::Y, value });
                if top {
                    bc.probe.push((k, Component::Y));
                }
            }
        }
        bc.validate(mesh)?;
        Ok(bc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_slot_mesh_is_valid() {
        let (mesh, bc) = generate_disk(SlotLayout::Single, 30.0, 5.0).unwrap();
        assert!(mesh.element_count() > 100);
        assert!(bc.probe.len() >= 1);
    }

    #[test]
    fn inclination_out_of_range() {
        assert!(generate_disk(SlotLayout::Single, 95.0, 5.0).is_err());
    }

    #[test]
    fn long_slot_exits() {
        let mut spec = DiskSpec::new(SlotLayout::Single, 0.0, 5.0);
        spec.slot_length = 120.0;
        assert!(spec.generate().is_err());
    }
}
