//! L-shaped panel: a 500 mm square with the lower-right 250 mm quadrant
//! removed, fixed along the bottom of the lower-left leg and pulled upward
//! near the free end of the horizontal upper leg.

use nalgebra::Point2;

use super::builder::QuadBuilder;
use super::{BoundarySet, Component, Dirichlet, Mesh};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LPanelSpec {
    /// Outer edge length.
    pub size: f64,
    pub thickness: f64,
    /// Target element edge length.
    pub h_target: f64,
    /// Loaded stretch of the `y = size/2` edge, as `(x_min, x_max)`.
    pub load_patch: (f64, f64),
    /// Jitter seed; `None` keeps the grid regular.
    pub seed: Option<u64>,
}

impl Default for LPanelSpec {
    fn default() -> Self {
        Self {
            size: 500.0,
            thickness: 100.0,
            h_target: 20.0,
            load_patch: (460.0, 480.0),
            seed: Some(1),
        }
    }
}

impl LPanelSpec {
    pub fn with_h(h_target: f64) -> Self {
        Self {
            h_target,
            ..Self::default()
        }
    }

    /// Cells per block side.
    pub fn divisions(&self) -> Result<usize> {
        let half = self.size / 2.0;
        if !(self.h_target > 0.0) || !self.h_target.is_finite() {
            return Err(Error::Mesh(format!("h_target must be positive, got {}", self.h_target)));
        }
        if self.h_target > half / 2.0 {
            return Err(Error::Mesh(format!(
                "h_target {} exceeds the panel feature size {}",
                self.h_target,
                half / 2.0
            )));
        }
        Ok((half / self.h_target - 1e-9).ceil() as usize)
    }
}

/// Convenience wrapper with the default geometry and seed.
pub fn generate_l_panel(h_target: f64) -> Result<(Mesh, BoundarySet)> {
    LPanelSpec::with_h(h_target).generate()
}

impl LPanelSpec {
    pub fn generate(&self) -> Result<(Mesh, BoundarySet)> {
        let n = self.divisions()?;
        let half = self.size / 2.0;
        let m = 2 * n;
        let step = half / n as f64;
        let mut b = QuadBuilder::default();
        // full (m+1)^2 lattice; the unused lower-right points are dropped by the builder
        for j in 0..=m {
            for i in 0..=m {
                b.add_point(Point2::new(i as f64 * step, j as f64 * step));
            }
        }
        let id = |i: usize, j: usize| j * (m + 1) + i;
        for j in 0..m {
            for i in 0..m {
                if i >= n && j < n {
                    continue;
                }
                b.add_quad([id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        if let Some(seed) = self.seed {
            b.jitter(seed, false);
        }
        let mesh = b.build(self.thickness, |p| p)?;

        let tol = 1e-9 * self.size;
        let mut bc = BoundarySet::default();
        for (k, p) in mesh.nodes.iter().enumerate() {
            if p.y.abs() < tol && p.x <= half + tol {
                for component in [Component::X, Component::Y] {
                    bc.dirichlet.push(Dirichlet { node: k, component, value: 0.0 });
                }
            }
        }
        let centers = mesh.center_nodes();
        let on_load_edge: Vec<usize> = (0..mesh.node_count())
            .filter(|&k| !centers[k] && (mesh.nodes[k].y - half).abs() < tol && mesh.nodes[k].x > half + tol)
            .collect();
        let (lo, hi) = self.load_patch;
        let mut loaded: Vec<usize> = on_load_edge
            .iter()
            .copied()
            .filter(|&k| (lo - tol..=hi + tol).contains(&mesh.nodes[k].x))
            .collect();
        if loaded.is_empty() {
            let mid = 0.5 * (lo + hi);
            let nearest = on_load_edge
                .iter()
                .copied()
                .min_by(|&a, &b| (mesh.nodes[a].x - mid).abs().total_cmp(&(mesh.nodes[b].x - mid).abs()))
                .ok_or_else(|| Error::Mesh("no nodes on the loading edge".into()))?;
            loaded.push(nearest);
        }
        for k in loaded {
            bc.dirichlet.push(Dirichlet { node: k, component: Component::Y, value: 1.0 });
            bc.probe.push((k, Component::Y));
        }
        bc.validate(&mesh)?;
        Ok((mesh, bc))
    }
}
