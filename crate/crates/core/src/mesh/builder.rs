//! Corner-quad meshes promoted to conforming nine-node meshes.

use std::collections::HashMap;

use nalgebra::{Point2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Mesh;
use crate::error::Result;

/// Fraction of the shortest incident edge a node may move when jittered.
pub(crate) const JITTER_FRACTION: f64 = 0.15;

#[derive(Debug, Default, Clone)]
pub(crate) struct QuadBuilder {
    pub points: Vec<Point2<f64>>,
    pub quads: Vec<[usize; 4]>,
}

impl QuadBuilder {
    pub fn add_point(&mut self, p: Point2<f64>) -> usize {
        self.points.push(p);
        self.points.len() - 1
    }

    /// Adds a quad, reordering it counter-clockwise if needed.
    pub fn add_quad(&mut self, mut q: [usize; 4]) {
        let p = q.map(|i| self.points[i]);
        let area2: f64 = (0..4)
            .map(|k| {
                let (a, b) = (p[k], p[(k + 1) % 4]);
                a.x * b.y - b.x * a.y
            })
            .sum();
        if area2 < 0.0 {
            q.swap(1, 3);
        }
        self.quads.push(q);
    }

    fn edge_use(&self) -> HashMap<(usize, usize), usize> {
        let mut uses = HashMap::new();
        for q in &self.quads {
            for k in 0..4 {
                let (a, b) = (q[k], q[(k + 1) % 4]);
                *uses.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        uses
    }

    /// Perturbs interior corner points by a reproducible, position-keyed
    /// offset. With `mirror` the offset field is odd in `x`, so a mesh
    /// symmetric about `x = 0` stays symmetric.
    pub fn jitter(&mut self, seed: u64, mirror: bool) {
        let mut on_boundary = vec![false; self.points.len()];
        let mut min_edge = vec![f64::INFINITY; self.points.len()];
        let mut used = vec![false; self.points.len()];
        for (&(a, b), &count) in &self.edge_use() {
            let len = (self.points[a] - self.points[b]).norm();
            min_edge[a] = min_edge[a].min(len);
            min_edge[b] = min_edge[b].min(len);
            used[a] = true;
            used[b] = true;
            if count == 1 {
                on_boundary[a] = true;
                on_boundary[b] = true;
            }
        }
        let scale = self
            .points
            .iter()
            .fold(0.0f64, |m, p| m.max(p.x.abs()).max(p.y.abs()))
            .max(1.0);
        let quantum = scale * 1e-9;
        let moved: Vec<Point2<f64>> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                if !used[i] || on_boundary[i] {
                    return *p;
                }
                let key_x = if mirror { p.x.abs() } else { p.x };
                let qx = (key_x / quantum).round() as i64 as u64;
                let qy = (p.y / quantum).round() as i64 as u64;
                let mut rng = ChaCha8Rng::seed_from_u64(splitmix(splitmix(seed ^ qx) ^ qy));
                let amp = JITTER_FRACTION * min_edge[i];
                let mut d = Vector2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * amp;
                if mirror {
                    if p.x.abs() <= quantum {
                        d.x = 0.0;
                    } else if p.x < 0.0 {
                        d.x = -d.x;
                    }
                }
                p + d
            })
            .collect();
        self.points = moved;
    }

    /// Adds mid-edge and center nodes. `project` may move a boundary
    /// mid-edge node onto the true boundary.
    pub fn build(self, thickness: f64, project: impl Fn(Point2<f64>) -> Point2<f64>) -> Result<Mesh> {
        let uses = self.edge_use();
        let mut used = vec![false; self.points.len()];
        for q in &self.quads {
            for &i in q {
                used[i] = true;
            }
        }
        let mut renumber = vec![usize::MAX; self.points.len()];
        let mut nodes = Vec::new();
        for (i, p) in self.points.iter().enumerate() {
            if used[i] {
                renumber[i] = nodes.len();
                nodes.push(*p);
            }
        }
        let mut mids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut elements = Vec::with_capacity(self.quads.len());
        for q in &self.quads {
            let mut conn = [0usize; 9];
            for k in 0..4 {
                conn[k] = renumber[q[k]];
            }
            for k in 0..4 {
                let (a, b) = (q[k], q[(k + 1) % 4]);
                let key = (a.min(b), a.max(b));
                conn[4 + k] = *mids.entry(key).or_insert_with(|| {
                    let m = Point2::from((self.points[a].coords + self.points[b].coords) / 2.0);
                    nodes.push(if uses[&key] == 1 { project(m) } else { m });
                    nodes.len() - 1
                });
            }
            elements.push(conn);
        }
        for conn in &mut elements {
            // image of the natural origin under the eight-node map
            let corners: Vector2<f64> = conn[..4].iter().map(|&n| nodes[n].coords).sum();
            let edges: Vector2<f64> = conn[4..8].iter().map(|&n| nodes[n].coords).sum();
            nodes.push(Point2::from(edges * 0.5 - corners * 0.25));
            conn[8] = nodes.len() - 1;
        }
        let n = nodes.len() as u64;
        let m = elements.len() as u64;
        Mesh::new((1..=n).collect(), nodes, (1..=m).collect(), elements, thickness)
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Breakpoints of a graded 1D grid on `[lo, hi]`.
///
/// `features` are interior positions with a requested local spacing; the
/// spacing grows linearly away from each feature (rate `growth`) up to `h`.
pub(crate) fn graded_axis(lo: f64, hi: f64, h: f64, features: &[(f64, f64)], growth: f64) -> Vec<f64> {
    let mut marks: Vec<(f64, f64)> = vec![(lo, h), (hi, h)];
    marks.extend(features.iter().copied().filter(|(x, _)| *x > lo && *x < hi));
    marks.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (x, s) in marks {
        match merged.last_mut() {
            Some(last) if x - last.0 < 1e-9 * (hi - lo) => last.1 = last.1.min(s),
            _ => merged.push((x, s)),
        }
    }
    let size_at = |x: f64| {
        merged
            .iter()
            .map(|&(xm, s)| s + growth * (x - xm).abs())
            .fold(h, f64::min)
    };
    let mut out = vec![merged[0].0];
    for w in merged.windows(2) {
        let (a, c) = (w[0].0, w[1].0);
        const SAMPLES: usize = 400;
        let dx = (c - a) / SAMPLES as f64;
        let mut cumulative = vec![0.0];
        for k in 0..SAMPLES {
            let x = a + (k as f64 + 0.5) * dx;
            cumulative.push(cumulative[k] + dx / size_at(x));
        }
        let total = cumulative[SAMPLES];
        let n = (total.round() as usize).max(1);
        for j in 1..n {
            let target = total * j as f64 / n as f64;
            let k = cumulative.partition_point(|&v| v < target).clamp(1, SAMPLES);
            let frac = (target - cumulative[k - 1]) / (cumulative[k] - cumulative[k - 1]);
            out.push(a + (k as f64 - 1.0 + frac) * dx);
        }
        out.push(c);
    }
    out
}
