//! Nine-node quadrilateral meshes, boundary conditions and DOF numbering.

mod builder;
mod disk;
mod document;
mod l_panel;

use std::collections::{BTreeMap, HashMap};

use nalgebra::Point2;
use serde::{Deserialize, Serialize};

use crate::element::{Basis, ElementGeometry, GaussRule};
use crate::error::{Error, Result};

pub use disk::{generate_disk, DiskSpec, SlotLayout};
pub use document::{load_mesh, write_mesh, MESH_HEADER};
pub use l_panel::{generate_l_panel, LPanelSpec};

/// Index of the center node in an element's connectivity.
pub const CENTER: usize = 8;

/// Corner pairs of the four edges together with their mid-edge slot.
pub const EDGES: [(usize, usize, usize); 4] = [(0, 1, 4), (1, 2, 5), (2, 3, 6), (3, 0, 7)];

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    /// External node ids, parallel to `nodes`.
    pub node_ids: Vec<u64>,
    pub nodes: Vec<Point2<f64>>,
    /// External element ids, parallel to `elements`.
    pub element_ids: Vec<u64>,
    /// Connectivity: corners counter-clockwise, mid-edges, center.
    pub elements: Vec<[usize; 9]>,
    pub thickness: f64,
}

impl Mesh {
    pub fn new(
        node_ids: Vec<u64>,
        nodes: Vec<Point2<f64>>,
        element_ids: Vec<u64>,
        elements: Vec<[usize; 9]>,
        thickness: f64,
    ) -> Result<Self> {
        let mesh = Self {
            node_ids,
            nodes,
            element_ids,
            elements,
            thickness,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn geometry(&self, e: usize) -> ElementGeometry {
        let nodes = self.elements[e].map(|n| self.nodes[n]);
        ElementGeometry::new(e, nodes, self.thickness)
    }

    /// Total in-plane area by 3x3 quadrature of the Q9 map.
    pub fn area(&self) -> Result<f64> {
        let rule = GaussRule::default();
        let mut a = 0.0;
        for e in 0..self.element_count() {
            a += self.geometry(e).volume(Basis::Q9, &rule)? / self.thickness;
        }
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.thickness > 0.0) {
            return Err(Error::Mesh(format!("thickness must be positive, got {}", self.thickness)));
        }
        if self.node_ids.len() != self.nodes.len() || self.element_ids.len() != self.elements.len() {
            return Err(Error::Mesh("id lists do not match node/element counts".into()));
        }
        check_unique(&self.node_ids, "node")?;
        check_unique(&self.element_ids, "element")?;

        // role of each node: which element owns it as a center, and how it is used otherwise
        let mut center_owner: Vec<Option<usize>> = vec![None; self.nodes.len()];
        let mut used_outer = vec![false; self.nodes.len()];
        let mut used_as_corner = vec![false; self.nodes.len()];
        let mut used_as_mid = vec![false; self.nodes.len()];
        for (e, conn) in self.elements.iter().enumerate() {
            let eid = self.element_ids[e];
            for (k, &n) in conn.iter().enumerate() {
                if n >= self.nodes.len() {
                    return Err(Error::Mesh(format!("element {eid} references unknown node index {n}")));
                }
                if conn[..k].contains(&n) {
                    return Err(Error::Mesh(format!(
                        "element {eid} uses node {} twice",
                        self.node_ids[n]
                    )));
                }
            }
            for &n in &conn[..CENTER] {
                used_outer[n] = true;
            }
            for &n in &conn[..4] {
                used_as_corner[n] = true;
            }
            for &n in &conn[4..CENTER] {
                used_as_mid[n] = true;
            }
            let c = conn[CENTER];
            if let Some(other) = center_owner[c] {
                return Err(Error::Mesh(format!(
                    "elements {} and {eid} share center node {}",
                    self.element_ids[other], self.node_ids[c]
                )));
            }
            center_owner[c] = Some(e);
        }
        for (n, owner) in center_owner.iter().enumerate() {
            if let (Some(e), true) = (owner, used_outer[n]) {
                return Err(Error::Mesh(format!(
                    "center node {} of element {} is also used as an outer node",
                    self.node_ids[n], self.element_ids[*e]
                )));
            }
            if used_as_corner[n] && used_as_mid[n] {
                return Err(Error::Mesh(format!(
                    "node {} is a corner of one element and a mid-edge node of another (hanging node)",
                    self.node_ids[n]
                )));
            }
        }

        let mut edges: HashMap<(usize, usize), (usize, usize, usize)> = HashMap::new();
        let mut mid_edge: HashMap<usize, (usize, usize)> = HashMap::new();
        for (e, conn) in self.elements.iter().enumerate() {
            for &(a, b, m) in &EDGES {
                let key = edge_key(conn[a], conn[b]);
                let mid = conn[m];
                let entry = edges.entry(key).or_insert((mid, 0, e));
                if entry.0 != mid {
                    return Err(Error::Mesh(format!(
                        "elements {} and {} share an edge with different mid-edge nodes",
                        self.element_ids[entry.2], self.element_ids[e]
                    )));
                }
                entry.1 += 1;
                if entry.1 > 2 {
                    return Err(Error::Mesh(format!(
                        "edge {}-{} is shared by more than two elements",
                        self.node_ids[key.0], self.node_ids[key.1]
                    )));
                }
                if *mid_edge.entry(mid).or_insert(key) != key {
                    return Err(Error::Mesh(format!(
                        "mid-edge node {} sits on two different edges",
                        self.node_ids[mid]
                    )));
                }
            }
        }

        let rule = GaussRule::default();
        for e in 0..self.element_count() {
            self.geometry(e).check_jacobian(&rule).map_err(|err| match err {
                Error::Geometry { reason, .. } => Error::Mesh(format!(
                    "element {} is inverted or degenerate: {reason}",
                    self.element_ids[e]
                )),
                other => other,
            })?;
        }
        Ok(())
    }

    /// Elements sharing at least one edge, per element, sorted.
    pub fn edge_adjacency(&self) -> Vec<Vec<usize>> {
        let mut by_edge: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (e, conn) in self.elements.iter().enumerate() {
            for &(a, b, _) in &EDGES {
                by_edge.entry(edge_key(conn[a], conn[b])).or_default().push(e);
            }
        }
        let mut adj = vec![Vec::new(); self.element_count()];
        for elems in by_edge.values() {
            for &i in elems {
                for &j in elems {
                    if i != j {
                        adj[i].push(j);
                    }
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    pub fn node_index(&self, id: u64) -> Option<usize> {
        self.node_ids.iter().position(|&n| n == id)
    }

    /// `true` for nodes that are the center of some element.
    pub fn center_nodes(&self) -> Vec<bool> {
        let mut out = vec![false; self.node_count()];
        for conn in &self.elements {
            out[conn[CENTER]] = true;
        }
        out
    }
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn check_unique(ids: &[u64], what: &str) -> Result<()> {
    let mut seen = HashMap::with_capacity(ids.len());
    for &id in ids {
        if seen.insert(id, ()).is_some() {
            return Err(Error::Mesh(format!("duplicate {what} id {id}")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Component {
    X,
    Y,
}

impl Component {
    pub fn index(self) -> usize {
        match self {
            Component::X => 0,
            Component::Y => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Component::X => "x",
            Component::Y => "y",
        }
    }
}

/// Prescribed displacement `value * d` on one node component, `d` being the
/// current load parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dirichlet {
    pub node: usize,
    pub component: Component,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundarySet {
    pub dirichlet: Vec<Dirichlet>,
    /// Constrained components whose reactions make up the reported load.
    pub probe: Vec<(usize, Component)>,
}

impl BoundarySet {
    pub fn validate(&self, mesh: &Mesh) -> Result<()> {
        let centers = mesh.center_nodes();
        let mut seen = BTreeMap::new();
        for d in &self.dirichlet {
            if d.node >= mesh.node_count() {
                return Err(Error::Mesh(format!("dirichlet entry on unknown node index {}", d.node)));
            }
            if centers[d.node] {
                return Err(Error::Mesh(format!(
                    "dirichlet entry on center node {} (center DOFs may hold crack openings)",
                    mesh.node_ids[d.node]
                )));
            }
            if seen.insert((d.node, d.component), ()).is_some() {
                return Err(Error::Mesh(format!(
                    "node {} component {} prescribed twice",
                    mesh.node_ids[d.node],
                    d.component.label()
                )));
            }
        }
        for p in &self.probe {
            if !seen.contains_key(p) {
                return Err(Error::Mesh(format!(
                    "probe on node {} component {} is not a prescribed component",
                    mesh.node_ids[p.0],
                    p.1.label()
                )));
            }
        }
        Ok(())
    }

    pub fn value_of(&self, node: usize, component: Component) -> Option<f64> {
        self.dirichlet
            .iter()
            .find(|d| d.node == node && d.component == component)
            .map(|d| d.value)
    }
}

/// Global DOF numbering. Every node owns two consecutive indices; for a
/// cracked element the two indices of its center node carry
/// `(zeta_n, zeta_t)` instead of a displacement.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    node_count: usize,
    centers: Vec<usize>,
    cracked: Vec<bool>,
}

pub fn build_dof_map(mesh: &Mesh, crack_flags: &[bool]) -> DofMap {
    assert_eq!(crack_flags.len(), mesh.element_count());
    DofMap {
        node_count: mesh.node_count(),
        centers: mesh.elements.iter().map(|c| c[CENTER]).collect(),
        cracked: crack_flags.to_vec(),
    }
}

impl DofMap {
    pub fn len(&self) -> usize {
        2 * self.node_count
    }

    pub fn is_empty(&self) -> bool {
        self.node_count == 0
    }

    pub fn dof(&self, node: usize, component: Component) -> usize {
        2 * node + component.index()
    }

    pub fn is_cracked(&self, element: usize) -> bool {
        self.cracked[element]
    }

    pub fn cracked(&self) -> &[bool] {
        &self.cracked
    }

    pub fn set_cracked(&mut self, element: usize, cracked: bool) {
        self.cracked[element] = cracked;
    }

    /// The 18 global indices of an element in pseudo-Q9 order.
    pub fn element_dofs(&self, conn: &[usize; 9]) -> [usize; 18] {
        let mut out = [0; 18];
        for (k, &n) in conn.iter().enumerate() {
            out[2 * k] = 2 * n;
            out[2 * k + 1] = 2 * n + 1;
        }
        out
    }

    /// Indices holding `(zeta_n, zeta_t)` when the element is cracked.
    pub fn opening_dofs(&self, element: usize) -> Option<[usize; 2]> {
        self.cracked[element].then(|| {
            let c = self.centers[element];
            [2 * c, 2 * c + 1]
        })
    }
}
