//! Plain-text mesh document.
//!
//! ```text
//! gcem-mesh v1
//! # comment lines and trailing comments start with '#'
//! thickness 100
//! nodes <N>
//! <id> <x> <y>
//! elements <M>
//! <id> <n1> .. <n9>
//! dirichlet <K>
//! <node id> <x|y> <value>
//! probe <K>
//! <node id> <x|y>
//! ```
//!
//! Dirichlet values are multiplied by the load parameter during a run.

use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::Point2;

use super::{BoundarySet, Component, Dirichlet, Mesh};
use crate::error::{Error, Result};

pub const MESH_HEADER: &str = "gcem-mesh v1";

pub fn write_mesh(mesh: &Mesh, bc: &BoundarySet) -> String {
    let mut s = String::new();
    let id = |n: usize| mesh.node_ids[n];
    writeln!(s, "{MESH_HEADER}").unwrap();
    writeln!(s, "# lengths in mm, forces in N").unwrap();
    writeln!(s, "thickness {}", mesh.thickness).unwrap();
    writeln!(s, "nodes {}", mesh.node_count()).unwrap();
    for (i, p) in mesh.nodes.iter().enumerate() {
        writeln!(s, "{} {} {}", mesh.node_ids[i], p.x, p.y).unwrap();
    }
    writeln!(s, "elements {}", mesh.element_count()).unwrap();
    for (e, conn) in mesh.elements.iter().enumerate() {
        write!(s, "{}", mesh.element_ids[e]).unwrap();
        for &n in conn {
            write!(s, " {}", id(n)).unwrap();
        }
        s.push('\n');
    }
    writeln!(s, "dirichlet {}", bc.dirichlet.len()).unwrap();
    for d in &bc.dirichlet {
        writeln!(s, "{} {} {}", id(d.node), d.component.label(), d.value).unwrap();
    }
    writeln!(s, "probe {}", bc.probe.len()).unwrap();
    for (n, c) in &bc.probe {
        writeln!(s, "{} {}", id(*n), c.label()).unwrap();
    }
    s
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    /// Next non-empty line with comments stripped, split into tokens.
    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, line) in self.inner.by_ref() {
            let body = line.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = body.split_whitespace().collect();
            if !tokens.is_empty() {
                return Some((i + 1, tokens));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        self.next_tokens()
            .ok_or_else(|| Error::Mesh(format!("unexpected end of document, expected {what}")))
    }

    fn section(&mut self, keyword: &str) -> Result<usize> {
        let (line, t) = self.expect(keyword)?;
        if t.len() != 2 || t[0] != keyword {
            return Err(err(line, format!("expected '{keyword} <count>'")));
        }
        parse(line, t[1])
    }
}

fn err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Mesh(format!("line {line}: {msg}"))
}

fn parse<T: std::str::FromStr>(line: usize, tok: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| err(line, format!("cannot parse '{tok}'")))
}

fn component(line: usize, tok: &str) -> Result<Component> {
    match tok {
        "x" | "X" => Ok(Component::X),
        "y" | "Y" => Ok(Component::Y),
        _ => Err(err(line, format!("unknown component '{tok}'"))),
    }
}

pub fn load_mesh(text: &str) -> Result<(Mesh, BoundarySet)> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let (line, header) = lines.expect("header")?;
    if header.join(" ") != MESH_HEADER {
        return Err(err(line, format!("expected header '{MESH_HEADER}'")));
    }
    let (line, t) = lines.expect("thickness")?;
    if t.len() != 2 || t[0] != "thickness" {
        return Err(err(line, "expected 'thickness <value>'"));
    }
    let thickness: f64 = parse(line, t[1])?;

    let n_nodes = lines.section("nodes")?;
    let mut node_ids = Vec::with_capacity(n_nodes);
    let mut nodes = Vec::with_capacity(n_nodes);
    let mut index = HashMap::with_capacity(n_nodes);
    for _ in 0..n_nodes {
        let (line, t) = lines.expect("node line")?;
        if t.len() != 3 {
            return Err(err(line, "node line needs 'id x y'"));
        }
        let id: u64 = parse(line, t[0])?;
        if index.insert(id, nodes.len()).is_some() {
            return Err(err(line, format!("duplicate node id {id}")));
        }
        node_ids.push(id);
        nodes.push(Point2::new(parse(line, t[1])?, parse(line, t[2])?));
    }
    let lookup = |line: usize, tok: &str| -> Result<usize> {
        let id: u64 = parse(line, tok)?;
        index
            .get(&id)
            .copied()
            .ok_or_else(|| err(line, format!("unknown node id {id}")))
    };

    let n_elems = lines.section("elements")?;
    let mut element_ids = Vec::with_capacity(n_elems);
    let mut elements = Vec::with_capacity(n_elems);
    for _ in 0..n_elems {
        let (line, t) = lines.expect("element line")?;
        if t.len() != 10 {
            return Err(err(line, "element line needs an id and nine node ids"));
        }
        element_ids.push(parse(line, t[0])?);
        let mut conn = [0usize; 9];
        for (k, slot) in conn.iter_mut().enumerate() {
            *slot = lookup(line, t[k + 1])?;
        }
        elements.push(conn);
    }

    let mut bc = BoundarySet::default();
    let n_dir = lines.section("dirichlet")?;
    for _ in 0..n_dir {
        let (line, t) = lines.expect("dirichlet line")?;
        if t.len() != 3 {
            return Err(err(line, "dirichlet line needs 'node component value'"));
        }
        bc.dirichlet.push(Dirichlet {
            node: lookup(line, t[0])?,
            component: component(line, t[1])?,
            value: parse(line, t[2])?,
        });
    }
    let n_probe = lines.section("probe")?;
    for _ in 0..n_probe {
        let (line, t) = lines.expect("probe line")?;
        if t.len() != 2 {
            return Err(err(line, "probe line needs 'node component'"));
        }
        bc.probe.push((lookup(line, t[0])?, component(line, t[1])?));
    }
    if let Some((line, _)) = lines.next_tokens() {
        return Err(err(line, "trailing content after probe section"));
    }

    let mesh = Mesh::new(node_ids, nodes, element_ids, elements, thickness)?;
    bc.validate(&mesh)?;
    Ok((mesh, bc))
}
