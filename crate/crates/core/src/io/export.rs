//! Result files: force-displacement CSV, per-step log, legacy VTK and the
//! run summary. Number formatting is fixed so that identical runs produce
//! identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::cohesive::CohesiveState;
use crate::error::Result;
use crate::mesh::{Mesh, CENTER};
use crate::solver::{Solver, StepRecord};

pub const CURVE_HEADER: &str = "d_mm,F_kN_per_mm";
pub const STEPS_HEADER: &str = "step,d_mm,F_kN_per_mm,energy_Nmm,iterations,new_cracks,energy_ratio";
/// VTK cell type of the nine-node biquadratic quadrilateral.
pub const VTK_BIQUADRATIC_QUAD: u8 = 28;

/// Load per unit thickness in kN/mm from the solver's N/mm.
pub fn force_kn_per_mm(reaction: f64) -> f64 {
    reaction / 1000.0
}

/// Splitting load of an intact disk per unit thickness, `pi D f_t / 2`.
pub fn disk_reference_load(diameter: f64, tensile_strength: f64) -> f64 {
    std::f64::consts::PI * diameter * tensile_strength / 2.0
}

/// First point of maximum load, as `(index, d, F)`.
pub fn peak(series: &[(f64, f64)]) -> Option<(usize, f64, f64)> {
    series
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64, f64)>, (i, &(d, f))| match best {
            Some(b) if b.2 >= f => Some(b),
            _ => Some((i, d, f)),
        })
}

/// `(d, F)` pairs in mm and N/mm.
pub fn series(records: &[StepRecord]) -> Vec<(f64, f64)> {
    records.iter().map(|r| (r.d, r.reaction)).collect()
}

pub fn curve_csv(records: &[StepRecord]) -> String {
    let mut s = String::from(CURVE_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(s, "{:.9e},{:.9e}", r.d, force_kn_per_mm(r.reaction));
    }
    s
}

pub fn steps_csv(records: &[StepRecord]) -> String {
    let mut s = String::from(STEPS_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{:.9e},{:.9e},{:.9e},{},{},{:.3e}",
            r.step,
            r.d,
            force_kn_per_mm(r.reaction),
            r.energy,
            r.iterations,
            r.new_cracks.len(),
            r.energy_ratio
        );
    }
    s
}

/// Nodal displacements; a cracked element's center slot holds openings, so
/// its center displacement is interpolated from the outer nodes.
pub fn nodal_displacements(solver: &Solver) -> Vec<[f64; 2]> {
    let u = &solver.state().u;
    let mesh = &solver.problem().mesh;
    let mut out: Vec<[f64; 2]> = (0..mesh.node_count()).map(|n| [u[2 * n], u[2 * n + 1]]).collect();
    for (e, conn) in mesh.elements.iter().enumerate() {
        if solver.dof_map().is_cracked(e) {
            for comp in 0..2 {
                let corners: f64 = conn[..4].iter().map(|&n| u[2 * n + comp]).sum();
                let mids: f64 = conn[4..8].iter().map(|&n| u[2 * n + comp]).sum();
                out[conn[CENTER]][comp] = 0.5 * mids - 0.25 * corners;
            }
        }
    }
    out
}

/// Per-element crack data for export.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CellCrack {
    pub zeta_n: f64,
    pub zeta_t: f64,
    pub zeta_eq: f64,
    pub normal: [f64; 2],
    pub cracked: bool,
}

pub fn cell_cracks(solver: &Solver) -> Vec<CellCrack> {
    let state = solver.state();
    (0..solver.problem().mesh.element_count())
        .map(|e| match (solver.cohesive_state(e), state.frames[e]) {
            (Some(cs), Some(f)) => crack_cell(&cs, [f.normal.x, f.normal.y]),
            _ => CellCrack::default(),
        })
        .collect()
}

fn crack_cell(cs: &CohesiveState, normal: [f64; 2]) -> CellCrack {
    CellCrack {
        zeta_n: cs.zeta_n,
        zeta_t: cs.zeta_t,
        zeta_eq: cs.zeta_eq(),
        normal,
        cracked: true,
    }
}

/// Legacy ASCII VTK unstructured grid. Points are placed at
/// `x + deform_scale * u`; the displacement field itself is unscaled.
pub fn vtk_document(
    mesh: &Mesh,
    displacements: &[[f64; 2]],
    cracks: &[CellCrack],
    title: &str,
    deform_scale: f64,
) -> String {
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\n");
    // the title line must fit on one line
    let title: String = title.chars().filter(|c| *c != '\n').take(250).collect();
    let _ = writeln!(s, "{title}");
    s.push_str("ASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(s, "POINTS {} double", mesh.node_count());
    for (p, u) in mesh.nodes.iter().zip(displacements) {
        let _ = writeln!(
            s,
            "{:.9e} {:.9e} 0",
            p.x + deform_scale * u[0],
            p.y + deform_scale * u[1]
        );
    }
    let ne = mesh.element_count();
    let _ = writeln!(s, "CELLS {} {}", ne, ne * 10);
    for conn in &mesh.elements {
        s.push('9');
        for n in conn {
            let _ = write!(s, " {n}");
        }
        s.push('\n');
    }
    let _ = writeln!(s, "CELL_TYPES {ne}");
    for _ in 0..ne {
        let _ = writeln!(s, "{VTK_BIQUADRATIC_QUAD}");
    }
    let _ = writeln!(s, "POINT_DATA {}", mesh.node_count());
    s.push_str("VECTORS displacement double\n");
    for u in displacements {
        let _ = writeln!(s, "{:.9e} {:.9e} 0", u[0], u[1]);
    }
    let _ = writeln!(s, "CELL_DATA {ne}");
    for (name, get) in [
        ("zeta_n", (|c: &CellCrack| c.zeta_n) as fn(&CellCrack) -> f64),
        ("zeta_t", |c| c.zeta_t),
        ("zeta_eq", |c| c.zeta_eq),
    ] {
        let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for c in cracks {
            let _ = writeln!(s, "{:.9e}", get(c));
        }
    }
    s.push_str("SCALARS cracked int 1\nLOOKUP_TABLE default\n");
    for c in cracks {
        let _ = writeln!(s, "{}", u8::from(c.cracked));
    }
    s.push_str("VECTORS normal double\n");
    for c in cracks {
        let _ = writeln!(s, "{:.9e} {:.9e} 0", c.normal[0], c.normal[1]);
    }
    s
}

pub fn solver_vtk(solver: &Solver, title: &str, deform_scale: f64) -> String {
    vtk_document(
        &solver.problem().mesh,
        &nodal_displacements(solver),
        &cell_cracks(solver),
        title,
        deform_scale,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakLoad {
    pub step: usize,
    pub d_mm: f64,
    pub force_kn_per_mm: f64,
}

/// Machine-readable account of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub name: String,
    pub elements: usize,
    pub nodes: usize,
    pub steps_requested: usize,
    pub steps_completed: usize,
    pub peak: Option<PeakLoad>,
    /// `pi D f_t / 2` in N/mm for disk meshes.
    pub reference_load: Option<f64>,
    /// Peak load over the reference load.
    pub normalized_peak: Option<f64>,
    pub iterations: Vec<usize>,
    pub median_iterations: Option<f64>,
    pub max_energy_ratio: Option<f64>,
    pub cracked_elements: usize,
    /// Activated elements in order, as element ids.
    pub activation_order: Vec<u64>,
    pub failure: Option<String>,
}

pub fn median(values: &[usize]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_unstable();
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2] as f64
    } else {
        (v[n / 2 - 1] + v[n / 2]) as f64 / 2.0
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peak_picks_first_maximum() {
        let s = [(0.0, 0.0), (1.0, 3.0), (2.0, 5.0), (3.0, 5.0), (4.0, 1.0)];
        assert_eq!(peak(&s), Some((2, 2.0, 5.0)));
        assert_eq!(peak(&[]), None);
    }

    #[test]
    fn reference_load_of_the_disk() {
        let f = disk_reference_load(100.0, 3.81);
        assert_eq!(format!("{f:.2}"), "598.47");
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3, 1, 2]), Some(2.0));
        assert_eq!(median(&[4, 1, 2, 3]), Some(2.5));
        assert_eq!(median(&[]), None);
    }
}
