//! Run configuration documents (TOML).
//!
//! ```toml
//! seed = 1
//!
//! [mesh]
//! kind = "l-panel"        # l-panel | disk | file
//! h = 20.0
//!
//! [material]
//! youngs_modulus = 25850.0
//! poisson_ratio = 0.18
//! tensile_strength = 2.7
//! fracture_energy = 0.065
//!
//! [load]
//! increment = 0.01
//! steps = 80
//! ```
//!
//! Units are N, mm and MPa throughout. Unknown keys are rejected.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cohesive::CohesiveParams;
use crate::element::Basis;
use crate::error::{Error, Result};
use crate::material::{Elasticity, PlaneAssumption};
use crate::mesh::{load_mesh, BoundarySet, DiskSpec, LPanelSpec, Mesh, SlotLayout};
use crate::solver::{Problem, SolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Label used in output headers.
    #[serde(default)]
    pub name: Option<String>,
    /// Jitter seed handed to mesh generators.
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub mesh: MeshSpec,
    pub material: MaterialConfig,
    pub load: LoadConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_seed() -> u64 {
    1
}

/// Mesh source: one of the generators or a mesh document on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MeshSpec {
    LPanel(LPanelParams),
    Disk(DiskParams),
    File(FileParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LPanelParams {
    pub h: f64,
    pub size: f64,
    pub thickness: f64,
    /// `[x_min, x_max]` of the loaded stretch of the upper leg's lower edge.
    pub load_patch: [f64; 2],
    pub jitter: bool,
}

impl Default for LPanelParams {
    fn default() -> Self {
        let s = LPanelSpec::default();
        Self {
            h: s.h_target,
            size: s.size,
            thickness: s.thickness,
            load_patch: [s.load_patch.0, s.load_patch.1],
            jitter: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiskParams {
    pub layout: SlotLayout,
    /// Slot inclination, degrees.
    pub alpha: f64,
    pub h: f64,
    pub diameter: f64,
    pub thickness: f64,
    /// Defaults depend on the layout when absent.
    pub slot_length: Option<f64>,
    pub slot_width: f64,
    pub slot_offset: Option<f64>,
    pub contact_width: f64,
    pub jitter: bool,
}

impl Default for DiskParams {
    fn default() -> Self {
        let s = DiskSpec::new(SlotLayout::Single, 0.0, 5.0);
        Self {
            layout: s.layout,
            alpha: s.alpha_deg,
            h: s.h_target,
            diameter: s.diameter,
            thickness: s.thickness,
            slot_length: None,
            slot_width: s.slot_width,
            slot_offset: None,
            contact_width: s.contact_width,
            jitter: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileParams {
    /// Relative paths are taken from the directory of the config document.
    pub path: PathBuf,
}

impl MeshSpec {
    pub fn l_panel_spec(p: &LPanelParams, seed: u64) -> LPanelSpec {
        LPanelSpec {
            size: p.size,
            thickness: p.thickness,
            h_target: p.h,
            load_patch: (p.load_patch[0], p.load_patch[1]),
            seed: p.jitter.then_some(seed),
        }
    }

    pub fn disk_spec(p: &DiskParams, seed: u64) -> DiskSpec {
        let mut s = DiskSpec::new(p.layout, p.alpha, p.h);
        s.diameter = p.diameter;
        s.thickness = p.thickness;
        if let Some(l) = p.slot_length {
            s.slot_length = l;
        }
        s.slot_width = p.slot_width;
        if let Some(o) = p.slot_offset {
            s.slot_offset = o;
        }
        s.contact_width = p.contact_width;
        s.seed = p.jitter.then_some(seed);
        s
    }

    /// Builds the mesh; `base` resolves relative file paths.
    pub fn build(&self, seed: u64, base: &Path) -> Result<(Mesh, BoundarySet)> {
        match self {
            MeshSpec::LPanel(p) => Self::l_panel_spec(p, seed).generate(),
            MeshSpec::Disk(p) => Self::disk_spec(p, seed).generate(),
            MeshSpec::File(f) => {
                let path = base.join(&f.path);
                let text = std::fs::read_to_string(&path).map_err(|e| {
                    Error::Config(format!("cannot read mesh file {}: {e}", path.display()))
                })?;
                load_mesh(&text)
            }
        }
    }

    /// Diameter of a generated disk, used to normalise peak loads.
    pub fn disk_diameter(&self) -> Option<f64> {
        match self {
            MeshSpec::Disk(p) => Some(p.diameter),
            _ => None,
        }
    }
}

/// Generator spec of the form `kind:key=value,key=value`, e.g.
/// `l-panel:h=20` or `disk:layout=double,alpha=30,h=4`. The extra key
/// `seed` sets the jitter seed.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub mesh: MeshSpec,
    pub seed: u64,
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let kind = kind.trim();
        if !matches!(kind, "l-panel" | "disk") {
            return Err(Error::Config(format!(
                "unknown generator '{kind}' (expected l-panel or disk)"
            )));
        }
        let mut table = toml::Table::new();
        table.insert("kind".into(), toml::Value::String(kind.into()));
        let mut seed = default_seed();
        for item in rest.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let (key, raw) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value in generator spec, got '{item}'")))?;
            let value = parse_scalar(raw.trim());
            if key.trim() == "seed" {
                seed = value
                    .as_integer()
                    .and_then(|v| u64::try_from(v).ok())
                    .ok_or_else(|| Error::Config(format!("seed must be a non-negative integer, got '{raw}'")))?;
                continue;
            }
            table.insert(key.trim().into(), value);
        }
        let mesh = MeshSpec::deserialize(toml::Value::Table(table))
            .map_err(|e| Error::Config(format!("generator spec '{s}': {e}")))?;
        Ok(Self { mesh, seed })
    }
}

/// TOML scalar if the text parses as one, else a bare string.
fn parse_scalar(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match toml::from_str::<toml::Table>(&doc) {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    }
}

/// Axis-aligned box whose elements use their own tensile strength, e.g. a
/// stiff region under a load patch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrengthZone {
    pub min: [f64; 2],
    pub max: [f64; 2],
    pub tensile_strength: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub tensile_strength: f64,
    pub fracture_energy: f64,
    /// Replaces the thickness stored with the mesh.
    #[serde(default)]
    pub thickness: Option<f64>,
    #[serde(default)]
    pub plane: PlaneAssumption,
    #[serde(default)]
    pub strength_zones: Vec<StrengthZone>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadConfig {
    /// Prescribed displacement increment per step (mm).
    pub increment: f64,
    pub steps: usize,
    /// Ends the run once the load falls below this fraction of its peak.
    #[serde(default)]
    pub stop_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub csv: bool,
    /// Write a VTK file every N steps (and after the last step); 0 disables.
    pub vtk_every: usize,
    pub plots: bool,
    /// Scale applied to displacements when placing VTK points.
    pub deform_scale: f64,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("output"),
            csv: true,
            vtk_every: 0,
            plots: true,
            deform_scale: 1.0,
        }
    }
}

fn range_error(key: &str, value: f64, expected: &str) -> Error {
    Error::Config(format!("{key} = {value} is out of range ({expected})"))
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let m = &self.material;
        if !(m.youngs_modulus > 0.0 && m.youngs_modulus.is_finite()) {
            return Err(range_error("material.youngs_modulus", m.youngs_modulus, "must be > 0"));
        }
        if !(0.0..0.5).contains(&m.poisson_ratio) {
            return Err(range_error("material.poisson_ratio", m.poisson_ratio, "must lie in [0, 0.5)"));
        }
        if !(m.tensile_strength > 0.0 && m.tensile_strength.is_finite()) {
            return Err(range_error("material.tensile_strength", m.tensile_strength, "must be > 0"));
        }
        if !(m.fracture_energy > 0.0 && m.fracture_energy.is_finite()) {
            return Err(range_error("material.fracture_energy", m.fracture_energy, "must be > 0"));
        }
        if let Some(t) = m.thickness {
            if !(t > 0.0 && t.is_finite()) {
                return Err(range_error("material.thickness", t, "must be > 0"));
            }
        }
        for (i, z) in m.strength_zones.iter().enumerate() {
            if !(z.tensile_strength > 0.0 && z.tensile_strength.is_finite()) {
                return Err(range_error(
                    &format!("material.strength_zones[{i}].tensile_strength"),
                    z.tensile_strength,
                    "must be > 0",
                ));
            }
        }
        let l = &self.load;
        if !(l.increment != 0.0 && l.increment.is_finite()) {
            return Err(range_error("load.increment", l.increment, "must be nonzero"));
        }
        if l.steps < 1 {
            return Err(Error::Config("load.steps must be at least 1".into()));
        }
        if let Some(r) = l.stop_ratio {
            if !(r > 0.0 && r < 1.0) {
                return Err(range_error("load.stop_ratio", r, "must lie in (0, 1)"));
            }
        }
        if !(self.output.deform_scale.is_finite()) {
            return Err(range_error("output.deform_scale", self.output.deform_scale, "must be finite"));
        }
        self.solver
            .validate()
            .map_err(|e| Error::Config(format!("solver: {e}")))
    }

    pub fn elasticity(&self) -> Result<Elasticity> {
        let m = &self.material;
        Elasticity::new(m.youngs_modulus, m.poisson_ratio, m.plane)
    }

    pub fn cohesive(&self) -> Result<CohesiveParams> {
        CohesiveParams::new(self.material.tensile_strength, self.material.fracture_energy)
    }

    /// Builds mesh, boundary conditions and material; `base` resolves a
    /// relative mesh file path.
    pub fn problem(&self, base: &Path) -> Result<Problem> {
        let (mut mesh, boundary) = self.mesh.build(self.seed, base)?;
        if let Some(t) = self.material.thickness {
            mesh.thickness = t;
        }
        let strength_overrides = strength_overrides(&mesh, &self.material.strength_zones);
        Ok(Problem {
            mesh,
            boundary,
            elasticity: self.elasticity()?,
            cohesive: self.cohesive()?,
            strength_overrides,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(format!("cannot serialise config: {e}")))
    }
}

/// Elements whose center lies in a zone take that zone's strength; later
/// zones win.
pub fn strength_overrides(mesh: &Mesh, zones: &[StrengthZone]) -> Vec<(usize, f64)> {
    (0..mesh.element_count())
        .filter_map(|e| {
            let c = mesh.geometry(e).center(Basis::Q9);
            zones
                .iter()
                .rev()
                .find(|z| c.x >= z.min[0] && c.x <= z.max[0] && c.y >= z.min[1] && c.y <= z.max[1])
                .map(|z| (e, z.tensile_strength))
        })
        .collect()
}

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let value: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    config_from_table(value)
}

fn config_from_table(table: toml::Table) -> Result<RunConfig> {
    let cfg = RunConfig::deserialize(toml::Value::Table(table)).map_err(|e| Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Parses a document after applying `key.path=value` overrides.
pub fn parse_config_with(text: &str, overrides: &[String]) -> Result<RunConfig> {
    let mut table: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    config_from_table(table)
}

/// Sets a dotted key, creating intermediate tables as needed. The value is
/// read as a TOML value, falling back to a plain string.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{assignment}' is not of the form key=value")))?;
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("malformed override key '{key}'")));
    }
    let mut current = table;
    for part in &parts[..parts.len() - 1] {
        let entry = current
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        current = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override '{key}': '{part}' is not a table")))?;
    }
    current.insert(parts[parts.len() - 1].to_string(), parse_scalar(raw.trim()));
    Ok(())
}
