//! Run orchestration: mesh, solver, exports.

use std::path::{Path, PathBuf};

use super::config::{parse_config_with, RunConfig};
use super::export::{
    curve_csv, disk_reference_load, force_kn_per_mm, median, peak, series, solver_vtk, steps_csv, write_text,
    PeakLoad, RunSummary,
};
use super::plot::write_curve_png;
use crate::error::{Error, Result};
use crate::mesh::write_mesh;
use crate::solver::{Solver, StepRecord};

/// Command-line adjustments applied on top of a config document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub output_dir: Option<PathBuf>,
    pub vtk_every: Option<usize>,
    pub deform_scale: Option<f64>,
}

impl RunOptions {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(d) = &self.output_dir {
            cfg.output.directory = d.clone();
        }
        if let Some(n) = self.vtk_every {
            cfg.output.vtk_every = n;
        }
        if let Some(s) = self.deform_scale {
            cfg.output.deform_scale = s;
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub records: Vec<StepRecord>,
    pub summary: RunSummary,
    pub output_dir: PathBuf,
}

impl RunOutcome {
    pub fn succeeded(&self) -> bool {
        self.summary.failure.is_none()
    }
}

/// Runs a validated config. `base` resolves a relative mesh path and
/// `progress` sees every completed step.
///
/// A failing load step ends the run; the completed steps are still
/// exported and the failure is reported in the summary.
pub fn run_config(
    cfg: &RunConfig,
    base: &Path,
    mut progress: impl FnMut(&Solver, &StepRecord),
) -> Result<RunOutcome> {
    cfg.validate()?;
    let problem = cfg.problem(base).map_err(|e| e.at_stage("mesh"))?;
    let out = cfg.output.directory.clone();
    std::fs::create_dir_all(&out).map_err(|e| Error::from(e).at_stage("output"))?;
    let export = |e: Error| e.at_stage("export");
    write_text(&out.join("config.toml"), &cfg.to_toml_string()?).map_err(export)?;
    write_text(&out.join("mesh.txt"), &write_mesh(&problem.mesh, &problem.boundary)).map_err(export)?;

    let mut solver = Solver::new(problem, cfg.solver.clone()).map_err(|e| e.at_stage("setup"))?;
    let name = cfg.name.clone().unwrap_or_else(|| "run".into());
    // d and F are printed exactly as in curve.csv
    let vtk = |solver: &Solver, step: usize, reaction: f64| -> Result<()> {
        let title = format!(
            "{name} step {step} d_mm={:.9e} F_kN_per_mm={:.9e} (units N, mm, MPa)",
            solver.state().d,
            force_kn_per_mm(reaction)
        );
        write_text(
            &out.join(format!("step_{step:05}.vtk")),
            &solver_vtk(solver, &title, cfg.output.deform_scale),
        )
    };
    if cfg.output.vtk_every > 0 {
        vtk(&solver, 0, 0.0).map_err(export)?;
    }

    let mut records: Vec<StepRecord> = Vec::with_capacity(cfg.load.steps);
    let mut failure = None;
    let mut peak_load = f64::NEG_INFINITY;
    let mut cracked_elements = 0;
    for _ in 0..cfg.load.steps {
        let rec = match solver.run_load_step(cfg.load.increment) {
            Ok(r) => r,
            Err(e) => {
                log::error!("{e}");
                failure = Some(e.at_stage("solve").to_string());
                break;
            }
        };
        progress(&solver, &rec);
        cracked_elements = solver.cracked().iter().filter(|c| **c).count();
        if cfg.output.vtk_every > 0 && rec.step % cfg.output.vtk_every == 0 {
            vtk(&solver, rec.step, rec.reaction).map_err(export)?;
        }
        peak_load = peak_load.max(rec.reaction);
        let stop = cfg
            .load
            .stop_ratio
            .is_some_and(|r| peak_load > 0.0 && rec.reaction < r * peak_load);
        records.push(rec);
        if stop {
            log::info!("load fell below the stop ratio; ending the run");
            break;
        }
    }
    // after a failure the solver holds an unconverged state, not the last step
    if let (Some(last), None) = (records.last(), &failure) {
        if cfg.output.vtk_every > 0 && last.step % cfg.output.vtk_every != 0 {
            vtk(&solver, last.step, last.reaction).map_err(export)?;
        }
    }

    let summary = summarize(cfg, &solver, &records, cracked_elements, failure);
    if cfg.output.csv {
        write_text(&out.join("curve.csv"), &curve_csv(&records)).map_err(export)?;
        write_text(&out.join("steps.csv"), &steps_csv(&records)).map_err(export)?;
    }
    if cfg.output.plots {
        write_curve_png(&out.join("curve.png"), &series(&records)).map_err(export)?;
    }
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    write_text(&out.join("summary.json"), &(json + "\n")).map_err(export)?;
    Ok(RunOutcome {
        records,
        summary,
        output_dir: out,
    })
}

fn summarize(
    cfg: &RunConfig,
    solver: &Solver,
    records: &[StepRecord],
    cracked_elements: usize,
    failure: Option<String>,
) -> RunSummary {
    let mesh = &solver.problem().mesh;
    let s = series(records);
    let pk = peak(&s).map(|(i, d, f)| PeakLoad {
        step: records[i].step,
        d_mm: d,
        force_kn_per_mm: force_kn_per_mm(f),
    });
    let reference_load = cfg
        .mesh
        .disk_diameter()
        .map(|d| disk_reference_load(d, cfg.material.tensile_strength));
    let normalized_peak = match (peak(&s), reference_load) {
        (Some((_, _, f)), Some(r)) => Some(f / r),
        _ => None,
    };
    let iterations: Vec<usize> = records.iter().map(|r| r.iterations).collect();
    RunSummary {
        name: cfg.name.clone().unwrap_or_else(|| "run".into()),
        elements: mesh.element_count(),
        nodes: mesh.node_count(),
        steps_requested: cfg.load.steps,
        steps_completed: records.len(),
        peak: pk,
        reference_load,
        normalized_peak,
        median_iterations: median(&iterations),
        iterations,
        max_energy_ratio: records.iter().map(|r| r.energy_ratio).reduce(f64::max),
        cracked_elements,
        activation_order: records
            .iter()
            .flat_map(|r| r.new_cracks.iter().map(|&e| mesh.element_ids[e]))
            .collect(),
        failure,
    }
}

const L_PANEL: &str = include_str!("../../benchmarks/l-panel.toml");
const DISK_SINGLE: &str = include_str!("../../benchmarks/disk-single.toml");
const DISK_DOUBLE: &str = include_str!("../../benchmarks/disk-double.toml");

/// Accepted benchmark names. A disk name may carry the slot inclination,
/// e.g. `disk-single-45`.
pub const BENCHMARKS: &[&str] = &[
    "l-panel",
    "disk-single",
    "disk-single-30",
    "disk-single-45",
    "disk-single-60",
    "disk-double",
    "disk-double-0",
    "disk-double-30",
    "disk-double-60",
    "disk-double-90",
];

/// Preset document for a benchmark name plus the overrides the name implies.
pub fn benchmark_document(name: &str) -> Result<(&'static str, Vec<String>)> {
    let unknown = || {
        Error::Config(format!(
            "unknown benchmark '{name}' (expected one of: {})",
            BENCHMARKS.join(", ")
        ))
    };
    if name == "l-panel" {
        return Ok((L_PANEL, vec![]));
    }
    let (doc, rest) = if let Some(rest) = name.strip_prefix("disk-single") {
        (DISK_SINGLE, rest)
    } else if let Some(rest) = name.strip_prefix("disk-double") {
        (DISK_DOUBLE, rest)
    } else {
        return Err(unknown());
    };
    if rest.is_empty() {
        return Ok((doc, vec![]));
    }
    let alpha: f64 = rest
        .strip_prefix('-')
        .and_then(|a| a.parse().ok())
        .ok_or_else(unknown)?;
    if !(0.0..=90.0).contains(&alpha) {
        return Err(unknown());
    }
    Ok((
        doc,
        vec![
            format!("mesh.alpha={alpha}"),
            format!("name=\"{name}\""),
            format!("output.directory=\"output/{name}\""),
        ],
    ))
}

/// Benchmark config with user overrides applied last.
pub fn benchmark_config(name: &str, overrides: &[String]) -> Result<RunConfig> {
    let (doc, mut all) = benchmark_document(name)?;
    all.extend(overrides.iter().cloned());
    parse_config_with(doc, &all)
}
