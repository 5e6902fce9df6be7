use std::path::{Path, PathBuf};
use std::process::Command;

use gcem::io::export::{nodal_displacements, VTK_BIQUADRATIC_QUAD};
use gcem::io::{benchmark_config, parse_config, run_config, RunConfig, BENCHMARKS, CURVE_HEADER};
use gcem::mesh::load_mesh;
use gcem::solver::Solver;
use vtkio::model::{Attribute, DataSet, Piece, UnstructuredGridPiece};

fn small(dir: &Path, extra: &[&str]) -> RunConfig {
    let mut overrides: Vec<String> = vec!["mesh.h=50".into(), "load.steps=16".into(), "output.vtk_every=4".into()];
    overrides.extend(extra.iter().map(|s| s.to_string()));
    let mut cfg = benchmark_config("l-panel", &overrides).unwrap();
    cfg.output.directory = dir.to_path_buf();
    cfg
}

fn read_vtk(path: &Path) -> (String, UnstructuredGridPiece) {
    let vtk = vtkio::Vtk::import(path).unwrap();
    let DataSet::UnstructuredGrid { pieces, .. } = vtk.data else { panic!("not an unstructured grid") };
    let Piece::Inline(piece) = pieces.into_iter().next().unwrap() else { panic!("piece not inline") };
    (vtk.title, *piece)
}

fn cell_array(piece: &UnstructuredGridPiece, name: &str) -> Vec<f64> {
    piece
        .data
        .cell
        .iter()
        .find_map(|a| match a {
            Attribute::DataArray(d) if d.name == name => d.data.clone().cast_into::<f64>(),
            _ => None,
        })
        .unwrap_or_else(|| panic!("no cell array {name}"))
}

#[test]
fn vtk_files_reimport_with_the_mesh_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path(), &[]);
    let outcome = run_config(&cfg, Path::new("."), |_, _| {}).unwrap();
    assert!(outcome.succeeded());
    let (mesh, _) = load_mesh(&std::fs::read_to_string(dir.path().join("mesh.txt")).unwrap()).unwrap();

    let (_, first) = read_vtk(&dir.path().join("step_00000.vtk"));
    assert_eq!(first.num_points(), mesh.node_count());
    assert_eq!(first.cells.num_cells(), mesh.element_count());
    assert!(first.cells.types.iter().all(|t| *t as u8 == VTK_BIQUADRATIC_QUAD));
    for name in ["zeta_n", "zeta_t", "zeta_eq", "cracked"] {
        assert!(cell_array(&first, name).iter().all(|v| *v == 0.0), "{name}");
    }

    let (title, last) = read_vtk(&dir.path().join("step_00016.vtk"));
    assert_eq!(last.num_points(), mesh.node_count());
    assert!(cell_array(&last, "cracked").iter().any(|v| *v == 1.0));
    // the title carries the same numbers as the curve file
    let csv = std::fs::read_to_string(dir.path().join("curve.csv")).unwrap();
    let row = csv.lines().last().unwrap();
    let (d, f) = row.split_once(',').unwrap();
    assert!(title.contains(&format!("d_mm={d}")) && title.contains(&format!("F_kN_per_mm={f}")), "{title} / {row}");
}

#[test]
fn exports_are_byte_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        run_config(&small(dir.path(), &[]), Path::new("."), |_, _| {}).unwrap();
    }
    for file in ["curve.csv", "steps.csv", "summary.json", "step_00008.vtk", "mesh.txt", "curve.png"] {
        let read = |d: &tempfile::TempDir| std::fs::read(d.path().join(file)).unwrap();
        assert_eq!(read(&a), read(&b), "{file}");
    }
}

#[test]
fn elastic_curve_is_a_straight_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path(), &["load.increment=0.002", "load.steps=5"]);
    let outcome = run_config(&cfg, Path::new("."), |_, _| {}).unwrap();
    assert_eq!(outcome.summary.cracked_elements, 0);
    let csv = std::fs::read_to_string(dir.path().join("curve.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CURVE_HEADER));
    let pts: Vec<(f64, f64)> = lines
        .map(|l| {
            let (d, f) = l.split_once(',').unwrap();
            (d.parse().unwrap(), f.parse().unwrap())
        })
        .collect();
    assert_eq!(pts.len(), 5);
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r2 = sxy * sxy / (sxx * syy);
    assert!(r2 > 0.999999, "R^2 = {r2}");
}

#[test]
fn elastic_displacements_scale_with_the_load() {
    let cfg = benchmark_config("l-panel", &["mesh.h=50".into()]).unwrap();
    let solve = |d: f64| {
        let mut s = Solver::new(cfg.problem(Path::new(".")).unwrap(), cfg.solver.clone()).unwrap();
        s.run_load_step(d).unwrap();
        nodal_displacements(&s)
    };
    let (one, two) = (solve(1e-3), solve(2e-3));
    let scale = one.iter().map(|u| u[0].abs().max(u[1].abs())).fold(0.0, f64::max);
    for (a, b) in one.iter().zip(&two) {
        for k in 0..2 {
            assert!((2.0 * a[k] - b[k]).abs() < 1e-9 * scale);
        }
    }
}

#[test]
fn configs_round_trip_through_serialization() {
    for name in BENCHMARKS {
        let cfg = benchmark_config(name, &[]).unwrap();
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(parse_config(&text).unwrap(), cfg, "{name}");
    }
}

#[test]
fn out_of_range_values_name_the_key() {
    let doc = include_str!("../benchmarks/l-panel.toml").replace("poisson_ratio = 0.18", "poisson_ratio = 0.6");
    let err = parse_config(&doc).unwrap_err().to_string();
    assert!(err.contains("poisson_ratio"), "{err}");
}

#[test]
fn disk_summary_reports_the_normalized_load() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = benchmark_config("disk-single", &["mesh.h=10".into(), "load.steps=3".into()]).unwrap();
    cfg.output.directory = dir.path().to_path_buf();
    let outcome = run_config(&cfg, Path::new("."), |_, _| {}).unwrap();
    let s = &outcome.summary;
    assert_eq!(format!("{:.2}", s.reference_load.unwrap()), "598.47");
    let peak = s.peak.as_ref().unwrap();
    assert!((s.normalized_peak.unwrap() - peak.force_kn_per_mm * 1000.0 / 598.47).abs() < 1e-5);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(json["iterations"].as_array().unwrap().len(), 3);
    assert!(json["failure"].is_null());
}

fn gcem() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gcem"))
}

#[test]
fn cli_mesh_run_and_bench() {
    let dir = tempfile::tempdir().unwrap();
    let mesh_file = dir.path().join("panel.mesh");
    let status = gcem().args(["--quiet", "mesh", "l-panel:h=50", "-o"]).arg(&mesh_file).status().unwrap();
    assert!(status.success());
    let (mesh, bc) = load_mesh(&std::fs::read_to_string(&mesh_file).unwrap()).unwrap();
    assert_eq!(mesh.element_count(), 75);
    assert!(!bc.probe.is_empty());

    let config = dir.path().join("run.toml");
    let doc = include_str!("../benchmarks/l-panel.toml")
        .replace("kind = \"l-panel\"\nh = 20.0", "kind = \"file\"\npath = \"panel.mesh\"")
        .replace("steps = 80", "steps = 3");
    std::fs::write(&config, doc).unwrap();
    let out: PathBuf = dir.path().join("out");
    let status = gcem()
        .args(["--quiet", "--vtk-every", "1", "--deform-scale", "50", "--output-dir"])
        .arg(&out)
        .arg("run")
        .arg(&config)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.join("step_00003.vtk").exists());
    let csv = std::fs::read_to_string(out.join("curve.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);

    let bad = gcem().args(["--quiet", "bench", "plate"]).output().unwrap();
    assert!(!bad.status.success());
    let bad = gcem().args(["--quiet", "bench", "l-panel", "--set", "material.poisson_ratio=0.7"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("poisson_ratio"));
}
