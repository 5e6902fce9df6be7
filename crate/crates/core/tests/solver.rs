mod common;

use gcem::crack::phi_rk;
use gcem::io::{benchmark_config, RunConfig};
use gcem::solver::{Solver, SolverConfig};
use nalgebra::{DMatrix, DVector, Vector2};
use std::path::Path;

fn small_l_panel() -> RunConfig {
    benchmark_config("l-panel", &["mesh.h=50".into(), "load.steps=16".into()]).unwrap()
}

fn solver_for(cfg: &RunConfig) -> Solver {
    Solver::new(cfg.problem(Path::new(".")).unwrap(), cfg.solver.clone()).unwrap()
}

#[test]
fn unit_uniaxial_strain_energy_is_one_half() {
    let mut s = Solver::new(common::tension_problem(1.0, 0.0, 1e9, 1.0), SolverConfig::default()).unwrap();
    s.impose(1.0);
    s.equilibrate().unwrap();
    assert!((s.total_energy() - 0.5).abs() < 1e-12);
    let free: Vec<f64> = s.free_dofs().iter().map(|&g| 2.0 * s.state().u[g]).collect();
    s.impose(2.0);
    s.set_free_values(&free);
    assert!((s.total_energy() - 2.0).abs() < 1e-12);
}

#[test]
fn global_rows_of_a_cracked_element_match_the_element_residual() {
    let mut s = Solver::new(common::tension_problem(1000.0, 0.0, 3.0, 0.1), SolverConfig::default()).unwrap();
    s.run_load_step(3.5e-3).unwrap();
    assert!(s.cracked()[0]);
    s.impose(4e-3);
    s.newton_step(1).unwrap();
    let asm = s.assemble().unwrap();
    let cs = s.cohesive_state(0).unwrap();
    let p = *s.element_params(0);
    let (tn, tt) = gcem::cohesive::traction_components(&cs, &p, cs.branch()).unwrap();
    let frame = s.state().frames[0].unwrap();
    let local = s.element_integrals(0).residual_cracked(&frame, s.elasticity_matrix(), &s.element_vector(0), Vector2::new(tn, tt));
    for (k, &g) in s.element_dofs(0).iter().enumerate() {
        assert!((asm.internal_force[g] - local[k]).abs() < 1e-12 * local.norm());
    }
}

#[test]
fn increment_matches_a_dense_solve() {
    let mut s = Solver::new(common::tension_problem(1000.0, 0.2, 3.0, 0.1), SolverConfig::default()).unwrap();
    s.run_load_step(3.5e-3).unwrap();
    s.impose(5e-3);
    let asm = s.assemble().unwrap();
    let k = s.dense_tangent(&asm);
    let rhs = DVector::from_iterator(s.free_dofs().len(), s.free_dofs().iter().map(|&g| -asm.internal_force[g]));
    let oracle = k.lu().solve(&rhs).unwrap();
    let step = s.newton_step(1).unwrap();
    let got = DVector::from_vec(step.increment);
    assert!((got - &oracle).norm() < 1e-10 * oracle.norm());
}

#[test]
fn assembled_tangent_is_symmetric_through_cracking() {
    let cfg = small_l_panel();
    let mut s = solver_for(&cfg);
    for _ in 0..cfg.load.steps {
        s.run_load_step(cfg.load.increment).unwrap();
        let k: DMatrix<f64> = s.dense_tangent(&s.assemble().unwrap());
        assert!((&k - k.transpose()).amax() <= 1e-12 * k.norm());
    }
    assert!(s.cracked().iter().any(|c| *c), "the sample run should crack");
}

#[test]
fn reaction_work_matches_energy_before_cracking() {
    let cfg = small_l_panel();
    let mut s = solver_for(&cfg);
    let mut work = 0.0;
    let mut prev = 0.0;
    for _ in 0..3 {
        let r = s.run_load_step(cfg.load.increment).unwrap();
        assert!(r.new_cracks.is_empty());
        work += 0.5 * (prev + r.reaction) * cfg.load.increment;
        prev = r.reaction;
    }
    let energy = s.total_energy() / s.problem().mesh.thickness;
    assert!((work - energy).abs() < 1e-6 * energy, "{work} vs {energy}");
}

#[test]
fn uncracked_elements_stay_below_strength_after_each_step() {
    let cfg = small_l_panel();
    let mut s = solver_for(&cfg);
    for _ in 0..cfg.load.steps {
        s.run_load_step(cfg.load.increment).unwrap();
        for (e, score) in s.candidate_scores().iter().enumerate() {
            assert!(score.is_none(), "element {e} left above strength");
        }
        for e in (0..s.cracked().len()).filter(|&e| !s.cracked()[e]) {
            let eps = s.center_total_strain(e);
            if let Ok(o) = gcem::crack::crack_orientation(&eps) {
                let f_t = s.element_params(e).tensile_strength();
                assert!(phi_rk(s.elasticity_matrix(), &eps, &o.normal, f_t) <= 0.0);
            }
        }
    }
}

#[test]
fn identical_runs_give_identical_records() {
    let cfg = small_l_panel();
    let run = || {
        let mut s = solver_for(&cfg);
        s.run(cfg.load.increment, cfg.load.steps, None, |_, _| Ok(())).unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.reaction.to_bits(), y.reaction.to_bits());
        assert_eq!(x.energy.to_bits(), y.energy.to_bits());
    }
}

#[test]
fn elastic_step_needs_two_iterations() {
    let cfg = small_l_panel();
    let mut s = solver_for(&cfg);
    let r = s.run_load_step(1e-4).unwrap();
    assert_eq!(r.iterations, 2);
    assert!(r.new_cracks.is_empty());
}

#[test]
fn iteration_cap_reports_the_step() {
    let cfg = small_l_panel();
    let mut s = Solver::new(
        cfg.problem(Path::new(".")).unwrap(),
        SolverConfig { max_iterations: 3, ..SolverConfig::default() },
    )
    .unwrap();
    let err = s.run_load_step(0.3).unwrap_err().to_string();
    assert!(err.contains("step 1"), "{err}");
}
