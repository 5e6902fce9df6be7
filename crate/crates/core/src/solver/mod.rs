//! Displacement-controlled Newton-Raphson driver.
//!
//! The tangent is the symmetric operator built from the cracked-element
//! tangent, while the residual of a cracked element uses the constant
//! center stress. Convergence is judged on the change of the total elastic
//! energy between iterations.

mod linear;

use nalgebra::{Matrix3, Vector2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cohesive::{self, CohesiveParams, CohesiveState};
use crate::crack::{
    crack_orientation, maybe_revert, phi_rk, search_and_activate, update_orientation, CandidateScore,
    SearchContext,
};
use crate::element::{Basis, CrackFrame, ElementGeometry, ElementIntegrals, ElementMatrix, ElementVector, GaussRule};
use crate::error::{Error, Result};
use crate::material::Elasticity;
use crate::mesh::{build_dof_map, BoundarySet, DofMap, Mesh, CENTER};

pub use linear::{conjugate_gradient, DirectSolver, LinearSolverKind, LowerPattern};

/// Energies below this magnitude count as an unloaded structure, for which
/// the relative energy change is taken as zero.
pub const ENERGY_FLOOR: f64 = 1e-30;

const NOT_FREE: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Relative change of total energy below which an iteration converges.
    pub energy_tol: f64,
    /// Iteration cap of one load step, shared by the initial solve and the
    /// re-solves after each activation.
    pub max_iterations: usize,
    /// Activation cap of one load step.
    pub max_activations: usize,
    pub linear: LinearSolverKind,
    /// Relative residual target of the iterative solver.
    pub cg_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            energy_tol: 1e-5,
            max_iterations: 50,
            max_activations: 100,
            linear: LinearSolverKind::Direct,
            cg_tol: 1e-10,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.energy_tol > 0.0) {
            return Err(Error::Config(format!("energy_tol must be positive, got {}", self.energy_tol)));
        }
        if self.max_iterations < 2 {
            return Err(Error::Config("max_iterations must be at least 2".into()));
        }
        if self.max_activations < 1 {
            return Err(Error::Config("max_activations must be at least 1".into()));
        }
        if !(self.cg_tol > 0.0 && self.cg_tol < 1.0) {
            return Err(Error::Config(format!("cg_tol must lie in (0, 1), got {}", self.cg_tol)));
        }
        Ok(())
    }
}

/// Everything that defines a boundary value problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub mesh: Mesh,
    pub boundary: BoundarySet,
    pub elasticity: Elasticity,
    pub cohesive: CohesiveParams,
    /// `(element, tensile strength)` pairs replacing the global strength.
    pub strength_overrides: Vec<(usize, f64)>,
}

/// Primary unknowns and per-element crack data.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    /// Global DOF vector; cracked center slots hold `(zeta_n, zeta_t)`.
    pub u: Vec<f64>,
    /// Committed history per element (`zeta_mx`, `t_mx`); openings live in `u`.
    pub history: Vec<CohesiveState>,
    pub frames: Vec<Option<CrackFrame>>,
    /// Current load parameter (prescribed displacement magnitude).
    pub d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub d: f64,
    /// Summed probe reaction per unit thickness.
    pub reaction: f64,
    pub energy: f64,
    pub iterations: usize,
    pub new_cracks: Vec<usize>,
    /// Largest relative energy change accepted as converged within the step.
    pub energy_ratio: f64,
}

/// Result of one Newton-Raphson iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonIterate {
    /// Increment on the free DOFs.
    pub increment: Vec<f64>,
    pub energy: f64,
    /// Relative energy change against the previous iterate, if any.
    pub ratio: Option<f64>,
    pub converged: bool,
}

/// Assembled system on the free DOFs.
#[derive(Debug, Clone)]
pub struct Assembly {
    /// Lower triangle of the tangent, laid out by [`Solver::pattern`].
    pub tangent: Vec<f64>,
    /// Internal force on all global DOFs.
    pub internal_force: Vec<f64>,
}

struct ElementEval {
    tangent: ElementMatrix,
    force: ElementVector,
}

pub struct Solver {
    problem: Problem,
    config: SolverConfig,
    c: Matrix3<f64>,
    params: Vec<CohesiveParams>,
    geoms: Vec<ElementGeometry>,
    integrals: Vec<ElementIntegrals>,
    k_intact: Vec<ElementMatrix>,
    element_dofs: Vec<[usize; 18]>,
    adjacency: Vec<Vec<usize>>,
    dofs: DofMap,
    /// Prescribed value per unit load parameter, per global DOF.
    prescribed: Vec<Option<f64>>,
    free: Vec<usize>,
    pattern: LowerPattern,
    /// Per element: `(local row, local col, value index)` of its lower entries.
    scatter: Vec<Vec<(u8, u8, u32)>>,
    direct: Option<DirectSolver>,
    state: SystemState,
    step: usize,
    last_energy: Option<f64>,
}

impl std::fmt::Debug for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Solver")
            .field("elements", &self.geoms.len())
            .field("free_dofs", &self.free.len())
            .field("step", &self.step)
            .finish()
    }
}

impl Solver {
    pub fn new(problem: Problem, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        problem.boundary.validate(&problem.mesh)?;
        let mesh = &problem.mesh;
        let ne = mesh.element_count();
        let c = problem.elasticity.matrix();
        let mut params = vec![problem.cohesive; ne];
        for &(e, f_t) in &problem.strength_overrides {
            if e >= ne {
                return Err(Error::Config(format!("strength override on unknown element {e}")));
            }
            params[e] = CohesiveParams::new(f_t, problem.cohesive.fracture_energy())?;
        }
        let rule = GaussRule::default();
        let geoms: Vec<ElementGeometry> = (0..ne).map(|e| mesh.geometry(e)).collect();
        let integrals = geoms
            .par_iter()
            .map(|g| ElementIntegrals::new(g, &rule))
            .collect::<Result<Vec<_>>>()?;
        let k_intact = integrals.par_iter().map(|i| i.stiffness_intact(&c)).collect();
        let dofs = build_dof_map(mesh, &vec![false; ne]);
        let element_dofs: Vec<[usize; 18]> = mesh.elements.iter().map(|conn| dofs.element_dofs(conn)).collect();

        let mut prescribed = vec![None; dofs.len()];
        for bc in &problem.boundary.dirichlet {
            prescribed[dofs.dof(bc.node, bc.component)] = Some(bc.value);
        }
        let mut free_index = vec![NOT_FREE; dofs.len()];
        let mut free = Vec::new();
        for (g, p) in prescribed.iter().enumerate() {
            if p.is_none() {
                free_index[g] = free.len();
                free.push(g);
            }
        }

        let mut entries = Vec::new();
        for ed in &element_dofs {
            for &gi in ed {
                for &gj in ed {
                    let (fi, fj) = (free_index[gi], free_index[gj]);
                    if fi != NOT_FREE && fj != NOT_FREE && fi >= fj {
                        entries.push((fi, fj));
                    }
                }
            }
        }
        let pattern = LowerPattern::from_entries(free.len(), entries);
        let scatter = element_dofs
            .iter()
            .map(|ed| {
                let mut list = Vec::new();
                for a in 0..18 {
                    for b in 0..18 {
                        let (fi, fj) = (free_index[ed[a]], free_index[ed[b]]);
                        if fi != NOT_FREE && fj != NOT_FREE && fi >= fj {
                            let idx = pattern.index_of(fi, fj).expect("entry is in the pattern");
                            list.push((a as u8, b as u8, idx as u32));
                        }
                    }
                }
                list
            })
            .collect();
        let direct = match config.linear {
            LinearSolverKind::Direct => Some(DirectSolver::new(&pattern)?),
            LinearSolverKind::Cg => None,
        };
        let state = SystemState {
            u: vec![0.0; dofs.len()],
            history: vec![CohesiveState::default(); ne],
            frames: vec![None; ne],
            d: 0.0,
        };
        let adjacency = mesh.edge_adjacency();
        Ok(Self {
            problem,
            config,
            c,
            params,
            geoms,
            integrals,
            k_intact,
            element_dofs,
            adjacency,
            dofs,
            prescribed,
            free,
            pattern,
            scatter,
            direct,
            state,
            step: 0,
            last_energy: None,
        })
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn state(&self) -> &SystemState {
        &self.state
    }

    pub fn dof_map(&self) -> &DofMap {
        &self.dofs
    }

    pub fn pattern(&self) -> &LowerPattern {
        &self.pattern
    }

    /// Global indices of the unknowns, in system order.
    pub fn free_dofs(&self) -> &[usize] {
        &self.free
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn elasticity_matrix(&self) -> &Matrix3<f64> {
        &self.c
    }

    pub fn element_params(&self, e: usize) -> &CohesiveParams {
        &self.params[e]
    }

    pub fn element_integrals(&self, e: usize) -> &ElementIntegrals {
        &self.integrals[e]
    }

    pub fn element_dofs(&self, e: usize) -> &[usize; 18] {
        &self.element_dofs[e]
    }

    pub fn cracked(&self) -> &[bool] {
        self.dofs.cracked()
    }

    /// Overwrites the free unknowns; used by tests and restarts.
    pub fn set_free_values(&mut self, values: &[f64]) {
        for (k, &g) in self.free.iter().enumerate() {
            self.state.u[g] = values[k];
        }
        self.refresh_frames();
        self.last_energy = None;
    }

    pub fn element_vector(&self, e: usize) -> ElementVector {
        ElementVector::from_fn(|k, _| self.state.u[self.element_dofs[e][k]])
    }

    /// Trial cohesive state: committed history with the current openings.
    pub fn cohesive_state(&self, e: usize) -> Option<CohesiveState> {
        self.dofs.opening_dofs(e).map(|[a, b]| CohesiveState {
            zeta_n: self.state.u[a],
            zeta_t: self.state.u[b],
            ..self.state.history[e]
        })
    }

    /// Total strain at the element center, excluding the opening.
    pub fn center_total_strain(&self, e: usize) -> nalgebra::Vector3<f64> {
        let basis = if self.dofs.is_cracked(e) { Basis::Q8 } else { Basis::Q9 };
        self.integrals[e].center_total_strain(basis, &self.element_vector(e))
    }

    /// Sets the prescribed DOFs for load parameter `d`.
    pub fn impose(&mut self, d: f64) {
        self.state.d = d;
        for (g, p) in self.prescribed.iter().enumerate() {
            if let Some(v) = p {
                self.state.u[g] = v * d;
            }
        }
        self.last_energy = None;
    }

    fn evaluate(&self, e: usize) -> Result<ElementEval> {
        let u = self.element_vector(e);
        match (self.cohesive_state(e), self.state.frames[e]) {
            (Some(cs), Some(frame)) => {
                let p = &self.params[e];
                let branch = cs.branch();
                let (tn, tt) = cohesive::traction_components(&cs, p, branch)?;
                let d = cohesive::tangent(&cs, p, branch)?;
                let ints = &self.integrals[e];
                Ok(ElementEval {
                    tangent: ints.tangent_cracked(&frame, &self.c, &d),
                    force: ints.residual_cracked(&frame, &self.c, &u, Vector2::new(tn, tt)),
                })
            }
            _ => Ok(ElementEval {
                tangent: self.k_intact[e],
                force: self.k_intact[e] * u,
            }),
        }
    }

    /// Tangent on the free DOFs and internal force on all DOFs.
    pub fn assemble(&self) -> Result<Assembly> {
        let evals = (0..self.geoms.len())
            .into_par_iter()
            .map(|e| self.evaluate(e))
            .collect::<Result<Vec<_>>>()?;
        let mut tangent = vec![0.0; self.pattern.nnz()];
        let mut internal_force = vec![0.0; self.dofs.len()];
        for (e, ev) in evals.iter().enumerate() {
            for &(a, b, idx) in &self.scatter[e] {
                tangent[idx as usize] += ev.tangent[(a as usize, b as usize)];
            }
            for (k, &g) in self.element_dofs[e].iter().enumerate() {
                internal_force[g] += ev.force[k];
            }
        }
        Ok(Assembly {
            tangent,
            internal_force,
        })
    }

    /// Dense copy of the assembled tangent on the free DOFs.
    pub fn dense_tangent(&self, assembly: &Assembly) -> nalgebra::DMatrix<f64> {
        let n = self.pattern.n;
        let mut k = nalgebra::DMatrix::zeros(n, n);
        for c in 0..n {
            for idx in self.pattern.col_ptr[c]..self.pattern.col_ptr[c + 1] {
                let r = self.pattern.row_idx[idx];
                k[(r, c)] = assembly.tangent[idx];
                k[(c, r)] = assembly.tangent[idx];
            }
        }
        k
    }

    /// Sum of element energies; cracked elements use the center strain.
    pub fn total_energy(&self) -> f64 {
        let energies: Vec<f64> = (0..self.geoms.len())
            .into_par_iter()
            .map(|e| {
                let u = self.element_vector(e);
                match self.state.frames[e] {
                    Some(frame) if self.dofs.is_cracked(e) => self.integrals[e].energy_cracked(&frame, &self.c, &u),
                    _ => 0.5 * u.dot(&(self.k_intact[e] * u)),
                }
            })
            .collect();
        energies.iter().sum()
    }

    /// Reaction force summed over the probe DOFs, per unit thickness. Each
    /// entry is signed so that pushing along the prescribed direction counts
    /// as positive.
    pub fn probe_reaction(&self, internal_force: &[f64]) -> f64 {
        let total: f64 = self
            .problem
            .boundary
            .probe
            .iter()
            .map(|&(node, comp)| {
                let g = self.dofs.dof(node, comp);
                let sign = match self.prescribed[g] {
                    Some(v) if v < 0.0 => -1.0,
                    _ => 1.0,
                };
                sign * internal_force[g]
            })
            .sum();
        total / self.problem.mesh.thickness
    }

    fn refresh_frames(&mut self) {
        let updated: Vec<(usize, CrackFrame)> = (0..self.geoms.len())
            .into_par_iter()
            .filter_map(|e| {
                let prev = self.state.frames[e]?;
                let eps = self.integrals[e].center_total_strain(Basis::Q8, &self.element_vector(e));
                Some((e, update_orientation(&self.geoms[e], &prev, &eps)))
            })
            .collect();
        for (e, f) in updated {
            self.state.frames[e] = Some(f);
        }
    }

    /// Norm of the internal force on the free DOFs over the norm of the
    /// reactions on the prescribed ones; zero at exact equilibrium.
    pub fn out_of_balance(&self) -> Result<f64> {
        let f = self.assemble()?.internal_force;
        let free: f64 = self.free.iter().map(|&g| f[g] * f[g]).sum();
        let fixed: f64 = (0..f.len()).filter(|&g| self.prescribed[g].is_some()).map(|g| f[g] * f[g]).sum();
        Ok(if fixed > 0.0 { (free / fixed).sqrt() } else { free.sqrt() })
    }

    /// One iteration: solve the tangent system for the out-of-balance force,
    /// update the unknowns and crack frames, and test the energy criterion.
    pub fn newton_step(&mut self, iteration: usize) -> Result<NewtonIterate> {
        let asm = self.assemble()?;
        let mut rhs: Vec<f64> = self.free.iter().map(|&g| -asm.internal_force[g]).collect();
        match self.config.linear {
            LinearSolverKind::Direct => {
                let solver = self.direct.as_mut().expect("direct solver is set up");
                solver.solve(&self.pattern, &asm.tangent, &mut rhs)?;
            }
            LinearSolverKind::Cg => {
                let mut x = vec![0.0; rhs.len()];
                conjugate_gradient(&self.pattern, &asm.tangent, &rhs, &mut x, self.config.cg_tol, 20 * rhs.len().max(100))?;
                rhs = x;
            }
        }
        for (k, &g) in self.free.iter().enumerate() {
            self.state.u[g] += rhs[k];
        }
        self.refresh_frames();
        let energy = self.total_energy();
        if !energy.is_finite() {
            return Err(Error::LinearSolver("total energy became non-finite".into()));
        }
        let ratio = self.last_energy.map(|prev| {
            if energy.abs() < ENERGY_FLOOR {
                0.0
            } else {
                (energy - prev).abs() / energy.abs()
            }
        });
        self.last_energy = Some(energy);
        let converged = iteration >= 2 && ratio.is_some_and(|r| r < self.config.energy_tol);
        Ok(NewtonIterate {
            increment: rhs,
            energy,
            ratio,
            converged,
        })
    }

    /// Iterates to convergence within `max_iterations`; returns the
    /// iteration count and the final ratio.
    pub fn equilibrate(&mut self) -> Result<(usize, f64)> {
        self.equilibrate_within(self.config.max_iterations)
    }

    /// Same as [`Solver::equilibrate`] with an explicit iteration budget; the
    /// load step shares one budget between its initial solve and every
    /// re-solve after an activation.
    fn equilibrate_within(&mut self, budget: usize) -> Result<(usize, f64)> {
        self.last_energy = None;
        let mut last_ratio = f64::NAN;
        for it in 1..=budget {
            let step = self.newton_step(it)?;
            log::trace!("iteration {it}: energy {:.6e} ratio {:?}", step.energy, step.ratio);
            if let Some(r) = step.ratio {
                last_ratio = r;
            }
            if step.converged {
                if log::log_enabled!(log::Level::Debug) {
                    log::debug!("converged after {it} iterations, out-of-balance ratio {:.3e}", self.out_of_balance()?);
                }
                return Ok((it, last_ratio));
            }
        }
        Err(Error::StepFailure {
            step: self.step,
            reason: format!(
                "no convergence within {} iterations (last energy ratio {last_ratio:e}, {} cracked elements)",
                self.config.max_iterations,
                self.cracked().iter().filter(|c| **c).count()
            ),
        })
    }

    /// Stress excess of every uncracked element on the current state.
    pub fn candidate_scores(&self) -> Vec<Option<CandidateScore>> {
        (0..self.geoms.len())
            .into_par_iter()
            .map(|e| {
                if self.dofs.is_cracked(e) {
                    return None;
                }
                let eps = self.center_total_strain(e);
                let o = crack_orientation(&eps).ok()?;
                let phi = phi_rk(&self.c, &eps, &o.normal, self.params[e].tensile_strength());
                (phi > 0.0).then_some(CandidateScore {
                    element: e,
                    phi_rk: phi,
                    normal: o.normal,
                })
            })
            .collect()
    }

    /// Converts an intact element into a cracked one with zero opening.
    pub fn activate(&mut self, e: usize, normal: Vector2<f64>) -> Result<bool> {
        let frame = match CrackFrame::for_element(&self.geoms[e], normal) {
            Ok(f) => f,
            Err(err) => {
                log::warn!("element {e}: cannot build crack frame: {err}");
                return Ok(false);
            }
        };
        self.dofs.set_cracked(e, true);
        let [a, b] = self.dofs.opening_dofs(e).expect("element was just cracked");
        self.state.u[a] = 0.0;
        self.state.u[b] = 0.0;
        self.state.frames[e] = Some(frame);
        self.state.history[e] = CohesiveState::default();
        Ok(true)
    }

    /// Returns the center DOFs of an element to displacements,
    /// interpolated from the outer nodes.
    fn revert(&mut self, e: usize) {
        self.dofs.set_cracked(e, false);
        self.state.frames[e] = None;
        self.state.history[e] = CohesiveState::default();
        let conn = self.problem.mesh.elements[e];
        for comp in 0..2 {
            let corners: f64 = conn[..4].iter().map(|&n| self.state.u[2 * n + comp]).sum();
            let mids: f64 = conn[4..8].iter().map(|&n| self.state.u[2 * n + comp]).sum();
            self.state.u[2 * conn[CENTER] + comp] = 0.5 * mids - 0.25 * corners;
        }
    }

    /// Imposes `d + delta_d`, equilibrates, runs the crack search and
    /// commits the cohesive histories.
    pub fn run_load_step(&mut self, delta_d: f64) -> Result<StepRecord> {
        self.step += 1;
        let step = self.step;
        self.impose(self.state.d + delta_d);
        let wrap = |e: Error| match e {
            Error::StepFailure { .. } => e,
            other => Error::StepFailure {
                step,
                reason: other.to_string(),
            },
        };
        let (iterations, ratio) = self.equilibrate().map_err(wrap)?;
        let max_activations = self.config.max_activations;
        let mut ctx = StepContext {
            solver: self,
            iterations,
            max_ratio: ratio,
        };
        let new_cracks = search_and_activate(&mut ctx, max_activations).map_err(wrap)?;
        let (iterations, max_ratio) = (ctx.iterations, ctx.max_ratio);

        for e in 0..self.geoms.len() {
            if let Some(cs) = self.cohesive_state(e) {
                let neighbour_cracked = self.adjacency[e].iter().any(|&n| self.dofs.is_cracked(n));
                if maybe_revert(&cs, neighbour_cracked) {
                    log::debug!("element {e} returned its center DOFs");
                    self.revert(e);
                }
            }
        }
        for e in 0..self.geoms.len() {
            if let Some(cs) = self.cohesive_state(e) {
                self.state.history[e] = cohesive::commit(&cs, &self.params[e]);
            }
        }
        let asm = self.assemble().map_err(wrap)?;
        let record = StepRecord {
            step,
            d: self.state.d,
            reaction: self.probe_reaction(&asm.internal_force),
            energy: self.total_energy(),
            iterations,
            new_cracks,
            energy_ratio: max_ratio,
        };
        log::debug!(
            "step {step}: d = {:.6e}, F = {:.6e}, iterations {}, new cracks {:?}",
            record.d,
            record.reaction,
            record.iterations,
            record.new_cracks
        );
        Ok(record)
    }

    /// Runs `steps` increments of `delta_d`, stopping early once the load
    /// has dropped below `stop_ratio` times its peak (after the peak).
    pub fn run(
        &mut self,
        delta_d: f64,
        steps: usize,
        stop_ratio: Option<f64>,
        mut on_step: impl FnMut(&Solver, &StepRecord) -> Result<()>,
    ) -> Result<Vec<StepRecord>> {
        let mut records = Vec::with_capacity(steps);
        let mut peak = f64::NEG_INFINITY;
        for _ in 0..steps {
            let rec = self.run_load_step(delta_d)?;
            on_step(self, &rec)?;
            peak = peak.max(rec.reaction);
            let drop = stop_ratio.is_some_and(|r| peak > 0.0 && rec.reaction < r * peak);
            records.push(rec);
            if drop {
                log::info!("load fell below the stop ratio after the peak; ending run");
                break;
            }
        }
        Ok(records)
    }
}

struct StepContext<'a> {
    solver: &'a mut Solver,
    iterations: usize,
    max_ratio: f64,
}

impl SearchContext for StepContext<'_> {
    fn adjacency(&self) -> &[Vec<usize>] {
        &self.solver.adjacency
    }

    fn cracked(&self) -> &[bool] {
        self.solver.dofs.cracked()
    }

    fn scores(&self) -> Vec<Option<CandidateScore>> {
        self.solver.candidate_scores()
    }

    fn activate(&mut self, candidate: &CandidateScore) -> Result<bool> {
        log::debug!(
            "activating element {} (phi_rk = {:.4e})",
            candidate.element,
            candidate.phi_rk
        );
        self.solver.activate(candidate.element, candidate.normal)
    }

    fn equilibrate(&mut self) -> Result<()> {
        let budget = self.solver.config.max_iterations.saturating_sub(self.iterations);
        let (it, ratio) = self.solver.equilibrate_within(budget)?;
        self.iterations += it;
        self.max_ratio = self.max_ratio.max(ratio);
        Ok(())
    }
}
