//! Crack initiation and propagation without crack tracking.
//!
//! Uncracked elements are split into the propagation region (sharing an edge
//! with a cracked element) and the root-search region (everything else). The
//! propagation region is always searched first for the element with the
//! largest positive stress excess `phi_rk`; the root-search region is only
//! consulted when the propagation region has no candidate.

use std::collections::BTreeSet;

use nalgebra::{Matrix3, Vector2, Vector3};

use crate::cohesive::CohesiveState;
use crate::element::{CrackFrame, ElementGeometry};
use crate::error::{Error, Result};

/// Major principal strain and its unit eigenvector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orientation {
    pub eps1: f64,
    pub normal: Vector2<f64>,
}

/// Crack normal from the total (non-enhanced) Voigt strain.
///
/// The sign is fixed so that `n_y >= 0`, and `n_x >= 0` when `n_y == 0`.
pub fn crack_orientation(eps_hat: &Vector3<f64>) -> Result<Orientation> {
    let (ex, ey, g) = (eps_hat[0], eps_hat[1], eps_hat[2]);
    let r = ((ex - ey) * (ex - ey) + g * g).sqrt();
    let scale = ex.abs().max(ey.abs()).max(g.abs());
    if !(r > f64::EPSILON * scale) {
        return Err(Error::DegenerateOrientation);
    }
    let eps1 = (ex + ey + r) / 2.0;
    let half_shear = g / 2.0;
    let v = if ex >= ey {
        Vector2::new((ex - ey + r) / 2.0, half_shear)
    } else {
        Vector2::new(half_shear, (ey - ex + r) / 2.0)
    };
    let mut n = v.normalize();
    if n.y < 0.0 || (n.y == 0.0 && n.x < 0.0) {
        n = -n;
    }
    Ok(Orientation { eps1, normal: n })
}

/// Normal stress on the tentative crack plane minus the tensile strength.
pub fn phi_rk(c: &Matrix3<f64>, eps_hat: &Vector3<f64>, normal: &Vector2<f64>, f_t: f64) -> f64 {
    let s = c * eps_hat;
    let n = normal;
    s[0] * n.x * n.x + s[1] * n.y * n.y + 2.0 * s[2] * n.x * n.y - f_t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Cracked,
    Propagation,
    RootSearch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionState {
    pub labels: Vec<Region>,
}

impl RegionState {
    pub fn members(&self, region: Region) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(move |(_, r)| **r == region)
            .map(|(i, _)| i)
    }
}

/// Labels every element; `adjacency[e]` lists the elements sharing an edge with `e`.
pub fn classify_regions(adjacency: &[Vec<usize>], cracked: &[bool]) -> RegionState {
    let labels = cracked
        .iter()
        .enumerate()
        .map(|(e, &is_cracked)| {
            if is_cracked {
                Region::Cracked
            } else if adjacency[e].iter().any(|&nb| cracked[nb]) {
                Region::Propagation
            } else {
                Region::RootSearch
            }
        })
        .collect();
    RegionState { labels }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateScore {
    pub element: usize,
    pub phi_rk: f64,
    pub normal: Vector2<f64>,
}

/// Largest positive score of the propagation region, else of the root-search
/// region. Ties go to the lowest element index.
pub fn select_candidate(
    regions: &RegionState,
    scores: &[Option<CandidateScore>],
) -> Option<CandidateScore> {
    [Region::Propagation, Region::RootSearch]
        .into_iter()
        .find_map(|region| {
            regions
                .members(region)
                .filter_map(|e| scores[e])
                .filter(|s| s.phi_rk > 0.0)
                .fold(None, |best: Option<CandidateScore>, s| match best {
                    Some(b) if b.phi_rk >= s.phi_rk => Some(b),
                    _ => Some(s),
                })
        })
}

/// What the activation loop needs from the solver.
pub trait SearchContext {
    fn adjacency(&self) -> &[Vec<usize>];
    fn cracked(&self) -> &[bool];
    /// Scores of uncracked elements on the current equilibrated state; `None`
    /// for cracked elements and for elements with no defined orientation.
    fn scores(&self) -> Vec<Option<CandidateScore>>;
    /// Converts the element; returns `false` when the element had to be skipped.
    fn activate(&mut self, candidate: &CandidateScore) -> Result<bool>;
    /// Re-establishes equilibrium after an activation.
    fn equilibrate(&mut self) -> Result<()>;
}

/// Activates one element at a time until no uncracked element has a positive
/// `phi_rk`. Returns the activated elements in order.
pub fn search_and_activate<C: SearchContext>(ctx: &mut C, max_activations: usize) -> Result<Vec<usize>> {
    let mut activated = Vec::new();
    let mut skipped = BTreeSet::new();
    loop {
        let regions = classify_regions(ctx.adjacency(), ctx.cracked());
        let mut scores = ctx.scores();
        for &e in &skipped {
            scores[e] = None;
        }
        let Some(candidate) = select_candidate(&regions, &scores) else {
            return Ok(activated);
        };
        if activated.len() >= max_activations {
            return Err(Error::ActivationLimit {
                limit: max_activations,
            });
        }
        if ctx.activate(&candidate)? {
            activated.push(candidate.element);
            ctx.equilibrate()?;
        } else {
            log::warn!("element {} skipped: no usable crack frame", candidate.element);
            skipped.insert(candidate.element);
        }
    }
}

/// Re-evaluates the crack frame from the current total strain; a degenerate
/// strain keeps the previous frame.
///
/// The new normal is kept on the same side as the previous one, so the
/// stored openings keep their meaning when the normal crosses `n_y = 0`.
pub fn update_orientation(
    geom: &ElementGeometry,
    previous: &CrackFrame,
    eps_hat: &Vector3<f64>,
) -> CrackFrame {
    match crack_orientation(eps_hat) {
        Ok(o) => {
            let n = if o.normal.dot(&previous.normal) < 0.0 {
                -o.normal
            } else {
                o.normal
            };
            CrackFrame::for_element(geom, n).unwrap_or(*previous)
        }
        Err(_) => *previous,
    }
}

/// The borrowed center DOFs are only returned when the opening is exactly
/// zero and no edge neighbour is cracked.
pub fn maybe_revert(state: &CohesiveState, has_cracked_neighbor: bool) -> bool {
    state.zeta_eq() == 0.0 && !has_cracked_neighbor
}
