//! Mixed-mode exponential traction-separation law.
//!
//! The loading envelope is linear up to the threshold opening `zeta_0` and
//! decays exponentially afterwards, so that the area under the curve is the
//! fracture energy `G_f`. Unloading and reloading follow the secant to the
//! origin through the largest committed opening.

use nalgebra::Matrix2;

use crate::error::{Error, Result};

/// Ratio between the threshold fracture energy and `G_f`.
pub const THRESHOLD_ENERGY_RATIO: f64 = 1.0e-3;

/// `dT_{n,t} / dzeta_{n,t}`.
pub type TangentD = Matrix2<f64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CohesiveParams {
    f_t: f64,
    g_f: f64,
    g_f0: f64,
    zeta_0: f64,
}

impl CohesiveParams {
    pub fn new(tensile_strength: f64, fracture_energy: f64) -> Result<Self> {
        if !(tensile_strength > 0.0) || !tensile_strength.is_finite() {
            return Err(Error::Config(format!(
                "tensile_strength must be positive, got {tensile_strength}"
            )));
        }
        if !(fracture_energy > 0.0) || !fracture_energy.is_finite() {
            return Err(Error::Config(format!(
                "fracture_energy must be positive, got {fracture_energy}"
            )));
        }
        let g_f0 = THRESHOLD_ENERGY_RATIO * fracture_energy;
        Ok(Self {
            f_t: tensile_strength,
            g_f: fracture_energy,
            g_f0,
            zeta_0: 2.0 * g_f0 / tensile_strength,
        })
    }

    pub fn tensile_strength(&self) -> f64 {
        self.f_t
    }

    pub fn fracture_energy(&self) -> f64 {
        self.g_f
    }

    pub fn threshold_energy(&self) -> f64 {
        self.g_f0
    }

    pub fn threshold_opening(&self) -> f64 {
        self.zeta_0
    }

    /// Linear pre-peak branch `L_1`.
    pub fn elastic_branch(&self, zeta_eq: f64) -> f64 {
        self.f_t / self.zeta_0 * zeta_eq
    }

    /// Exponential softening branch `L_2`.
    pub fn softening_branch(&self, zeta_eq: f64) -> f64 {
        self.f_t * (-self.f_t * (zeta_eq - self.zeta_0) / (self.g_f - self.g_f0)).exp()
    }

    /// Loading envelope: `L_1` up to `zeta_0`, `L_2` beyond.
    pub fn envelope(&self, zeta_eq: f64) -> f64 {
        if zeta_eq <= self.zeta_0 {
            self.elastic_branch(zeta_eq)
        } else {
            self.softening_branch(zeta_eq)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Loading,
    Unloading,
}

/// Crack opening of one element together with its committed history.
///
/// `zeta_mx` and `t_mx` are zero until the first commit past `zeta_0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CohesiveState {
    pub zeta_n: f64,
    pub zeta_t: f64,
    pub zeta_mx: f64,
    pub t_mx: f64,
}

impl CohesiveState {
    pub fn with_openings(zeta_n: f64, zeta_t: f64) -> Self {
        Self {
            zeta_n,
            zeta_t,
            ..Self::default()
        }
    }

    pub fn zeta_eq(&self) -> f64 {
        equivalent_opening(self.zeta_n, self.zeta_t)
    }

    pub fn is_committed(&self) -> bool {
        self.zeta_mx > 0.0
    }

    /// Loading iff the current opening reaches the committed maximum; a
    /// virgin crack is always on the loading envelope.
    pub fn branch(&self) -> Branch {
        if !self.is_committed() || self.zeta_eq() >= self.zeta_mx {
            Branch::Loading
        } else {
            Branch::Unloading
        }
    }
}

pub fn equivalent_opening(zeta_n: f64, zeta_t: f64) -> f64 {
    zeta_n.hypot(zeta_t)
}

pub fn traction_eq(
    zeta_eq: f64,
    state: &CohesiveState,
    params: &CohesiveParams,
    branch: Branch,
) -> Result<f64> {
    match branch {
        Branch::Loading => Ok(params.envelope(zeta_eq)),
        Branch::Unloading => {
            if !state.is_committed() {
                return Err(Error::InvalidState(
                    "unloading branch requested without a committed opening history".into(),
                ));
            }
            Ok(state.t_mx / state.zeta_mx * zeta_eq)
        }
    }
}

/// `(T_n, T_t)`; exactly zero at zero opening.
pub fn traction_components(
    state: &CohesiveState,
    params: &CohesiveParams,
    branch: Branch,
) -> Result<(f64, f64)> {
    let zeta_eq = state.zeta_eq();
    let t_eq = traction_eq(zeta_eq, state, params, branch)?;
    if zeta_eq == 0.0 {
        return Ok((0.0, 0.0));
    }
    Ok((t_eq * state.zeta_n / zeta_eq, t_eq * state.zeta_t / zeta_eq))
}

pub fn tangent(state: &CohesiveState, params: &CohesiveParams, branch: Branch) -> Result<TangentD> {
    match branch {
        Branch::Unloading => {
            if !state.is_committed() {
                return Err(Error::InvalidState(
                    "unloading tangent requested without a committed opening history".into(),
                ));
            }
            Ok(TangentD::identity() * (state.t_mx / state.zeta_mx))
        }
        Branch::Loading => {
            let zeta_eq = state.zeta_eq();
            if zeta_eq <= params.zeta_0 {
                return Ok(TangentD::identity() * (params.f_t / params.zeta_0));
            }
            let (zn, zt) = (state.zeta_n, state.zeta_t);
            let t_eq = params.softening_branch(zeta_eq);
            let k = params.f_t / (params.g_f - params.g_f0);
            let off = zn * zt / zeta_eq + k * zn * zt;
            let m = TangentD::new(
                zn * zn / zeta_eq + k * zn * zn - zeta_eq,
                off,
                off,
                zt * zt / zeta_eq + k * zt * zt - zeta_eq,
            );
            Ok(m * (-t_eq / (zeta_eq * zeta_eq)))
        }
    }
}

/// End-of-step history update; the maximum opening never shrinks.
pub fn commit(state: &CohesiveState, params: &CohesiveParams) -> CohesiveState {
    let zeta_eq = state.zeta_eq();
    let mut next = *state;
    if zeta_eq > params.zeta_0 && zeta_eq > state.zeta_mx {
        next.zeta_mx = zeta_eq;
        next.t_mx = params.softening_branch(zeta_eq);
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> CohesiveParams {
        CohesiveParams::new(3.0, 0.1).unwrap()
    }

    #[test]
    fn derived_fields() {
        let p = params();
        assert_eq!(p.threshold_energy(), 0.001 * 0.1);
        assert_eq!(p.threshold_opening(), 2.0 * (0.001 * 0.1) / 3.0);
    }

    #[test]
    fn equivalent_opening_examples() {
        assert_eq!(equivalent_opening(0.0, 0.0), 0.0);
        assert!((equivalent_opening(3e-3, 4e-3) - 5e-3).abs() < 1e-18);
        assert_eq!(equivalent_opening(-2.5, 0.0), 2.5);
    }

    #[test]
    fn envelope_is_continuous_at_threshold() {
        let p = params();
        let z0 = p.threshold_opening();
        assert_eq!(p.softening_branch(z0), p.tensile_strength());
        assert!((p.elastic_branch(z0) - p.tensile_strength()).abs() < 1e-15);
        let s = CohesiveState::default();
        assert!((traction_eq(z0, &s, &p, Branch::Loading).unwrap() - 3.0).abs() < 1e-15);
        assert_eq!(traction_eq(0.0, &s, &p, Branch::Loading).unwrap(), 0.0);
    }

    #[test]
    fn softening_value() {
        // 3 * exp(-3 * (0.0333899 - 6.6667e-5) / 0.0999), evaluated by hand
        let p = params();
        let z = 0.0333899;
        let expected = 3.0 * (-3.0 * (z - 2.0e-4 / 3.0) / 0.0999_f64).exp();
        let got = traction_eq(z, &CohesiveState::default(), &p, Branch::Loading).unwrap();
        assert!((got - expected).abs() < 1e-14);
        // the exponent is -1.00069, so the value sits just under 3/e
        assert!((got - 1.102_868_586_150_138).abs() < 1e-12);
        assert!((got - 3.0 / std::f64::consts::E).abs() < 1e-3);
    }

    #[test]
    fn unloading_without_history_is_rejected() {
        let p = params();
        let s = CohesiveState::with_openings(1e-5, 0.0);
        assert!(matches!(
            traction_eq(1e-5, &s, &p, Branch::Unloading),
            Err(Error::InvalidState(_))
        ));
        assert!(tangent(&s, &p, Branch::Unloading).is_err());
    }

    #[test]
    fn components_at_zero_opening() {
        let p = params();
        let s = CohesiveState::default();
        assert_eq!(traction_components(&s, &p, Branch::Loading).unwrap(), (0.0, 0.0));
        let committed = CohesiveState {
            zeta_mx: 0.01,
            t_mx: 1.2,
            ..Default::default()
        };
        assert_eq!(
            traction_components(&committed, &p, Branch::Unloading).unwrap(),
            (0.0, 0.0)
        );
    }

    #[test]
    fn pure_mode_one_components() {
        let p = params();
        let s = CohesiveState::with_openings(0.01, 0.0);
        let (tn, tt) = traction_components(&s, &p, Branch::Loading).unwrap();
        assert_eq!(tn, p.envelope(0.01));
        assert_eq!(tt, 0.0);
    }

    #[test]
    fn tangent_branches() {
        let p = params();
        let below = CohesiveState::with_openings(1e-5, 0.0);
        let d = tangent(&below, &p, Branch::Loading).unwrap();
        assert_eq!(d, TangentD::identity() * (3.0 / p.threshold_opening()));
        let committed = CohesiveState {
            zeta_n: 0.001,
            zeta_t: 0.0,
            zeta_mx: 0.01,
            t_mx: 1.2,
        };
        let d = tangent(&committed, &p, Branch::Unloading).unwrap();
        assert!((d - TangentD::identity() * 120.0).abs().max() < 1e-12);
    }

    #[test]
    fn commit_rules() {
        let p = params();
        let z0 = p.threshold_opening();
        let s = CohesiveState::with_openings(0.5 * z0, 0.0);
        assert_eq!(commit(&s, &p), s);

        let s = CohesiveState::with_openings(2.0 * z0, 0.0);
        let c = commit(&s, &p);
        assert_eq!(c.zeta_mx, 2.0 * z0);
        assert_eq!(c.t_mx, p.softening_branch(2.0 * z0));

        let back = CohesiveState {
            zeta_n: 1.5 * z0,
            ..c
        };
        assert_eq!(commit(&back, &p), back);
        assert_eq!(back.branch(), Branch::Unloading);
    }

    #[test]
    fn branch_selection() {
        let p = params();
        let z0 = p.threshold_opening();
        assert_eq!(CohesiveState::with_openings(0.1 * z0, 0.0).branch(), Branch::Loading);
        let c = commit(&CohesiveState::with_openings(3.0 * z0, 0.0), &p);
        assert_eq!(c.branch(), Branch::Loading); // tie
        let reload = CohesiveState { zeta_n: 2.0 * z0, ..c };
        assert_eq!(reload.branch(), Branch::Unloading);
        // secant passes through the origin
        let zero = CohesiveState { zeta_n: 0.0, ..c };
        assert_eq!(traction_eq(0.0, &zero, &p, Branch::Unloading).unwrap(), 0.0);
    }
}
