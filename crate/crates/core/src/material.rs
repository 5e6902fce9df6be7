//! Linear elastic bulk behaviour in Voigt form `(eps_x, eps_y, gamma_xy)`.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PlaneAssumption {
    #[default]
    PlaneStress,
    PlaneStrain,
}

/// Isotropic elasticity, `E` in MPa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Elasticity {
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub assumption: PlaneAssumption,
}

impl Elasticity {
    pub fn plane_stress(youngs_modulus: f64, poisson_ratio: f64) -> Result<Self> {
        Self::new(youngs_modulus, poisson_ratio, PlaneAssumption::PlaneStress)
    }

    pub fn new(
        youngs_modulus: f64,
        poisson_ratio: f64,
        assumption: PlaneAssumption,
    ) -> Result<Self> {
        if !(youngs_modulus > 0.0) {
            return Err(Error::Config(format!(
                "youngs_modulus must be positive, got {youngs_modulus}"
            )));
        }
        if !(0.0..0.5).contains(&poisson_ratio) {
            return Err(Error::Config(format!(
                "poisson_ratio must lie in [0, 0.5), got {poisson_ratio}"
            )));
        }
        Ok(Self {
            youngs_modulus,
            poisson_ratio,
            assumption,
        })
    }

    /// The 3x3 matrix mapping engineering Voigt strain to stress.
    pub fn matrix(&self) -> Matrix3<f64> {
        let e = self.youngs_modulus;
        let nu = self.poisson_ratio;
        match self.assumption {
            PlaneAssumption::PlaneStress => {
                let f = e / (1.0 - nu * nu);
                Matrix3::new(
                    f,
                    f * nu,
                    0.0,
                    f * nu,
                    f,
                    0.0,
                    0.0,
                    0.0,
                    f * (1.0 - nu) / 2.0,
                )
            }
            PlaneAssumption::PlaneStrain => {
                let f = e / ((1.0 + nu) * (1.0 - 2.0 * nu));
                Matrix3::new(
                    f * (1.0 - nu),
                    f * nu,
                    0.0,
                    f * nu,
                    f * (1.0 - nu),
                    0.0,
                    0.0,
                    0.0,
                    f * (1.0 - 2.0 * nu) / 2.0,
                )
            }
        }
    }
}
