use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linear elastic steel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    #[serde(rename = "E_MPa")]
    pub elastic_modulus: f64,
    pub nu: f64,
    #[serde(rename = "rho_kg_m3")]
    pub density: f64,
    #[serde(rename = "sigma_y_MPa")]
    pub yield_strength: f64,
}

impl Default for MaterialSpec {
    /// S355 offshore steel.
    fn default() -> Self {
        MaterialSpec {
            elastic_modulus: 210_000.0,
            nu: 0.3,
            density: 7850.0,
            yield_strength: 355.0,
        }
    }
}

impl MaterialSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.elastic_modulus > 0.0) {
            return Err(Error::invalid("E_MPa", "must be positive"));
        }
        if !(self.nu > 0.0 && self.nu < 0.5) {
            return Err(Error::invalid("nu", "must lie in (0, 0.5)"));
        }
        if !(self.density > 0.0) {
            return Err(Error::invalid("rho_kg_m3", "must be positive"));
        }
        if !(self.yield_strength > 0.0) {
            return Err(Error::invalid("sigma_y_MPa", "must be positive"));
        }
        Ok(())
    }

    pub fn shear_modulus(&self) -> f64 {
        self.elastic_modulus / (2.0 * (1.0 + self.nu))
    }

    /// Density in tonnes per mm³.
    pub fn density_t_per_mm3(&self) -> f64 {
        self.density * 1e-3 * 1e-9
    }

    /// Weight density in N/mm³ for gravity `g` (m/s²).
    pub fn weight_density(&self, g: f64) -> f64 {
        self.density * g * 1e-9
    }
}
