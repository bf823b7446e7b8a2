//! Load cases and factored combinations.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::read_json;

/// One load case: concentrated loads at the reference point, an optional
/// wave, and optionally the structure's own weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadCase {
    pub name: String,
    #[serde(rename = "Fx_kN", default)]
    pub fx: f64,
    #[serde(rename = "Fy_kN", default)]
    pub fy: f64,
    #[serde(rename = "Fz_kN", default)]
    pub fz: f64,
    #[serde(rename = "Mx_kNm", default)]
    pub mx: f64,
    #[serde(rename = "My_kNm", default)]
    pub my: f64,
    #[serde(rename = "Mz_kNm", default)]
    pub mz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wave: Option<String>,
    #[serde(default)]
    pub self_weight: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Combination {
    pub name: String,
    pub factors: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub cases: Vec<LoadCase>,
    pub combinations: Vec<Combination>,
}

/// Factored loading ready for assembly. RP loads in N and N·mm.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct CombinedLoading {
    pub rp: [f64; 6],
    /// (wave name, factor)
    pub waves: Vec<(String, f64)>,
    pub self_weight: f64,
}

impl CombinedLoading {
    pub fn scaled(&self, s: f64) -> Self {
        CombinedLoading {
            rp: self.rp.map(|v| v * s),
            waves: self.waves.iter().map(|(n, f)| (n.clone(), f * s)).collect(),
            self_weight: self.self_weight * s,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rp.iter().all(|&v| v == 0.0)
            && self.waves.iter().all(|w| w.1 == 0.0)
            && self.self_weight == 0.0
    }
}

impl LoadFile {
    pub fn from_file(path: &Path) -> Result<Self> {
        let f: LoadFile = read_json(path)?;
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        for c in &self.cases {
            let vals = [c.fx, c.fy, c.fz, c.mx, c.my, c.mz];
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(&c.name, "load values must be finite"));
            }
        }
        for comb in &self.combinations {
            for (case, f) in &comb.factors {
                self.case(case)?;
                if !f.is_finite() {
                    return Err(Error::invalid(&comb.name, "factors must be finite"));
                }
            }
        }
        Ok(())
    }

    pub fn case(&self, name: &str) -> Result<&LoadCase> {
        self.cases
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownCase(name.to_string()))
    }

    pub fn combination(&self, name: &str) -> Result<&Combination> {
        self.combinations
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownCase(name.to_string()))
    }

    /// Scale and sum the named cases.
    pub fn combine(&self, factors: &BTreeMap<String, f64>) -> Result<CombinedLoading> {
        let mut out = CombinedLoading::default();
        for (name, &f) in factors {
            let c = self.case(name)?;
            let add = [c.fx * 1e3, c.fy * 1e3, c.fz * 1e3, c.mx * 1e6, c.my * 1e6, c.mz * 1e6];
            for (o, a) in out.rp.iter_mut().zip(add) {
                *o += f * a;
            }
            if let Some(w) = &c.wave {
                out.waves.push((w.clone(), f));
            }
            if c.self_weight {
                out.self_weight += f;
            }
        }
        Ok(out)
    }

    pub fn combine_named(&self, combination: &str) -> Result<CombinedLoading> {
        self.combine(&self.combination(combination)?.factors)
    }
}
