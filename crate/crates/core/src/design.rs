//! Discrete design space: parameter grids, chromosomes and their decoding
//! into jacket models.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::JacketParams;
use crate::section::Diameter;

/// Relative tolerance for deciding that a value sits on a grid point.
const ON_GRID_TOL: f64 = 1e-9;

/// What a grid parameter controls.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Diameter(String),
    Thickness(String),
    BaseWidth,
}

impl Target {
    pub fn parse(label: &str) -> Result<Self> {
        if label == "BW" {
            return Ok(Target::BaseWidth);
        }
        match label.rsplit_once('-') {
            Some((g, "d")) if !g.is_empty() => Ok(Target::Diameter(g.to_string())),
            Some((g, "t")) if !g.is_empty() => Ok(Target::Thickness(g.to_string())),
            _ => Err(Error::invalid(
                label,
                "expected <group>-d, <group>-t or BW",
            )),
        }
    }
}

/// One discrete parameter: lower + k·interval for k = 0..count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParam {
    pub label: String,
    pub lower: f64,
    pub upper: f64,
    pub interval: f64,
}

impl GridParam {
    pub fn new(label: &str, lower: f64, upper: f64, interval: f64) -> Self {
        GridParam {
            label: label.to_string(),
            lower,
            upper,
            interval,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |r: &str| Err(Error::invalid(self.label.clone(), r));
        if !(self.interval > 0.0) || !self.lower.is_finite() || !self.upper.is_finite() {
            return bad("interval must be positive and limits finite");
        }
        if self.upper <= self.lower {
            return bad("upper limit must exceed lower limit");
        }
        let steps = (self.upper - self.lower) / self.interval;
        if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
            return bad("range is not a whole number of intervals");
        }
        Target::parse(&self.label)?;
        Ok(())
    }

    pub fn count(&self) -> usize {
        ((self.upper - self.lower) / self.interval).round() as usize + 1
    }

    pub fn value(&self, index: usize) -> f64 {
        self.lower + index as f64 * self.interval
    }

    /// Nearest grid index; halfway values go to the upper neighbour.
    pub fn nearest(&self, v: f64) -> usize {
        let k = ((v - self.lower) / self.interval + 0.5).floor();
        k.clamp(0.0, (self.count() - 1) as f64) as usize
    }

    /// Exact index of an on-grid value.
    pub fn index_of(&self, v: f64) -> Result<usize> {
        let k = self.nearest(v);
        let tol = ON_GRID_TOL * self.interval.max(v.abs());
        if (self.value(k) - v).abs() <= tol {
            return Ok(k);
        }
        let (below, above) = if v < self.lower {
            (None, Some(self.lower))
        } else if v > self.upper {
            (Some(self.upper), None)
        } else {
            let pos = (v - self.lower) / self.interval;
            (
                Some(self.value(pos.floor() as usize)),
                Some(self.value(pos.ceil() as usize)),
            )
        };
        Err(Error::OffGrid {
            param: self.label.clone(),
            value: v,
            below,
            above,
        })
    }
}

/// A chromosome: one grid index per parameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DesignVector(pub Vec<usize>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParameterGrid {
    pub params: Vec<GridParam>,
}

impl ParameterGrid {
    pub fn new(params: Vec<GridParam>) -> Result<Self> {
        let g = ParameterGrid { params };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for p in &self.params {
            p.validate()?;
            if !seen.insert(p.label.as_str()) {
                return Err(Error::invalid(p.label.clone(), "listed twice in the grid"));
            }
        }
        Ok(())
    }

    /// The grid shipped with the default optimisation settings.
    pub fn shipped() -> Self {
        crate::defaults::ga_config().grid
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.params.iter().map(|p| p.label.as_str()).collect()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.params.iter().position(|p| p.label == label)
    }

    /// Every target must exist in `baseline`; diameters must not address a
    /// tapered group.
    pub fn check_targets(&self, baseline: &JacketParams) -> Result<()> {
        for p in &self.params {
            match Target::parse(&p.label)? {
                Target::BaseWidth => {}
                Target::Diameter(g) => {
                    let s = baseline
                        .section(&g)
                        .ok_or_else(|| Error::MissingGroup(g.clone()))?;
                    if s.d_outer.is_tapered() {
                        return Err(Error::invalid(
                            p.label.clone(),
                            "tapered groups follow their neighbours and take no diameter parameter",
                        ));
                    }
                }
                Target::Thickness(g) => {
                    baseline
                        .section(&g)
                        .ok_or_else(|| Error::MissingGroup(g.clone()))?;
                }
            }
        }
        Ok(())
    }

    pub fn decode(&self, x: &DesignVector) -> Vec<f64> {
        self.params
            .iter()
            .zip(&x.0)
            .map(|(p, &i)| p.value(i))
            .collect()
    }

    /// Indices of on-grid physical values; off-grid values are errors.
    pub fn encode(&self, values: &[f64]) -> Result<DesignVector> {
        if values.len() != self.len() {
            return Err(Error::invalid(
                "design vector",
                format!("expected {} values, got {}", self.len(), values.len()),
            ));
        }
        self.params
            .iter()
            .zip(values)
            .map(|(p, &v)| p.index_of(v))
            .collect::<Result<Vec<_>>>()
            .map(DesignVector)
    }

    /// Nearest-grid indices of arbitrary values.
    pub fn snap(&self, values: &[f64]) -> DesignVector {
        DesignVector(
            self.params
                .iter()
                .zip(values)
                .map(|(p, &v)| p.nearest(v))
                .collect(),
        )
    }

    /// Current values of the grid parameters in a model.
    pub fn values_of(&self, params: &JacketParams) -> Result<Vec<f64>> {
        self.params
            .iter()
            .map(|p| match Target::parse(&p.label)? {
                Target::BaseWidth => Ok(params.geometry.base_width_mm),
                Target::Diameter(g) => params
                    .section(&g)
                    .map(|s| s.d_outer.at(0.0))
                    .ok_or(Error::MissingGroup(g)),
                Target::Thickness(g) => params
                    .section(&g)
                    .map(|s| s.t_wall)
                    .ok_or(Error::MissingGroup(g)),
            })
            .collect()
    }

    /// Values keyed by label.
    pub fn named(&self, values: &[f64]) -> BTreeMap<String, f64> {
        self.params
            .iter()
            .zip(values)
            .map(|(p, &v)| (p.label.clone(), v))
            .collect()
    }

    /// Clamp each thickness down to the largest grid value that keeps the
    /// section hollow (d > 2t). A no-op for grids where that always holds.
    pub fn repair(&self, x: &DesignVector, baseline: &JacketParams) -> DesignVector {
        let mut out = x.clone();
        let Ok(decoded) = self.apply_unchecked(baseline, &self.decode(x)) else {
            return out;
        };
        for (i, p) in self.params.iter().enumerate() {
            let Ok(Target::Thickness(g)) = Target::parse(&p.label) else {
                continue;
            };
            let Some(d) = decoded.section(&g).map(|s| s.d_outer.min()) else {
                continue;
            };
            while out.0[i] > 0 && d <= 2.0 * p.value(out.0[i]) {
                out.0[i] -= 1;
            }
        }
        out
    }

    /// Baseline with the grid parameters overridden by `values`.
    pub fn apply(&self, baseline: &JacketParams, values: &[f64]) -> Result<JacketParams> {
        let p = self.apply_unchecked(baseline, values)?;
        p.validate()?;
        Ok(p)
    }

    fn apply_unchecked(&self, baseline: &JacketParams, values: &[f64]) -> Result<JacketParams> {
        let mut p = baseline.clone();
        for (gp, &v) in self.params.iter().zip(values) {
            match Target::parse(&gp.label)? {
                Target::BaseWidth => p.geometry.base_width_mm = v,
                Target::Thickness(g) => {
                    p.section_mut(&g).ok_or(Error::MissingGroup(g))?.t_wall = v;
                }
                Target::Diameter(g) => {
                    p.section_mut(&g)
                        .ok_or_else(|| Error::MissingGroup(g.clone()))?
                        .d_outer = Diameter::Uniform(v);
                }
            }
        }
        follow_tapers(baseline, &mut p);
        Ok(p)
    }

    /// Decode, repair and apply a chromosome.
    pub fn model(&self, baseline: &JacketParams, x: &DesignVector) -> Result<JacketParams> {
        let x = self.repair(x, baseline);
        self.apply(baseline, &self.decode(&x))
    }
}

/// Tapered groups keep their ends attached to the leg parts below and
/// above them: an end that matched the neighbouring diameter in the
/// baseline follows that neighbour.
pub fn follow_tapers(baseline: &JacketParams, p: &mut JacketParams) {
    let legs: Vec<String> = baseline.leg_segments().map(|s| s.group.clone()).collect();
    for (i, g) in legs.iter().enumerate() {
        let Some(Diameter::Tapered([a, b])) = baseline.section(g).map(|s| s.d_outer) else {
            continue;
        };
        let uniform = |label: &str, params: &JacketParams| match params.section(label) {
            Some(s) if !s.d_outer.is_tapered() => Some(s.d_outer.at(0.0)),
            _ => None,
        };
        let below = i.checked_sub(1).map(|k| legs[k].as_str());
        let above = legs.get(i + 1).map(|s| s.as_str());
        let mut ends = [a, b];
        if let Some(l) = below {
            if uniform(l, baseline) == Some(a) {
                ends[0] = uniform(l, p).unwrap_or(a);
            }
        }
        if let Some(l) = above {
            if uniform(l, baseline) == Some(b) {
                ends[1] = uniform(l, p).unwrap_or(b);
            }
        }
        if let Some(s) = p.section_mut(g) {
            s.d_outer = Diameter::Tapered(ends);
        }
    }
}

/// Apply each on-grid value vector to the baseline, preserving order.
pub fn batch_generate(
    grid: &ParameterGrid,
    vectors: &[Vec<f64>],
    baseline: &JacketParams,
) -> Result<Vec<JacketParams>> {
    grid.check_targets(baseline)?;
    vectors
        .iter()
        .map(|v| {
            grid.encode(v)?;
            grid.apply(baseline, v)
        })
        .collect()
}
