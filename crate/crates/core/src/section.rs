//! Hollow circular member sections.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Outer diameter of a member group, in mm. Tapered groups carry the
/// diameters at the lower and upper ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Diameter {
    Uniform(f64),
    Tapered([f64; 2]),
}

impl Diameter {
    /// Diameter at fraction `s` (0 = start, 1 = end) along the member.
    pub fn at(&self, s: f64) -> f64 {
        match *self {
            Diameter::Uniform(d) => d,
            Diameter::Tapered([a, b]) => a + (b - a) * s,
        }
    }

    pub fn min(&self) -> f64 {
        match *self {
            Diameter::Uniform(d) => d,
            Diameter::Tapered([a, b]) => a.min(b),
        }
    }

    pub fn is_tapered(&self) -> bool {
        matches!(self, Diameter::Tapered(_))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionSpec {
    pub label: String,
    /// mm
    pub d_outer: Diameter,
    /// mm
    pub t_wall: f64,
}

impl SectionSpec {
    pub fn uniform(label: &str, d_outer: f64, t_wall: f64) -> Self {
        SectionSpec {
            label: label.to_string(),
            d_outer: Diameter::Uniform(d_outer),
            t_wall,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| Error::NonPhysicalSection {
            label: self.label.clone(),
            reason,
        };
        if !(self.t_wall.is_finite() && self.t_wall > 0.0) {
            return Err(bad(format!("wall thickness {} mm must be positive", self.t_wall)));
        }
        let ends = match self.d_outer {
            Diameter::Uniform(d) => vec![d],
            Diameter::Tapered([a, b]) => vec![a, b],
        };
        for d in ends {
            if !d.is_finite() || d <= 2.0 * self.t_wall {
                return Err(bad(format!(
                    "outer diameter {d} mm does not exceed twice the wall thickness {} mm",
                    self.t_wall
                )));
            }
        }
        Ok(())
    }

    pub fn props_at(&self, s: f64) -> TubeProps {
        TubeProps::new(self.d_outer.at(s), self.t_wall)
    }
}

/// Sectional properties of a circular hollow section (mm, mm², mm⁴).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeProps {
    pub d_outer: f64,
    pub t_wall: f64,
    pub area: f64,
    pub inertia: f64,
    pub polar: f64,
}

impl TubeProps {
    pub fn new(d_outer: f64, t_wall: f64) -> Self {
        let d_inner = d_outer - 2.0 * t_wall;
        let area = PI / 4.0 * (d_outer * d_outer - d_inner * d_inner);
        let inertia = PI / 64.0 * (d_outer.powi(4) - d_inner.powi(4));
        TubeProps {
            d_outer,
            t_wall,
            area,
            inertia,
            polar: 2.0 * inertia,
        }
    }

    /// Outer-fibre distance.
    pub fn c(&self) -> f64 {
        0.5 * self.d_outer
    }
}

/// Steel annulus area of a tube integrated along a member whose diameter
/// varies linearly from `d0` to `d1`, times the length. Returns mm³.
pub fn tube_volume(d0: f64, d1: f64, t: f64, length: f64) -> f64 {
    // A(s) = π t (D(s) - t) is linear in s, so the mean is exact.
    let mean_d = 0.5 * (d0 + d1);
    PI * t * (mean_d - t) * length
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_thickness_is_rejected() {
        let s = SectionSpec::uniform("SB1", 975.0, 0.0);
        let err = s.validate().unwrap_err().to_string();
        assert!(err.contains("non-physical section SB1"), "{err}");
    }

    #[test]
    fn closed_tube_is_rejected() {
        assert!(SectionSpec::uniform("X", 100.0, 50.0).validate().is_err());
        assert!(SectionSpec::uniform("X", 100.0, 49.0).validate().is_ok());
    }

    #[test]
    fn tapered_end_checked() {
        let s = SectionSpec {
            label: "CS2".into(),
            d_outer: Diameter::Tapered([3600.0, 150.0]),
            t_wall: 85.0,
        };
        assert!(s.validate().is_err());
    }

    #[test]
    fn tube_properties() {
        let p = TubeProps::new(1000.0, 50.0);
        approx::assert_relative_eq!(p.area, PI / 4.0 * (1e6 - 0.81e6), max_relative = 1e-14);
        approx::assert_relative_eq!(p.inertia, PI / 64.0 * (1e12 - 900.0f64.powi(4)), max_relative = 1e-14);
    }

    #[test]
    fn tapered_volume_matches_quadrature() {
        let (d0, d1, t, l) = (3600.0, 1450.0, 85.0, 11930.0);
        let n = 10_000;
        let q: f64 = (0..n)
            .map(|i| {
                let s = (i as f64 + 0.5) / n as f64;
                TubeProps::new(d0 + (d1 - d0) * s, t).area * l / n as f64
            })
            .sum();
        approx::assert_relative_eq!(tube_volume(d0, d1, t, l), q, max_relative = 1e-9);
    }

    #[test]
    fn diameter_json_forms() {
        let u: SectionSpec = serde_json::from_str(r#"{"label":"BC4","d_outer":620,"t_wall":30}"#).unwrap();
        assert_eq!(u.d_outer, Diameter::Uniform(620.0));
        let t: SectionSpec =
            serde_json::from_str(r#"{"label":"CS2","d_outer":[3600,1450],"t_wall":85}"#).unwrap();
        assert_eq!(t.d_outer, Diameter::Tapered([3600.0, 1450.0]));
    }
}
