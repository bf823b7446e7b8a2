//! One-parameter trend studies, response-per-mass gradients and linear
//! estimates for combined parameter selections.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::design::follow_tapers;
use crate::error::{Error, Result};
use crate::fem::{RotationMeasure, SolveResult};
use crate::io::read_json;
use crate::model::JacketParams;
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SweepKind {
    /// Pile length above the mudline.
    PL,
    /// Base width.
    BW,
    /// Brace diameters.
    BD,
    /// Brace thicknesses.
    BT,
    /// Leg diameters.
    LD,
    /// Leg thicknesses.
    LT,
}

impl SweepKind {
    pub const ALL: [SweepKind; 6] = [
        SweepKind::PL,
        SweepKind::BW,
        SweepKind::BD,
        SweepKind::BT,
        SweepKind::LD,
        SweepKind::LT,
    ];

    pub fn is_scalar(self) -> bool {
        matches!(self, SweepKind::PL | SweepKind::BW)
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepKind::PL => "PL",
            SweepKind::BW => "BW",
            SweepKind::BD => "BD",
            SweepKind::BT => "BT",
            SweepKind::LD => "LD",
            SweepKind::LT => "LT",
        }
    }

    /// Keys (`<group>_d` / `<group>_t`) a combination of this kind must set.
    pub fn keys(self, baseline: &JacketParams) -> Vec<String> {
        let braces = || {
            let mut out: Vec<String> = Vec::new();
            for lvl in &baseline.geometry.brace_levels {
                for g in [
                    &lvl.lower_stub.group,
                    &lvl.upper_stub.group,
                    &lvl.brace_group,
                    &lvl.joint.group,
                ] {
                    if !out.contains(g) {
                        out.push(g.clone());
                    }
                }
            }
            out
        };
        let legs = || -> Vec<String> {
            baseline
                .geometry
                .battered_leg
                .iter()
                .map(|s| s.group.clone())
                .collect()
        };
        let uniform = |g: &String| {
            baseline
                .section(g)
                .is_some_and(|s| !s.d_outer.is_tapered())
        };
        match self {
            SweepKind::PL | SweepKind::BW => Vec::new(),
            SweepKind::BD => braces().iter().map(|g| format!("{g}_d")).collect(),
            SweepKind::BT => braces().iter().map(|g| format!("{g}_t")).collect(),
            SweepKind::LD => legs()
                .iter()
                .filter(|g| uniform(g))
                .map(|g| format!("{g}_d"))
                .collect(),
            SweepKind::LT => legs().iter().map(|g| format!("{g}_t")).collect(),
        }
    }
}

impl std::str::FromStr for SweepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid("kind", format!("`{s}` is not PL|BW|BD|BT|LD|LT")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepPoint {
    Value(f64),
    Combination {
        name: String,
        values: BTreeMap<String, f64>,
    },
}

impl SweepPoint {
    pub fn label(&self) -> String {
        match self {
            SweepPoint::Value(v) => format!("{v}"),
            SweepPoint::Combination { name, .. } => name.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub points: Vec<SweepPoint>,
}

/// `combinations.json`: per kind, named full value sets.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombinationFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, rename = "BD")]
    pub bd: BTreeMap<String, BTreeMap<String, f64>>,
    #[serde(default, rename = "BT")]
    pub bt: BTreeMap<String, BTreeMap<String, f64>>,
    #[serde(default, rename = "LD")]
    pub ld: BTreeMap<String, BTreeMap<String, f64>>,
    #[serde(default, rename = "LT")]
    pub lt: BTreeMap<String, BTreeMap<String, f64>>,
}

impl CombinationFile {
    pub fn from_file(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn get(&self, kind: SweepKind) -> Option<&BTreeMap<String, BTreeMap<String, f64>>> {
        match kind {
            SweepKind::BD => Some(&self.bd),
            SweepKind::BT => Some(&self.bt),
            SweepKind::LD => Some(&self.ld),
            SweepKind::LT => Some(&self.lt),
            _ => None,
        }
    }
}

/// Orders "Comb2" before "Comb10".
fn natural_key(s: &str) -> (String, u64) {
    let digits = s.len() - s.trim_end_matches(|c: char| c.is_ascii_digit()).len();
    let (head, tail) = s.split_at(s.len() - digits);
    (head.to_string(), tail.parse().unwrap_or(0))
}

impl SweepSpec {
    /// from, from + step, … up to `to` inclusive.
    pub fn range(kind: SweepKind, from: f64, to: f64, step: f64) -> Result<Self> {
        if !kind.is_scalar() {
            return Err(Error::invalid("kind", "ranges apply to PL and BW only"));
        }
        if !(from.is_finite() && to.is_finite()) || from > to {
            return Err(Error::invalid("range", "need finite from ≤ to"));
        }
        if !(step > 0.0) {
            return Err(Error::invalid("step", "must be positive"));
        }
        let n = ((to - from) / step + 1e-9).floor() as usize;
        let points = (0..=n)
            .map(|k| SweepPoint::Value(from + k as f64 * step))
            .collect();
        Ok(SweepSpec { kind, points })
    }

    pub fn combinations(kind: SweepKind, file: &CombinationFile) -> Result<Self> {
        let set = file
            .get(kind)
            .ok_or_else(|| Error::invalid("kind", "combinations apply to BD, BT, LD and LT"))?;
        let mut names: Vec<&String> = set.keys().collect();
        names.sort_by_key(|n| natural_key(n));
        let points = names
            .into_iter()
            .map(|n| SweepPoint::Combination {
                name: n.clone(),
                values: set[n].clone(),
            })
            .collect();
        Ok(SweepSpec { kind, points })
    }

    pub fn validate(&self, baseline: &JacketParams) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::invalid("sweep", "no points"));
        }
        let keys = self.kind.keys(baseline);
        let mut last = f64::NEG_INFINITY;
        for p in &self.points {
            match (p, self.kind.is_scalar()) {
                (SweepPoint::Value(v), true) => {
                    if *v < last {
                        return Err(Error::invalid("sweep", "range values must be ordered"));
                    }
                    last = *v;
                }
                (SweepPoint::Combination { name, values }, false) => {
                    let given: Vec<&String> = values.keys().collect();
                    let mut want: Vec<&String> = keys.iter().collect();
                    want.sort();
                    if given != want {
                        return Err(Error::invalid(
                            format!("{} {}", self.kind.name(), name),
                            format!("must set exactly {want:?}"),
                        ));
                    }
                }
                _ => {
                    return Err(Error::invalid(
                        "sweep",
                        "point type does not match the sweep kind",
                    ))
                }
            }
        }
        Ok(())
    }

    /// Baseline with one sweep point applied.
    pub fn apply(&self, baseline: &JacketParams, point: &SweepPoint) -> Result<JacketParams> {
        apply_point(baseline, self.kind, point)
    }

    /// The point equal to the baseline, if any.
    pub fn baseline_point(&self, baseline: &JacketParams) -> Option<usize> {
        self.points.iter().position(|p| {
            apply_point(baseline, self.kind, p).is_ok_and(|q| q == *baseline)
        })
    }
}

pub fn apply_point(
    baseline: &JacketParams,
    kind: SweepKind,
    point: &SweepPoint,
) -> Result<JacketParams> {
    let mut p = baseline.clone();
    match (kind, point) {
        (SweepKind::PL, SweepPoint::Value(v)) => p.geometry.pile_length_above_mudline_mm = *v,
        (SweepKind::BW, SweepPoint::Value(v)) => p.geometry.base_width_mm = *v,
        (_, SweepPoint::Combination { values, .. }) if !kind.is_scalar() => {
            for (key, &v) in values {
                let (g, what) = key
                    .rsplit_once('_')
                    .ok_or_else(|| Error::invalid(key.clone(), "expected <group>_d or <group>_t"))?;
                let s = p
                    .section_mut(g)
                    .ok_or_else(|| Error::MissingGroup(g.to_string()))?;
                match what {
                    "d" => s.d_outer = crate::section::Diameter::Uniform(v),
                    "t" => s.t_wall = v,
                    _ => return Err(Error::invalid(key.clone(), "expected <group>_d or <group>_t")),
                }
            }
            follow_tapers(baseline, &mut p);
        }
        _ => return Err(Error::invalid("sweep", "point type does not match the sweep kind")),
    }
    p.validate()?;
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub label: String,
    pub value: Option<f64>,
    pub is_baseline: bool,
    pub mass_t: Option<f64>,
    pub result: Option<SolveResult>,
    /// "ok" or the failure message.
    pub status: String,
}

impl SweepRow {
    pub fn ok(&self) -> Option<(f64, &SolveResult)> {
        Some((self.mass_t?, self.result.as_ref()?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub kind: SweepKind,
    pub rows: Vec<SweepRow>,
}

/// Solve every point (plus the baseline when no point reproduces it).
/// Rows keep sweep order; a point that fails is recorded and skipped.
pub fn run_sweep(
    baseline: &JacketParams,
    spec: &SweepSpec,
    scenario: &Scenario,
    workers: usize,
) -> Result<SweepTable> {
    spec.validate(baseline)?;
    let mut points: Vec<(SweepPoint, bool)> = spec.points.iter().map(|p| (p.clone(), false)).collect();
    match spec.baseline_point(baseline) {
        Some(i) => points[i].1 = true,
        None if spec.kind.is_scalar() => {
            let v = match spec.kind {
                SweepKind::PL => baseline.geometry.pile_length_above_mudline_mm,
                _ => baseline.geometry.base_width_mm,
            };
            let at = points
                .iter()
                .position(|(p, _)| matches!(p, SweepPoint::Value(x) if *x > v))
                .unwrap_or(points.len());
            points.insert(at, (SweepPoint::Value(v), true));
        }
        None => points.insert(
            0,
            (
                SweepPoint::Combination {
                    name: "baseline".into(),
                    values: BTreeMap::new(),
                },
                true,
            ),
        ),
    }

    let models: Vec<Result<JacketParams>> = points
        .iter()
        .map(|(p, is_base)| {
            if *is_base {
                Ok(baseline.clone())
            } else {
                spec.apply(baseline, p)
            }
        })
        .collect();
    let solved = crate::exec::map_indexed(&models, workers, |_, m| match m {
        Ok(p) => scenario.evaluate(p).map_err(|e| e.to_string()),
        Err(e) => Err(e.to_string()),
    });
    let rows = points
        .iter()
        .zip(models.iter().zip(solved))
        .map(|((p, is_base), (m, r))| SweepRow {
            label: p.label(),
            value: match p {
                SweepPoint::Value(v) => Some(*v),
                _ => None,
            },
            is_baseline: *is_base,
            mass_t: m.as_ref().ok().map(|p| p.mass_tonnes()),
            status: match &r {
                Ok(_) => "ok".into(),
                Err(e) => e.clone(),
            },
            result: r.ok(),
        })
        .collect();
    Ok(SweepTable {
        kind: spec.kind,
        rows,
    })
}

/// Least-squares slope of y on x.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Change in each response per tonne of added mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gradient {
    pub kind: SweepKind,
    pub stress_mpa_per_t: f64,
    pub u_max_mm_per_t: f64,
    pub u_mudline_mm_per_t: f64,
    pub phi_max_deg_per_t: f64,
    pub phi_mudline_deg_per_t: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GradientTable {
    pub rows: Vec<Gradient>,
    pub notes: Vec<String>,
}

impl GradientTable {
    pub fn get(&self, kind: SweepKind) -> Option<&Gradient> {
        self.rows.iter().find(|g| g.kind == kind)
    }
}

/// Scalars a sweep row contributes to the gradient fit, in table order:
/// stress, overall displacement, mudline displacement, top rotation,
/// mudline rotation.
pub fn row_responses(r: &SolveResult, rotation: RotationMeasure) -> [f64; 5] {
    [
        r.max_stress_mpa,
        r.u_overall_mm,
        r.u_mudline_mm,
        r.phi_top(rotation),
        r.phi_mudline(rotation),
    ]
}

pub fn fit_gradients(tables: &[SweepTable], rotation: RotationMeasure) -> GradientTable {
    let mut out = GradientTable::default();
    for t in tables {
        let ok: Vec<(f64, [f64; 5])> = t
            .rows
            .iter()
            .filter_map(|r| r.ok().map(|(m, res)| (m, row_responses(res, rotation))))
            .collect();
        if ok.len() < 3 {
            out.notes.push(format!(
                "{}: excluded, {} successful rows (need 3)",
                t.kind.name(),
                ok.len()
            ));
            continue;
        }
        let mass: Vec<f64> = ok.iter().map(|(m, _)| *m).collect();
        let (lo, hi) = mass
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &m| (a.min(m), b.max(m)));
        if hi - lo <= 1e-9 * hi.abs().max(1.0) {
            out.notes.push(format!("{}: excluded, mass is constant", t.kind.name()));
            continue;
        }
        let slope = |k: usize| {
            let y: Vec<f64> = ok.iter().map(|(_, r)| r[k]).collect();
            ls_slope(&mass, &y)
        };
        out.rows.push(Gradient {
            kind: t.kind,
            stress_mpa_per_t: slope(0),
            u_max_mm_per_t: slope(1),
            u_mudline_mm_per_t: slope(2),
            phi_max_deg_per_t: slope(3),
            phi_mudline_deg_per_t: slope(4),
            points: ok.len(),
        });
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Estimate {
    pub mass_t: f64,
    pub stress_mpa: f64,
    pub u_max_mm: f64,
    pub u_mudline_mm: f64,
    pub phi_max_deg: f64,
    pub phi_mudline_deg: f64,
}

/// Linear superposition Σ gradient × mass delta over the selected kinds.
pub fn estimate_changes(
    gradients: &GradientTable,
    selections: &[(SweepKind, f64)],
) -> Result<Estimate> {
    let mut e = Estimate::default();
    for &(kind, dm) in selections {
        let g = gradients
            .get(kind)
            .ok_or_else(|| Error::invalid(kind.name(), "no gradient for this kind"))?;
        e.mass_t += dm;
        e.stress_mpa += g.stress_mpa_per_t * dm;
        e.u_max_mm += g.u_max_mm_per_t * dm;
        e.u_mudline_mm += g.u_mudline_mm_per_t * dm;
        e.phi_max_deg += g.phi_max_deg_per_t * dm;
        e.phi_mudline_deg += g.phi_mudline_deg_per_t * dm;
    }
    Ok(e)
}

/// Mass change of one sweep point relative to the baseline.
pub fn mass_delta(baseline: &JacketParams, kind: SweepKind, point: &SweepPoint) -> Result<f64> {
    Ok(apply_point(baseline, kind, point)?.mass_tonnes() - baseline.mass_tonnes())
}

/// Two-step selection: one point per kind, then explicit section
/// overrides.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Selection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, rename = "PL", skip_serializing_if = "Option::is_none")]
    pub pl: Option<f64>,
    #[serde(default, rename = "BW", skip_serializing_if = "Option::is_none")]
    pub bw: Option<f64>,
    /// kind → combination name
    #[serde(default)]
    pub combinations: BTreeMap<SweepKind, String>,
    /// Applied last, e.g. "BC4_t": 35.
    #[serde(default)]
    pub overrides: BTreeMap<String, f64>,
}

impl Selection {
    pub fn from_file(path: &Path) -> Result<Self> {
        read_json(path)
    }

    /// Per selected kind, its sweep point.
    pub fn points(&self, combos: &CombinationFile) -> Result<Vec<(SweepKind, SweepPoint)>> {
        let mut out = Vec::new();
        if let Some(v) = self.pl {
            out.push((SweepKind::PL, SweepPoint::Value(v)));
        }
        if let Some(v) = self.bw {
            out.push((SweepKind::BW, SweepPoint::Value(v)));
        }
        for (&kind, name) in &self.combinations {
            let set = combos
                .get(kind)
                .ok_or_else(|| Error::invalid(kind.name(), "not a combination kind"))?;
            let values = set
                .get(name)
                .ok_or_else(|| Error::invalid(kind.name(), format!("no combination `{name}`")))?;
            out.push((
                kind,
                SweepPoint::Combination {
                    name: name.clone(),
                    values: values.clone(),
                },
            ));
        }
        Ok(out)
    }

    /// Baseline with every selected point and then the overrides applied.
    pub fn apply(&self, baseline: &JacketParams, combos: &CombinationFile) -> Result<JacketParams> {
        let mut p = baseline.clone();
        for (kind, point) in self.points(combos)? {
            p = apply_point(&p, kind, &point)?;
        }
        if !self.overrides.is_empty() {
            let point = SweepPoint::Combination {
                name: "overrides".into(),
                values: self.overrides.clone(),
            };
            p = apply_point(&p, SweepKind::LT, &point)?;
        }
        Ok(p)
    }
}
