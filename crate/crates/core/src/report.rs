//! Result files written by the CLI and the comparison tables built from
//! them.

use std::fmt::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::constraints::{check_responses, CodeLimits, Quantity, Responses, Strategy, StrategyCheck};
use crate::error::{Error, Result};
use crate::fem::{RotationMeasure, SolveResult, Support};
use crate::ga::StopReason;
use crate::io::read_text;

/// `result.json`: one simulation and the scenario it ran in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationRecord {
    pub label: String,
    pub support: Support,
    pub water_level: String,
    pub combination: String,
    pub char_size: f64,
    pub rotation: RotationMeasure,
    pub result: SolveResult,
}

impl SimulationRecord {
    pub fn responses(&self) -> Responses {
        Responses::from_result(&self.result, self.rotation)
    }
}

/// Best-of-generation fitness for plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitnessPoint {
    pub generation: usize,
    pub best: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttemptSummary {
    pub attempt: usize,
    pub seed: u64,
    pub generations: usize,
    pub stop: StopReason,
    pub evaluations: usize,
    pub best_fitness: f64,
    pub mass_t: f64,
    pub mass_reduction_pct: f64,
    /// Absent when the best design's solve failed.
    pub responses: Option<Responses>,
    pub check: Option<StrategyCheck>,
    pub feasible: bool,
    pub values: std::collections::BTreeMap<String, f64>,
    /// Parameters whose final |σ| reached the flag threshold.
    pub flagged: Vec<String>,
    pub fitness: Vec<FitnessPoint>,
}

/// `summary.json` of an optimisation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizationSummary {
    pub label: String,
    pub strategy: Strategy,
    pub rotation: RotationMeasure,
    pub baseline_mass_t: f64,
    pub baseline: Responses,
    pub attempts: Vec<AttemptSummary>,
    /// Index into `attempts` of the lightest feasible attempt, or of the
    /// lowest fitness when none is feasible.
    pub best_attempt: usize,
}

impl OptimizationSummary {
    pub fn pick_best(attempts: &[AttemptSummary]) -> usize {
        let key = |a: &AttemptSummary| (!a.feasible, a.best_fitness);
        (0..attempts.len())
            .min_by(|&i, &j| {
                let (fi, bi) = key(&attempts[i]);
                let (fj, bj) = key(&attempts[j]);
                fi.cmp(&fj).then(bi.total_cmp(&bj)).then(i.cmp(&j))
            })
            .unwrap_or(0)
    }
}

/// One model in a comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub model: String,
    pub mass_t: f64,
    pub responses: Responses,
}

/// Rows and fitness curves found in one input file.
#[derive(Debug, Clone, Default)]
pub struct Loaded {
    pub rows: Vec<ReportRow>,
    pub curves: Vec<(String, Vec<FitnessPoint>)>,
}

fn parse<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        let field = match (field.as_str(), missing_field(&inner.to_string())) {
            (".", Some(m)) => m,
            (p, Some(m)) => format!("{p}.{m}"),
            (p, None) => p.to_string(),
        };
        Error::Schema {
            path: path.to_path_buf(),
            field,
        }
    })
}

/// Field name out of serde's "missing field `x`" message.
fn missing_field(msg: &str) -> Option<String> {
    let rest = msg.strip_prefix("missing field `")?;
    Some(rest[..rest.find('`')?].to_string())
}

/// Read a `result.json` or `summary.json`.
pub fn load(path: &Path) -> Result<Loaded> {
    let text = read_text(path)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    if value.get("attempts").is_some() {
        let s: OptimizationSummary = parse(path, &text)?;
        let mut out = Loaded::default();
        for a in &s.attempts {
            let name = if s.attempts.len() == 1 {
                s.label.clone()
            } else {
                format!("{}-apt{}", s.label, a.attempt)
            };
            if let Some(r) = a.responses {
                out.rows.push(ReportRow {
                    model: name.clone(),
                    mass_t: a.mass_t,
                    responses: r,
                });
            }
            out.curves.push((name, a.fitness.clone()));
        }
        Ok(out)
    } else if value.get("result").is_some() {
        let r: SimulationRecord = parse(path, &text)?;
        Ok(Loaded {
            rows: vec![ReportRow {
                model: r.label.clone(),
                mass_t: r.result.mass_t,
                responses: r.responses(),
            }],
            curves: Vec::new(),
        })
    } else {
        Err(Error::Schema {
            path: path.to_path_buf(),
            field: "result".into(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub strategy: Strategy,
    pub limits: Vec<(Quantity, f64)>,
    /// Sorted by mass, lightest first.
    pub rows: Vec<ReportRow>,
    pub checks: Vec<StrategyCheck>,
}

pub fn compare(
    mut rows: Vec<ReportRow>,
    strategy: Strategy,
    baseline: Option<&Responses>,
    code: &CodeLimits,
) -> Result<ComparisonTable> {
    if rows.is_empty() {
        return Err(Error::invalid("report", "no results to compare"));
    }
    rows.sort_by(|a, b| a.mass_t.total_cmp(&b.mass_t));
    let checks = rows
        .iter()
        .map(|r| check_responses(&r.responses, strategy, baseline, code))
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonTable {
        strategy,
        limits: strategy.limits(baseline, code)?,
        rows,
        checks,
    })
}

const COLUMNS: [&str; 7] = [
    "model",
    "mass_t",
    "max_stress_mpa",
    "max_displacement_mm",
    "max_rotation_deg",
    "mudline_displacement_mm",
    "mudline_rotation_deg",
];

const ORDER: [Quantity; 5] = [
    Quantity::Stress,
    Quantity::UTop,
    Quantity::PhiTop,
    Quantity::UMudline,
    Quantity::PhiMudline,
];

fn fmt_q(q: Quantity, v: f64) -> String {
    match q {
        Quantity::PhiTop | Quantity::PhiMudline => format!("{v:.4}"),
        _ => format!("{v:.2}"),
    }
}

impl ComparisonTable {
    fn limit(&self, q: Quantity) -> Option<f64> {
        self.limits.iter().find(|(k, _)| *k == q).map(|(_, v)| *v)
    }

    fn cells(&self) -> Vec<Vec<String>> {
        let mut out: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                let mut c = vec![r.model.clone(), format!("{:.1}", r.mass_t)];
                c.extend(ORDER.iter().map(|&q| fmt_q(q, r.responses.get(q))));
                c
            })
            .collect();
        let mut lim = vec![format!("limits (strategy {})", self.strategy.number()), String::new()];
        lim.extend(
            ORDER
                .iter()
                .map(|&q| self.limit(q).map(|v| fmt_q(q, v)).unwrap_or_default()),
        );
        out.push(lim);
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(COLUMNS).expect("in-memory write");
        for row in self.cells() {
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8")
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "| {} |", COLUMNS.join(" | "));
        let _ = writeln!(s, "|{}", "---|".repeat(COLUMNS.len()));
        for row in self.cells() {
            let _ = writeln!(s, "| {} |", row.join(" | "));
        }
        s
    }

    /// model, quantity, value, limit, margin, pass
    pub fn margins_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["model", "quantity", "value", "limit", "margin", "pass"])
            .expect("in-memory write");
        for (r, c) in self.rows.iter().zip(&self.checks) {
            for k in &c.constraints {
                w.write_record([
                    r.model.clone(),
                    k.quantity.name().to_string(),
                    format!("{}", k.value),
                    format!("{}", k.limit),
                    format!("{}", k.margin),
                    k.pass.to_string(),
                ])
                .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8")
    }
}

/// model, generation, best_fitness, mean_fitness
pub fn fitness_csv(curves: &[(String, Vec<FitnessPoint>)]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["model", "generation", "best_fitness", "mean_fitness"])
        .expect("in-memory write");
    for (name, pts) in curves {
        for p in pts {
            w.write_record([
                name.clone(),
                p.generation.to_string(),
                format!("{}", p.best),
                format!("{}", p.mean),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8")
}
