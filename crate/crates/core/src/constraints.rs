//! Optimisation strategies and their constraint checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{RotationMeasure, SolveResult};

/// The five response scalars entering the constraints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Responses {
    pub stress_mpa: f64,
    pub u_top_mm: f64,
    pub u_mudline_mm: f64,
    pub phi_top_deg: f64,
    pub phi_mudline_deg: f64,
}

impl Responses {
    pub fn from_result(r: &SolveResult, rotation: RotationMeasure) -> Self {
        Responses {
            stress_mpa: r.max_stress_mpa,
            u_top_mm: r.u_top_mm,
            u_mudline_mm: r.u_mudline_mm,
            phi_top_deg: r.phi_top(rotation),
            phi_mudline_deg: r.phi_mudline(rotation),
        }
    }

    pub fn get(&self, q: Quantity) -> f64 {
        match q {
            Quantity::Stress => self.stress_mpa,
            Quantity::UTop => self.u_top_mm,
            Quantity::UMudline => self.u_mudline_mm,
            Quantity::PhiTop => self.phi_top_deg,
            Quantity::PhiMudline => self.phi_mudline_deg,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Stress,
    UTop,
    UMudline,
    PhiTop,
    PhiMudline,
}

impl Quantity {
    pub const ALL: [Quantity; 5] = [
        Quantity::Stress,
        Quantity::UTop,
        Quantity::UMudline,
        Quantity::PhiTop,
        Quantity::PhiMudline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Stress => "stress_mpa",
            Quantity::UTop => "u_top_mm",
            Quantity::UMudline => "u_mudline_mm",
            Quantity::PhiTop => "phi_top_deg",
            Quantity::PhiMudline => "phi_mudline_deg",
        }
    }
}

/// Code limits used by strategy 3 (and the mudline rotation cap of
/// strategy 2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeLimits {
    pub stress_mpa: f64,
    pub u_top_mm: f64,
    pub phi_top_deg: f64,
    pub phi_mudline_deg: f64,
}

impl Default for CodeLimits {
    fn default() -> Self {
        CodeLimits {
            stress_mpa: 355.0,
            u_top_mm: 172.0,
            phi_top_deg: 0.3819,
            phi_mudline_deg: 0.25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Strategy {
    /// Every response below the baseline's.
    BelowBaseline,
    /// Stress and top responses below the baseline's; mudline rotation
    /// under the code cap.
    RelaxedMudline,
    /// Absolute code limits.
    CodeLimits,
}

impl Strategy {
    pub fn number(self) -> u8 {
        self.into()
    }

    pub fn needs_baseline(self) -> bool {
        !matches!(self, Strategy::CodeLimits)
    }

    /// (quantity, limit) pairs; every constraint reads value < limit.
    pub fn limits(
        self,
        baseline: Option<&Responses>,
        code: &CodeLimits,
    ) -> Result<Vec<(Quantity, f64)>> {
        use Quantity::*;
        let base = || {
            baseline.ok_or_else(|| {
                Error::Config(format!("strategy {} needs baseline responses", self.number()))
            })
        };
        Ok(match self {
            Strategy::BelowBaseline => {
                let b = base()?;
                Quantity::ALL.iter().map(|&q| (q, b.get(q))).collect()
            }
            Strategy::RelaxedMudline => {
                let b = base()?;
                vec![
                    (Stress, b.stress_mpa),
                    (UTop, b.u_top_mm),
                    (PhiTop, b.phi_top_deg),
                    (PhiMudline, code.phi_mudline_deg),
                ]
            }
            Strategy::CodeLimits => vec![
                (Stress, code.stress_mpa),
                (UTop, code.u_top_mm),
                (PhiTop, code.phi_top_deg),
                (PhiMudline, code.phi_mudline_deg),
            ],
        })
    }
}

impl TryFrom<u8> for Strategy {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Strategy::BelowBaseline),
            2 => Ok(Strategy::RelaxedMudline),
            3 => Ok(Strategy::CodeLimits),
            _ => Err(format!("strategy must be 1, 2 or 3, got {v}")),
        }
    }
}

impl From<Strategy> for u8 {
    fn from(s: Strategy) -> u8 {
        match s {
            Strategy::BelowBaseline => 1,
            Strategy::RelaxedMudline => 2,
            Strategy::CodeLimits => 3,
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse::<u8>()
            .ok()
            .and_then(|v| Strategy::try_from(v).ok())
            .ok_or_else(|| Error::invalid("strategy", format!("`{s}` is not 1, 2 or 3")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub quantity: Quantity,
    pub value: f64,
    pub limit: f64,
    /// limit − value
    pub margin: f64,
    pub pass: bool,
}

impl ConstraintCheck {
    /// max(0, value − limit)
    pub fn violation(&self) -> f64 {
        (self.value - self.limit).max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyCheck {
    pub strategy: Strategy,
    pub constraints: Vec<ConstraintCheck>,
    pub feasible: bool,
}

pub fn check_responses(
    r: &Responses,
    strategy: Strategy,
    baseline: Option<&Responses>,
    code: &CodeLimits,
) -> Result<StrategyCheck> {
    let constraints: Vec<ConstraintCheck> = strategy
        .limits(baseline, code)?
        .into_iter()
        .map(|(q, limit)| {
            let value = r.get(q);
            ConstraintCheck {
                quantity: q,
                value,
                limit,
                margin: limit - value,
                pass: value < limit,
            }
        })
        .collect();
    Ok(StrategyCheck {
        strategy,
        feasible: constraints.iter().all(|c| c.pass),
        constraints,
    })
}

/// Per-constraint verdicts and margins of a solve under a strategy.
pub fn check_strategy(
    result: &SolveResult,
    strategy: Strategy,
    baseline: Option<&SolveResult>,
    rotation: RotationMeasure,
    code: &CodeLimits,
) -> Result<StrategyCheck> {
    let b = baseline.map(|b| Responses::from_result(b, rotation));
    check_responses(
        &Responses::from_result(result, rotation),
        strategy,
        b.as_ref(),
        code,
    )
}
