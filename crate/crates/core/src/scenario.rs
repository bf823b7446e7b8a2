//! A fixed loading and support situation in which designs are evaluated.

use crate::error::Result;
use crate::exec;
use crate::fem::loads::{CombinedLoading, LoadFile};
use crate::fem::{simulate, Environment, SolveResult, Support};
use crate::model::JacketParams;
use crate::soil::SoilProfile;
use crate::wave::{CsTable, WaveFile};

pub const DEFAULT_CHAR_SIZE: f64 = 1000.0;
pub const DEFAULT_COMBINATION: &str = "ULS";
pub const DEFAULT_WATER_LEVEL: &str = "HWL";

#[derive(Debug, Clone)]
pub struct Scenario {
    pub env: Environment,
    pub loading: CombinedLoading,
    pub char_size: f64,
}

/// Inputs naming a scenario.
#[derive(Debug, Clone)]
pub struct ScenarioInputs {
    pub waves: WaveFile,
    pub loads: LoadFile,
    pub soil: Option<SoilProfile>,
    pub cs_table: Option<CsTable>,
    pub combination: String,
    pub water_level: String,
    pub support: Support,
    pub char_size: f64,
}

impl ScenarioInputs {
    /// Shipped data files, ULS combination at high water on soil springs.
    pub fn shipped() -> Self {
        ScenarioInputs {
            waves: crate::defaults::waves(),
            loads: crate::defaults::loads(),
            soil: Some(crate::defaults::soil()),
            cs_table: None,
            combination: DEFAULT_COMBINATION.into(),
            water_level: DEFAULT_WATER_LEVEL.into(),
            support: Support::Spring,
            char_size: DEFAULT_CHAR_SIZE,
        }
    }

    pub fn build(self) -> Result<Scenario> {
        self.waves.validate()?;
        self.loads.validate()?;
        if let Some(t) = &self.cs_table {
            t.validate()?;
        }
        let loading = self.loads.combine_named(&self.combination)?;
        let depth_m = self.waves.depth(&self.water_level)?;
        let gravity = self.waves.g;
        Ok(Scenario {
            env: Environment {
                waves: self.waves,
                depth_m,
                soil: self.soil,
                support: self.support,
                cs_table: self.cs_table,
                gravity,
            },
            loading,
            char_size: self.char_size,
        })
    }
}

impl Scenario {
    pub fn shipped(water_level: &str, support: Support) -> Result<Self> {
        ScenarioInputs {
            water_level: water_level.into(),
            support,
            ..ScenarioInputs::shipped()
        }
        .build()
    }

    /// Full solve including fields.
    pub fn simulate(&self, params: &JacketParams) -> Result<SolveResult> {
        simulate(params, self.char_size, &self.env, &self.loading)
    }

    /// Solve without retaining fields.
    pub fn evaluate(&self, params: &JacketParams) -> Result<SolveResult> {
        self.simulate(params).map(SolveResult::without_fields)
    }

    /// Independent solves, results in input order.
    pub fn evaluate_batch(
        &self,
        params: &[JacketParams],
        workers: usize,
    ) -> Vec<Result<SolveResult>> {
        exec::map_indexed(params, workers, |_, p| self.evaluate(p))
    }
}
