//! Shipped input data for the original design.

use crate::fem::loads::LoadFile;
use crate::ga::GaConfig;
use crate::material::MaterialSpec;
use crate::model::JacketParams;
use crate::soil::SoilProfile;
use crate::sweeps::CombinationFile;
use crate::wave::WaveFile;

pub const MODEL_JSON: &str = include_str!("../data/model.jct.json");
pub const SECTIONS_JSON: &str = include_str!("../data/sections.sec.json");
pub const MATERIAL_JSON: &str = include_str!("../data/material.json");
pub const WAVES_JSON: &str = include_str!("../data/waves.json");
pub const LOADS_JSON: &str = include_str!("../data/loads.json");
pub const SOIL_JSON: &str = include_str!("../data/soil.json");
pub const GA_JSON: &str = include_str!("../data/ga.json");
pub const COMBINATIONS_JSON: &str = include_str!("../data/combinations.json");

pub fn original_params() -> JacketParams {
    let mut p = JacketParams::from_json_str(MODEL_JSON, SECTIONS_JSON)
        .expect("shipped model files are valid");
    p.material = serde_json::from_str::<MaterialSpec>(MATERIAL_JSON).expect("shipped material");
    p
}

pub fn waves() -> WaveFile {
    serde_json::from_str(WAVES_JSON).expect("shipped waves file is valid")
}

pub fn loads() -> LoadFile {
    serde_json::from_str(LOADS_JSON).expect("shipped loads file is valid")
}

pub fn soil() -> SoilProfile {
    serde_json::from_str(SOIL_JSON).expect("shipped soil file is valid")
}

pub fn ga_config() -> GaConfig {
    serde_json::from_str(GA_JSON).expect("shipped optimiser settings are valid")
}

pub fn combinations() -> CombinationFile {
    serde_json::from_str(COMBINATIONS_JSON).expect("shipped combinations are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_soil_matches_generator() {
        let p = original_params();
        let d = p.section(&p.geometry.pile_group).unwrap().d_outer.at(0.0) * 1e-3;
        let generated = crate::soil::illustrative_profile(d, p.geometry.embedded_pile_length_mm * 1e-3);
        assert_eq!(soil(), generated, "{}", serde_json::to_string_pretty(&generated).unwrap());
    }
}
