//! Response scalars and fields of a converged solve.

use serde::{Deserialize, Serialize};

use super::{rotation_parts, Model};
use crate::mesh::PartKind;

/// Which rotation enters constraint checks: tilt of the vertical axis or
/// twist about it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RotationMeasure {
    #[default]
    Tilt,
    Twist,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fields {
    /// Per node: ux, uy, uz (mm), rx, ry, rz (rad).
    pub displacements: Vec<[f64; 6]>,
    /// Per element, MPa.
    pub stress: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub mass_t: f64,
    pub max_stress_mpa: f64,
    pub max_stress_element: usize,
    pub max_stress_group: String,
    /// Largest displacement at the leg tops and reference point.
    pub u_top_mm: f64,
    /// Largest displacement anywhere above the mudline.
    pub u_overall_mm: f64,
    pub u_mudline_mm: f64,
    pub phi_top_deg: f64,
    pub phi_mudline_deg: f64,
    pub phi_top_twist_deg: f64,
    pub phi_mudline_twist_deg: f64,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub equilibrium_error: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<Fields>,
}

impl SolveResult {
    pub fn phi_top(&self, m: RotationMeasure) -> f64 {
        match m {
            RotationMeasure::Tilt => self.phi_top_deg,
            RotationMeasure::Twist => self.phi_top_twist_deg,
        }
    }

    pub fn phi_mudline(&self, m: RotationMeasure) -> f64 {
        match m {
            RotationMeasure::Tilt => self.phi_mudline_deg,
            RotationMeasure::Twist => self.phi_mudline_twist_deg,
        }
    }

    pub fn without_fields(mut self) -> Self {
        self.fields = None;
        self
    }
}

fn norm3(d: &[f64; 6]) -> f64 {
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

pub(super) fn summarise(
    model: &Model,
    nodal: Vec<[f64; 6]>,
    stress: Vec<f64>,
    iterations: usize,
    residual_history: Vec<f64>,
    equilibrium_error: f64,
    warnings: Vec<String>,
) -> SolveResult {
    let mesh = &model.mesh;
    let mut top_nodes = mesh.leg_top.to_vec();
    top_nodes.push(mesh.rp);
    let max_over = |nodes: &[usize], f: &dyn Fn(&[f64; 6]) -> f64| {
        nodes.iter().map(|&n| f(&nodal[n])).fold(0.0, f64::max)
    };
    let tilt = |d: &[f64; 6]| rotation_parts([d[3], d[4], d[5]]).0.to_degrees();
    let twist = |d: &[f64; 6]| rotation_parts([d[3], d[4], d[5]]).1.to_degrees();

    let mut above = vec![false; mesh.nodes.len()];
    for e in &mesh.elements {
        if e.kind != PartKind::EmbeddedPile {
            above[e.nodes[0]] = true;
            above[e.nodes[1]] = true;
        }
    }
    let overall: Vec<usize> = (0..mesh.nodes.len()).filter(|&n| above[n]).collect();

    let (mut imax, mut smax) = (0, 0.0);
    for (i, &s) in stress.iter().enumerate() {
        if model.beam(i).is_some() && s > smax {
            smax = s;
            imax = i;
        }
    }

    SolveResult {
        mass_t: model.params.mass_tonnes(),
        max_stress_mpa: smax,
        max_stress_element: imax,
        max_stress_group: mesh.elements[imax].group.clone(),
        u_top_mm: max_over(&top_nodes, &norm3),
        u_overall_mm: max_over(&overall, &norm3),
        u_mudline_mm: max_over(&mesh.mudline, &norm3),
        phi_top_deg: max_over(&top_nodes, &tilt),
        phi_mudline_deg: max_over(&mesh.mudline, &tilt),
        phi_top_twist_deg: max_over(&top_nodes, &twist),
        phi_mudline_twist_deg: max_over(&mesh.mudline, &twist),
        iterations,
        residual_history,
        equilibrium_error,
        warnings,
        fields: Some(Fields {
            displacements: nodal,
            stress,
        }),
    }
}
