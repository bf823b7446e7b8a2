//! Parametric jacket description: geometry, member-group topology, sections
//! and material, plus the `.jct.json` / `.sec.json` file formats.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::read_json;
use crate::material::MaterialSpec;
use crate::section::{tube_volume, Diameter, SectionSpec};

/// Number of member groups in the four-legged X-braced topology.
pub const GROUP_COUNT: usize = 26;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegSegment {
    pub group: String,
    /// Vertical extent of the segment.
    pub height_mm: f64,
}

/// A point on the leg, given as a fraction of one leg segment's height.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegStation {
    pub segment: String,
    pub at: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracePart {
    pub group: String,
    pub length_mm: f64,
}

/// One X-braced bay, repeated on all four faces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BraceLevel {
    pub name: String,
    pub lower: LegStation,
    pub upper: LegStation,
    pub lower_stub: BracePart,
    pub upper_stub: BracePart,
    pub brace_group: String,
    pub joint: BracePart,
}

/// Transition-piece stand-in: a plate and four stub pipes carried as mass,
/// with the reference point rigidly coupled to the leg tops.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopFrame {
    pub plate_width_mm: f64,
    pub plate_thickness_mm: f64,
    pub pipe_diameter_mm: f64,
    pub pipe_thickness_mm: f64,
    pub pipe_length_mm: f64,
    /// Height of the reference point above the leg-top working points.
    pub rp_height_mm: f64,
    /// Count the plate and pipes in the jacket mass. Off by default: the
    /// frame only stands in for the transition piece.
    #[serde(default)]
    pub include_in_mass: bool,
}

impl TopFrame {
    /// Steel volume in mm³.
    pub fn volume(&self) -> f64 {
        let plate = self.plate_width_mm * self.plate_width_mm * self.plate_thickness_mm;
        let pipes = 4.0
            * tube_volume(
                self.pipe_diameter_mm,
                self.pipe_diameter_mm,
                self.pipe_thickness_mm,
                self.pipe_length_mm,
            );
        plate + pipes
    }
}

/// Contents of a `.jct.json` geometry file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JacketGeometry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub base_width_mm: f64,
    pub top_width_mm: f64,
    pub pile_length_above_mudline_mm: f64,
    pub embedded_pile_length_mm: f64,
    /// Still-water depth at the site (m). Overridden by the selected water level.
    pub water_depth_m: f64,
    pub pile_group: String,
    /// Vertical leg parts directly above the pile (grouted sleeve region).
    pub vertical_leg: Vec<LegSegment>,
    /// Battered leg parts from the sleeve to the jacket top.
    pub battered_leg: Vec<LegSegment>,
    pub brace_levels: Vec<BraceLevel>,
    pub top_frame: TopFrame,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacketParams {
    pub geometry: JacketGeometry,
    pub sections: Vec<SectionSpec>,
    pub material: MaterialSpec,
}

impl JacketParams {
    pub fn new(
        geometry: JacketGeometry,
        sections: Vec<SectionSpec>,
        material: MaterialSpec,
    ) -> Result<Self> {
        let p = JacketParams {
            geometry,
            sections,
            material,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parse the geometry and section files. The material defaults to S355
    /// when no file is given.
    pub fn from_files(
        model: &Path,
        sections: &Path,
        material: Option<&Path>,
    ) -> Result<Self> {
        let geometry: JacketGeometry = read_json(model)?;
        let sections: Vec<SectionSpec> = read_json(sections)?;
        let material = match material {
            Some(p) => read_json(p)?,
            None => MaterialSpec::default(),
        };
        Self::new(geometry, sections, material)
    }

    pub fn from_json_str(model: &str, sections: &str) -> Result<Self> {
        let geometry: JacketGeometry = serde_json::from_str(model).map_err(|e| Error::Json {
            path: "<model>".into(),
            source: e,
        })?;
        let sections: Vec<SectionSpec> =
            serde_json::from_str(sections).map_err(|e| Error::Json {
                path: "<sections>".into(),
                source: e,
            })?;
        Self::new(geometry, sections, MaterialSpec::default())
    }

    pub fn geometry_json(&self) -> String {
        serde_json::to_string_pretty(&self.geometry).expect("geometry serialises")
    }

    pub fn sections_json(&self) -> String {
        serde_json::to_string_pretty(&self.sections).expect("sections serialise")
    }

    pub fn section(&self, label: &str) -> Option<&SectionSpec> {
        self.sections.iter().find(|s| s.label == label)
    }

    pub fn section_mut(&mut self, label: &str) -> Option<&mut SectionSpec> {
        self.sections.iter_mut().find(|s| s.label == label)
    }

    /// All leg parts bottom to top, vertical part first.
    pub fn leg_segments(&self) -> impl Iterator<Item = &LegSegment> {
        self.geometry
            .vertical_leg
            .iter()
            .chain(self.geometry.battered_leg.iter())
    }

    /// Group labels referenced by the topology, in a stable order.
    pub fn referenced_groups(&self) -> Vec<String> {
        let g = &self.geometry;
        let mut out = vec![g.pile_group.clone()];
        out.extend(self.leg_segments().map(|s| s.group.clone()));
        for lvl in &g.brace_levels {
            out.push(lvl.lower_stub.group.clone());
            out.push(lvl.upper_stub.group.clone());
            out.push(lvl.brace_group.clone());
            out.push(lvl.joint.group.clone());
        }
        let mut seen = BTreeSet::new();
        out.retain(|l| seen.insert(l.clone()));
        out
    }

    /// Elevation above mudline of the bottom of the battered leg.
    pub fn battered_base_z(&self) -> f64 {
        self.geometry.pile_length_above_mudline_mm
            + self.geometry.vertical_leg.iter().map(|s| s.height_mm).sum::<f64>()
    }

    /// Elevation above mudline of the leg-top working points.
    pub fn leg_top_z(&self) -> f64 {
        self.battered_base_z()
            + self.geometry.battered_leg.iter().map(|s| s.height_mm).sum::<f64>()
    }

    /// Elevation of the bottom of each leg segment, keyed by group.
    pub fn segment_base_z(&self, group: &str) -> Option<(f64, f64)> {
        let mut z = self.geometry.pile_length_above_mudline_mm;
        for seg in self.leg_segments() {
            if seg.group == group {
                return Some((z, seg.height_mm));
            }
            z += seg.height_mm;
        }
        None
    }

    pub fn station_z(&self, st: &LegStation) -> Result<f64> {
        let (z0, h) = self.segment_base_z(&st.segment).ok_or_else(|| {
            Error::invalid("brace_levels", format!("unknown leg segment `{}`", st.segment))
        })?;
        Ok(z0 + st.at * h)
    }

    /// Plan half-width of a leg at elevation `z` (mm above mudline).
    pub fn half_width_at(&self, z: f64) -> f64 {
        let g = &self.geometry;
        let zb = self.battered_base_z();
        if z <= zb {
            return 0.5 * g.base_width_mm;
        }
        let f = (z - zb) / (self.leg_top_z() - zb);
        0.5 * (g.base_width_mm + f * (g.top_width_mm - g.base_width_mm))
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.geometry;
        self.material.validate()?;
        let positive = |name: &str, v: f64| -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("{v} must be positive")))
            }
        };
        positive("top_width_mm", g.top_width_mm)?;
        positive("base_width_mm", g.base_width_mm)?;
        positive("pile_length_above_mudline_mm", g.pile_length_above_mudline_mm)?;
        positive("embedded_pile_length_mm", g.embedded_pile_length_mm)?;
        positive("water_depth_m", g.water_depth_m)?;
        if g.base_width_mm < g.top_width_mm {
            return Err(Error::invalid(
                "base_width_mm",
                format!(
                    "base width {} mm is smaller than top width {} mm",
                    g.base_width_mm, g.top_width_mm
                ),
            ));
        }
        if g.battered_leg.is_empty() {
            return Err(Error::invalid("battered_leg", "at least one segment required"));
        }
        for seg in self.leg_segments() {
            positive(&format!("height of {}", seg.group), seg.height_mm)?;
        }
        let mut leg_seen = BTreeSet::new();
        for seg in self.leg_segments() {
            if !leg_seen.insert(seg.group.as_str()) {
                return Err(Error::invalid(
                    "battered_leg",
                    format!("leg segment `{}` appears twice", seg.group),
                ));
            }
        }
        for lvl in &g.brace_levels {
            for st in [&lvl.lower, &lvl.upper] {
                if !(0.0..=1.0).contains(&st.at) {
                    return Err(Error::invalid(&lvl.name, "station fraction must lie in [0, 1]"));
                }
            }
            let lo = self.station_z(&lvl.lower)?;
            let hi = self.station_z(&lvl.upper)?;
            if hi <= lo {
                return Err(Error::invalid(&lvl.name, "upper station must lie above lower station"));
            }
            if lo < self.battered_base_z() - 1e-9 {
                return Err(Error::invalid(&lvl.name, "braces must attach to the battered leg"));
            }
            positive(&format!("{} lower stub", lvl.name), lvl.lower_stub.length_mm)?;
            positive(&format!("{} upper stub", lvl.name), lvl.upper_stub.length_mm)?;
            positive(&format!("{} joint", lvl.name), lvl.joint.length_mm)?;
        }
        let tf = &g.top_frame;
        positive("plate_width_mm", tf.plate_width_mm)?;
        if tf.plate_thickness_mm < 0.0 || tf.pipe_length_mm < 0.0 || tf.rp_height_mm < 0.0 {
            return Err(Error::invalid("top_frame", "dimensions must be non-negative"));
        }
        if tf.pipe_length_mm > 0.0 && tf.pipe_diameter_mm <= 2.0 * tf.pipe_thickness_mm {
            return Err(Error::invalid("top_frame", "pipe diameter must exceed twice its thickness"));
        }

        // sections
        let mut by_label = BTreeMap::new();
        for s in &self.sections {
            s.validate()?;
            if by_label.insert(s.label.as_str(), s).is_some() {
                return Err(Error::DuplicateGroup(s.label.clone()));
            }
        }
        let referenced = self.referenced_groups();
        for label in &referenced {
            if !by_label.contains_key(label.as_str()) {
                return Err(Error::MissingGroup(label.clone()));
            }
        }
        for s in &self.sections {
            if !referenced.contains(&s.label) {
                return Err(Error::UnusedGroup(s.label.clone()));
            }
        }
        if referenced.len() != GROUP_COUNT {
            return Err(Error::invalid(
                "topology",
                format!("expected {GROUP_COUNT} member groups, found {}", referenced.len()),
            ));
        }
        for s in &self.sections {
            if s.d_outer.is_tapered() && !leg_seen.contains(s.label.as_str()) {
                return Err(Error::invalid(
                    &s.label,
                    "only leg segments may be tapered",
                ));
            }
        }
        Ok(())
    }

    /// Jacket steel mass in tonnes: legs from the pile top upward and all
    /// braces. Piles (above and below the mudline) are foundation and
    /// excluded; the top frame counts only when `include_in_mass` is set.
    pub fn mass_tonnes(&self) -> f64 {
        let tf = &self.geometry.top_frame;
        let extra = if tf.include_in_mass { tf.volume() } else { 0.0 };
        (self.member_volumes().values().sum::<f64>() + extra) * self.material.density_t_per_mm3()
    }

    /// Steel volume per member group (mm³), computed from the generated
    /// joint geometry. Piles are omitted.
    pub fn member_volumes(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        let layout = crate::mesh::StructuralLayout::build(self);
        for part in layout.parts.iter().filter(|p| !p.is_pile) {
            let sec = self.section(&part.group).expect("validated");
            let v = match sec.d_outer {
                Diameter::Uniform(d) => tube_volume(d, d, sec.t_wall, part.length),
                Diameter::Tapered(_) => tube_volume(
                    sec.d_outer.at(part.s0),
                    sec.d_outer.at(part.s1),
                    sec.t_wall,
                    part.length,
                ),
            };
            *out.entry(part.group.clone()).or_insert(0.0) += v;
        }
        out
    }
}

/// Mass of a list of prismatic tubes `(d, t, length)` in mm, in tonnes.
pub fn tube_set_mass(tubes: &[(f64, f64, f64)], density_kg_m3: f64) -> f64 {
    tubes
        .iter()
        .map(|&(d, t, l)| tube_volume(d, d, t, l))
        .sum::<f64>()
        * density_kg_m3
        * 1e-12
}
