//! Jacket topology and beam mesh.
//!
//! The layout is built in two stages: structural joints and member parts
//! (one part per straight run between joints), then each part is divided
//! into equal elements no longer than the characteristic size.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::JacketParams;

/// Corner signs of the four legs, counter-clockwise from (+x, +y).
pub const LEG_SIGNS: [(f64, f64); 4] = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)];

const MERGE_TOL: f64 = 1e-6;
const COINCIDENT_TOL: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PartKind {
    Pile,
    EmbeddedPile,
    Leg,
    Brace,
}

/// A straight member run between two structural joints.
#[derive(Debug, Clone, Serialize)]
pub struct Part {
    pub group: String,
    pub component: usize,
    pub kind: PartKind,
    pub j0: usize,
    pub j1: usize,
    pub length: f64,
    /// Position of the part ends along its member group, for tapering.
    pub s0: f64,
    pub s1: f64,
    #[serde(skip)]
    pub is_pile: bool,
}

#[derive(Debug, Clone)]
pub struct StructuralLayout {
    pub joints: Vec<[f64; 3]>,
    pub parts: Vec<Part>,
    pub components: usize,
    pub leg_top: [usize; 4],
    pub mudline: [usize; 4],
    pub pile_tip: [usize; 4],
    pub rp: [f64; 3],
}

struct Builder {
    joints: Vec<[f64; 3]>,
    parts: Vec<Part>,
    components: usize,
}

impl Builder {
    fn joint(&mut self, p: [f64; 3]) -> usize {
        self.joints.push(p);
        self.joints.len() - 1
    }

    fn part(&mut self, group: &str, kind: PartKind, j0: usize, j1: usize, s: (f64, f64)) {
        let length = dist(self.joints[j0], self.joints[j1]);
        self.parts.push(Part {
            group: group.to_string(),
            component: self.components - 1,
            kind,
            j0,
            j1,
            length,
            s0: s.0,
            s1: s.1,
            is_pile: matches!(kind, PartKind::Pile | PartKind::EmbeddedPile),
        });
    }

    fn new_component(&mut self) {
        self.components += 1;
    }
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn lerp(a: [f64; 3], b: [f64; 3], t: f64) -> [f64; 3] {
    [
        a[0] + t * (b[0] - a[0]),
        a[1] + t * (b[1] - a[1]),
        a[2] + t * (b[2] - a[2]),
    ]
}

/// Point at distance `d` from `a` toward `b`.
fn along(a: [f64; 3], b: [f64; 3], d: f64) -> [f64; 3] {
    lerp(a, b, d / dist(a, b))
}

/// Parameter `t` on segment a0→a1 where it crosses b0→b1 (coplanar lines).
fn crossing(a0: [f64; 3], a1: [f64; 3], b0: [f64; 3], b1: [f64; 3]) -> f64 {
    let u: Vec<f64> = (0..3).map(|i| a1[i] - a0[i]).collect();
    let v: Vec<f64> = (0..3).map(|i| b1[i] - b0[i]).collect();
    let w: Vec<f64> = (0..3).map(|i| b0[i] - a0[i]).collect();
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
    // Normal equations of a0 + t u = b0 + s v.
    let (uu, uv, vv) = (dot(&u, &u), dot(&u, &v), dot(&v, &v));
    let (uw, vw) = (dot(&u, &w), dot(&v, &w));
    let det = uu * vv - uv * uv;
    (uw * vv - uv * vw) / det
}

impl StructuralLayout {
    pub fn build(p: &JacketParams) -> Self {
        Self::try_build(p).expect("validated parameters give a valid layout")
    }

    pub fn try_build(p: &JacketParams) -> Result<Self> {
        let g = &p.geometry;
        let mut b = Builder {
            joints: Vec::new(),
            parts: Vec::new(),
            components: 0,
        };
        let leg_point = |leg: usize, z: f64| {
            let (sx, sy) = LEG_SIGNS[leg];
            let hw = p.half_width_at(z);
            [sx * hw, sy * hw, z]
        };

        // Leg breakpoints: segment ends plus brace stations.
        let mut segs: Vec<(String, f64, f64)> = Vec::new();
        let mut z = g.pile_length_above_mudline_mm;
        for s in p.leg_segments() {
            segs.push((s.group.clone(), z, z + s.height_mm));
            z += s.height_mm;
        }
        let mut stations: Vec<f64> = segs.iter().map(|s| s.1).collect();
        stations.push(z);
        for lvl in &g.brace_levels {
            stations.push(p.station_z(&lvl.lower)?);
            stations.push(p.station_z(&lvl.upper)?);
        }
        stations.sort_by(|a, b| a.partial_cmp(b).unwrap());
        stations.dedup_by(|a, b| (*a - *b).abs() < MERGE_TOL);

        let mut leg_top = [0; 4];
        let mut mudline = [0; 4];
        let mut pile_tip = [0; 4];
        // station joints per leg, same order as `stations`
        let mut leg_joints: Vec<Vec<usize>> = Vec::new();
        for leg in 0..4 {
            let tip = b.joint(leg_point(leg, -g.embedded_pile_length_mm));
            let mud = b.joint(leg_point(leg, 0.0));
            pile_tip[leg] = tip;
            mudline[leg] = mud;
            b.new_component();
            b.part(&g.pile_group, PartKind::EmbeddedPile, tip, mud, (0.0, 1.0));
            let joints: Vec<usize> = stations.iter().map(|&z| b.joint(leg_point(leg, z))).collect();
            b.new_component();
            b.part(&g.pile_group, PartKind::Pile, mud, joints[0], (0.0, 1.0));
            for (name, z0, z1) in &segs {
                b.new_component();
                for k in 0..stations.len() - 1 {
                    let (za, zb) = (stations[k], stations[k + 1]);
                    if za >= *z0 - MERGE_TOL && zb <= *z1 + MERGE_TOL {
                        let s = ((za - z0) / (z1 - z0), (zb - z0) / (z1 - z0));
                        b.part(name, PartKind::Leg, joints[k], joints[k + 1], s);
                    }
                }
            }
            leg_top[leg] = *joints.last().unwrap();
            leg_joints.push(joints);
        }
        let station_index = |z: f64| {
            stations
                .iter()
                .position(|s| (s - z).abs() < MERGE_TOL)
                .expect("station registered")
        };

        for lvl in &g.brace_levels {
            let kl = station_index(p.station_z(&lvl.lower)?);
            let ku = station_index(p.station_z(&lvl.upper)?);
            for face in 0..4 {
                let (la, lb) = (face, (face + 1) % 4);
                let (a0, a1) = (leg_joints[la][kl], leg_joints[lb][ku]);
                let (b0, b1) = (leg_joints[lb][kl], leg_joints[la][ku]);
                let (pa0, pa1) = (b.joints[a0], b.joints[a1]);
                let (pb0, pb1) = (b.joints[b0], b.joints[b1]);
                let t = crossing(pa0, pa1, pb0, pb1);
                let c = b.joint(lerp(pa0, pa1, t));
                let pc = b.joints[c];
                let half_j = 0.5 * lvl.joint.length_mm;
                let (sl, su) = (lvl.lower_stub.length_mm, lvl.upper_stub.length_mm);
                let check = |what: &str, len: f64| -> Result<()> {
                    if len <= COINCIDENT_TOL {
                        Err(Error::DegenerateGeometry(format!(
                            "{} {what} has non-positive length {len:.1} mm",
                            lvl.name
                        )))
                    } else {
                        Ok(())
                    }
                };
                check("lower brace", dist(pa0, pc) - sl - half_j)?;
                check("upper brace", dist(pc, pa1) - su - half_j)?;
                check("lower brace", dist(pb0, pc) - sl)?;
                check("upper brace", dist(pc, pb1) - su)?;

                // continuous diagonal with the joint can
                let sa0 = b.joint(along(pa0, pa1, sl));
                let ja0 = b.joint(along(pc, pa0, half_j));
                let ja1 = b.joint(along(pc, pa1, half_j));
                let sa1 = b.joint(along(pa1, pa0, su));
                let chain = [
                    (&lvl.lower_stub.group, a0, sa0),
                    (&lvl.brace_group, sa0, ja0),
                    (&lvl.joint.group, ja0, c),
                    (&lvl.brace_group, ja1, sa1),
                    (&lvl.upper_stub.group, sa1, a1),
                ];
                for (i, (grp, j0, j1)) in chain.into_iter().enumerate() {
                    b.new_component();
                    b.part(grp, PartKind::Brace, j0, j1, (0.0, 1.0));
                    if i == 2 {
                        b.part(grp, PartKind::Brace, c, ja1, (0.0, 1.0));
                    }
                }
                // split diagonal
                let sb0 = b.joint(along(pb0, pb1, sl));
                let sb1 = b.joint(along(pb1, pb0, su));
                let chain = [
                    (&lvl.lower_stub.group, b0, sb0),
                    (&lvl.brace_group, sb0, c),
                    (&lvl.brace_group, c, sb1),
                    (&lvl.upper_stub.group, sb1, b1),
                ];
                for (grp, j0, j1) in chain {
                    b.new_component();
                    b.part(grp, PartKind::Brace, j0, j1, (0.0, 1.0));
                }
            }
        }

        let z_top = p.leg_top_z();
        let rp = [0.0, 0.0, z_top + g.top_frame.rp_height_mm];
        let layout = StructuralLayout {
            joints: b.joints,
            parts: b.parts,
            components: b.components,
            leg_top,
            mudline,
            pile_tip,
            rp,
        };
        layout.check_coincident()?;
        Ok(layout)
    }

    fn check_coincident(&self) -> Result<()> {
        for i in 0..self.joints.len() {
            for j in i + 1..self.joints.len() {
                if dist(self.joints[i], self.joints[j]) < COINCIDENT_TOL {
                    return Err(Error::DegenerateGeometry(format!(
                        "joints {i} and {j} coincide at ({:.1}, {:.1}, {:.1})",
                        self.joints[i][0], self.joints[i][1], self.joints[i][2]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Components above the mudline (the embedded piles are excluded).
    pub fn structural_components(&self) -> usize {
        let mut ids: Vec<usize> = self
            .parts
            .iter()
            .filter(|p| p.kind != PartKind::EmbeddedPile)
            .map(|p| p.component)
            .collect();
        ids.dedup();
        ids.len()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Node {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Node {
    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Element {
    pub id: usize,
    pub nodes: [usize; 2],
    pub group: String,
    pub component: usize,
    pub kind: PartKind,
    /// Section at the element midpoint (mm).
    pub d_outer: f64,
    pub t_wall: f64,
}

/// Gauss point used for distributed loads.
#[derive(Debug, Clone, Serialize)]
pub struct IntegrationPoint {
    pub element: usize,
    /// Position along the element, 0 at the first node.
    pub xi: f64,
    pub weight: f64,
    pub x: f64,
    pub y: f64,
    /// Elevation above mudline (mm).
    pub z: f64,
}

impl IntegrationPoint {
    /// Elevation relative to still water (m) for a given water depth.
    pub fn z_swl(&self, water_depth_m: f64) -> f64 {
        self.z * 1e-3 - water_depth_m
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Mesh {
    pub char_size: f64,
    pub nodes: Vec<Node>,
    pub elements: Vec<Element>,
    pub integration_points: Vec<IntegrationPoint>,
    /// Free node at the jacket top centre carrying the top loads.
    pub rp: usize,
    pub leg_top: [usize; 4],
    pub mudline: [usize; 4],
    /// Embedded pile nodes per leg, mudline first, ordered by depth.
    pub pile_nodes: [Vec<usize>; 4],
    pub components: usize,
}

const GAUSS2: [(f64, f64); 2] = [
    (0.211_324_865_405_187_1, 0.5),
    (0.788_675_134_594_812_9, 0.5),
];

pub fn generate_mesh(p: &JacketParams, char_size: f64) -> Result<Mesh> {
    if !(char_size.is_finite() && char_size > 0.0) {
        return Err(Error::invalid("char_size", format!("{char_size} must be positive")));
    }
    p.validate()?;
    let layout = StructuralLayout::try_build(p)?;
    let mut nodes: Vec<Node> = layout
        .joints
        .iter()
        .enumerate()
        .map(|(id, c)| Node {
            id,
            x: c[0],
            y: c[1],
            z: c[2],
        })
        .collect();
    let mut elements = Vec::new();
    let mut pile_chain: [Vec<(f64, usize)>; 4] = Default::default();
    for (leg, &m) in layout.mudline.iter().enumerate() {
        pile_chain[leg].push((0.0, m));
    }

    for part in &layout.parts {
        let sec = p.section(&part.group).expect("validated");
        let n = divisions(part.length, char_size);
        let a = layout.joints[part.j0];
        let b = layout.joints[part.j1];
        let mut chain = vec![part.j0];
        for k in 1..n {
            let id = nodes.len();
            let c = lerp(a, b, k as f64 / n as f64);
            nodes.push(Node {
                id,
                x: c[0],
                y: c[1],
                z: c[2],
            });
            chain.push(id);
        }
        chain.push(part.j1);
        for k in 0..n {
            let s = part.s0 + (part.s1 - part.s0) * (k as f64 + 0.5) / n as f64;
            elements.push(Element {
                id: elements.len(),
                nodes: [chain[k], chain[k + 1]],
                group: part.group.clone(),
                component: part.component,
                kind: part.kind,
                d_outer: sec.d_outer.at(s),
                t_wall: sec.t_wall,
            });
        }
        if part.kind == PartKind::EmbeddedPile {
            let leg = layout.pile_tip.iter().position(|&t| t == part.j0).unwrap();
            for &id in &chain {
                if id != layout.mudline[leg] {
                    pile_chain[leg].push((-nodes[id].z, id));
                }
            }
        }
    }
    let pile_nodes = pile_chain.map(|mut c| {
        c.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        c.into_iter().map(|(_, id)| id).collect::<Vec<_>>()
    });

    let rp = nodes.len();
    nodes.push(Node {
        id: rp,
        x: layout.rp[0],
        y: layout.rp[1],
        z: layout.rp[2],
    });

    let mut integration_points = Vec::with_capacity(2 * elements.len());
    for e in &elements {
        let a = nodes[e.nodes[0]].coords();
        let b = nodes[e.nodes[1]].coords();
        for (xi, w) in GAUSS2 {
            let c = lerp(a, b, xi);
            integration_points.push(IntegrationPoint {
                element: e.id,
                xi,
                weight: w,
                x: c[0],
                y: c[1],
                z: c[2],
            });
        }
    }

    Ok(Mesh {
        char_size,
        nodes,
        elements,
        integration_points,
        rp,
        leg_top: layout.leg_top,
        mudline: layout.mudline,
        pile_nodes,
        components: layout.structural_components(),
    })
}

/// Number of equal elements needed so none exceeds `char_size`.
pub fn divisions(length: f64, char_size: f64) -> usize {
    // Guard against 2000.0000001 / 1000 style round-off.
    ((length / char_size) - 1e-9).ceil().max(1.0) as usize
}

impl Mesh {
    pub fn element_length(&self, e: &Element) -> f64 {
        dist(
            self.nodes[e.nodes[0]].coords(),
            self.nodes[e.nodes[1]].coords(),
        )
    }

    /// Total length of members above the mudline.
    pub fn member_length(&self) -> f64 {
        self.elements
            .iter()
            .filter(|e| e.kind != PartKind::EmbeddedPile)
            .map(|e| self.element_length(e))
            .sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("mesh serialises")
    }

    /// Every node reachable from the RP through elements, with the RP
    /// linked to the leg tops.
    pub fn is_connected(&self) -> bool {
        let n = self.nodes.len();
        let mut adj = vec![Vec::new(); n];
        for e in &self.elements {
            adj[e.nodes[0]].push(e.nodes[1]);
            adj[e.nodes[1]].push(e.nodes[0]);
        }
        for &t in &self.leg_top {
            adj[self.rp].push(t);
            adj[t].push(self.rp);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![self.rp];
        seen[self.rp] = true;
        while let Some(i) = stack.pop() {
            for &j in &adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}
