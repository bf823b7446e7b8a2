//! Pile–soil springs: piecewise-linear p–y / t–z curves and the two-node
//! interface element.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::read_json;
use crate::mesh::Mesh;

/// Continuous piecewise-linear curve through the origin, given by its
/// breakpoints for Δ ≥ 0 and extended with odd symmetry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct Curve {
    points: Vec<[f64; 2]>,
}

impl TryFrom<Vec<[f64; 2]>> for Curve {
    type Error = String;

    fn try_from(points: Vec<[f64; 2]>) -> std::result::Result<Self, String> {
        Curve::new(points)
    }
}

impl From<Curve> for Vec<[f64; 2]> {
    fn from(c: Curve) -> Self {
        c.points
    }
}

impl Curve {
    pub fn new(points: Vec<[f64; 2]>) -> std::result::Result<Self, String> {
        if points.len() < 2 {
            return Err("a curve needs at least two points".into());
        }
        if points[0] != [0.0, 0.0] {
            return Err("curve must start at the origin".into());
        }
        for w in points.windows(2) {
            if !(w[1][0] > w[0][0]) {
                return Err("displacements must be strictly increasing".into());
            }
            if !(w[1][1] >= w[0][1]) {
                return Err("forces must be non-decreasing".into());
            }
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err("curve values must be finite".into());
        }
        let c = Curve { points };
        let k0 = c.slope(0);
        if !(k0 > 0.0) {
            return Err("initial tangent must be positive".into());
        }
        Ok(c)
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    fn slope(&self, seg: usize) -> f64 {
        let [x0, y0] = self.points[seg];
        let [x1, y1] = self.points[seg + 1];
        (y1 - y0) / (x1 - x0)
    }

    /// Segment used at |Δ| = x. Breakpoints belong to the segment on
    /// their right, and the last segment extends to infinity.
    fn segment(&self, x: f64) -> usize {
        let last = self.points.len() - 2;
        (0..last).find(|&i| x < self.points[i + 1][0]).unwrap_or(last)
    }

    pub fn initial_tangent(&self) -> f64 {
        self.slope(0)
    }

    pub fn eval(&self, delta: f64) -> f64 {
        let x = delta.abs();
        let i = self.segment(x);
        let [x0, y0] = self.points[i];
        let y = y0 + self.slope(i) * (x - x0);
        y.copysign(delta)
    }

    /// Right-hand tangent dT/dΔ.
    pub fn tangent(&self, delta: f64) -> f64 {
        self.slope(self.segment(delta.abs()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SoilLayer {
    pub name: String,
    pub depth_top_m: f64,
    pub depth_bottom_m: f64,
    /// Δ (m) → p (N/m).
    pub py: Curve,
    /// Δ (m) → t (N/m).
    pub tz: Curve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SoilProfile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub layers: Vec<SoilLayer>,
}

impl SoilProfile {
    pub fn from_file(path: &Path) -> Result<Self> {
        let p: SoilProfile = read_json(path)?;
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::Config("soil profile has no layers".into()));
        }
        for l in &self.layers {
            if !(l.depth_top_m >= 0.0 && l.depth_bottom_m > l.depth_top_m) {
                return Err(Error::SoilCurve {
                    layer: l.name.clone(),
                    reason: "depth range must satisfy 0 <= top < bottom".into(),
                });
            }
        }
        Ok(())
    }

    /// Layer containing `depth` (m below mudline). A depth on a boundary
    /// belongs to the deeper layer.
    pub fn layer_at(&self, depth: f64) -> Result<usize> {
        let tol = 1e-9;
        let mut found = None;
        for (i, l) in self.layers.iter().enumerate() {
            if depth >= l.depth_top_m - tol && depth < l.depth_bottom_m - tol {
                found = Some(i);
            }
        }
        if found.is_none() {
            // the bottom of the deepest layer is still covered
            found = self
                .layers
                .iter()
                .enumerate()
                .filter(|(_, l)| (depth - l.depth_bottom_m).abs() <= tol)
                .map(|(i, _)| i)
                .next_back();
        }
        found.ok_or(Error::SoilCoverage(depth))
    }
}

/// Interface law of one layer in the local (H1, H2, V) frame.
pub fn interface_force(layer: &SoilLayer, delta: [f64; 3]) -> [f64; 3] {
    let [h1, h2, v] = delta;
    let r = h1.hypot(h2);
    let tv = layer.tz.eval(v);
    if r == 0.0 {
        return [0.0, 0.0, tv];
    }
    let ph = layer.py.eval(r);
    [ph * h1 / r, ph * h2 / r, tv]
}

/// ∂T/∂Δ (N/m²).
pub fn interface_tangent(layer: &SoilLayer, delta: [f64; 3]) -> [[f64; 3]; 3] {
    let [h1, h2, v] = delta;
    let r = h1.hypot(h2);
    let kv = layer.tz.tangent(v);
    let mut t = [[0.0; 3]; 3];
    t[2][2] = kv;
    if r < 1e-14 {
        let k0 = layer.py.initial_tangent();
        t[0][0] = k0;
        t[1][1] = k0;
        return t;
    }
    let ph = layer.py.eval(r);
    let kt = layer.py.tangent(r);
    let n = [h1 / r, h2 / r];
    for i in 0..2 {
        for j in 0..2 {
            let nn = n[i] * n[j];
            let delta_ij = if i == j { 1.0 } else { 0.0 };
            t[i][j] = kt * nn + ph / r * (delta_ij - nn);
        }
    }
    t
}

/// Two-node spring between a pile node and a fixed anchor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpringElement {
    pub pile_node: usize,
    /// Tributary pile length (m).
    pub length: f64,
    pub layer: usize,
    /// Depth below mudline (m).
    pub depth: f64,
}

impl SpringElement {
    /// f_e = L_e Bᵀ T(B u) with B = [I −I]; u in m, f in N.
    pub fn force(&self, layer: &SoilLayer, u: [f64; 6]) -> [f64; 6] {
        let d = [u[0] - u[3], u[1] - u[4], u[2] - u[5]];
        let t = interface_force(layer, d);
        let mut f = [0.0; 6];
        for i in 0..3 {
            f[i] = self.length * t[i];
            f[i + 3] = -self.length * t[i];
        }
        f
    }

    /// K_e = L_e Bᵀ (∂T/∂Δ) B (N/m).
    pub fn stiffness(&self, layer: &SoilLayer, u: [f64; 6]) -> [[f64; 6]; 6] {
        let d = [u[0] - u[3], u[1] - u[4], u[2] - u[5]];
        let t = interface_tangent(layer, d);
        let mut k = [[0.0; 6]; 6];
        for i in 0..3 {
            for j in 0..3 {
                let v = self.length * t[i][j];
                k[i][j] = v;
                k[i + 3][j + 3] = v;
                k[i][j + 3] = -v;
                k[i + 3][j] = -v;
            }
        }
        k
    }
}

/// One spring per embedded pile node (mudline included) with tributary
/// lengths; the layer is picked by node depth.
pub fn build_spring_field(mesh: &Mesh, profile: &SoilProfile) -> Result<Vec<SpringElement>> {
    let mut out = Vec::new();
    for chain in &mesh.pile_nodes {
        let depths: Vec<f64> = chain.iter().map(|&n| -mesh.nodes[n].z * 1e-3).collect();
        let n = depths.len();
        if n < 2 {
            continue;
        }
        for (i, (&node, &depth)) in chain.iter().zip(&depths).enumerate() {
            let above = if i > 0 { depths[i] - depths[i - 1] } else { 0.0 };
            let below = if i + 1 < n { depths[i + 1] - depths[i] } else { 0.0 };
            out.push(SpringElement {
                pile_node: node,
                length: 0.5 * (above + below),
                layer: profile.layer_at(depth)?,
                depth,
            });
        }
    }
    Ok(out)
}

/// Piecewise-linear samples of common design curves, used to build
/// illustrative profiles.
pub mod generators {
    use super::Curve;

    /// Soft clay under static load: p/p_u = 0.5 (y/y_c)^(1/3), capped at p_u
    /// beyond 8 y_c. Units: kPa, kN/m³, m; result in N/m.
    pub fn soft_clay_py(su: f64, gamma: f64, eps50: f64, j: f64, d: f64, x: f64) -> Curve {
        let pu = ((3.0 * su + gamma * x) * d + j * su * x).min(9.0 * su * d) * 1e3;
        let yc = 2.5 * eps50 * d;
        let p = |r: f64| (0.5 * r.cbrt()).min(1.0) * pu;
        let mut pts = vec![[0.0, 0.0]];
        pts.extend([0.02, 0.1, 0.3, 1.0, 3.0, 8.0, 16.0].map(|r| [r * yc, p(r)]));
        Curve::new(pts).expect("generated curve is valid")
    }

    /// Sand: p = A p_u tanh(k x y / (A p_u)), sampled where the tanh
    /// argument is 0.25, 0.5, 1, 1.5 and 3. `k` in kN/m³.
    pub fn sand_py(phi_deg: f64, gamma: f64, k: f64, d: f64, x: f64) -> Curve {
        let phi = phi_deg.to_radians();
        // shallow/deep ultimate resistance with the usual C1..C3 fits
        let c1 = (2.0 * phi).tan().abs().min(6.0) + 0.1 * phi_deg;
        let c2 = 0.02 * phi_deg + 1.0;
        let c3 = 0.4 * phi_deg.powf(1.9);
        let pus = (c1 * x + c2 * d) * gamma * x;
        let pud = c3 * d * gamma * x;
        let pu = pus.min(pud) * 1e3;
        let a = (3.0 - 0.8 * x / d).max(0.9);
        let apu = a * pu;
        let kx = k * 1e3 * x;
        let y = |arg: f64| arg * apu / kx;
        let mut pts = vec![[0.0, 0.0]];
        pts.extend([0.25, 0.5, 1.0, 1.5, 3.0].map(|a: f64| [y(a), apu * a.tanh()]));
        Curve::new(pts).expect("generated curve is valid")
    }

    /// Shaft friction of a clay t-z curve (t/t_max 0.3, 0.5, 0.75, 0.9, 1
    /// at z/D 0.0016, 0.0031, 0.0057, 0.008, 0.01), held at t_max after.
    /// `f_max` in kPa; result in N/m.
    pub fn tz_curve(f_max: f64, d: f64) -> Curve {
        let tmax = f_max * std::f64::consts::PI * d * 1e3;
        let mut pts = vec![[0.0, 0.0]];
        pts.extend(
            [(0.0016, 0.3), (0.0031, 0.5), (0.0057, 0.75), (0.008, 0.9), (0.01, 1.0), (0.02, 1.0)]
                .map(|(z, t)| [z * d, t * tmax]),
        );
        Curve::new(pts).expect("generated curve is valid")
    }

    /// Sand shaft friction: linear up to t_max at z = 2.54 mm, then constant.
    /// `f_max` in kPa; result in N/m.
    pub fn sand_tz(f_max: f64, d: f64) -> Curve {
        let tmax = f_max * std::f64::consts::PI * d * 1e3;
        Curve::new(vec![[0.0, 0.0], [0.00254, tmax], [0.02 * d, tmax]])
            .expect("generated curve is valid")
    }
}

/// The shipped illustrative four-layer profile for a pile of diameter `d`
/// (m) embedded `length` m.
pub fn illustrative_profile(d: f64, length: f64) -> SoilProfile {
    use generators::*;
    let layer = |name: &str, top: f64, bottom: f64, py: Curve, tz: Curve| SoilLayer {
        name: name.into(),
        depth_top_m: top,
        depth_bottom_m: bottom,
        py,
        tz,
    };
    let mid = |a: f64, b: f64| 0.5 * (a + b);
    SoilProfile {
        note: Some(
            "Illustrative profile built from clay and sand p-y and t-z fits; \
             not site data."
                .into(),
        ),
        layers: vec![
            layer(
                "firm clay",
                0.0,
                6.0,
                soft_clay_py(60.0, 8.0, 0.005, 0.5, d, mid(0.0, 6.0)),
                tz_curve(50.0, d),
            ),
            layer(
                "silty clay",
                6.0,
                18.0,
                soft_clay_py(100.0, 8.5, 0.005, 0.5, d, mid(6.0, 18.0)),
                tz_curve(90.0, d),
            ),
            layer(
                "stiff clay",
                18.0,
                32.0,
                soft_clay_py(200.0, 9.0, 0.004, 0.5, d, mid(18.0, 32.0)),
                tz_curve(140.0, d),
            ),
            layer(
                "dense sand",
                32.0,
                length.max(32.0) + 10.0,
                sand_py(38.0, 10.0, 40_000.0, d, mid(32.0, length.max(32.0))),
                sand_tz(150.0, d),
            ),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layer() -> SoilLayer {
        SoilLayer {
            name: "test".into(),
            depth_top_m: 0.0,
            depth_bottom_m: 10.0,
            py: Curve::new(vec![[0.0, 0.0], [0.01, 1e5], [0.05, 2e5], [0.1, 2e5]]).unwrap(),
            tz: Curve::new(vec![[0.0, 0.0], [0.005, 5e4], [0.02, 8e4], [0.04, 9e4]]).unwrap(),
        }
    }

    #[test]
    fn curve_interpolation() {
        let l = layer();
        assert_eq!(l.py.eval(0.0), 0.0);
        approx::assert_relative_eq!(l.py.eval(0.03), 1.5e5, max_relative = 1e-12);
        assert_eq!(l.py.eval(-0.03), -l.py.eval(0.03));
        assert_eq!(l.py.eval(0.5), 2e5);
        // last segment slope continues
        approx::assert_relative_eq!(l.tz.eval(0.06), 1e5, max_relative = 1e-12);
    }

    #[test]
    fn right_hand_tangent() {
        let l = layer();
        assert_eq!(l.py.tangent(0.01), 2.5e6);
        assert_eq!(l.py.tangent(0.0), 1e7);
        assert_eq!(l.py.tangent(0.2), 0.0);
    }

    #[test]
    fn bad_curves_rejected() {
        assert!(Curve::new(vec![[0.0, 0.0], [0.01, -1.0]]).is_err());
        assert!(Curve::new(vec![[0.0, 1.0], [0.01, 2.0]]).is_err());
        assert!(Curve::new(vec![[0.0, 0.0], [0.0, 2.0]]).is_err());
        assert!(Curve::new(vec![[0.0, 0.0], [0.01, 0.0], [0.02, 1.0]]).is_err());
        let r: std::result::Result<Curve, _> = serde_json::from_str("[[0,0],[0.01,-5]]");
        assert!(r.is_err());
    }

    #[test]
    fn interface_cases() {
        let l = layer();
        assert_eq!(interface_force(&l, [0.0; 3]), [0.0; 3]);
        let t = interface_force(&l, [0.02, 0.0, 0.0]);
        assert_eq!(t, [l.py.eval(0.02), 0.0, 0.0]);
        let d = 0.015;
        let t = interface_force(&l, [d, d, 0.0]);
        let expect = l.py.eval(2f64.sqrt() * d) / 2f64.sqrt();
        approx::assert_relative_eq!(t[0], expect, max_relative = 1e-12);
        approx::assert_relative_eq!(t[1], expect, max_relative = 1e-12);
    }

    #[test]
    fn constant_tangent_block() {
        let l = layer();
        let s = SpringElement {
            pile_node: 0,
            length: 2.0,
            layer: 0,
            depth: 1.0,
        };
        let k = s.stiffness(&l, [0.0; 6]);
        let d = [2.0 * 1e7, 2.0 * 1e7, 2.0 * 1e7];
        for i in 0..3 {
            assert_eq!(k[i][i], d[i]);
            assert_eq!(k[i][i + 3], -d[i]);
            assert_eq!(k[i + 3][i + 3], d[i]);
        }
        // rigid translation
        let u = [0.3, -0.1, 0.2, 0.3, -0.1, 0.2];
        for row in &k {
            let f: f64 = row.iter().zip(&u).map(|(a, b)| a * b).sum();
            assert!(f.abs() < 1e-6);
        }
        assert_eq!(s.force(&l, u), [0.0; 6]);
    }

    #[test]
    fn single_displaced_node() {
        let l = layer();
        let s = SpringElement {
            pile_node: 0,
            length: 1.5,
            layer: 0,
            depth: 1.0,
        };
        let f = s.force(&l, [0.02, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(f[0], 1.5 * l.py.eval(0.02));
        assert_eq!(f[3], -1.5 * l.py.eval(0.02));
    }

    #[test]
    fn boundary_goes_deeper() {
        let p = illustrative_profile(4.2, 50.0);
        assert_eq!(p.layer_at(6.0).unwrap(), 1);
        assert_eq!(p.layer_at(5.999).unwrap(), 0);
        assert_eq!(p.layer_at(0.0).unwrap(), 0);
        assert!(matches!(p.layer_at(100.0), Err(Error::SoilCoverage(_))));
    }

    #[test]
    fn generated_curves_monotone() {
        let p = illustrative_profile(4.2, 50.0);
        for l in &p.layers {
            assert!(l.py.initial_tangent() > 0.0);
            assert!(l.tz.initial_tangent() > 0.0);
        }
    }
}
