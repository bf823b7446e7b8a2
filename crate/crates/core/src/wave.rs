//! Stokes fifth-order wave kinematics and Morison line loads.
//!
//! Coefficients follow the Skjelbreia–Hendrickson expansion in terms of
//! kd = βz_s, with the corrected C₂ term.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::read_json;

/// Expansion coefficients for one value of βz_s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub a11: f64,
    pub a13: f64,
    pub a15: f64,
    pub a22: f64,
    pub a24: f64,
    pub a33: f64,
    pub a35: f64,
    pub a44: f64,
    pub a55: f64,
    pub b22: f64,
    pub b24: f64,
    pub b33: f64,
    pub b35: f64,
    pub b44: f64,
    pub b55: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Coefficients {
    pub fn new(kd: f64) -> Self {
        let s = kd.sinh();
        let c = kd.cosh();
        let c2 = c * c;
        let c4 = c2 * c2;
        let c6 = c4 * c2;
        let c8 = c4 * c4;
        let c10 = c8 * c2;
        let c12 = c6 * c6;
        let c14 = c12 * c2;
        let c16 = c8 * c8;
        let sp = |n: i32| s.powi(n);
        let d6 = 6.0 * c2 - 1.0;
        let d8 = 8.0 * c4 - 11.0 * c2 + 3.0;

        Coefficients {
            a11: 1.0 / s,
            a13: -c2 * (5.0 * c2 + 1.0) / (8.0 * sp(5)),
            a15: -(1184.0 * c10 - 1440.0 * c8 - 1992.0 * c6 + 2641.0 * c4 - 249.0 * c2 + 18.0)
                / (1536.0 * sp(11)),
            a22: 3.0 / (8.0 * sp(4)),
            a24: (192.0 * c8 - 424.0 * c6 - 312.0 * c4 + 480.0 * c2 - 17.0) / (768.0 * sp(10)),
            a33: (13.0 - 4.0 * c2) / (64.0 * sp(7)),
            a35: (512.0 * c12 + 4224.0 * c10 - 6800.0 * c8 - 12808.0 * c6 + 16704.0 * c4
                - 3154.0 * c2
                + 107.0)
                / (4096.0 * sp(13) * d6),
            a44: (80.0 * c6 - 816.0 * c4 + 1338.0 * c2 - 197.0) / (1536.0 * sp(10) * d6),
            a55: -(2880.0 * c10 - 72480.0 * c8 + 324000.0 * c6 - 432000.0 * c4 + 163470.0 * c2
                - 16245.0)
                / (61440.0 * sp(11) * d6 * d8),
            b22: (2.0 * c2 + 1.0) * c / (4.0 * sp(3)),
            b24: c * (272.0 * c8 - 504.0 * c6 - 192.0 * c4 + 322.0 * c2 + 21.0) / (384.0 * sp(9)),
            b33: 3.0 * (8.0 * c6 + 1.0) / (64.0 * sp(6)),
            b35: (88128.0 * c14 - 208224.0 * c12 + 70848.0 * c10 + 54000.0 * c8 - 21816.0 * c6
                + 6264.0 * c4
                - 54.0 * c2
                - 81.0)
                / (12288.0 * sp(12) * d6),
            b44: c * (768.0 * c10 - 448.0 * c8 - 48.0 * c6 + 48.0 * c4 + 106.0 * c2 - 21.0)
                / (384.0 * sp(9) * d6),
            b55: (192000.0 * c16 - 262720.0 * c14 + 83680.0 * c12 + 20160.0 * c10 - 7280.0 * c8
                + 7160.0 * c6
                - 1800.0 * c4
                - 1050.0 * c2
                + 225.0)
                / (12288.0 * sp(10) * d6 * d8),
            c1: (8.0 * c4 - 8.0 * c2 + 9.0) / (8.0 * sp(4)),
            c2: (3840.0 * c12 - 4096.0 * c10 - 2592.0 * c8 - 1008.0 * c6 + 5944.0 * c4
                - 1830.0 * c2
                + 147.0)
                / (512.0 * sp(10) * d6),
        }
    }

    /// κ₁..κ₅ for a given λ.
    pub fn kappa(&self, lambda: f64) -> [f64; 5] {
        let l = lambda;
        let (l2, l3, l4, l5) = (l * l, l * l * l, l.powi(4), l.powi(5));
        [
            l * self.a11 + l3 * self.a13 + l5 * self.a15,
            l2 * self.a22 + l4 * self.a24,
            l3 * self.a33 + l5 * self.a35,
            l4 * self.a44,
            l5 * self.a55,
        ]
    }
}

/// Left-hand side of the height equation, −(H/2)β + λ + B₃₃λ³ + (B₃₅+B₅₅)λ⁵.
pub fn height_residual(coef: &Coefficients, hs: f64, beta: f64, lambda: f64) -> f64 {
    let l2 = lambda * lambda;
    -0.5 * hs * beta + lambda * (1.0 + l2 * (coef.b33 + l2 * (coef.b35 + coef.b55)))
}

fn height_residual_slope(coef: &Coefficients, lambda: f64) -> f64 {
    let l2 = lambda * lambda;
    1.0 + 3.0 * coef.b33 * l2 + 5.0 * (coef.b35 + coef.b55) * l2 * l2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveInput {
    pub period: f64,
    pub height: f64,
    pub depth: f64,
    pub length: f64,
    pub rho: f64,
    pub g: f64,
}

impl WaveInput {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("Tp_s", self.period),
            ("L_m", self.length),
            ("water depth", self.depth),
            ("rho_w", self.rho),
            ("g", self.g),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("{v} must be positive")));
            }
        }
        if !(self.height.is_finite() && self.height >= 0.0) {
            return Err(Error::invalid("Hs_m", "must be non-negative"));
        }
        if self.height >= self.depth {
            return Err(Error::invalid("Hs_m", "wave height must be below the water depth"));
        }
        Ok(())
    }
}

const NEWTON_MAX_ITER: usize = 100;
const ROOT_TOL: f64 = 1e-14;

/// Root of the height equation on λ ≥ 0 by Newton's method, falling back
/// to bisection when Newton stalls or leaves the bracket.
pub fn solve_lambda(coef: &Coefficients, hs: f64, beta: f64) -> Result<f64> {
    if hs == 0.0 {
        return Ok(0.0);
    }
    let target = 0.5 * hs * beta;
    let mut trace = Vec::new();
    let mut l = target;
    for _ in 0..NEWTON_MAX_ITER {
        let r = height_residual(coef, hs, beta, l);
        trace.push(r);
        if r.abs() <= ROOT_TOL * target.max(1.0) {
            if l >= 0.0 {
                return Ok(l);
            }
            break;
        }
        let d = height_residual_slope(coef, l);
        if !(d.is_finite() && d > 0.0) {
            break;
        }
        l -= r / d;
        if !l.is_finite() || l < 0.0 {
            break;
        }
    }
    bisect_lambda(coef, hs, beta).map_err(|e| match e {
        Error::WaveSolve { reason, trace: mut t } => {
            trace.append(&mut t);
            Error::WaveSolve { reason, trace }
        }
        other => other,
    })
}

/// Bracketed bisection on [0, λ_hi], with λ_hi found by doubling.
pub fn bisect_lambda(coef: &Coefficients, hs: f64, beta: f64) -> Result<f64> {
    let f = |l: f64| height_residual(coef, hs, beta, l);
    let mut hi = (0.5 * hs * beta).max(1e-12);
    let mut trace = Vec::new();
    while f(hi) < 0.0 {
        hi *= 2.0;
        trace.push(f(hi));
        if hi > 1e6 {
            return Err(Error::WaveSolve {
                reason: "no sign change for the expansion parameter".into(),
                trace,
            });
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Solved wave.
#[derive(Debug, Clone, Serialize)]
pub struct WaveState {
    pub input: WaveInput,
    pub beta: f64,
    pub omega: f64,
    pub lambda: f64,
    pub celerity: f64,
    pub coef: Coefficients,
    pub kappa: [f64; 5],
    /// Relative gap between the given wavelength and c̄·T_p.
    pub dispersion_mismatch: f64,
    /// (sin nθ, cos nθ) at the design-load phase samples.
    #[serde(skip)]
    phases: Vec<[(f64, f64); 5]>,
}

/// Elevation-dependent factors n κ_n cosh(nβs) and n² κ_n cosh(nβs).
#[derive(Debug, Clone, Copy)]
pub struct SeriesAt {
    c1: [f64; 5],
    c3: [f64; 5],
}

impl SeriesAt {
    fn eval(&self, trig: &[(f64, f64); 5]) -> (f64, f64) {
        let mut e1 = 0.0;
        let mut e3 = 0.0;
        for i in 0..5 {
            let (sn, cs) = trig[i];
            e1 += self.c1[i] * cs;
            e3 += self.c3[i] * sn;
        }
        (e1, e3)
    }
}

fn harmonics(theta: f64) -> [(f64, f64); 5] {
    std::array::from_fn(|i| ((i + 1) as f64 * theta).sin_cos())
}

impl WaveState {
    pub fn build(input: WaveInput) -> Result<Self> {
        input.validate()?;
        let beta = 2.0 * PI / input.length;
        let coef = Coefficients::new(beta * input.depth);
        let lambda = solve_lambda(&coef, input.height, beta)?;
        let l2 = lambda * lambda;
        let celerity = ((beta * input.depth).tanh() / beta
            * input.g
            * (1.0 + l2 * coef.c1 + l2 * l2 * coef.c2))
            .sqrt();
        let dispersion_mismatch = (celerity * input.period - input.length).abs() / input.length;
        let omega = 2.0 * PI / input.period;
        let dt = input.period / PHASE_SAMPLES as f64;
        let phases = (0..PHASE_SAMPLES)
            .map(|i| harmonics(beta * 0.0 - omega * (i as f64 * dt)))
            .collect();
        Ok(WaveState {
            input,
            beta,
            omega,
            lambda,
            celerity,
            coef,
            kappa: coef.kappa(lambda),
            dispersion_mismatch,
            phases,
        })
    }

    /// Warning text when the given wavelength disagrees with the
    /// fifth-order dispersion by more than 5 %.
    pub fn dispersion_warning(&self) -> Option<String> {
        (self.dispersion_mismatch > 0.05).then(|| {
            format!(
                "wavelength {:.2} m differs from c·T = {:.2} m by {:.1}%",
                self.input.length,
                self.celerity * self.input.period,
                100.0 * self.dispersion_mismatch
            )
        })
    }

    /// The two series sums (ε₁, ε₃) at elevation `z` (m, relative to
    /// still water), position `x` (m) and time `t` (s).
    pub fn series(&self, z: f64, x: f64, t: f64) -> (f64, f64) {
        self.series_at(z).eval(&harmonics(self.beta * x - self.omega * t))
    }

    pub fn series_at(&self, z: f64) -> SeriesAt {
        let s = self.beta * (self.input.depth + z);
        let mut c1 = [0.0; 5];
        let mut c3 = [0.0; 5];
        for (i, k) in self.kappa.iter().enumerate() {
            let n = (i + 1) as f64;
            let ch = (n * s).cosh();
            c1[i] = n * k * ch;
            c3[i] = n * n * k * ch;
        }
        SeriesAt { c1, c3 }
    }

    /// Particle velocity (m/s) and acceleration (m/s²).
    pub fn kinematics(&self, z: f64, x: f64, t: f64) -> (f64, f64) {
        self.velocity_acceleration(self.series(z, x, t))
    }

    fn velocity_acceleration(&self, (e1, e3): (f64, f64)) -> (f64, f64) {
        let v = -self.celerity * e1;
        let a = 2.0 * self.celerity * PI * e3 / self.input.period;
        (v, a)
    }

    pub fn is_wet(&self, z: f64) -> bool {
        z <= 0.0 && z >= -self.input.depth
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DragInertia {
    #[serde(rename = "C_D")]
    pub cd: f64,
    #[serde(rename = "C_M")]
    pub cm: f64,
}

impl Default for DragInertia {
    fn default() -> Self {
        DragInertia { cd: 1.2, cm: 2.0 }
    }
}

/// Normal Morison force per unit length (N/m) from given kinematics.
pub fn morison(
    rho: f64,
    coeffs: DragInertia,
    diameter: f64,
    area: f64,
    sin_alpha: f64,
    v: f64,
    a: f64,
) -> f64 {
    rho * coeffs.cm * area * a * sin_alpha + 0.5 * rho * coeffs.cd * diameter * v.abs() * v * sin_alpha
}

/// Horizontal Morison force per unit length (N/m) on a vertical cylinder.
pub fn morison_horizontal(
    rho: f64,
    coeffs: DragInertia,
    diameter: f64,
    area: f64,
    v: f64,
    a: f64,
) -> f64 {
    rho * coeffs.cm * area * a + 0.5 * rho * coeffs.cd * diameter * v.abs() * v
}

/// Loading data of one integration point.
#[derive(Debug, Clone, Copy)]
pub struct MemberPoint {
    /// Outer diameter (m).
    pub diameter: f64,
    /// Cross-sectional area (m²).
    pub area: f64,
    pub sin_alpha: f64,
    /// Elevation relative to still water (m).
    pub z: f64,
}

impl MemberPoint {
    /// Gross section of a tube of outer diameter `d` (m).
    pub fn tube(d: f64, sin_alpha: f64, z: f64) -> Self {
        MemberPoint {
            diameter: d,
            area: PI / 4.0 * d * d,
            sin_alpha,
            z,
        }
    }
}

pub fn force_at(state: &WaveState, coeffs: DragInertia, p: &MemberPoint, t: f64) -> f64 {
    let (v, a) = state.kinematics(p.z, 0.0, t);
    morison(state.input.rho, coeffs, p.diameter, p.area, p.sin_alpha, v, a)
}

/// Number of phase samples before local refinement.
pub const PHASE_SAMPLES: usize = 720;

/// Largest normal force over one period, zero for dry points.
pub fn design_load(state: &WaveState, coeffs: DragInertia, p: &MemberPoint) -> f64 {
    if !state.is_wet(p.z) || state.lambda == 0.0 || p.sin_alpha == 0.0 {
        return 0.0;
    }
    let period = state.input.period;
    let dt = period / PHASE_SAMPLES as f64;
    let sa = state.series_at(p.z);
    let rho = state.input.rho;
    let force = |e: (f64, f64)| {
        let (v, a) = state.velocity_acceleration(e);
        morison(rho, coeffs, p.diameter, p.area, p.sin_alpha, v, a)
    };
    let f = |t: f64| force(sa.eval(&harmonics(state.beta * 0.0 - state.omega * t)));
    let samples: Vec<f64> = state.phases.iter().map(|trig| force(sa.eval(trig))).collect();
    let mut best = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for i in 0..PHASE_SAMPLES {
        let prev = samples[(i + PHASE_SAMPLES - 1) % PHASE_SAMPLES];
        let next = samples[(i + 1) % PHASE_SAMPLES];
        if samples[i] >= prev && samples[i] >= next {
            let t = i as f64 * dt;
            let (_, fm) = golden_max(&f, t - dt, t + dt, 1e-8 * period);
            best = best.max(fm);
        }
    }
    best
}

/// Golden-section search for a maximum of a unimodal function on [a, b].
pub fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// One band of a drag/inertia override table. Bounds are inclusive; z in
/// m relative to still water, α in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsBand {
    pub z_min: f64,
    pub z_max: f64,
    pub alpha_min_deg: f64,
    pub alpha_max_deg: f64,
    #[serde(rename = "C_D", default, skip_serializing_if = "Option::is_none")]
    pub cd: Option<f64>,
    #[serde(rename = "C_M", default, skip_serializing_if = "Option::is_none")]
    pub cm: Option<f64>,
}

/// Depth/inclination dependent coefficient overrides. The first matching
/// band wins; no match leaves the coefficients unchanged.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsTable {
    pub bands: Vec<CsBand>,
}

impl CsTable {
    pub fn from_file(path: &Path) -> Result<Self> {
        let t: CsTable = read_json(path)?;
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, b) in self.bands.iter().enumerate() {
            let bad = |why: &str| Error::Config(format!("cs table band {i}: {why}"));
            if !(b.z_min <= b.z_max) {
                return Err(bad("z_min exceeds z_max"));
            }
            if !(0.0 <= b.alpha_min_deg && b.alpha_min_deg <= b.alpha_max_deg && b.alpha_max_deg <= 90.0)
            {
                return Err(bad("angles must satisfy 0 <= min <= max <= 90"));
            }
            for v in [b.cd, b.cm].into_iter().flatten() {
                if !(v.is_finite() && v > 0.0) {
                    return Err(bad("coefficients must be positive"));
                }
            }
        }
        Ok(())
    }

    pub fn modify(&self, base: DragInertia, z: f64, alpha: f64) -> DragInertia {
        let deg = alpha.to_degrees();
        for b in &self.bands {
            if z >= b.z_min && z <= b.z_max && deg >= b.alpha_min_deg && deg <= b.alpha_max_deg {
                return DragInertia {
                    cd: b.cd.unwrap_or(base.cd),
                    cm: b.cm.unwrap_or(base.cm),
                };
            }
        }
        base
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveSpec {
    pub name: String,
    #[serde(rename = "Hs_m")]
    pub hs: f64,
    #[serde(rename = "Tp_s")]
    pub tp: f64,
    #[serde(rename = "L_m")]
    pub length: f64,
}

/// Contents of `waves.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub rho_w: f64,
    pub g: f64,
    /// Propagation direction in plan, degrees from +x toward +y.
    pub heading_deg: f64,
    #[serde(flatten)]
    pub coeffs: DragInertia,
    pub reference_depth_m: f64,
    /// Still-water offsets (m) from the reference depth.
    pub water_levels: std::collections::BTreeMap<String, f64>,
    pub waves: Vec<WaveSpec>,
}

impl WaveFile {
    pub fn from_file(path: &Path) -> Result<Self> {
        let w: WaveFile = read_json(path)?;
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.coeffs.cd > 0.0 && self.coeffs.cm > 0.0) {
            return Err(Error::invalid("C_D/C_M", "must be positive"));
        }
        if !(self.rho_w > 0.0 && self.g > 0.0 && self.reference_depth_m > 0.0) {
            return Err(Error::invalid("waves", "rho_w, g and reference depth must be positive"));
        }
        Ok(())
    }

    pub fn wave(&self, name: &str) -> Result<&WaveSpec> {
        self.waves
            .iter()
            .find(|w| w.name == name)
            .ok_or_else(|| Error::UnknownWave(name.to_string()))
    }

    pub fn depth(&self, level: &str) -> Result<f64> {
        self.water_levels
            .get(level)
            .map(|off| self.reference_depth_m + off)
            .ok_or_else(|| Error::invalid("water-level", format!("unknown level `{level}`")))
    }

    pub fn input(&self, wave: &str, depth: f64) -> Result<WaveInput> {
        let w = self.wave(wave)?;
        Ok(WaveInput {
            period: w.tp,
            height: w.hs,
            depth,
            length: w.length,
            rho: self.rho_w,
            g: self.g,
        })
    }

    /// Unit propagation direction in plan.
    pub fn direction(&self) -> [f64; 3] {
        let h = self.heading_deg.to_radians();
        [h.cos(), h.sin(), 0.0]
    }
}
