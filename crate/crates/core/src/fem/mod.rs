//! Static analysis of the jacket: beam frame, soil springs, rigid top
//! coupling, wave/gravity line loads and reference-point loads.

pub mod beam;
pub mod linsolve;
pub mod loads;
pub mod response;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::mesh::{Mesh, PartKind};
use crate::model::JacketParams;
use crate::section::TubeProps;
use crate::soil::{SoilProfile, SpringElement};
use crate::wave::{design_load, CsTable, MemberPoint, WaveFile, WaveState};

use beam::{dot, Beam, Vec12};
use linsolve::Triplets;
use loads::CombinedLoading;
pub use response::{RotationMeasure, SolveResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Support {
    /// Piles clamped at the mudline.
    Fixed,
    /// Embedded piles on p–y / t–z springs.
    #[default]
    Spring,
}

impl std::str::FromStr for Support {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(Support::Fixed),
            "spring" => Ok(Support::Spring),
            other => Err(Error::invalid("support", format!("`{other}` is not fixed|spring"))),
        }
    }
}

/// Everything besides the structure needed to load and support it.
#[derive(Debug, Clone)]
pub struct Environment {
    pub waves: WaveFile,
    /// Still-water depth used for the wave loads (m).
    pub depth_m: f64,
    pub soil: Option<SoilProfile>,
    pub support: Support,
    pub cs_table: Option<CsTable>,
    pub gravity: f64,
}

#[derive(Debug, Clone)]
enum Dof {
    Fixed,
    Free(usize),
    /// Linear combination of reduced DOFs.
    Slave(Vec<(usize, f64)>),
}

#[derive(Debug, Clone)]
pub struct NewtonSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        NewtonSettings {
            rel_tol: 1e-8,
            abs_tol: 1e-6,
            max_iter: 50,
            max_halvings: 10,
        }
    }
}

/// Assembled model ready for solving.
pub struct Model {
    pub mesh: Mesh,
    pub params: JacketParams,
    pub support: Support,
    beams: Vec<Option<Beam>>,
    dofs: Vec<Dof>,
    n_red: usize,
    springs: Vec<SpringElement>,
    soil: Option<SoilProfile>,
    /// Work-equivalent element loads in local axes.
    f_eq_local: Vec<Vec12>,
    f_ext_full: Vec<f64>,
    f_ext: Vec<f64>,
    k_beam: Triplets,
    pub warnings: Vec<String>,
    pub settings: NewtonSettings,
}

/// Wave line load per element and Gauss point (N/mm, global).
pub fn wave_line_loads(
    mesh: &Mesh,
    env: &Environment,
    waves: &[(WaveState, f64)],
    workers: usize,
) -> Vec<Vec<[f64; 3]>> {
    let dir = env.waves.direction();
    let base = env.waves.coeffs;
    let table = env.cs_table.clone().unwrap_or_default();
    let mut gps: Vec<Vec<usize>> = vec![Vec::new(); mesh.elements.len()];
    for (i, gp) in mesh.integration_points.iter().enumerate() {
        gps[gp.element].push(i);
    }
    exec::map_indexed(&mesh.elements, workers, |_, e| {
        let pts = &gps[e.id];
        if e.kind == PartKind::EmbeddedPile || waves.is_empty() {
            return vec![[0.0; 3]; pts.len()];
        }
        let a = mesh.nodes[e.nodes[0]].coords();
        let b = mesh.nodes[e.nodes[1]].coords();
        let axis = beam::normalize([b[0] - a[0], b[1] - a[1], b[2] - a[2]]);
        let c = dot(axis, dir);
        let perp = [dir[0] - c * axis[0], dir[1] - c * axis[1], dir[2] - c * axis[2]];
        let sin_alpha = (perp[0].powi(2) + perp[1].powi(2) + perp[2].powi(2)).sqrt();
        if sin_alpha < 1e-12 {
            return vec![[0.0; 3]; pts.len()];
        }
        let n = perp.map(|v| v / sin_alpha);
        let alpha = sin_alpha.min(1.0).asin();
        pts.iter()
            .map(|&gi| {
                let gp = &mesh.integration_points[gi];
                let z = gp.z_swl(env.depth_m);
                let coeffs = table.modify(base, z, alpha);
                let p = MemberPoint::tube(e.d_outer * 1e-3, sin_alpha, z);
                let f: f64 = waves
                    .iter()
                    .map(|(w, factor)| factor * design_load(w, coeffs, &p))
                    .sum();
                n.map(|v| v * f * 1e-3)
            })
            .collect()
    })
}

impl Model {
    pub fn build(
        params: &JacketParams,
        mesh: Mesh,
        env: &Environment,
        loading: &CombinedLoading,
    ) -> Result<Self> {
        Self::build_with_workers(params, mesh, env, loading, 1)
    }

    pub fn build_with_workers(
        params: &JacketParams,
        mesh: Mesh,
        env: &Environment,
        loading: &CombinedLoading,
        workers: usize,
    ) -> Result<Self> {
        let mat = params.material;
        let support = env.support;
        let n_nodes = mesh.nodes.len();
        let active = |kind: PartKind| support == Support::Spring || kind != PartKind::EmbeddedPile;

        // beams
        let mut beams = Vec::with_capacity(mesh.elements.len());
        let mut used = vec![false; n_nodes];
        for e in &mesh.elements {
            if active(e.kind) {
                let a = mesh.nodes[e.nodes[0]].coords();
                let b = mesh.nodes[e.nodes[1]].coords();
                let props = TubeProps::new(e.d_outer, e.t_wall);
                beams.push(Some(Beam::new(a, b, props, mat.elastic_modulus, mat.shear_modulus())));
                used[e.nodes[0]] = true;
                used[e.nodes[1]] = true;
            } else {
                beams.push(None);
            }
        }

        // DOF numbering with constraint elimination
        let mut dofs = vec![Dof::Fixed; 6 * n_nodes];
        let mut n_red = 0;
        let slaves: Vec<usize> = mesh.leg_top.to_vec();
        let fixed: Vec<usize> = match support {
            Support::Fixed => mesh.mudline.to_vec(),
            Support::Spring => Vec::new(),
        };
        for node in 0..n_nodes {
            let free = (used[node] || node == mesh.rp)
                && !slaves.contains(&node)
                && !fixed.contains(&node);
            if free {
                for k in 0..6 {
                    dofs[6 * node + k] = Dof::Free(n_red);
                    n_red += 1;
                }
            }
        }
        let m = mesh.rp;
        let master: Vec<usize> = (0..6)
            .map(|k| match dofs[6 * m + k] {
                Dof::Free(i) => i,
                _ => unreachable!("reference point is free"),
            })
            .collect();
        let xm = mesh.nodes[m].coords();
        for &s in &slaves {
            let xs = mesh.nodes[s].coords();
            let r = [xs[0] - xm[0], xs[1] - xm[1], xs[2] - xm[2]];
            // u_s = u_m + θ_m × r
            let rows: [Vec<(usize, f64)>; 3] = [
                vec![(master[0], 1.0), (master[4], r[2]), (master[5], -r[1])],
                vec![(master[1], 1.0), (master[5], r[0]), (master[3], -r[2])],
                vec![(master[2], 1.0), (master[3], r[1]), (master[4], -r[0])],
            ];
            for (k, row) in rows.into_iter().enumerate() {
                dofs[6 * s + k] = Dof::Slave(row);
            }
            for k in 3..6 {
                dofs[6 * s + k] = Dof::Slave(vec![(master[k], 1.0)]);
            }
        }

        // springs
        let (springs, soil) = match support {
            Support::Spring => {
                let soil = env.soil.clone().ok_or_else(|| {
                    Error::Config("spring support requires a soil profile".into())
                })?;
                soil.validate()?;
                (crate::soil::build_spring_field(&mesh, &soil)?, Some(soil))
            }
            Support::Fixed => (Vec::new(), None),
        };

        // line loads
        let mut warnings = Vec::new();
        let mut states = Vec::new();
        for (name, factor) in &loading.waves {
            let st = WaveState::build(env.waves.input(name, env.depth_m)?)?;
            if let Some(w) = st.dispersion_warning() {
                warnings.push(format!("{name}: {w}"));
            }
            states.push((st, *factor));
        }
        let wave_q = wave_line_loads(&mesh, env, &states, workers);
        let gamma = mat.weight_density(env.gravity);
        let mut gp_of: Vec<Vec<usize>> = vec![Vec::new(); mesh.elements.len()];
        for (i, gp) in mesh.integration_points.iter().enumerate() {
            gp_of[gp.element].push(i);
        }
        let mut f_eq_local = vec![[0.0; 12]; mesh.elements.len()];
        let mut f_ext_full = vec![0.0; 6 * n_nodes];
        for (e, bm) in mesh.elements.iter().zip(&beams) {
            let Some(bm) = bm else { continue };
            let w = loading.self_weight * gamma * bm.props.area;
            let samples: Vec<(f64, f64, [f64; 3])> = gp_of[e.id]
                .iter()
                .enumerate()
                .map(|(k, &gi)| {
                    let gp = &mesh.integration_points[gi];
                    let mut q = wave_q[e.id][k];
                    if e.kind != PartKind::EmbeddedPile {
                        q[2] -= w;
                    }
                    let ql = [dot(bm.rot[0], q), dot(bm.rot[1], q), dot(bm.rot[2], q)];
                    (gp.xi, gp.weight, ql)
                })
                .collect();
            let fl = bm.equivalent_loads(&samples);
            let fg = bm.to_global(fl);
            f_eq_local[e.id] = fl;
            for (k, v) in fg.iter().enumerate() {
                let node = e.nodes[k / 6];
                f_ext_full[6 * node + k % 6] += v;
            }
        }
        for k in 0..6 {
            f_ext_full[6 * m + k] += loading.rp[k];
        }

        let mut model = Model {
            params: params.clone(),
            support,
            beams,
            dofs,
            n_red,
            springs,
            soil,
            f_eq_local,
            f_ext_full,
            f_ext: Vec::new(),
            k_beam: Triplets::new(n_red),
            warnings,
            settings: NewtonSettings::default(),
            mesh,
        };
        model.f_ext = model.reduce_vector(&model.f_ext_full);
        model.k_beam = model.assemble_beams();
        Ok(model)
    }

    pub fn n_dofs(&self) -> usize {
        self.n_red
    }

    fn expand(&self, full: usize) -> Vec<(usize, f64)> {
        match &self.dofs[full] {
            Dof::Fixed => Vec::new(),
            Dof::Free(i) => vec![(*i, 1.0)],
            Dof::Slave(v) => v.clone(),
        }
    }

    fn reduce_vector(&self, full: &[f64]) -> Vec<f64> {
        let mut r = vec![0.0; self.n_red];
        for (i, &v) in full.iter().enumerate() {
            if v != 0.0 {
                for (j, c) in self.expand(i) {
                    r[j] += c * v;
                }
            }
        }
        r
    }

    pub fn expand_solution(&self, u: &[f64]) -> Vec<f64> {
        (0..self.dofs.len())
            .map(|i| self.expand(i).iter().map(|&(j, c)| c * u[j]).sum())
            .collect()
    }

    fn assemble_beams(&self) -> Triplets {
        let mut t = Triplets::with_capacity(self.n_red, self.beams.len() * 100);
        for (e, bm) in self.mesh.elements.iter().zip(&self.beams) {
            let Some(bm) = bm else { continue };
            let k = bm.global_stiffness();
            let map: Vec<Vec<(usize, f64)>> = (0..12)
                .map(|a| self.expand(6 * e.nodes[a / 6] + a % 6))
                .collect();
            for a in 0..12 {
                for b in 0..12 {
                    let kab = k[a][b];
                    if kab == 0.0 {
                        continue;
                    }
                    for &(i, ci) in &map[a] {
                        for &(j, cj) in &map[b] {
                            t.add(i, j, ci * cj * kab);
                        }
                    }
                }
            }
        }
        t
    }

    fn spring_dofs(&self, s: &SpringElement) -> [usize; 3] {
        std::array::from_fn(|k| match self.dofs[6 * s.pile_node + k] {
            Dof::Free(i) => i,
            _ => unreachable!("pile nodes are free"),
        })
    }

    /// Spring internal forces (N) on the reduced DOFs.
    fn spring_forces(&self, u: &[f64]) -> Vec<f64> {
        let mut f = vec![0.0; self.n_red];
        let Some(soil) = &self.soil else { return f };
        for s in &self.springs {
            let d = self.spring_dofs(s);
            let us = [u[d[0]] * 1e-3, u[d[1]] * 1e-3, u[d[2]] * 1e-3, 0.0, 0.0, 0.0];
            let fe = s.force(&soil.layers[s.layer], us);
            for k in 0..3 {
                f[d[k]] += fe[k];
            }
        }
        f
    }

    fn tangent(&self, u: &[f64]) -> Triplets {
        let mut t = self.k_beam.clone();
        if let Some(soil) = &self.soil {
            for s in &self.springs {
                let d = self.spring_dofs(s);
                let us = [u[d[0]] * 1e-3, u[d[1]] * 1e-3, u[d[2]] * 1e-3, 0.0, 0.0, 0.0];
                let ke = s.stiffness(&soil.layers[s.layer], us);
                for a in 0..3 {
                    for b in 0..3 {
                        // N/m → N/mm
                        t.add(d[a], d[b], ke[a][b] * 1e-3);
                    }
                }
            }
        }
        t
    }

    pub fn residual(&self, u: &[f64]) -> Vec<f64> {
        let kb = self.k_beam.sym_mul(u);
        let fs = self.spring_forces(u);
        (0..self.n_red).map(|i| self.f_ext[i] - kb[i] - fs[i]).collect()
    }

    /// Tangent matrix of the reduced system at `u`, dense (testing aid).
    pub fn tangent_dense(&self, u: &[f64]) -> Vec<Vec<f64>> {
        self.tangent(u).to_dense()
    }

    pub fn external_load(&self) -> &[f64] {
        &self.f_ext
    }

    /// Newton–Raphson with step halving.
    pub fn solve(&self) -> Result<SolveResult> {
        let s = &self.settings;
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        // forces (N) and moments (N·mm) are checked against their own loads
        let (ff, fm) = split_norms(&self.f_ext);
        let tol_f = (s.rel_tol * ff).max(s.abs_tol);
        let tol_m = (s.rel_tol * fm).max(s.abs_tol * 1e3);
        let converged = |r: &[f64]| {
            let (rf, rm) = split_norms(r);
            rf <= tol_f && rm <= tol_m
        };
        let mut u = vec![0.0; self.n_red];
        let mut r = self.f_ext.clone();
        let mut rn = norm(&r);
        let mut history = vec![rn];
        let mut iterations = 0;
        while !converged(&r) {
            if iterations == s.max_iter {
                return Err(Error::NotConverged {
                    iterations,
                    history,
                });
            }
            let du = self.tangent(&u).solve(&r)?;
            iterations += 1;
            let mut step = 1.0;
            let mut halvings = 0;
            loop {
                let trial: Vec<f64> = u.iter().zip(&du).map(|(a, b)| a + step * b).collect();
                let rt = self.residual(&trial);
                let rtn = norm(&rt);
                let done = converged(&rt);
                if rtn <= rn || done || halvings == s.max_halvings {
                    if rtn > rn && !done {
                        history.push(rtn);
                        return Err(Error::NotConverged {
                            iterations,
                            history,
                        });
                    }
                    u = trial;
                    r = rt;
                    rn = rtn;
                    break;
                }
                step *= 0.5;
                halvings += 1;
            }
            history.push(rn);
        }
        Ok(self.recover(&u, iterations, history))
    }

    fn recover(&self, u: &[f64], iterations: usize, history: Vec<f64>) -> SolveResult {
        let full = self.expand_solution(u);
        let nodal: Vec<[f64; 6]> = (0..self.mesh.nodes.len())
            .map(|n| std::array::from_fn(|k| full[6 * n + k]))
            .collect();
        let mut stress = vec![0.0; self.mesh.elements.len()];
        let mut f_int_full = vec![0.0; full.len()];
        for (e, bm) in self.mesh.elements.iter().zip(&self.beams) {
            let Some(bm) = bm else { continue };
            let ue: Vec12 = std::array::from_fn(|k| full[6 * e.nodes[k / 6] + k % 6]);
            let end = bm.end_forces(ue, self.f_eq_local[e.id]);
            stress[e.id] = bm.max_stress(&end);
            let kl = bm.local_stiffness();
            let ul = bm.to_local(ue);
            let fl: Vec12 = std::array::from_fn(|i| (0..12).map(|j| kl[i][j] * ul[j]).sum());
            let fg = bm.to_global(fl);
            for k in 0..12 {
                f_int_full[6 * e.nodes[k / 6] + k % 6] += fg[k];
            }
        }

        // equilibrium of forces: applied + support reactions
        let mut applied = [0.0; 3];
        let mut reaction = [0.0; 3];
        for n in 0..self.mesh.nodes.len() {
            for k in 0..3 {
                applied[k] += self.f_ext_full[6 * n + k];
            }
        }
        if self.support == Support::Fixed {
            for &n in &self.mesh.mudline {
                for k in 0..3 {
                    reaction[k] += f_int_full[6 * n + k] - self.f_ext_full[6 * n + k];
                }
            }
        }
        if let Some(soil) = &self.soil {
            for s in &self.springs {
                let d = nodal[s.pile_node];
                let us = [d[0] * 1e-3, d[1] * 1e-3, d[2] * 1e-3, 0.0, 0.0, 0.0];
                let fe = s.force(&soil.layers[s.layer], us);
                for k in 0..3 {
                    reaction[k] -= fe[k];
                }
            }
        }
        // support forces acting on the structure must cancel the applied loads
        let imbalance: f64 = (0..3)
            .map(|k| (applied[k] + reaction[k]).powi(2))
            .sum::<f64>()
            .sqrt();
        let applied_norm = applied.iter().map(|v| v * v).sum::<f64>().sqrt();
        let equilibrium_error = if applied_norm > 0.0 {
            imbalance / applied_norm
        } else {
            imbalance
        };

        response::summarise(
            self,
            nodal,
            stress,
            iterations,
            history,
            equilibrium_error,
            self.warnings.clone(),
        )
    }

    /// Local end forces (N, N·mm) of every active element for a nodal
    /// displacement field.
    pub fn element_end_forces(&self, displacements: &[[f64; 6]]) -> Vec<Option<Vec12>> {
        self.mesh
            .elements
            .iter()
            .zip(&self.beams)
            .map(|(e, bm)| {
                let bm = bm.as_ref()?;
                let ue: Vec12 = std::array::from_fn(|k| displacements[e.nodes[k / 6]][k % 6]);
                Some(bm.end_forces(ue, self.f_eq_local[e.id]))
            })
            .collect()
    }

    pub(crate) fn beam(&self, e: usize) -> Option<&Beam> {
        self.beams[e].as_ref()
    }

    pub fn springs(&self) -> &[SpringElement] {
        &self.springs
    }
}

/// Convenience wrapper: mesh, assemble and solve.
pub fn simulate(
    params: &JacketParams,
    char_size: f64,
    env: &Environment,
    loading: &CombinedLoading,
) -> Result<SolveResult> {
    let mesh = crate::mesh::generate_mesh(params, char_size)?;
    let model = Model::build(params, mesh, env, loading)?;
    model.solve()
}

/// Euclidean norms of the translational and rotational entries of a
/// reduced vector; free DOFs come in blocks of six per node.
fn split_norms(v: &[f64]) -> (f64, f64) {
    let (mut f, mut m) = (0.0, 0.0);
    for (i, x) in v.iter().enumerate() {
        if i % 6 < 3 {
            f += x * x;
        } else {
            m += x * x;
        }
    }
    (f64::sqrt(f), f64::sqrt(m))
}

pub(crate) fn rotation_parts(r: [f64; 3]) -> (f64, f64) {
    (r[0].hypot(r[1]), r[2].abs())
}
