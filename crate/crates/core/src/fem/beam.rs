//! Two-node Euler–Bernoulli space frame element with a circular hollow
//! section (Iy = Iz, J = 2I).

use crate::section::TubeProps;

pub type Mat12 = [[f64; 12]; 12];
pub type Vec12 = [f64; 12];

#[derive(Debug, Clone, Copy)]
pub struct Beam {
    pub length: f64,
    /// Rows are the local x, y, z axes in global components.
    pub rot: [[f64; 3]; 3],
    pub props: TubeProps,
    pub e: f64,
    pub g: f64,
}

impl Beam {
    pub fn new(a: [f64; 3], b: [f64; 3], props: TubeProps, e: f64, g: f64) -> Self {
        let d = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let length = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        let ex = [d[0] / length, d[1] / length, d[2] / length];
        // reference vector: global Z, or global X for near-vertical members
        let r = if ex[2].abs() > 0.999 { [1.0, 0.0, 0.0] } else { [0.0, 0.0, 1.0] };
        let ey = normalize(cross(r, ex));
        let ez = cross(ex, ey);
        Beam {
            length,
            rot: [ex, ey, ez],
            props,
            e,
            g,
        }
    }

    pub fn axis(&self) -> [f64; 3] {
        self.rot[0]
    }

    pub fn local_stiffness(&self) -> Mat12 {
        let l = self.length;
        let (e, g) = (self.e, self.g);
        let a = self.props.area;
        let i = self.props.inertia;
        let j = self.props.polar;
        let mut k = [[0.0; 12]; 12];
        let ea = e * a / l;
        let gj = g * j / l;
        let b12 = 12.0 * e * i / l.powi(3);
        let b6 = 6.0 * e * i / (l * l);
        let b4 = 4.0 * e * i / l;
        let b2 = 2.0 * e * i / l;

        let mut set = |r: usize, c: usize, v: f64| {
            k[r][c] = v;
            k[c][r] = v;
        };
        set(0, 0, ea);
        set(6, 6, ea);
        set(0, 6, -ea);
        set(3, 3, gj);
        set(9, 9, gj);
        set(3, 9, -gj);
        // bending in the local x–y plane (v, θz)
        set(1, 1, b12);
        set(7, 7, b12);
        set(1, 7, -b12);
        set(1, 5, b6);
        set(1, 11, b6);
        set(5, 7, -b6);
        set(7, 11, -b6);
        set(5, 5, b4);
        set(11, 11, b4);
        set(5, 11, b2);
        // bending in the local x–z plane (w, θy)
        set(2, 2, b12);
        set(8, 8, b12);
        set(2, 8, -b12);
        set(2, 4, -b6);
        set(2, 10, -b6);
        set(4, 8, b6);
        set(8, 10, b6);
        set(4, 4, b4);
        set(10, 10, b4);
        set(4, 10, b2);
        k
    }

    pub fn to_local(&self, v: Vec12) -> Vec12 {
        let mut out = [0.0; 12];
        for blk in 0..4 {
            for r in 0..3 {
                out[3 * blk + r] = (0..3).map(|c| self.rot[r][c] * v[3 * blk + c]).sum();
            }
        }
        out
    }

    pub fn to_global(&self, v: Vec12) -> Vec12 {
        let mut out = [0.0; 12];
        for blk in 0..4 {
            for c in 0..3 {
                out[3 * blk + c] = (0..3).map(|r| self.rot[r][c] * v[3 * blk + r]).sum();
            }
        }
        out
    }

    pub fn global_stiffness(&self) -> Mat12 {
        let kl = self.local_stiffness();
        // K = Tᵀ K_l T, done block by block
        let mut tmp = [[0.0; 12]; 12];
        for i in 0..12 {
            let row = self.to_local_row(&kl, i);
            tmp[i] = row;
        }
        let mut kg = [[0.0; 12]; 12];
        for j in 0..12 {
            let col: Vec12 = std::array::from_fn(|i| tmp[i][j]);
            let g = self.to_global(col);
            for i in 0..12 {
                kg[i][j] = g[i];
            }
        }
        kg
    }

    // row i of K_l T
    fn to_local_row(&self, kl: &Mat12, i: usize) -> Vec12 {
        let mut out = [0.0; 12];
        for blk in 0..4 {
            for c in 0..3 {
                out[3 * blk + c] = (0..3).map(|r| kl[i][3 * blk + r] * self.rot[r][c]).sum();
            }
        }
        out
    }

    /// Work-equivalent nodal loads (local frame) of a line load given at
    /// points `xi` ∈ [0, 1] with quadrature weights, load in local axes.
    pub fn equivalent_loads(&self, samples: &[(f64, f64, [f64; 3])]) -> Vec12 {
        let l = self.length;
        let mut f = [0.0; 12];
        for &(xi, w, q) in samples {
            let wl = w * l;
            let (n1, n2) = (1.0 - xi, xi);
            let h1 = 1.0 - 3.0 * xi * xi + 2.0 * xi.powi(3);
            let h2 = l * (xi - 2.0 * xi * xi + xi.powi(3));
            let h3 = 3.0 * xi * xi - 2.0 * xi.powi(3);
            let h4 = l * (-xi * xi + xi.powi(3));
            f[0] += wl * n1 * q[0];
            f[6] += wl * n2 * q[0];
            f[1] += wl * h1 * q[1];
            f[5] += wl * h2 * q[1];
            f[7] += wl * h3 * q[1];
            f[11] += wl * h4 * q[1];
            f[2] += wl * h1 * q[2];
            f[4] -= wl * h2 * q[2];
            f[8] += wl * h3 * q[2];
            f[10] -= wl * h4 * q[2];
        }
        f
    }

    /// End forces in local axes, f = K_l u_l − f_eq.
    pub fn end_forces(&self, u_global: Vec12, f_eq_local: Vec12) -> Vec12 {
        let ul = self.to_local(u_global);
        let kl = self.local_stiffness();
        std::array::from_fn(|i| (0..12).map(|j| kl[i][j] * ul[j]).sum::<f64>() - f_eq_local[i])
    }

    /// Largest outer-fibre normal stress |N/A| + |M| c / I over both ends.
    pub fn max_stress(&self, end: &Vec12) -> f64 {
        let p = &self.props;
        let at = |n: f64, my: f64, mz: f64| n.abs() / p.area + my.hypot(mz) * p.c() / p.inertia;
        at(end[0], end[4], end[5]).max(at(end[6], end[10], end[11]))
    }
}

pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn normalize(a: [f64; 3]) -> [f64; 3] {
    let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

pub fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn beam(a: [f64; 3], b: [f64; 3]) -> Beam {
        Beam::new(a, b, TubeProps::new(1000.0, 50.0), 210_000.0, 80_769.23)
    }

    #[test]
    fn global_stiffness_symmetric_and_rigid() {
        let b = beam([0.0, 0.0, 0.0], [300.0, -400.0, 1200.0]);
        let k = b.global_stiffness();
        let scale = k.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..12 {
            for j in 0..12 {
                assert!((k[i][j] - k[j][i]).abs() <= 1e-12 * scale);
            }
        }
        // rigid translation and small rotation about z produce no force
        let t = [1.0, 2.0, -0.5, 0.0, 0.0, 0.0, 1.0, 2.0, -0.5, 0.0, 0.0, 0.0];
        for row in &k {
            let f: f64 = row.iter().zip(&t).map(|(a, b)| a * b).sum();
            assert!(f.abs() < 1e-9 * scale);
        }
        let th = 1e-3;
        // rotation θ about z through the origin: u = θ × r
        let r = [300.0, -400.0, 1200.0];
        let u2 = cross([0.0, 0.0, th], r);
        let v = [0.0, 0.0, 0.0, 0.0, 0.0, th, u2[0], u2[1], u2[2], 0.0, 0.0, th];
        for row in &k {
            let f: f64 = row.iter().zip(&v).map(|(a, b)| a * b).sum();
            assert!(f.abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn uniform_load_fixed_end_forces() {
        let b = beam([0.0, 0.0, 0.0], [1000.0, 0.0, 0.0]);
        let g = [(0.211_324_865_405_187_1, 0.5, [0.0, 2.0, 0.0]), (0.788_675_134_594_812_9, 0.5, [0.0, 2.0, 0.0])];
        let f = b.equivalent_loads(&g);
        // qL/2 and qL²/12
        approx::assert_relative_eq!(f[1], 1000.0, max_relative = 1e-12);
        approx::assert_relative_eq!(f[7], 1000.0, max_relative = 1e-12);
        approx::assert_relative_eq!(f[5], 2.0 * 1e6 / 12.0, max_relative = 1e-12);
        approx::assert_relative_eq!(f[11], -2.0 * 1e6 / 12.0, max_relative = 1e-12);
    }

    #[test]
    fn pure_bending_stress() {
        let b = beam([0.0, 0.0, 0.0], [1000.0, 0.0, 0.0]);
        let m = 1e9;
        let mut end = [0.0; 12];
        end[5] = m;
        end[11] = -m;
        let expect = m * 500.0 / b.props.inertia;
        approx::assert_relative_eq!(b.max_stress(&end), expect, max_relative = 1e-14);
    }
}
