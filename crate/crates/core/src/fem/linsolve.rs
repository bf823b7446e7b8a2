//! Sparse symmetric positive-definite solves (faer Cholesky).

use faer::sparse::linalg::solvers::{Llt, SymbolicLlt};
use faer::sparse::{SparseColMat, Triplet};
use faer::linalg::solvers::SolveCore;
use faer::{Conj, Mat, Side};

use crate::error::{Error, Result};

/// Lower-triangle triplet accumulator; duplicates are summed on build.
#[derive(Debug, Clone, Default)]
pub struct Triplets {
    pub n: usize,
    entries: Vec<Triplet<usize, usize, f64>>,
}

impl Triplets {
    pub fn new(n: usize) -> Self {
        Triplets {
            n,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(n: usize, cap: usize) -> Self {
        Triplets {
            n,
            entries: Vec::with_capacity(cap),
        }
    }

    /// Adds `v` at (i, j); only the lower triangle is kept.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        if i >= j && v != 0.0 {
            self.entries.push(Triplet::new(i, j, v));
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// y = K x for the symmetric matrix represented by the lower triangle.
    pub fn sym_mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for t in &self.entries {
            y[t.row] += t.val * x[t.col];
            if t.row != t.col {
                y[t.col] += t.val * x[t.row];
            }
        }
        y
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for t in &self.entries {
            d[t.row][t.col] += t.val;
            if t.row != t.col {
                d[t.col][t.row] += t.val;
            }
        }
        d
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        // make every diagonal entry structurally present
        let mut entries = self.entries.clone();
        entries.extend((0..n).map(|i| Triplet::new(i, i, 0.0)));
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &entries)
            .map_err(|e| Error::Singular(format!("matrix assembly failed: {e:?}")))?;
        let symbolic = SymbolicLlt::try_new(mat.symbolic(), Side::Lower)
            .map_err(|e| Error::Singular(format!("symbolic factorisation failed: {e:?}")))?;
        let llt = Llt::try_new_with_symbolic(symbolic, mat.as_ref(), Side::Lower).map_err(|_| {
            Error::Singular("stiffness matrix is not positive definite (unrestrained model?)".into())
        })?;
        let mut x = Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
        llt.solve_in_place_with_conj(Conj::No, x.as_mut());
        let out: Vec<f64> = (0..n).map(|i| x[(i, 0)]).collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular("non-finite solution".into()));
        }
        Ok(out)
    }
}
