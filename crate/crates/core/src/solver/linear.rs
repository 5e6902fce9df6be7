//! Symmetric sparse systems stored as the lower triangle in CSC form.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::cholesky::ldlt::factor::{LdltParams, LdltRegularization};
use faer::sparse::linalg::cholesky::{
    factorize_symbolic_cholesky, CholeskySymbolicParams, SymbolicCholesky, SymmetricOrdering,
};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::{Conj, MatMut, Par, Side, Spec};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinearSolverKind {
    /// Sparse LDL^T with a regularized retry on zero pivots.
    #[default]
    Direct,
    /// Jacobi-preconditioned conjugate gradients.
    Cg,
}

/// Lower-triangular sparsity pattern, rows sorted within each column.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerPattern {
    pub n: usize,
    pub col_ptr: Vec<usize>,
    pub row_idx: Vec<usize>,
}

impl LowerPattern {
    /// Builds the pattern from `(row, col)` pairs with `row >= col`.
    pub fn from_entries(n: usize, mut entries: Vec<(usize, usize)>) -> Self {
        for k in 0..n {
            entries.push((k, k));
        }
        entries.sort_unstable_by_key(|&(r, c)| (c, r));
        entries.dedup();
        let mut col_ptr = vec![0; n + 1];
        for &(_, c) in &entries {
            col_ptr[c + 1] += 1;
        }
        for c in 0..n {
            col_ptr[c + 1] += col_ptr[c];
        }
        let row_idx = entries.into_iter().map(|(r, _)| r).collect();
        Self { n, col_ptr, row_idx }
    }

    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    /// Position of entry `(row, col)` (`row >= col`) in the value array.
    pub fn index_of(&self, row: usize, col: usize) -> Option<usize> {
        let (lo, hi) = (self.col_ptr[col], self.col_ptr[col + 1]);
        self.row_idx[lo..hi].binary_search(&row).ok().map(|k| lo + k)
    }

    fn symbolic(&self) -> SymbolicSparseColMatRef<'_, usize> {
        SymbolicSparseColMatRef::new_checked(self.n, self.n, &self.col_ptr, None, &self.row_idx)
    }

    /// `y = A x` for the symmetric matrix whose lower triangle is `values`.
    pub fn sym_matvec(&self, values: &[f64], x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for c in 0..self.n {
            for k in self.col_ptr[c]..self.col_ptr[c + 1] {
                let r = self.row_idx[k];
                let a = values[k];
                y[r] += a * x[c];
                if r != c {
                    y[c] += a * x[r];
                }
            }
        }
    }

    pub fn diagonal(&self, values: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|c| values[self.index_of(c, c).expect("diagonal is always stored")])
            .collect()
    }
}

/// Factorization workspace reused across solves with a fixed pattern.
pub struct DirectSolver {
    symbolic: SymbolicCholesky<usize>,
    l_values: Vec<f64>,
    buffer: MemBuffer,
}

impl std::fmt::Debug for DirectSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DirectSolver").field("n", &self.symbolic.nrows()).finish()
    }
}

impl DirectSolver {
    pub fn new(pattern: &LowerPattern) -> Result<Self> {
        let symbolic = factorize_symbolic_cholesky(
            pattern.symbolic(),
            Side::Lower,
            SymmetricOrdering::Amd,
            CholeskySymbolicParams::default(),
        )
        .map_err(|e| Error::LinearSolver(format!("symbolic analysis failed: {e:?}")))?;
        let params: Spec<LdltParams, f64> = Default::default();
        let req = symbolic
            .factorize_numeric_ldlt_scratch::<f64>(Par::Seq, params)
            .or(symbolic.solve_in_place_scratch::<f64>(1, Par::Seq));
        Ok(Self {
            l_values: vec![0.0; symbolic.len_val()],
            buffer: MemBuffer::new(req),
            symbolic,
        })
    }

    /// Solves `A x = rhs` in place. A zero pivot triggers one retry with
    /// pivot perturbation scaled by the largest diagonal entry.
    pub fn solve(&mut self, pattern: &LowerPattern, values: &[f64], rhs: &mut [f64]) -> Result<()> {
        let n = pattern.n;
        let a = SparseColMatRef::new(pattern.symbolic(), values);
        let max_diag = pattern.diagonal(values).iter().fold(0.0f64, |m, d| m.max(d.abs()));
        let signs = vec![1i8; n];
        let attempts = [
            LdltRegularization {
                dynamic_regularization_signs: None,
                dynamic_regularization_delta: 0.0,
                dynamic_regularization_epsilon: 0.0,
            },
            LdltRegularization {
                dynamic_regularization_signs: Some(&signs),
                dynamic_regularization_delta: 1e-6 * max_diag,
                dynamic_regularization_epsilon: 1e-12 * max_diag,
            },
        ];
        let original = rhs.to_vec();
        for (k, reg) in attempts.into_iter().enumerate() {
            let stack = MemStack::new(&mut self.buffer);
            let factor = match self.symbolic.factorize_numeric_ldlt(
                &mut self.l_values,
                a,
                Side::Lower,
                reg,
                Par::Seq,
                stack,
                Default::default(),
            ) {
                Ok(f) => f,
                Err(e) => {
                    log::warn!("LDL^T factorization failed ({e:?}); retrying with pivot perturbation");
                    continue;
                }
            };
            rhs.copy_from_slice(&original);
            let stack = MemStack::new(&mut self.buffer);
            factor.solve_in_place_with_conj(Conj::No, MatMut::from_column_major_slice_mut(rhs, n, 1), Par::Seq, stack);
            if rhs.iter().all(|v| v.is_finite()) {
                if k > 0 {
                    log::warn!("linear solve used pivot perturbation");
                }
                return Ok(());
            }
        }
        Err(Error::LinearSolver(
            "tangent is singular even after pivot perturbation".into(),
        ))
    }
}

/// Jacobi-preconditioned conjugate gradients; `x` holds the initial guess.
pub fn conjugate_gradient(
    pattern: &LowerPattern,
    values: &[f64],
    rhs: &[f64],
    x: &mut [f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<usize> {
    let n = pattern.n;
    let inv_diag: Vec<f64> = pattern
        .diagonal(values)
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut ax = vec![0.0; n];
    pattern.sym_matvec(values, x, &mut ax);
    let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let target = rel_tol * dot(rhs, rhs).sqrt().max(f64::MIN_POSITIVE);
    let mut ap = vec![0.0; n];
    for it in 0..max_iter {
        if dot(&r, &r).sqrt() <= target {
            return Ok(it);
        }
        pattern.sym_matvec(values, &p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::LinearSolver(format!(
                "conjugate gradients met a non-positive curvature {pap:e}; the tangent is not positive definite"
            )));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::LinearSolver(format!("conjugate gradients did not converge in {max_iter} iterations")))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 1D Laplacian with Dirichlet ends, lower triangle.
    fn laplacian(n: usize) -> (LowerPattern, Vec<f64>) {
        let entries = (1..n).map(|i| (i, i - 1)).collect();
        let p = LowerPattern::from_entries(n, entries);
        let mut v = vec![0.0; p.nnz()];
        for i in 0..n {
            v[p.index_of(i, i).unwrap()] = 2.0;
            if i > 0 {
                v[p.index_of(i, i - 1).unwrap()] = -1.0;
            }
        }
        (p, v)
    }

    #[test]
    fn direct_and_cg_agree_with_exact_solution() {
        let n = 50;
        let (p, v) = laplacian(n);
        // exact solution x_i = i + 1 gives rhs zero except the last row
        let x_exact: Vec<f64> = (0..n).map(|i| (i + 1) as f64).collect();
        let mut rhs = vec![0.0; n];
        p.sym_matvec(&v, &x_exact, &mut rhs);
        let mut x = rhs.clone();
        DirectSolver::new(&p).unwrap().solve(&p, &v, &mut x).unwrap();
        for (a, b) in x.iter().zip(&x_exact) {
            assert!((a - b).abs() < 1e-10 * n as f64);
        }
        let mut y = vec![0.0; n];
        conjugate_gradient(&p, &v, &rhs, &mut y, 1e-13, 1000).unwrap();
        for (a, b) in y.iter().zip(&x_exact) {
            assert!((a - b).abs() < 1e-8 * n as f64);
        }
    }

    #[test]
    fn singular_matrix_is_perturbed_or_reported() {
        let p = LowerPattern::from_entries(2, vec![(1, 0)]);
        // [[1, 1], [1, 1]]
        let v = vec![1.0, 1.0, 1.0];
        let mut rhs = vec![1.0, 1.0];
        let r = DirectSolver::new(&p).unwrap().solve(&p, &v, &mut rhs);
        assert!(r.is_err() || rhs.iter().all(|x| x.is_finite()));
    }
}
