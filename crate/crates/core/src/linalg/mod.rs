//! Sparse symmetric matrices, direct factorizations, saddle-point solves and
//! generalized symmetric eigensolvers.

mod cholesky;
mod dense;
mod eigen;
mod lanczos;
mod oracle;
mod ordering;
mod saddle;
mod sparse;

pub use cholesky::SparseCholesky;
pub use dense::{DenseCholesky, DenseLu};
pub use eigen::{smallest_eigs, smallest_eigs_with, EigOptions, EigResult};
pub use lanczos::{largest_eig, LargestEig};
pub use oracle::{dense_eig_oracle, ORACLE_MAX_DIM};
pub use ordering::reverse_cuthill_mckee;
pub use saddle::{solve_saddle, SaddleSolution, SaddleSolver, SchurComplement};
pub use sparse::{CsrMatrix, TripletBuilder};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is indefinite/singular at pivot {pivot} (pivot value {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("rank deficiency detected at pivot {pivot} of the bordered system")]
    RankDeficient { pivot: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("eigensolver did not converge in {iterations} iterations (best residual {best_residual:e})")]
    NotConverged { iterations: usize, best_residual: f64 },
    #[error("dense oracle refused dimension {dim} (limit {limit})")]
    OracleTooLarge { dim: usize, limit: usize },
    #[error("deflation vectors are linearly dependent or span the whole space")]
    BadDeflation,
}

/// A symmetric linear operator `x -> A x`.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    fn apply(&self, x: &[f64], y: &mut [f64]);

    /// Materializes the operator column by column.
    fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            self.apply(&e, &mut col);
            out.column_mut(j).copy_from_slice(&col);
            e[j] = 0.0;
        }
        out
    }
}

impl LinearOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let r = self * DVector::from_column_slice(x);
        y.copy_from_slice(r.as_slice());
    }

    fn to_dense(&self) -> DMatrix<f64> {
        self.clone()
    }
}

/// `base + weight * v v^T`.
pub struct RankOneUpdate<'a, Op: LinearOperator + ?Sized> {
    pub base: &'a Op,
    pub vector: Vec<f64>,
    pub weight: f64,
}

impl<Op: LinearOperator + ?Sized> LinearOperator for RankOneUpdate<'_, Op> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.base.apply(x, y);
        let s = self.weight * dot(&self.vector, x);
        axpy(s, &self.vector, y);
    }

    fn to_dense(&self) -> DMatrix<f64> {
        let mut d = self.base.to_dense();
        let v = DVector::from_column_slice(&self.vector);
        d.ger(self.weight, &v, &v, 1.0);
        d
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
