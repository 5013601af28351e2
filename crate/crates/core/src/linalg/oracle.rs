use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use super::LinalgError;

/// Guard against accidental large dense solves.
pub const ORACLE_MAX_DIM: usize = 600;

/// Full ascending generalized spectrum of `S x = lambda M x` on the M-orthogonal
/// complement of `deflation`, by explicit congruence reduction.
///
/// The complement is spanned by an orthonormal basis `Q` of the null space of
/// `(M D)^T`; with `Q^T M Q = L L^T` the spectrum is that of `L^{-1} Q^T S Q L^{-T}`.
pub fn dense_eig_oracle(
    s: &DMatrix<f64>,
    m: &DMatrix<f64>,
    deflation: &[Vec<f64>],
) -> Result<Vec<f64>, LinalgError> {
    let n = s.nrows();
    if n > ORACLE_MAX_DIM {
        return Err(LinalgError::OracleTooLarge {
            dim: n,
            limit: ORACLE_MAX_DIM,
        });
    }
    if s.ncols() != n || m.shape() != (n, n) {
        return Err(LinalgError::Dimension("oracle pencil must be square and matching".into()));
    }
    let q = if deflation.is_empty() {
        DMatrix::identity(n, n)
    } else {
        let d = DMatrix::from_columns(
            &deflation
                .iter()
                .map(|v| DVector::from_column_slice(v))
                .collect::<Vec<_>>(),
        );
        let w = m * d;
        let gram = w.transpose() * &w;
        let gram_inv = gram.try_inverse().ok_or(LinalgError::BadDeflation)?;
        let proj = DMatrix::identity(n, n) - &w * gram_inv * w.transpose();
        let eig = SymmetricEigen::new(proj);
        let keep: Vec<DVector<f64>> = (0..n)
            .filter(|&i| eig.eigenvalues[i] > 0.5)
            .map(|i| eig.eigenvectors.column(i).into_owned())
            .collect();
        if keep.len() + deflation.len() != n {
            return Err(LinalgError::BadDeflation);
        }
        DMatrix::from_columns(&keep)
    };
    let sq = q.transpose() * s * &q;
    let mq = q.transpose() * m * &q;
    let mq = (&mq + mq.transpose()) * 0.5;
    let chol = Cholesky::new(mq).ok_or(LinalgError::NotPositiveDefinite {
        pivot: 0,
        value: f64::NAN,
    })?;
    let l = chol.l();
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or(LinalgError::NotPositiveDefinite { pivot: 0, value: 0.0 })?;
    let c = &l_inv * sq * l_inv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let mut vals: Vec<f64> = SymmetricEigen::new(c).eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}
