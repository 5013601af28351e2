//! Saddle-point systems
//!
//! ```text
//! [ A  B^T ] [u]   [f]
//! [ B   0  ] [p] = [g]
//! ```
//!
//! with `A` symmetric positive definite, solved by block elimination: a sparse
//! Cholesky factorization of `A` and a dense factorization of the pressure Schur
//! complement `S = B A^{-1} B^T`, optionally bordered by a multiplier row that pins
//! the weighted mean of `p`.

use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{norm2, CsrMatrix, DenseLu, LinalgError, LinearOperator, SparseCholesky};

const RANK_TOL: f64 = 1e-11;

/// The dense Schur complement `B A^{-1} B^T` together with the factorization of `A`.
#[derive(Clone, Debug)]
pub struct SchurComplement {
    inner: CsrMatrix,
    b: CsrMatrix,
    factor: SparseCholesky,
    dense: DMatrix<f64>,
}

impl SchurComplement {
    pub fn new(inner: &CsrMatrix, b: &CsrMatrix) -> Result<Self, LinalgError> {
        if b.ncols() != inner.nrows() {
            return Err(LinalgError::Dimension(format!(
                "coupling has {} columns, inner block has {} rows",
                b.ncols(),
                inner.nrows()
            )));
        }
        let factor = SparseCholesky::factor(inner)?;
        let (m, nv) = (b.nrows(), b.ncols());
        let columns: Vec<Vec<f64>> = (0..m)
            .into_par_iter()
            .map(|i| {
                let mut rhs = vec![0.0; nv];
                let (cols, vals) = b.row(i);
                for (&j, &v) in cols.iter().zip(vals) {
                    rhs[j] = v;
                }
                let y = factor.solve(&rhs);
                b.mul_vec(&y)
            })
            .collect();
        let mut dense = DMatrix::zeros(m, m);
        for (j, col) in columns.iter().enumerate() {
            dense.column_mut(j).copy_from_slice(col);
        }
        let sym = (&dense + dense.transpose()) * 0.5;
        Ok(Self {
            inner: inner.clone(),
            b: b.clone(),
            factor,
            dense: sym,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.dense
    }

    pub fn inner(&self) -> &CsrMatrix {
        &self.inner
    }

    pub fn coupling(&self) -> &CsrMatrix {
        &self.b
    }

    pub fn inner_factor(&self) -> &SparseCholesky {
        &self.factor
    }

    /// `q^T B A^{-1} B^T q`, evaluated through the sparse factorization.
    pub fn quadratic_form(&self, q: &[f64]) -> f64 {
        let bt_q = self.b.mul_transpose_vec(q);
        let y = self.factor.solve(&bt_q);
        super::dot(&bt_q, &y)
    }
}

impl LinearOperator for SchurComplement {
    fn dim(&self) -> usize {
        self.dense.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.dense.apply(x, y);
    }

    fn to_dense(&self) -> DMatrix<f64> {
        self.dense.clone()
    }
}

#[derive(Clone, Debug)]
pub struct SaddleSolution {
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    /// Value of the mean-value multiplier (zero when unconstrained).
    pub multiplier: f64,
    /// `||A u + B^T p - f|| + ||B u - g||`.
    pub residual: f64,
}

/// Factorized saddle-point operator, reusable across right-hand sides.
#[derive(Clone, Debug)]
pub struct SaddleSolver {
    schur: Arc<SchurComplement>,
    weights: Option<Vec<f64>>,
    lu: DenseLu,
}

impl SaddleSolver {
    /// `mean_weights`, when given, appends the constraint `mean_weights . p = 0`.
    pub fn new(schur: Arc<SchurComplement>, mean_weights: Option<&[f64]>) -> Result<Self, LinalgError> {
        let m = schur.dim();
        let k = match mean_weights {
            None => schur.dense.clone(),
            Some(c) => {
                if c.len() != m {
                    return Err(LinalgError::Dimension("mean weights length".into()));
                }
                let mut k = DMatrix::zeros(m + 1, m + 1);
                k.view_mut((0, 0), (m, m)).copy_from(&schur.dense);
                for i in 0..m {
                    k[(i, m)] = -c[i];
                    k[(m, i)] = -c[i];
                }
                k
            }
        };
        let lu = DenseLu::factor(&k, RANK_TOL)?;
        Ok(Self {
            schur,
            weights: mean_weights.map(<[f64]>::to_vec),
            lu,
        })
    }

    pub fn schur(&self) -> &SchurComplement {
        &self.schur
    }

    pub fn solve(&self, f: &[f64], g: &[f64]) -> SaddleSolution {
        let mut sol = self.solve_once(f, g);
        let scale = norm2(f) + norm2(g) + 1.0;
        for _ in 0..2 {
            if sol.residual <= 1e-13 * scale {
                break;
            }
            let (r1, r2) = self.residuals(&sol, f, g);
            let neg1: Vec<f64> = r1.iter().map(|v| -v).collect();
            let neg2: Vec<f64> = r2.iter().map(|v| -v).collect();
            let corr = self.solve_once(&neg1, &neg2);
            let mut next = sol.clone();
            next.u.iter_mut().zip(&corr.u).for_each(|(a, b)| *a += b);
            next.p.iter_mut().zip(&corr.p).for_each(|(a, b)| *a += b);
            next.multiplier += corr.multiplier;
            let (r1, r2) = self.residuals(&next, f, g);
            next.residual = norm2(&r1) + norm2(&r2);
            if next.residual < sol.residual {
                sol = next;
            } else {
                break;
            }
        }
        sol
    }

    fn solve_once(&self, f: &[f64], g: &[f64]) -> SaddleSolution {
        let s = &*self.schur;
        let m = s.dim();
        let ainv_f = s.factor.solve(f);
        let mut rhs = s.b.mul_vec(&ainv_f);
        rhs.iter_mut().zip(g).for_each(|(r, gi)| *r -= gi);
        if self.weights.is_some() {
            rhs.push(0.0);
        }
        let x = self.lu.solve(&rhs);
        let p = x[..m].to_vec();
        let multiplier = if self.weights.is_some() { x[m] } else { 0.0 };
        let bt_p = s.b.mul_transpose_vec(&p);
        let r: Vec<f64> = f.iter().zip(&bt_p).map(|(a, b)| a - b).collect();
        let u = s.factor.solve(&r);
        let mut sol = SaddleSolution {
            u,
            p,
            multiplier,
            residual: 0.0,
        };
        let (r1, r2) = self.residuals(&sol, f, g);
        sol.residual = norm2(&r1) + norm2(&r2);
        sol
    }

    fn residuals(&self, sol: &SaddleSolution, f: &[f64], g: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let s = &*self.schur;
        let au = s.inner.mul_vec(&sol.u);
        let bt_p = s.b.mul_transpose_vec(&sol.p);
        let r1 = au.iter().zip(&bt_p).zip(f).map(|((a, b), c)| a + b - c).collect();
        let bu = s.b.mul_vec(&sol.u);
        let r2 = bu.iter().zip(g).map(|(a, b)| a - b).collect();
        (r1, r2)
    }
}

/// One-shot solve of the saddle system; see [`SaddleSolver`] for repeated solves.
pub fn solve_saddle(
    a: &CsrMatrix,
    b: &CsrMatrix,
    f: &[f64],
    g: &[f64],
    mean_weights: Option<&[f64]>,
) -> Result<SaddleSolution, LinalgError> {
    let schur = Arc::new(SchurComplement::new(a, b)?);
    let solver = SaddleSolver::new(schur, mean_weights)?;
    Ok(solver.solve(f, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::TripletBuilder;

    fn toy_system() -> (CsrMatrix, CsrMatrix) {
        // 1D-like velocity stiffness and a discrete difference coupling
        let nv = 6;
        let mut t = TripletBuilder::new(nv, nv);
        for i in 0..nv {
            t.push(i, i, 2.0);
            if i > 0 {
                t.push(i, i - 1, -1.0);
                t.push(i - 1, i, -1.0);
            }
        }
        let a = t.build();
        let mut tb = TripletBuilder::new(3, nv);
        for i in 0..3 {
            tb.push(i, 2 * i, 1.0);
            tb.push(i, 2 * i + 1, -0.5);
        }
        (a, tb.build())
    }

    #[test]
    fn zero_data_gives_zero_solution() {
        let (a, b) = toy_system();
        let sol = solve_saddle(&a, &b, &[0.0; 6], &[0.0; 3], None).unwrap();
        assert!(sol.u.iter().chain(&sol.p).all(|v| *v == 0.0));
        assert_eq!(sol.residual, 0.0);
    }

    #[test]
    fn consistent_system_residual() {
        let (a, b) = toy_system();
        let f = [1.0, -2.0, 0.5, 0.0, 3.0, 1.0];
        let g = [0.3, -0.1, 0.7];
        let sol = solve_saddle(&a, &b, &f, &g, None).unwrap();
        assert!(sol.residual <= 1e-10 * (norm2(&f) + norm2(&g) + 1.0));
    }

    #[test]
    fn zero_coupling_is_rank_deficient() {
        let (a, _) = toy_system();
        let b = CsrMatrix::zeros(3, 6);
        let err = solve_saddle(&a, &b, &[1.0; 6], &[0.0; 3], None).unwrap_err();
        assert!(matches!(err, LinalgError::RankDeficient { .. }));
    }

    #[test]
    fn mean_constraint_removes_constant_kernel() {
        // coupling with B^T 1 = 0: each row is a difference of neighbors
        let (a, _) = toy_system();
        let mut tb = TripletBuilder::new(3, 6);
        let rows = [[1.0, 0.0, -1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 1.0, -1.0, 0.0, 1.0], [-1.0, -1.0, 0.0, 1.0, 0.0, -1.0]];
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                if v != 0.0 {
                    tb.push(i, j, v);
                }
            }
        }
        let b = tb.build();
        assert!(solve_saddle(&a, &b, &[1.0; 6], &[0.0; 3], None).is_err());
        let w = [0.2, 0.3, 0.5];
        let g = [0.1, -0.3, 0.2];
        let f = [1.0, 0.0, 2.0, -1.0, 0.5, 0.0];
        let sol = solve_saddle(&a, &b, &f, &g, Some(&w)).unwrap();
        assert!(sol.residual <= 1e-10 * 10.0);
        let mean: f64 = w.iter().zip(&sol.p).map(|(a, b)| a * b).sum();
        assert!(mean.abs() < 1e-14);
    }
}
