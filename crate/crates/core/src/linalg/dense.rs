use nalgebra::DMatrix;

use super::LinalgError;

/// Dense Cholesky `A = L L^T` (right-looking, column-major).
#[derive(Clone, Debug)]
pub struct DenseCholesky {
    l: DMatrix<f64>,
}

impl DenseCholesky {
    pub fn factor(a: &DMatrix<f64>) -> Result<Self, LinalgError> {
        let n = a.nrows();
        let mut l = a.clone();
        let scale = (0..n).fold(0.0f64, |m, i| m.max(a[(i, i)].abs()));
        let data = l.as_mut_slice();
        for k in 0..n {
            let d = data[k * n + k];
            if !(d > 1e-13 * scale) || !d.is_finite() {
                return Err(LinalgError::NotPositiveDefinite { pivot: k, value: d });
            }
            let lkk = d.sqrt();
            data[k * n + k] = lkk;
            for i in k + 1..n {
                data[k * n + i] /= lkk;
            }
            let (head, tail) = data.split_at_mut((k + 1) * n);
            let col_k = &head[k * n..];
            for j in k + 1..n {
                let ljk = col_k[j];
                if ljk == 0.0 {
                    continue;
                }
                let col_j = &mut tail[(j - k - 1) * n..(j - k) * n];
                for i in j..n {
                    col_j[i] -= col_k[i] * ljk;
                }
            }
        }
        for j in 0..n {
            for i in 0..j {
                l[(i, j)] = 0.0;
            }
        }
        Ok(Self { l })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.l.nrows();
        let l = self.l.as_slice();
        let mut y = b.to_vec();
        // forward, column oriented
        for k in 0..n {
            y[k] /= l[k * n + k];
            let yk = y[k];
            for i in k + 1..n {
                y[i] -= l[k * n + i] * yk;
            }
        }
        // backward with L^T, row of L^T = column of L
        for k in (0..n).rev() {
            let s: f64 = (k + 1..n).map(|i| l[k * n + i] * y[i]).sum();
            y[k] = (y[k] - s) / l[k * n + k];
        }
        y
    }

    pub fn factor_l(&self) -> &DMatrix<f64> {
        &self.l
    }
}

/// Dense LU with partial pivoting, used for the bordered pressure systems.
#[derive(Clone, Debug)]
pub struct DenseLu {
    lu: DMatrix<f64>,
    piv: Vec<usize>,
}

impl DenseLu {
    /// Fails with `RankDeficient` when a pivot drops below `rel_tol * max|a_ij|`.
    pub fn factor(a: &DMatrix<f64>, rel_tol: f64) -> Result<Self, LinalgError> {
        let n = a.nrows();
        let mut lu = a.clone();
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut piv = vec![0usize; n];
        let data = lu.as_mut_slice();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, data[k * n + i].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if !(pmax > rel_tol * scale) {
                return Err(LinalgError::RankDeficient { pivot: k });
            }
            piv[k] = p;
            if p != k {
                for j in 0..n {
                    data.swap(j * n + k, j * n + p);
                }
            }
            let d = data[k * n + k];
            for i in k + 1..n {
                data[k * n + i] /= d;
            }
            let (head, tail) = data.split_at_mut((k + 1) * n);
            let col_k = &head[k * n..];
            for j in k + 1..n {
                let col_j = &mut tail[(j - k - 1) * n..(j - k) * n];
                let ukj = col_j[k];
                if ukj == 0.0 {
                    continue;
                }
                for i in k + 1..n {
                    col_j[i] -= col_k[i] * ukj;
                }
            }
        }
        Ok(Self { lu, piv })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.nrows();
        let a = self.lu.as_slice();
        let mut y = b.to_vec();
        for k in 0..n {
            y.swap(k, self.piv[k]);
        }
        for k in 0..n {
            let yk = y[k];
            for i in k + 1..n {
                y[i] -= a[k * n + i] * yk;
            }
        }
        for k in (0..n).rev() {
            y[k] /= a[k * n + k];
            let yk = y[k];
            for i in 0..k {
                y[i] -= a[k * n + i] * yk;
            }
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_matches_hand_solution() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 2.0, 0.0, 2.0, 5.0, 1.0, 0.0, 1.0, 3.0]);
        let f = DenseCholesky::factor(&a).unwrap();
        let x = f.solve(&[2.0, 8.0, 5.0]);
        let r = &a * nalgebra::DVector::from_vec(x) - nalgebra::DVector::from_vec(vec![2.0, 8.0, 5.0]);
        assert!(r.norm() < 1e-14);
        let l = f.factor_l();
        assert!((l * l.transpose() - a).norm() < 1e-14);
    }

    #[test]
    fn lu_solves_indefinite_and_flags_singular() {
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 2.0, 1.0, 0.0, 3.0, 2.0, 3.0, 0.0]);
        let f = DenseLu::factor(&a, 1e-12).unwrap();
        let x = f.solve(&[1.0, 2.0, 3.0]);
        let r = &a * nalgebra::DVector::from_vec(x) - nalgebra::DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert!(r.norm() < 1e-13);
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(DenseLu::factor(&s, 1e-12), Err(LinalgError::RankDeficient { .. })));
    }
}
