use super::{reverse_cuthill_mckee, CsrMatrix, LinalgError};

/// Relative pivot threshold below which a matrix is declared indefinite/singular.
const PIVOT_TOL: f64 = 1e-12;

/// Envelope (skyline) Cholesky factorization `P A P^T = L L^T` under an RCM ordering.
///
/// Row `i` of `L` is stored densely from its first structural nonzero up to the diagonal.
#[derive(Clone, Debug)]
pub struct SparseCholesky {
    n: usize,
    /// `perm[new] = old`
    perm: Vec<usize>,
    first: Vec<usize>,
    offset: Vec<usize>,
    values: Vec<f64>,
}

impl SparseCholesky {
    pub fn factor(a: &CsrMatrix) -> Result<Self, LinalgError> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(LinalgError::Dimension(format!(
                "Cholesky needs a square matrix, got {}x{}",
                n,
                a.ncols()
            )));
        }
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }

        let mut first: Vec<usize> = (0..n).collect();
        for (i, j, _) in a.iter() {
            let (pi, pj) = (inv[i], inv[j]);
            if pj < pi {
                first[pi] = first[pi].min(pj);
            }
        }
        let mut offset = vec![0usize; n + 1];
        for i in 0..n {
            offset[i + 1] = offset[i] + (i - first[i] + 1);
        }
        let mut values = vec![0.0; offset[n]];
        for (i, j, v) in a.iter() {
            let (pi, pj) = (inv[i], inv[j]);
            if pj <= pi {
                values[offset[pi] + pj - first[pi]] = v;
            }
        }

        for i in 0..n {
            let fi = first[i];
            let (done, rest) = values.split_at_mut(offset[i]);
            let row_i = &mut rest[..i - fi + 1];
            for j in fi..i {
                let fj = first[j];
                let row_j = &done[offset[j]..offset[j + 1]];
                let k0 = fi.max(fj);
                let s: f64 = row_i[k0 - fi..j - fi]
                    .iter()
                    .zip(&row_j[k0 - fj..j - fj])
                    .map(|(x, y)| x * y)
                    .sum();
                let ljj = row_j[j - fj];
                row_i[j - fi] = (row_i[j - fi] - s) / ljj;
            }
            let aii = row_i[i - fi];
            let d = aii - row_i[..i - fi].iter().map(|x| x * x).sum::<f64>();
            if !(d > PIVOT_TOL * aii.abs()) || !d.is_finite() {
                return Err(LinalgError::NotPositiveDefinite {
                    pivot: perm[i],
                    value: d,
                });
            }
            row_i[i - fi] = d.sqrt();
        }

        Ok(Self {
            n,
            perm,
            first,
            offset,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored factor entries.
    pub fn envelope_size(&self) -> usize {
        self.values.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        self.solve_into(b, &mut x);
        x
    }

    pub fn solve_into(&self, b: &[f64], x: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        // L y = b
        for i in 0..self.n {
            let fi = self.first[i];
            let row = &self.values[self.offset[i]..self.offset[i + 1]];
            let s: f64 = row[..i - fi].iter().zip(&y[fi..i]).map(|(l, v)| l * v).sum();
            y[i] = (y[i] - s) / row[i - fi];
        }
        // L^T x = y
        for i in (0..self.n).rev() {
            let fi = self.first[i];
            let row = &self.values[self.offset[i]..self.offset[i + 1]];
            y[i] /= row[i - fi];
            let xi = y[i];
            for (yk, l) in y[fi..i].iter_mut().zip(&row[..i - fi]) {
                *yk -= l * xi;
            }
        }
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{norm2, TripletBuilder};
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn laplacian_2d(m: usize) -> CsrMatrix {
        let n = m * m;
        let mut t = TripletBuilder::new(n, n);
        for j in 0..m {
            for i in 0..m {
                let k = j * m + i;
                t.push(k, k, 4.0);
                if i > 0 {
                    t.push(k, k - 1, -1.0);
                }
                if i + 1 < m {
                    t.push(k, k + 1, -1.0);
                }
                if j > 0 {
                    t.push(k, k - m, -1.0);
                }
                if j + 1 < m {
                    t.push(k, k + m, -1.0);
                }
            }
        }
        t.build()
    }

    #[test]
    fn identity_solves_exactly() {
        let f = SparseCholesky::factor(&CsrMatrix::identity(5)).unwrap();
        let b = [1.0, -2.0, 3.5, 0.0, 7.0];
        assert_eq!(f.solve(&b), b.to_vec());
    }

    #[test]
    fn two_by_two() {
        let a = CsrMatrix::from_dense(&DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]));
        let x = SparseCholesky::factor(&a).unwrap().solve(&[1.0, 1.0]);
        assert!((x[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((x[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_row_is_reported() {
        let a = CsrMatrix::from_diagonal(&[1.0, 0.0, 2.0]);
        match SparseCholesky::factor(&a) {
            Err(LinalgError::NotPositiveDefinite { pivot, .. }) => assert_eq!(pivot, 1),
            other => panic!("unexpected {other:?}"),
        }
        let err = SparseCholesky::factor(&a).unwrap_err().to_string();
        assert!(err.contains("indefinite/singular at pivot"));
    }

    #[test]
    fn indefinite_is_reported() {
        let a = CsrMatrix::from_dense(&DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]));
        assert!(SparseCholesky::factor(&a).is_err());
    }

    #[test]
    fn multiply_back_residual_on_random_rhs() {
        let a = laplacian_2d(17);
        let f = SparseCholesky::factor(&a).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let b: Vec<f64> = (0..a.nrows()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x = f.solve(&b);
            let r: Vec<f64> = a.mul_vec(&x).iter().zip(&b).map(|(ax, bi)| ax - bi).collect();
            assert!(norm2(&r) <= 1e-10 * norm2(&b));
        }
    }
}
