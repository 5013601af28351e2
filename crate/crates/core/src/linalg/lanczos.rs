use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{axpy, dot, norm2, CsrMatrix, LinalgError, LinearOperator, SparseCholesky};

#[derive(Clone, Debug)]
pub struct LargestEig {
    pub value: f64,
    pub vector: Vec<f64>,
    /// `||K x - lambda M x|| / (||K x|| + lambda ||M x||)`
    pub residual: f64,
    pub steps: usize,
}

/// Largest eigenpair of `K x = lambda M x` (`M` SPD) by Lanczos in the M inner
/// product with full reorthogonalization.
pub fn largest_eig(k: &dyn LinearOperator, m: &CsrMatrix, tol: f64) -> Result<LargestEig, LinalgError> {
    let n = k.dim();
    let mfac = SparseCholesky::factor(m)?;
    let max_steps = n.min(400);
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a2c);

    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut mv = m.mul_vec(&v);
    let nrm = dot(&v, &mv).sqrt();
    v.iter_mut().for_each(|x| *x /= nrm);
    mv.iter_mut().for_each(|x| *x /= nrm);

    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut m_basis: Vec<Vec<f64>> = vec![mv];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut kv = vec![0.0; n];
    let mut best: Option<LargestEig> = None;

    for j in 0..max_steps {
        k.apply(&basis[j], &mut kv);
        let a = dot(&kv, &basis[j]);
        alpha.push(a);
        let mut w = mfac.solve(&kv);
        for _ in 0..2 {
            for (vi, mvi) in basis.iter().zip(&m_basis) {
                let c = dot(mvi, &w);
                axpy(-c, vi, &mut w);
            }
        }
        let mw = m.mul_vec(&w);
        let b = dot(&w, &mw).max(0.0).sqrt();
        let scale = alpha.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let exhausted = b <= 1e-13 * scale || j + 1 == max_steps;

        if (j + 1) % 10 == 0 || exhausted {
            let steps = j + 1;
            let mut t = DMatrix::zeros(steps, steps);
            for i in 0..steps {
                t[(i, i)] = alpha[i];
                if i + 1 < steps {
                    t[(i, i + 1)] = beta[i];
                    t[(i + 1, i)] = beta[i];
                }
            }
            let eig = nalgebra::SymmetricEigen::new(t);
            let top = eig.eigenvalues.imax();
            let theta = eig.eigenvalues[top];
            let y = eig.eigenvectors.column(top);
            let mut x = vec![0.0; n];
            for (i, vi) in basis.iter().enumerate() {
                axpy(y[i], vi, &mut x);
            }
            let mut kx = vec![0.0; n];
            k.apply(&x, &mut kx);
            let mx = m.mul_vec(&x);
            let r: Vec<f64> = kx.iter().zip(&mx).map(|(a, b)| a - theta * b).collect();
            let residual = norm2(&r) / (norm2(&kx) + theta.abs() * norm2(&mx));
            let candidate = LargestEig {
                value: theta,
                vector: x,
                residual,
                steps,
            };
            let done = residual <= tol || exhausted;
            best = Some(candidate);
            if done {
                break;
            }
        }
        if exhausted {
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
        m_basis.push(mw.iter().map(|x| x / b).collect());
    }
    let best = best.expect("at least one Ritz extraction");
    if best.residual > tol.max(1e-6) {
        return Err(LinalgError::NotConverged {
            iterations: best.steps,
            best_residual: best.residual,
        });
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense_eig_oracle;

    #[test]
    fn diagonal_pencil() {
        let k = CsrMatrix::from_diagonal(&[1.0, 5.0, 2.0, 3.0]);
        let m = CsrMatrix::from_diagonal(&[1.0, 1.0, 2.0, 0.5]);
        let r = largest_eig(&k, &m, 1e-10).unwrap();
        assert!((r.value - 6.0).abs() < 1e-12);
    }

    #[test]
    fn tridiagonal_matches_oracle() {
        let n = 120;
        let mut t = crate::linalg::TripletBuilder::new(n, n);
        let mut tm = crate::linalg::TripletBuilder::new(n, n);
        for i in 0..n {
            t.push(i, i, 2.0);
            tm.push(i, i, 4.0);
            if i > 0 {
                t.push(i, i - 1, -1.0);
                t.push(i - 1, i, -1.0);
                tm.push(i, i - 1, 1.0);
                tm.push(i - 1, i, 1.0);
            }
        }
        let (k, m) = (t.build(), tm.build());
        let r = largest_eig(&k, &m, 1e-10).unwrap();
        let spec = dense_eig_oracle(&k.to_dense(), &m.to_dense(), &[]).unwrap();
        let top = *spec.last().unwrap();
        assert!((r.value - top).abs() / top < 1e-8, "{} vs {}", r.value, top);
    }
}
