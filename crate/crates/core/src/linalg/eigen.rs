//! Smallest eigenpairs of a symmetric pencil `S x = lambda M x` on the
//! M-orthogonal complement of a deflation space.
//!
//! Both operators are materialized densely (they live on the pressure side and are
//! small). The deflated pencil is shifted along the deflation directions so that it
//! becomes positive definite, factored, and driven by blocked inverse iteration
//! with Rayleigh-Ritz extraction and locking of converged leading pairs.
//!
//! Tight clusters at the bottom of the spectrum stall plain inverse iteration, so
//! every few iterations the shift is moved up to `theta - c rho`, where `rho` is the
//! M^-1 norm of the leading residual. The new shift is accepted only when the
//! shifted matrix still factors, which certifies it lies below the spectrum.
//!
//! Relative residuals use `max(|lambda|, 1e-6 trace(S)/trace(M))` in place of
//! `|lambda|`, so eigenvalues that vanish up to roundoff still converge.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DenseCholesky, LinalgError, LinearOperator};

/// Iterations between attempts to move the inverse-iteration shift.
const RESHIFT_INTERVAL: usize = 4;

/// Extra block vectors carried past the requested count.
const GUARD_VECTORS: usize = 2;

#[derive(Clone, Copy, Debug)]
pub struct EigOptions {
    pub block_size: usize,
    pub max_iterations: usize,
    pub residual_tol: f64,
    pub eigenvalue_tol: f64,
    pub seed: u64,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self {
            block_size: 3,
            max_iterations: 500,
            residual_tol: 1e-8,
            eigenvalue_tol: 1e-9,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EigResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// M-orthonormal.
    pub eigenvectors: Vec<Vec<f64>>,
    /// `||S x - lambda M x|| / (||S x|| + lambda ||M x||)` per pair.
    pub residual_norms: Vec<f64>,
    pub iterations: usize,
    /// `tr S / tr M`, the typical eigenvalue size.
    pub scale: f64,
}

/// The `k` smallest eigenpairs with residual tolerance `tol`.
pub fn smallest_eigs(
    s: &dyn LinearOperator,
    m: &dyn LinearOperator,
    deflation: &[Vec<f64>],
    k: usize,
    tol: f64,
) -> Result<EigResult, LinalgError> {
    let opts = EigOptions {
        residual_tol: tol,
        ..EigOptions::default()
    };
    smallest_eigs_with(s, m, deflation, k, &opts)
}

pub fn smallest_eigs_with(
    s: &dyn LinearOperator,
    m: &dyn LinearOperator,
    deflation: &[Vec<f64>],
    k: usize,
    opts: &EigOptions,
) -> Result<EigResult, LinalgError> {
    let n = s.dim();
    if m.dim() != n {
        return Err(LinalgError::Dimension(format!("pencil sizes {} and {}", n, m.dim())));
    }
    let sd = symmetrize(s.to_dense());
    let md = symmetrize(m.to_dense());

    let (d, md_d) = m_orthonormal_basis(&md, deflation)?;
    let nd = d.ncols();
    if k == 0 || k + nd > n {
        return Err(LinalgError::Dimension(format!(
            "requested {k} eigenpairs of a {n}-dimensional pencil with {nd} deflated directions"
        )));
    }

    // compressed operator P^T S P with P = I - D (M D)^T
    let sp = &sd - (&sd * &d) * md_d.transpose();
    let compressed = symmetrize(&sp - &md_d * (d.transpose() * &sp));
    let scale = {
        let (ts, tm) = (sd.trace(), md.trace());
        if ts > 0.0 && tm > 0.0 {
            ts / tm
        } else {
            1.0
        }
    };
    let m_factor = DenseCholesky::factor(&md)?;
    let deflation_block = &md_d * md_d.transpose();

    // (P^T S P - sigma M) + (sigma + scale) (M D)(M D)^T; positive definite iff
    // sigma lies below the deflated spectrum
    let factor_at = |sigma: f64| -> Result<DenseCholesky, LinalgError> {
        let mut k = &compressed - &md * sigma;
        if nd > 0 {
            k += &deflation_block * (sigma.abs() + scale);
        }
        DenseCholesky::factor(&k)
    };
    // slightly negative base shift so that semidefinite pencils still factor
    let mut sigma = -1e-10 * scale;
    let mut factor = loop {
        match factor_at(sigma) {
            Ok(f) => break f,
            Err(e) if sigma < -scale => return Err(e),
            Err(_) => sigma *= 100.0,
        }
    };

    let project = |x: &mut DVector<f64>| {
        if nd > 0 {
            let c = md_d.transpose() * &*x;
            *x -= &d * c;
        }
    };

    // guard vectors beyond k keep the k-th pair from converging at lambda_k / lambda_{k+1}
    let p = opts.block_size.max(k + GUARD_VECTORS).min(n - nd);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x: Vec<DVector<f64>> = (0..p)
        .map(|_| {
            let mut v = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
            project(&mut v);
            v
        })
        .collect();
    m_orthonormalize(&md, &mut x)?;

    // residuals of eigenvalues at roundoff level are measured against this floor
    let floor = 1e-6 * scale;
    let mut locked = 0usize;
    let mut previous: Option<Vec<f64>> = None;
    let mut best = f64::INFINITY;
    for iteration in 1..=opts.max_iterations {
        let mut z: Vec<DVector<f64>> = Vec::with_capacity(p);
        z.extend(x[..locked].iter().cloned());
        for xi in &x[locked..] {
            let rhs = &md * xi;
            let mut y = DVector::from_vec(factor.solve(rhs.as_slice()));
            project(&mut y);
            z.push(y);
        }
        m_orthonormalize(&md, &mut z)?;

        let zmat = DMatrix::from_columns(&z);
        let sz = &compressed * &zmat;
        let reduced = symmetrize(zmat.transpose() * &sz);
        let (theta, vecs) = jacobi_eigen(&reduced);
        let xmat = &zmat * &vecs;
        let sx = &sz * &vecs;
        let mx = &md * &xmat;

        let mut rel = Vec::with_capacity(p);
        let mut residuals = Vec::with_capacity(p);
        for i in 0..p {
            let r = sx.column(i) - mx.column(i) * theta[i];
            let mxn = mx.column(i).norm();
            let denom = sx.column(i).norm() + theta[i].abs().max(floor) * mxn;
            rel.push(if denom > 0.0 { r.norm() / denom } else { r.norm() });
            residuals.push(r);
        }
        let converged: Vec<bool> = (0..p)
            .map(|i| {
                let stable = previous.as_ref().is_some_and(|prev| {
                    (theta[i] - prev[i]).abs() <= opts.eigenvalue_tol * theta[i].abs().max(floor)
                });
                rel[i] <= opts.residual_tol && stable
            })
            .collect();
        best = best.min(rel[..k].iter().cloned().fold(0.0, f64::max));
        locked = converged.iter().take_while(|&&c| c).count();
        x = (0..p).map(|i| xmat.column(i).into_owned()).collect();
        if locked >= k {
            return Ok(EigResult {
                eigenvalues: theta[..k].to_vec(),
                eigenvectors: x[..k].iter().map(|v| v.as_slice().to_vec()).collect(),
                residual_norms: rel[..k].to_vec(),
                iterations: iteration,
                scale,
            });
        }

        // Move the shift up towards the first unconverged Ritz value. With
        // rho = |r|_{M^-1} some eigenvalue lies within rho of theta; a successful
        // factorization certifies the new shift is still below the spectrum.
        if iteration % RESHIFT_INTERVAL == 0 {
            let i = locked;
            let r = &residuals[i];
            let rho = r.dot(&DVector::from_vec(m_factor.solve(r.as_slice()))).max(0.0).sqrt();
            for widen in [2.0, 20.0, 200.0] {
                let candidate = theta[i] - widen * rho;
                if candidate <= sigma {
                    break;
                }
                if let Ok(f) = factor_at(candidate) {
                    factor = f;
                    sigma = candidate;
                    break;
                }
            }
        }
        previous = Some(theta);
    }
    Err(LinalgError::NotConverged {
        iterations: opts.max_iterations,
        best_residual: best,
    })
}

fn symmetrize(a: DMatrix<f64>) -> DMatrix<f64> {
    (&a + a.transpose()) * 0.5
}

/// M-orthonormal basis of the deflation span, and `M` applied to it.
fn m_orthonormal_basis(md: &DMatrix<f64>, deflation: &[Vec<f64>]) -> Result<(DMatrix<f64>, DMatrix<f64>), LinalgError> {
    let n = md.nrows();
    let mut basis: Vec<DVector<f64>> = deflation
        .iter()
        .map(|v| {
            if v.len() != n {
                Err(LinalgError::Dimension("deflation vector length".into()))
            } else {
                Ok(DVector::from_column_slice(v))
            }
        })
        .collect::<Result<_, _>>()?;
    if basis.is_empty() {
        return Ok((DMatrix::zeros(n, 0), DMatrix::zeros(n, 0)));
    }
    m_orthonormalize(md, &mut basis).map_err(|_| LinalgError::BadDeflation)?;
    let d = DMatrix::from_columns(&basis);
    let md_d = md * &d;
    Ok((d, md_d))
}

/// Modified Gram-Schmidt in the M inner product, two passes.
fn m_orthonormalize(md: &DMatrix<f64>, vs: &mut [DVector<f64>]) -> Result<(), LinalgError> {
    let mut mvs: Vec<DVector<f64>> = Vec::with_capacity(vs.len());
    for j in 0..vs.len() {
        let start = (md * &vs[j]).dot(&vs[j]).max(0.0).sqrt();
        for _ in 0..2 {
            for i in 0..j {
                let c = mvs[i].dot(&vs[j]);
                let vi = vs[i].clone();
                vs[j].axpy(-c, &vi, 1.0);
            }
        }
        let mv = md * &vs[j];
        let nrm = mv.dot(&vs[j]).max(0.0).sqrt();
        if !(nrm > 1e-12 * start) || !nrm.is_finite() {
            return Err(LinalgError::BadDeflation);
        }
        vs[j] /= nrm;
        mvs.push(mv / nrm);
    }
    Ok(())
}

/// Cyclic Jacobi eigendecomposition of a small symmetric matrix, ascending order.
pub(crate) fn jacobi_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        let diag: f64 = (0..n).map(|i| a[(i, i)] * a[(i, i)]).sum();
        if off <= 1e-32 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_columns(&order.iter().map(|&i| v.column(i).into_owned()).collect::<Vec<_>>());
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dense_eig_oracle, CsrMatrix};

    fn random_spd(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        &g * g.transpose() + DMatrix::identity(n, n) * 0.5
    }

    #[test]
    fn identical_pencil() {
        let m = random_spd(8, 1);
        let r = smallest_eigs(&m, &m, &[], 1, 1e-8).unwrap();
        assert!((r.eigenvalues[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deflation_removes_kernel() {
        let s = CsrMatrix::from_diagonal(&[0.0, 1.0, 2.0]);
        let m = CsrMatrix::identity(3);
        let r = smallest_eigs(&s, &m, &[vec![1.0, 0.0, 0.0]], 1, 1e-8).unwrap();
        assert!((r.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!(r.eigenvectors[0][0].abs() < 1e-12);
    }

    #[test]
    fn matches_dense_oracle_on_random_pencils() {
        for (n, seed) in [(12, 3), (40, 4), (150, 5)] {
            let s = random_spd(n, seed);
            let m = random_spd(n, seed + 100);
            let defl = vec![(0..n).map(|i| (i as f64).sin()).collect::<Vec<_>>()];
            let r = smallest_eigs(&s, &m, &defl, 3, 1e-8).unwrap();
            let oracle = dense_eig_oracle(&s, &m, &defl).unwrap();
            for i in 0..3 {
                let rel = (r.eigenvalues[i] - oracle[i]).abs() / oracle[i].abs();
                assert!(rel < 1e-8, "n={n} i={i}: {} vs {}", r.eigenvalues[i], oracle[i]);
            }
            // M-orthonormality and deflation orthogonality
            let d = DVector::from_column_slice(&defl[0]);
            let md = &m * &d;
            for (i, xi) in r.eigenvectors.iter().enumerate() {
                let xi = DVector::from_column_slice(xi);
                assert!(md.dot(&xi).abs() < 1e-10);
                for (j, xj) in r.eigenvectors.iter().enumerate() {
                    let xj = DVector::from_column_slice(xj);
                    let g = (&m * &xj).dot(&xi);
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((g - expected).abs() < 1e-8);
                }
            }
            assert!(r.residual_norms.iter().all(|&x| x <= 1e-8));
        }
    }

    #[test]
    fn jacobi_small() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let (vals, vecs) = jacobi_eigen(&a);
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
        let r = &a * vecs.column(0) - vecs.column(0) * vals[0];
        assert!(r.norm() < 1e-14);
    }
}
