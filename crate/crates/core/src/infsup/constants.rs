use nalgebra::DMatrix;

use super::InfSupError;
use crate::fem::StokesSystem;
use crate::linalg::{largest_eig, smallest_eigs, CsrMatrix, LinearOperator, SchurComplement, SparseCholesky};

/// Eigenvalue residual tolerance used for every inf-sup pencil.
pub const EIG_TOL: f64 = 1e-8;

/// A pencil whose smallest eigenvalue is below this fraction of `tr S / tr M`
/// is reported as numerically singular.
pub const SINGULAR_GUARD: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct InfSupConstant {
    /// Square root of the smallest deflated eigenvalue.
    pub value: f64,
    pub eigenvalue: f64,
    /// Mean-zero pressure attaining the minimum; empty when singular.
    pub mode: Vec<f64>,
    pub residual: f64,
    pub singular: bool,
}

fn smallest(s: &dyn LinearOperator, m: &dyn LinearOperator, ones: &[f64]) -> Result<InfSupConstant, InfSupError> {
    let r = smallest_eigs(s, m, &[ones.to_vec()], 1, EIG_TOL)?;
    let eigenvalue = r.eigenvalues[0];
    let singular = eigenvalue <= SINGULAR_GUARD * r.scale;
    let value = if singular { 0.0 } else { eigenvalue.sqrt() };
    Ok(InfSupConstant {
        value,
        eigenvalue,
        mode: if singular { Vec::new() } else { r.eigenvectors[0].clone() },
        residual: r.residual_norms[0],
        singular,
    })
}

/// `Kp + w w^T` with `w = Mp 1`: positive definite, and equal to `Kp` on mean-zero
/// pressures. Stands in for `Kp` as the mass side of a pencil.
pub fn kp_with_mean(sys: &StokesSystem) -> DMatrix<f64> {
    let w = nalgebra::DVector::from_column_slice(&sys.mean_weights);
    sys.kp.to_dense() + &w * w.transpose()
}

/// `beta = min_q sup_v (div v, q) / (|grad v| |q|)` over mean-zero `q`:
/// smallest eigenvalue of `B A^{-1} B^T q = lambda Mp q`.
pub fn lbb_constant(sys: &StokesSystem) -> Result<InfSupConstant, InfSupError> {
    let s = sys.schur_stiffness()?;
    smallest(&*s, &sys.mp, &sys.ones_p)
}

/// LBB constant with the full H1 velocity norm: `B (A + Mv)^{-1} B^T` against `Mp`.
pub fn lbb_full_h1(sys: &StokesSystem) -> Result<InfSupConstant, InfSupError> {
    let s = sys.schur_full_h1()?;
    smallest(&*s, &sys.mp, &sys.ones_p)
}

/// `c = min_q |pi_h grad q| / |grad q|` over nonconstant `q`:
/// smallest eigenvalue of `B Mv^{-1} B^T q = lambda Kp q` off the constants.
pub fn glbb_constant(sys: &StokesSystem) -> Result<InfSupConstant, InfSupError> {
    let s = sys.schur_mass()?;
    smallest(&*s, &kp_with_mean(sys), &sys.ones_p)
}

/// GLBB constant with the full H1 pressure norm: `B Mv^{-1} B^T` against `Kp + Mp`.
pub fn glbb_full_h1(sys: &StokesSystem) -> Result<InfSupConstant, InfSupError> {
    let s = sys.schur_mass()?;
    smallest(&*s, &sys.pressure_h1_gram(), &sys.ones_p)
}

/// Velocity Gram of `|v|^2 + eps^2 |v|_{H1}^2`: `Mv + eps^2 (Mv + A)`.
pub fn weighted_velocity_gram(sys: &StokesSystem, eps: f64) -> CsrMatrix {
    let e2 = eps * eps;
    sys.mv.linear_combination(1.0 + e2, &sys.a, e2)
}

/// Pressure Gram of the discrete norm `inf_{q = q1 + q2} |q1|_{H1}^2 + eps^-2 |q2|^2`:
/// `N = H - H (H + E)^{-1} H` with `H = Mp + Kp`, `E = eps^-2 Mp`, evaluated as
/// `H (H + E)^{-1} E` to avoid cancellation.
pub fn weighted_pressure_gram(sys: &StokesSystem, eps: f64) -> Result<DMatrix<f64>, InfSupError> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(InfSupError::InvalidEps(eps));
    }
    let h = sys.pressure_h1_gram();
    let e = sys.mp.scaled(1.0 / (eps * eps));
    let factor = SparseCholesky::factor(&h.linear_combination(1.0, &e, 1.0))?;
    let n = h.nrows();
    let mut out = DMatrix::zeros(n, n);
    let mut col = vec![0.0; n];
    for j in 0..n {
        // column j of E; E is symmetric so row j serves
        col.iter_mut().for_each(|v| *v = 0.0);
        let (cols, vals) = e.row(j);
        for (&i, &v) in cols.iter().zip(vals) {
            col[i] = v;
        }
        let y = factor.solve(&col);
        out.column_mut(j).copy_from_slice(&h.mul_vec(&y));
    }
    Ok((&out + out.transpose()) * 0.5)
}

/// Weighted inf-sup constant: smallest eigenvalue of `B W^{-1} B^T q = lambda N q`.
pub fn weighted_constant(sys: &StokesSystem, eps: f64) -> Result<InfSupConstant, InfSupError> {
    let n = weighted_pressure_gram(sys, eps)?;
    let s = SchurComplement::new(&weighted_velocity_gram(sys, eps), &sys.b)?;
    smallest(&s, &n, &sys.ones_p)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InverseConstants {
    /// `h sqrt(lambda_max(A + Mv, Mv))`
    pub velocity: f64,
    /// `h sqrt(lambda_max(Kp + Mp, Mp))`
    pub pressure: f64,
}

pub fn inverse_constants(sys: &StokesSystem) -> Result<InverseConstants, InfSupError> {
    let h = sys.h();
    let lv = largest_eig(&sys.velocity_h1_gram(), &sys.mv, 1e-10)?;
    let lp = largest_eig(&sys.pressure_h1_gram(), &sys.mp, 1e-10)?;
    Ok(InverseConstants {
        velocity: h * lv.value.sqrt(),
        pressure: h * lp.value.sqrt(),
    })
}
