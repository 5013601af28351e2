//! Inf-sup constants, Fortin projectors and the inequalities around them.

mod constants;
mod fortin;
mod verfurth;

pub use constants::{
    glbb_constant, glbb_full_h1, inverse_constants, kp_with_mean, lbb_constant, lbb_full_h1, weighted_constant,
    weighted_pressure_gram, weighted_velocity_gram, InfSupConstant, InverseConstants, EIG_TOL, SINGULAR_GUARD,
};
pub use fortin::{
    fortin_diagnostics, fortin_h1, fortin_l2, FortinDiagnostics, FortinProjector, FortinResult, FortinVariant,
};
pub use verfurth::{c_fit, random_pressure, verfurth_gap, VerfurthTerms};

use thiserror::Error;

use crate::fem::{FemError, StokesSystem};
use crate::linalg::LinalgError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InfSupError {
    #[error("eps must be positive and finite, got {0}")]
    InvalidEps(f64),
    #[error("{0} hypothesis violated at this level")]
    HypothesisViolated(&'static str),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// The constants of one mesh level.
#[derive(Clone, Debug)]
pub struct InfSupReport {
    pub level: usize,
    pub h: f64,
    pub beta_lbb: f64,
    pub c_glbb: f64,
    /// `(eps, c_eps)`
    pub weighted: Vec<(f64, f64)>,
    pub c_inv_velocity: f64,
    pub c_inv_pressure: f64,
    /// Minimizing pressures: LBB first, then GLBB.
    pub worst_modes: Vec<Vec<f64>>,
}

pub fn infsup_report(sys: &StokesSystem, eps_grid: &[f64]) -> Result<InfSupReport, InfSupError> {
    let lbb = lbb_constant(sys)?;
    let glbb = glbb_constant(sys)?;
    let weighted = eps_grid
        .iter()
        .map(|&eps| weighted_constant(sys, eps).map(|c| (eps, c.value)))
        .collect::<Result<Vec<_>, _>>()?;
    let inv = inverse_constants(sys)?;
    Ok(InfSupReport {
        level: sys.mesh.level,
        h: sys.h(),
        beta_lbb: lbb.value,
        c_glbb: glbb.value,
        weighted,
        c_inv_velocity: inv.velocity,
        c_inv_pressure: inv.pressure,
        worst_modes: vec![lbb.mode, glbb.mode],
    })
}

#[cfg(test)]
mod tests;
