use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::InfSupError;
use crate::fem::{error_norms, field_norms, norms_with, AnalyticField, LoadKind, StokesSystem};
use crate::linalg::{LinalgError, SaddleSolver};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FortinVariant {
    /// Momentum Gram `Mv`.
    L2,
    /// Momentum Gram `A`.
    H1,
}

impl FortinVariant {
    pub const ALL: [FortinVariant; 2] = [FortinVariant::L2, FortinVariant::H1];

    pub fn name(self) -> &'static str {
        match self {
            FortinVariant::L2 => "l2",
            FortinVariant::H1 => "h1",
        }
    }

    /// The inf-sup condition whose failure makes the saddle system singular.
    pub fn hypothesis(self) -> &'static str {
        match self {
            FortinVariant::L2 => "GLBB",
            FortinVariant::H1 => "LBB",
        }
    }
}

impl fmt::Display for FortinVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FortinVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "l2" => Ok(FortinVariant::L2),
            "h1" => Ok(FortinVariant::H1),
            other => Err(format!("unknown Fortin variant '{other}'")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FortinResult {
    /// `F_h v` on the free velocity dofs.
    pub z: Vec<f64>,
    /// Auxiliary pressure, mass-weighted mean zero.
    pub p: Vec<f64>,
    /// Saddle residual relative to `|f| + |g| + 1`.
    pub solve_residual: f64,
    pub variant: FortinVariant,
}

/// The factorized saddle operator of one Fortin construction:
///
/// ```text
/// G z - B^T p = load(v)     (G = Mv or A)
/// B z         = divload(v)
/// ```
///
/// with the pressure mean pinned by a multiplier.
pub struct FortinProjector<'a> {
    sys: &'a StokesSystem,
    variant: FortinVariant,
    solver: SaddleSolver,
}

impl<'a> FortinProjector<'a> {
    pub fn new(sys: &'a StokesSystem, variant: FortinVariant) -> Result<Self, InfSupError> {
        let schur = match variant {
            FortinVariant::L2 => sys.schur_mass()?,
            FortinVariant::H1 => sys.schur_stiffness()?,
        };
        let solver = SaddleSolver::new(Arc::clone(&schur), Some(&sys.mean_weights)).map_err(|e| match e {
            LinalgError::RankDeficient { .. } => InfSupError::HypothesisViolated(variant.hypothesis()),
            other => other.into(),
        })?;
        Ok(Self { sys, variant, solver })
    }

    pub fn variant(&self) -> FortinVariant {
        self.variant
    }

    /// Projects a field given through its loads.
    pub fn apply_loads(&self, momentum: &[f64], divergence: &[f64]) -> FortinResult {
        let sol = self.solver.solve(momentum, divergence);
        let scale = crate::linalg::norm2(momentum) + crate::linalg::norm2(divergence) + 1.0;
        FortinResult {
            z: sol.u,
            // the solver's momentum row carries +B^T p
            p: sol.p.iter().map(|v| -v).collect(),
            solve_residual: sol.residual / scale,
            variant: self.variant,
        }
    }

    pub fn apply(&self, field: &AnalyticField) -> Result<FortinResult, InfSupError> {
        let kind = match self.variant {
            FortinVariant::L2 => LoadKind::L2,
            FortinVariant::H1 => LoadKind::H1,
        };
        let f = self.sys.field_loads(field, kind)?;
        let g = self.sys.field_loads(field, LoadKind::Div)?;
        Ok(self.apply_loads(&f, &g))
    }
}

pub fn fortin_l2(sys: &StokesSystem, field: &AnalyticField) -> Result<FortinResult, InfSupError> {
    FortinProjector::new(sys, FortinVariant::L2)?.apply(field)
}

pub fn fortin_h1(sys: &StokesSystem, field: &AnalyticField) -> Result<FortinResult, InfSupError> {
    FortinProjector::new(sys, FortinVariant::H1)?.apply(field)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FortinDiagnostics {
    /// `max_i |(B z - divload v)_i|` over `max_i (|divload v|_i + (|B| |z|)_i)`.
    pub orthogonality_residual: f64,
    /// `|v - F_h v|_{L2}`
    pub l2_error: f64,
    /// `l2_error / (h |v|_{H1})`
    pub fl2_ratio: f64,
    /// `|F_h v|_{H1} / |v|_{H1}`
    pub fh1_ratio: f64,
    /// `|grad F_h v| / |grad v|`
    pub h1_seminorm_ratio: f64,
    /// `|F_h (F_h v) - F_h v|_{L2}` with `F_h v` lifted as a discrete field.
    pub idempotence_gap: f64,
    pub solve_residual: f64,
}

pub fn fortin_diagnostics(
    projector: &FortinProjector<'_>,
    field: &AnalyticField,
    result: &FortinResult,
) -> Result<FortinDiagnostics, InfSupError> {
    let sys = projector.sys;
    let g = sys.field_loads(field, LoadKind::Div)?;
    let bz = sys.b.mul_vec(&result.z);
    let abs_z: Vec<f64> = result.z.iter().map(|v| v.abs()).collect();
    let mut scale = 0.0f64;
    let mut worst = 0.0f64;
    for i in 0..g.len() {
        let (cols, vals) = sys.b.row(i);
        let mag: f64 = cols.iter().zip(vals).map(|(&j, &b)| b.abs() * abs_z[j]).sum();
        scale = scale.max(g[i].abs() + mag);
        worst = worst.max((bz[i] - g[i]).abs());
    }
    let orthogonality_residual = if scale > 0.0 { worst / scale } else { worst };

    let (l2_error, _) = error_norms(&sys.xh, &result.z, field);
    let (v_l2, v_semi) = field_norms(&sys.mesh, field);
    let v_h1 = (v_l2 * v_l2 + v_semi * v_semi).sqrt();
    let zn = norms_with(&sys.mv, &sys.a, &result.z);
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };

    let lifted = AnalyticField::from_fe(&sys.xh, &result.z, "F_h v");
    let again = projector.apply(&lifted)?;
    let diff: Vec<f64> = again.z.iter().zip(&result.z).map(|(a, b)| a - b).collect();
    let idempotence_gap = norms_with(&sys.mv, &sys.a, &diff).l2;

    Ok(FortinDiagnostics {
        orthogonality_residual,
        l2_error,
        fl2_ratio: ratio(l2_error, sys.h() * v_h1),
        fh1_ratio: ratio(zn.h1, v_h1),
        h1_seminorm_ratio: ratio(zn.h1_semi, v_semi),
        idempotence_gap,
        solve_residual: result.solve_residual,
    })
}
