use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use super::assembly::{assemble_divergence, assemble_gradient_coupling, assemble_gram, GramForm};
use super::element::ElementKind;
use super::field::{assemble_field_loads, AnalyticField, LoadKind};
use super::space::{make_space, FeSpace};
use super::FemError;
use crate::linalg::{CsrMatrix, LinalgError, SchurComplement, SparseCholesky};
use crate::mesh::{mesh_metrics, Mesh, MeshMetrics};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElementPair {
    /// P2 velocity, P1 pressure.
    TaylorHood,
    /// P1 + bubble velocity, P1 pressure.
    Mini,
    /// P1 velocity, P1 pressure. Unstable.
    EqualOrder,
}

impl ElementPair {
    pub const ALL: [ElementPair; 3] = [ElementPair::TaylorHood, ElementPair::Mini, ElementPair::EqualOrder];

    pub fn velocity_kind(self) -> ElementKind {
        match self {
            ElementPair::TaylorHood => ElementKind::P2,
            ElementPair::Mini => ElementKind::P1Bubble,
            ElementPair::EqualOrder => ElementKind::P1,
        }
    }

    pub fn pressure_kind(self) -> ElementKind {
        ElementKind::P1
    }

    pub fn name(self) -> &'static str {
        match self {
            ElementPair::TaylorHood => "taylor_hood",
            ElementPair::Mini => "mini",
            ElementPair::EqualOrder => "p1p1",
        }
    }
}

impl fmt::Display for ElementPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ElementPair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "taylor_hood" | "taylorhood" | "th" => Ok(ElementPair::TaylorHood),
            "mini" => Ok(ElementPair::Mini),
            "p1p1" | "equal_order" | "equalorder" => Ok(ElementPair::EqualOrder),
            other => Err(format!("unknown element pair '{other}' (expected taylor_hood, mini, p1p1)")),
        }
    }
}

type Cached<T> = OnceLock<Result<Arc<T>, LinalgError>>;

/// Velocity/pressure pair with every Gram and coupling matrix assembled.
pub struct StokesSystem {
    pub pair: ElementPair,
    pub mesh: Arc<Mesh>,
    pub xh: FeSpace,
    pub mh: FeSpace,
    /// `int grad v : grad w`
    pub a: CsrMatrix,
    /// `int v . w`
    pub mv: CsrMatrix,
    pub mp: CsrMatrix,
    pub kp: CsrMatrix,
    /// `B[i, j] = int (div phi_j) psi_i`
    pub b: CsrMatrix,
    /// `G[i, j] = int phi_j . grad psi_i`
    pub g: CsrMatrix,
    pub ones_p: Vec<f64>,
    /// `Mp ones_p`, the weights of the pressure mean.
    pub mean_weights: Vec<f64>,
    pub metrics: MeshMetrics,
    schur_a: Cached<SchurComplement>,
    schur_mv: Cached<SchurComplement>,
    schur_h1: Cached<SchurComplement>,
    mv_factor: Cached<SparseCholesky>,
}

impl fmt::Debug for StokesSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StokesSystem")
            .field("pair", &self.pair)
            .field("triangles", &self.mesh.num_triangles())
            .field("velocity_dofs", &self.xh.dim_free)
            .field("pressure_dofs", &self.mh.dim_free)
            .finish()
    }
}

fn cached<T>(cell: &Cached<T>, init: impl FnOnce() -> Result<T, LinalgError>) -> Result<Arc<T>, LinalgError> {
    cell.get_or_init(|| init().map(Arc::new)).clone()
}

impl StokesSystem {
    pub fn new(mesh: Arc<Mesh>, pair: ElementPair) -> Result<Self, FemError> {
        let xh = make_space(mesh.clone(), pair.velocity_kind(), 2, true)?;
        let mh = make_space(mesh.clone(), pair.pressure_kind(), 1, false)?;
        let a = assemble_gram(&xh, GramForm::Stiffness, None);
        let mv = assemble_gram(&xh, GramForm::Mass, None);
        let mp = assemble_gram(&mh, GramForm::Mass, None);
        let kp = assemble_gram(&mh, GramForm::Stiffness, None);
        let b = assemble_divergence(&xh, &mh, None);
        let g = assemble_gradient_coupling(&xh, &mh, None);
        let ones_p = vec![1.0; mh.dim_free];
        let mean_weights = mp.mul_vec(&ones_p);
        let metrics = mesh_metrics(&mesh);
        Ok(Self {
            pair,
            mesh,
            xh,
            mh,
            a,
            mv,
            mp,
            kp,
            b,
            g,
            ones_p,
            mean_weights,
            metrics,
            schur_a: OnceLock::new(),
            schur_mv: OnceLock::new(),
            schur_h1: OnceLock::new(),
            mv_factor: OnceLock::new(),
        })
    }

    pub fn h(&self) -> f64 {
        self.metrics.h_max
    }

    /// `B A^{-1} B^T`.
    pub fn schur_stiffness(&self) -> Result<Arc<SchurComplement>, LinalgError> {
        cached(&self.schur_a, || SchurComplement::new(&self.a, &self.b))
    }

    /// `B Mv^{-1} B^T`.
    pub fn schur_mass(&self) -> Result<Arc<SchurComplement>, LinalgError> {
        cached(&self.schur_mv, || SchurComplement::new(&self.mv, &self.b))
    }

    /// `B (A + Mv)^{-1} B^T`.
    pub fn schur_full_h1(&self) -> Result<Arc<SchurComplement>, LinalgError> {
        cached(&self.schur_h1, || SchurComplement::new(&self.velocity_h1_gram(), &self.b))
    }

    pub fn mass_factor(&self) -> Result<Arc<SparseCholesky>, LinalgError> {
        cached(&self.mv_factor, || SparseCholesky::factor(&self.mv))
    }

    /// `A + Mv`.
    pub fn velocity_h1_gram(&self) -> CsrMatrix {
        self.a.linear_combination(1.0, &self.mv, 1.0)
    }

    /// `Kp + Mp`.
    pub fn pressure_h1_gram(&self) -> CsrMatrix {
        self.kp.linear_combination(1.0, &self.mp, 1.0)
    }

    pub fn field_loads(&self, field: &AnalyticField, kind: LoadKind) -> Result<Vec<f64>, FemError> {
        match kind {
            LoadKind::Div => assemble_field_loads(&self.mh, field, kind),
            _ => assemble_field_loads(&self.xh, field, kind),
        }
    }

    /// Removes the mass-weighted mean of a pressure vector.
    pub fn mean_zero(&self, q: &[f64]) -> Vec<f64> {
        let total: f64 = self.mean_weights.iter().sum();
        let mean: f64 = q.iter().zip(&self.mean_weights).map(|(a, b)| a * b).sum::<f64>() / total;
        q.iter().map(|v| v - mean).collect()
    }
}

/// Per-triangle averages `(1/|T|) int_T q`.
pub fn project_piecewise_constant(mh: &FeSpace, q: &[f64]) -> Vec<f64> {
    use super::assembly::Tabulation;
    use super::quadrature::triangle_degree6;
    let full = mh.expand(q);
    let tab = Tabulation::new(mh.kind, &triangle_degree6());
    (0..mh.mesh.num_triangles())
        .map(|t| {
            let mut s = 0.0;
            for qp in 0..tab.len() {
                let v: f64 = (0..mh.num_local())
                    .map(|i| full[mh.global_dof(t, i, 0)] * tab.values[qp][i])
                    .sum();
                s += tab.weights[qp] * v;
            }
            // tabulated weights sum to one, so this is already the average
            s
        })
        .collect()
}

/// `pi_h grad q`: the velocity `z` with `int z . w = int grad q . w` for all `w`,
/// i.e. `Mv z = G^T q = -B^T q`.
pub fn l2_project_gradient(sys: &StokesSystem, q: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let rhs: Vec<f64> = sys.b.mul_transpose_vec(q).iter().map(|v| -v).collect();
    Ok(sys.mass_factor()?.solve(&rhs))
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Norms {
    pub l2: f64,
    pub h1_semi: f64,
    pub h1: f64,
}

/// L2, H1-seminorm and full H1 norms of a free-dof coefficient vector.
pub fn evaluate_norms(space: &FeSpace, coeffs: &[f64]) -> Norms {
    let mass = assemble_gram(space, GramForm::Mass, None);
    let stiff = assemble_gram(space, GramForm::Stiffness, None);
    norms_with(&mass, &stiff, coeffs)
}

pub fn norms_with(mass: &CsrMatrix, stiffness: &CsrMatrix, coeffs: &[f64]) -> Norms {
    let quad = |m: &CsrMatrix| -> f64 { coeffs.iter().zip(m.mul_vec(coeffs)).map(|(a, b)| a * b).sum::<f64>().max(0.0) };
    let l2 = quad(mass);
    let semi = quad(stiffness);
    Norms {
        l2: l2.sqrt(),
        h1_semi: semi.sqrt(),
        h1: (l2 + semi).sqrt(),
    }
}
