use std::fmt;
use std::sync::Arc;

use super::assembly::Tabulation;
use super::quadrature::{collapsed_gauss, triangle_degree8};
use super::space::FeSpace;
use super::FemError;
use crate::mesh::Mesh;

type ValueFn = Arc<dyn Fn([f64; 2]) -> [f64; 2] + Send + Sync>;
type GradFn = Arc<dyn Fn([f64; 2]) -> [[f64; 2]; 2] + Send + Sync>;
type DivFn = Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>;

/// A vector field on the unit square given by callbacks.
///
/// `gradient(x)[c][d]` is `d v_c / d x_d`.
#[derive(Clone)]
pub struct AnalyticField {
    pub name: String,
    value: ValueFn,
    gradient: Option<GradFn>,
    divergence: Option<DivFn>,
    pub boundary_compatible: bool,
}

impl fmt::Debug for AnalyticField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticField")
            .field("name", &self.name)
            .field("gradient", &self.gradient.is_some())
            .field("divergence", &self.divergence.is_some())
            .field("boundary_compatible", &self.boundary_compatible)
            .finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoadKind {
    /// `(int v . phi_j)_j` over free velocity dofs
    L2,
    /// `(int grad v : grad phi_j)_j` over free velocity dofs
    H1,
    /// `(int (div v) psi_i)_i` over pressure dofs
    Div,
}

fn a(t: f64) -> f64 {
    t * t * (1.0 - t) * (1.0 - t)
}

fn da(t: f64) -> f64 {
    2.0 * t * (1.0 - t) * (1.0 - 2.0 * t)
}

fn dda(t: f64) -> f64 {
    2.0 * (1.0 - 6.0 * t + 6.0 * t * t)
}

impl AnalyticField {
    pub fn new<F>(name: impl Into<String>, value: F, boundary_compatible: bool) -> Self
    where
        F: Fn([f64; 2]) -> [f64; 2] + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            value: Arc::new(value),
            gradient: None,
            divergence: None,
            boundary_compatible,
        }
    }

    pub fn with_gradient<G>(mut self, gradient: G) -> Self
    where
        G: Fn([f64; 2]) -> [[f64; 2]; 2] + Send + Sync + 'static,
    {
        self.gradient = Some(Arc::new(gradient));
        self
    }

    pub fn with_divergence<D>(mut self, divergence: D) -> Self
    where
        D: Fn([f64; 2]) -> f64 + Send + Sync + 'static,
    {
        self.divergence = Some(Arc::new(divergence));
        self
    }

    /// `curl psi` for `psi = (x (1-x) y (1-y))^2`; solenoidal, vanishing with its
    /// first derivatives on the boundary.
    pub fn v_star() -> Self {
        Self::new("v_star", |p| [a(p[0]) * da(p[1]), -da(p[0]) * a(p[1])], true)
            .with_gradient(|p| {
                let (x, y) = (p[0], p[1]);
                [[da(x) * da(y), a(x) * dda(y)], [-dda(x) * a(y), -da(x) * da(y)]]
            })
            .with_divergence(|_| 0.0)
    }

    /// `(g, g)` with `g = x (1-x) y (1-y)`; not solenoidal.
    pub fn w_star() -> Self {
        let g = |p: [f64; 2]| p[0] * (1.0 - p[0]) * p[1] * (1.0 - p[1]);
        let grad_g = |p: [f64; 2]| {
            [
                (1.0 - 2.0 * p[0]) * p[1] * (1.0 - p[1]),
                p[0] * (1.0 - p[0]) * (1.0 - 2.0 * p[1]),
            ]
        };
        Self::new("w_star", move |p| [g(p), g(p)], true)
            .with_gradient(move |p| [grad_g(p), grad_g(p)])
            .with_divergence(move |p| {
                let d = grad_g(p);
                d[0] + d[1]
            })
    }

    pub fn zero() -> Self {
        Self::new("zero", |_| [0.0; 2], true)
            .with_gradient(|_| [[0.0; 2]; 2])
            .with_divergence(|_| 0.0)
    }

    /// Lifts a discrete velocity (free-dof coefficients) of `space` to a field.
    pub fn from_fe(space: &FeSpace, free: &[f64], name: impl Into<String>) -> Self {
        let full = Arc::new(space.expand(free));
        let locator = Arc::new(Locator::new(&space.mesh));
        let space = Arc::new(space.clone());
        let (s1, f1, l1) = (space.clone(), full.clone(), locator.clone());
        let (s2, f2, l2) = (space.clone(), full.clone(), locator.clone());
        Self::new(
            name,
            move |p| {
                let (t, l) = l1.locate(p);
                s1.eval_local(t, l, &f1).0
            },
            space.dirichlet,
        )
        .with_gradient(move |p| {
            let (t, l) = l2.locate(p);
            s2.eval_local(t, l, &f2).1
        })
    }

    pub fn value(&self, p: [f64; 2]) -> [f64; 2] {
        (self.value)(p)
    }

    pub fn has_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    pub fn gradient(&self, p: [f64; 2]) -> Option<[[f64; 2]; 2]> {
        self.gradient.as_ref().map(|g| g(p))
    }

    /// Divergence callback, falling back to the trace of the gradient.
    pub fn divergence(&self, p: [f64; 2]) -> Option<f64> {
        match (&self.divergence, &self.gradient) {
            (Some(d), _) => Some(d(p)),
            (None, Some(g)) => {
                let g = g(p);
                Some(g[0][0] + g[1][1])
            }
            (None, None) => None,
        }
    }
}

/// Uniform bucket grid over the unit square for point location.
struct Locator {
    mesh: Arc<Mesh>,
    cells: usize,
    buckets: Vec<Vec<usize>>,
}

impl Locator {
    fn new(mesh: &Arc<Mesh>) -> Self {
        let cells = ((mesh.num_triangles() as f64).sqrt().ceil() as usize).max(1);
        let mut buckets = vec![Vec::new(); cells * cells];
        let idx = |v: f64| ((v * cells as f64).floor().max(0.0) as usize).min(cells - 1);
        for t in 0..mesh.num_triangles() {
            let c = mesh.triangle_coords(t);
            let (x0, x1) = (c.iter().map(|p| p[0]).fold(f64::MAX, f64::min), c.iter().map(|p| p[0]).fold(f64::MIN, f64::max));
            let (y0, y1) = (c.iter().map(|p| p[1]).fold(f64::MAX, f64::min), c.iter().map(|p| p[1]).fold(f64::MIN, f64::max));
            for i in idx(x0)..=idx(x1) {
                for j in idx(y0)..=idx(y1) {
                    buckets[j * cells + i].push(t);
                }
            }
        }
        Self {
            mesh: mesh.clone(),
            cells,
            buckets,
        }
    }

    /// Triangle maximizing the smallest barycentric coordinate among candidates.
    fn locate(&self, p: [f64; 2]) -> (usize, [f64; 3]) {
        let idx = |v: f64| ((v * self.cells as f64).floor().max(0.0) as usize).min(self.cells - 1);
        let bucket = &self.buckets[idx(p[1]) * self.cells + idx(p[0])];
        let mut best = (usize::MAX, [0.0; 3], f64::NEG_INFINITY);
        for &t in bucket {
            let l = self.mesh.barycentric(t, p);
            let m = l[0].min(l[1]).min(l[2]);
            if m > best.2 {
                best = (t, l, m);
            }
        }
        (best.0, best.1)
    }
}

/// Load vector of `field` against the free dofs of `space` (L2, H1) or against the
/// pressure space (Div), using the degree-8 rule.
pub fn assemble_field_loads(space: &FeSpace, field: &AnalyticField, kind: LoadKind) -> Result<Vec<f64>, FemError> {
    match kind {
        LoadKind::H1 if !field.has_gradient() => return Err(FemError::MissingCallback("gradient")),
        LoadKind::Div if field.divergence([0.5, 0.5]).is_none() => {
            return Err(FemError::MissingCallback("divergence"))
        }
        LoadKind::Div if space.components != 1 => {
            return Err(FemError::Unsupported("divergence loads live on a scalar space".into()))
        }
        LoadKind::L2 | LoadKind::H1 if space.components != 2 => {
            return Err(FemError::Unsupported("velocity loads need a vector space".into()))
        }
        _ => {}
    }
    let tab = Tabulation::new(space.kind, &triangle_degree8());
    let n = space.num_local();
    let mut out = vec![0.0; space.dim_free];
    for t in 0..space.mesh.num_triangles() {
        let geo = space.geometry(t);
        for q in 0..tab.len() {
            let w = tab.weights[q] * geo.area;
            let x = geo.point(tab.bary[q]);
            let phi = &tab.values[q];
            match kind {
                LoadKind::L2 => {
                    let v = field.value(x);
                    for i in 0..n {
                        for c in 0..2 {
                            if let Some(f) = space.free_index[space.global_dof(t, i, c)] {
                                out[f] += w * v[c] * phi[i];
                            }
                        }
                    }
                }
                LoadKind::H1 => {
                    let gv = field.gradient(x).expect("checked above");
                    let gphi = tab.gradients(q, &geo.grad_l);
                    for i in 0..n {
                        for c in 0..2 {
                            if let Some(f) = space.free_index[space.global_dof(t, i, c)] {
                                out[f] += w * (gv[c][0] * gphi[i][0] + gv[c][1] * gphi[i][1]);
                            }
                        }
                    }
                }
                LoadKind::Div => {
                    let d = field.divergence(x).expect("checked above");
                    for i in 0..n {
                        if let Some(f) = space.free_index[space.global_dof(t, i, 0)] {
                            out[f] += w * d * phi[i];
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `(||v||_{L2}, ||grad v||_{L2})` of an analytic field over the mesh, by a
/// collapsed Gauss rule exact to degree 14 on each triangle.
pub fn field_norms(mesh: &Mesh, field: &AnalyticField) -> (f64, f64) {
    let rule = collapsed_gauss(8);
    let (mut l2, mut semi) = (0.0, 0.0);
    for t in 0..mesh.num_triangles() {
        let geo = super::element::TriangleGeometry::new(mesh.triangle_coords(t));
        for (p, w) in rule.iter() {
            let x = geo.point([1.0 - p[0] - p[1], p[0], p[1]]);
            let w = 2.0 * w * geo.area;
            let v = field.value(x);
            l2 += w * (v[0] * v[0] + v[1] * v[1]);
            if let Some(g) = field.gradient(x) {
                semi += w * g.iter().flatten().map(|v| v * v).sum::<f64>();
            }
        }
    }
    (l2.sqrt(), semi.sqrt())
}

/// `(||v - u_h||_{L2}, ||grad (v - u_h)||_{L2})` for free-dof coefficients `free`.
pub fn error_norms(space: &FeSpace, free: &[f64], field: &AnalyticField) -> (f64, f64) {
    let full = space.expand(free);
    let rule = collapsed_gauss(8);
    let tab = Tabulation::new(space.kind, &rule);
    let n = space.num_local();
    let (mut l2, mut semi) = (0.0, 0.0);
    for t in 0..space.mesh.num_triangles() {
        let geo = space.geometry(t);
        for q in 0..tab.len() {
            let w = tab.weights[q] * geo.area;
            let x = geo.point(tab.bary[q]);
            let gphi = tab.gradients(q, &geo.grad_l);
            let mut val = [0.0; 2];
            let mut grad = [[0.0; 2]; 2];
            for i in 0..n {
                for c in 0..space.components {
                    let u = full[space.global_dof(t, i, c)];
                    val[c] += u * tab.values[q][i];
                    grad[c][0] += u * gphi[i][0];
                    grad[c][1] += u * gphi[i][1];
                }
            }
            let v = field.value(x);
            l2 += w * ((v[0] - val[0]).powi(2) + (v[1] - val[1]).powi(2));
            if let Some(g) = field.gradient(x) {
                for c in 0..2 {
                    for d in 0..2 {
                        semi += w * (g[c][d] - grad[c][d]).powi(2);
                    }
                }
            }
        }
    }
    (l2.sqrt(), semi.sqrt())
}
