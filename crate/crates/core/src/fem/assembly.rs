use super::element::ElementKind;
use super::quadrature::{triangle_degree6, QuadratureRule};
use super::space::FeSpace;
use crate::linalg::{CsrMatrix, TripletBuilder};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GramForm {
    /// `int u . v`
    Mass,
    /// `int grad u : grad v`
    Stiffness,
}

/// Basis values and barycentric derivatives tabulated at the points of a rule.
pub(crate) struct Tabulation {
    pub weights: Vec<f64>,
    pub bary: Vec<[f64; 3]>,
    pub values: Vec<[f64; 6]>,
    derivs: Vec<[[f64; 3]; 6]>,
    n: usize,
}

impl Tabulation {
    pub fn new(kind: ElementKind, rule: &QuadratureRule) -> Self {
        let mut bary = Vec::with_capacity(rule.len());
        let mut values = Vec::with_capacity(rule.len());
        let mut derivs = Vec::with_capacity(rule.len());
        for p in &rule.points {
            let l = [1.0 - p[0] - p[1], p[0], p[1]];
            let mut v = [0.0; 6];
            let mut d = [[0.0; 3]; 6];
            kind.values(l, &mut v);
            kind.bary_derivatives(l, &mut d);
            bary.push(l);
            values.push(v);
            derivs.push(d);
        }
        Self {
            // reference weights sum to 1/2; physical weight = w * 2 |T|
            weights: rule.weights.iter().map(|w| 2.0 * w).collect(),
            bary,
            values,
            derivs,
            n: kind.num_local(),
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn gradients(&self, q: usize, grad_l: &[[f64; 2]; 3]) -> [[f64; 2]; 6] {
        let mut g = [[0.0; 2]; 6];
        for i in 0..self.n {
            let d = &self.derivs[q][i];
            g[i] = [
                d[0] * grad_l[0][0] + d[1] * grad_l[1][0] + d[2] * grad_l[2][0],
                d[0] * grad_l[0][1] + d[1] * grad_l[1][1] + d[2] * grad_l[2][1],
            ];
        }
        g
    }
}

/// Gram matrix of `form` on the free dofs of `space`, with the default degree-6
/// rule unless `rule` is given. Vector spaces use the componentwise form.
pub fn assemble_gram(space: &FeSpace, form: GramForm, rule: Option<&QuadratureRule>) -> CsrMatrix {
    let default_rule;
    let rule = match rule {
        Some(r) => r,
        None => {
            default_rule = triangle_degree6();
            &default_rule
        }
    };
    let tab = Tabulation::new(space.kind, rule);
    let n = space.num_local();
    let mut builder = TripletBuilder::new(space.dim_free, space.dim_free);
    for t in 0..space.mesh.num_triangles() {
        let geo = space.geometry(t);
        let mut local = [[0.0; 6]; 6];
        for q in 0..tab.len() {
            let w = tab.weights[q] * geo.area;
            match form {
                GramForm::Mass => {
                    let v = &tab.values[q];
                    for i in 0..n {
                        for j in 0..n {
                            local[i][j] += w * (v[i] * v[j]);
                        }
                    }
                }
                GramForm::Stiffness => {
                    let g = tab.gradients(q, &geo.grad_l);
                    for i in 0..n {
                        for j in 0..n {
                            local[i][j] += w * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                        }
                    }
                }
            }
        }
        for c in 0..space.components {
            for i in 0..n {
                let Some(fi) = space.free_index[space.global_dof(t, i, c)] else {
                    continue;
                };
                for j in 0..n {
                    if let Some(fj) = space.free_index[space.global_dof(t, j, c)] {
                        builder.push(fi, fj, local[i][j]);
                    }
                }
            }
        }
    }
    builder.build()
}

/// Closed-form local P1 mass matrix `(|T| / 12) [[2,1,1],[1,2,1],[1,1,2]]`.
pub fn local_p1_mass(area: f64) -> [[f64; 3]; 3] {
    let mut m = [[area / 12.0; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = area / 6.0;
    }
    m
}

fn coupling(
    xh: &FeSpace,
    mh: &FeSpace,
    rule: Option<&QuadratureRule>,
    entry: impl Fn(f64, [f64; 2], f64, [f64; 2], usize) -> f64,
) -> CsrMatrix {
    assert_eq!(xh.components, 2, "velocity space must be vector valued");
    assert_eq!(mh.components, 1, "pressure space must be scalar");
    let default_rule;
    let rule = match rule {
        Some(r) => r,
        None => {
            default_rule = triangle_degree6();
            &default_rule
        }
    };
    let tv = Tabulation::new(xh.kind, rule);
    let tp = Tabulation::new(mh.kind, rule);
    let (nv, np) = (xh.num_local(), mh.num_local());
    let mut builder = TripletBuilder::new(mh.dim_free, xh.dim_free);
    for t in 0..xh.mesh.num_triangles() {
        let geo = xh.geometry(t);
        let mut local = [[[0.0; 2]; 6]; 6];
        for q in 0..tv.len() {
            let w = tv.weights[q] * geo.area;
            let gv = tv.gradients(q, &geo.grad_l);
            let gp = tp.gradients(q, &geo.grad_l);
            for i in 0..np {
                for j in 0..nv {
                    for c in 0..2 {
                        local[i][j][c] += w * entry(tp.values[q][i], gp[i], tv.values[q][j], gv[j], c);
                    }
                }
            }
        }
        for i in 0..np {
            let Some(fi) = mh.free_index[mh.global_dof(t, i, 0)] else {
                continue;
            };
            for j in 0..nv {
                for c in 0..2 {
                    if let Some(fj) = xh.free_index[xh.global_dof(t, j, c)] {
                        builder.push(fi, fj, local[i][j][c]);
                    }
                }
            }
        }
    }
    builder.build()
}

/// `B[i, j] = int (div phi_j) psi_i` over free velocity and pressure dofs.
pub fn assemble_divergence(xh: &FeSpace, mh: &FeSpace, rule: Option<&QuadratureRule>) -> CsrMatrix {
    coupling(xh, mh, rule, |psi, _gpsi, _phi, gphi, c| gphi[c] * psi)
}

/// `G[i, j] = int phi_j . grad psi_i`; integration by parts gives `B = -G`.
pub fn assemble_gradient_coupling(xh: &FeSpace, mh: &FeSpace, rule: Option<&QuadratureRule>) -> CsrMatrix {
    coupling(xh, mh, rule, |_psi, gpsi, phi, _gphi, c| phi * gpsi[c])
}
