use std::sync::Arc;

use super::element::{DofLocation, ElementKind, TriangleGeometry};
use super::FemError;
use crate::mesh::Mesh;

/// Scalar or vector Lagrange-type space on a mesh.
///
/// Global dofs interleave components: scalar dof `s`, component `c` has index
/// `s * components + c`. Scalar dofs are numbered vertices first, then edges (P2)
/// or triangles (bubbles). Matrices and coefficient vectors handed out by this
/// crate live on the free (unmasked) dofs unless stated otherwise.
#[derive(Clone, Debug)]
pub struct FeSpace {
    pub mesh: Arc<Mesh>,
    pub kind: ElementKind,
    pub components: usize,
    pub dirichlet: bool,
    /// `cell_dofs[t][local]` is the global scalar dof.
    pub cell_dofs: Vec<[usize; 6]>,
    /// Nodal location of every scalar dof.
    pub nodes: Vec<[f64; 2]>,
    pub dirichlet_mask: Vec<bool>,
    /// Free position of each global dof.
    pub free_index: Vec<Option<usize>>,
    /// Global index of each free dof.
    pub free_dofs: Vec<usize>,
    pub dim_total: usize,
    pub dim_free: usize,
}

pub fn make_space(
    mesh: Arc<Mesh>,
    kind: ElementKind,
    components: usize,
    dirichlet: bool,
) -> Result<FeSpace, FemError> {
    if !(1..=2).contains(&components) {
        return Err(FemError::Unsupported(format!("{components} components")));
    }
    if kind == ElementKind::P1Bubble && !dirichlet {
        return Err(FemError::Unsupported(
            "P1bubble is offered only as a Dirichlet velocity space".into(),
        ));
    }
    let nv = mesh.num_vertices();
    let num_scalar = nv
        + match kind {
            ElementKind::P1 => 0,
            ElementKind::P2 => mesh.num_edges(),
            ElementKind::P1Bubble => mesh.num_triangles(),
        };

    let mut nodes = vec![[0.0; 2]; num_scalar];
    let mut boundary = vec![false; num_scalar];
    nodes[..nv].copy_from_slice(&mesh.vertices);
    boundary[..nv].copy_from_slice(&mesh.boundary_vertex_mask);

    let mut cell_dofs = Vec::with_capacity(mesh.num_triangles());
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let geo = TriangleGeometry::new(mesh.triangle_coords(t));
        let mut dofs = [usize::MAX; 6];
        for (i, &loc) in kind.locations().iter().enumerate() {
            let s = match loc {
                DofLocation::Vertex(k) => tri[k],
                DofLocation::Edge(k) => {
                    let e = mesh.triangle_edges[t][k];
                    boundary[nv + e] = mesh.edges[e].boundary;
                    nv + e
                }
                DofLocation::Cell => nv + t,
            };
            nodes[s] = geo.node(loc);
            dofs[i] = s;
        }
        cell_dofs.push(dofs);
    }

    let dim_total = num_scalar * components;
    let dirichlet_mask: Vec<bool> = (0..dim_total)
        .map(|g| dirichlet && boundary[g / components])
        .collect();
    let mut free_index = vec![None; dim_total];
    let mut free_dofs = Vec::new();
    for g in 0..dim_total {
        if !dirichlet_mask[g] {
            free_index[g] = Some(free_dofs.len());
            free_dofs.push(g);
        }
    }
    Ok(FeSpace {
        mesh,
        kind,
        components,
        dirichlet,
        cell_dofs,
        nodes,
        dim_free: free_dofs.len(),
        dirichlet_mask,
        free_index,
        free_dofs,
        dim_total,
    })
}

impl FeSpace {
    pub fn num_scalar_dofs(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_local(&self) -> usize {
        self.kind.num_local()
    }

    pub fn global_dof(&self, t: usize, local: usize, component: usize) -> usize {
        self.cell_dofs[t][local] * self.components + component
    }

    pub fn geometry(&self, t: usize) -> TriangleGeometry {
        TriangleGeometry::new(self.mesh.triangle_coords(t))
    }

    /// Embeds a free-dof vector into the full dof vector (zeros on masked dofs).
    pub fn expand(&self, free: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.dim_total];
        for (&g, &v) in self.free_dofs.iter().zip(free) {
            full[g] = v;
        }
        full
    }

    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        self.free_dofs.iter().map(|&g| full[g]).collect()
    }

    /// Nodal interpolant as a free-dof vector. Values at masked dofs are dropped, so
    /// the result is meaningful for fields vanishing on the boundary.
    pub fn interpolate<F>(&self, f: F) -> Vec<f64>
    where
        F: Fn([f64; 2]) -> [f64; 2],
    {
        let c = self.components;
        let mut full = vec![0.0; self.dim_total];
        let nv = self.mesh.num_vertices();
        for (s, &x) in self.nodes.iter().enumerate().take(nv) {
            let v = f(x);
            for k in 0..c {
                full[s * c + k] = v[k];
            }
        }
        match self.kind {
            ElementKind::P1 => {}
            ElementKind::P2 => {
                for s in nv..self.nodes.len() {
                    let v = f(self.nodes[s]);
                    for k in 0..c {
                        full[s * c + k] = v[k];
                    }
                }
            }
            ElementKind::P1Bubble => {
                // bubble coefficient corrects the linear part at the centroid
                for (t, tri) in self.mesh.triangles.iter().enumerate() {
                    let s = self.cell_dofs[t][3];
                    let v = f(self.nodes[s]);
                    for k in 0..c {
                        let linear: f64 = tri.iter().map(|&i| full[i * c + k]).sum::<f64>() / 3.0;
                        full[s * c + k] = v[k] - linear;
                    }
                }
            }
        }
        self.restrict(&full)
    }

    pub fn interpolate_scalar<F>(&self, f: F) -> Vec<f64>
    where
        F: Fn([f64; 2]) -> f64,
    {
        self.interpolate(|x| [f(x), 0.0])
    }

    /// Value and gradient (`grad[c][d] = d u_c / d x_d`) of a full-dof function at a
    /// barycentric point of triangle `t`.
    pub fn eval_local(&self, t: usize, l: [f64; 3], full: &[f64]) -> ([f64; 2], [[f64; 2]; 2]) {
        let geo = self.geometry(t);
        let n = self.num_local();
        let mut phi = [0.0; 6];
        let mut grad = [[0.0; 2]; 6];
        self.kind.values(l, &mut phi);
        self.kind.gradients(l, &geo.grad_l, &mut grad);
        let mut val = [0.0; 2];
        let mut g = [[0.0; 2]; 2];
        for i in 0..n {
            for c in 0..self.components {
                let u = full[self.global_dof(t, i, c)];
                val[c] += u * phi[i];
                g[c][0] += u * grad[i][0];
                g[c][1] += u * grad[i][1];
            }
        }
        (val, g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_structured_mesh, Pattern};

    fn mesh2() -> Arc<Mesh> {
        Arc::new(build_structured_mesh(2, Pattern::Diagonal).unwrap())
    }

    #[test]
    fn dof_counts() {
        let m = mesh2();
        let p2 = make_space(m.clone(), ElementKind::P2, 2, true).unwrap();
        assert_eq!((p2.dim_total, p2.dim_free), (50, 18));
        let p1 = make_space(m.clone(), ElementKind::P1, 1, false).unwrap();
        assert_eq!((p1.dim_total, p1.dim_free), (9, 9));
        let mini = make_space(m.clone(), ElementKind::P1Bubble, 2, true).unwrap();
        assert_eq!(mini.dim_free, 18);
        assert_eq!(mini.dim_total, 2 * (9 + 8));
    }

    #[test]
    fn crisscross_counts() {
        let m = Arc::new(build_structured_mesh(2, Pattern::Crisscross).unwrap());
        let p1 = make_space(m, ElementKind::P1, 2, true).unwrap();
        // interior vertices: 1 grid vertex + 4 centers
        assert_eq!(p1.dim_free, 10);
    }

    #[test]
    fn unsupported_combinations() {
        let m = mesh2();
        assert!(make_space(m.clone(), ElementKind::P1, 3, false).is_err());
        assert!(make_space(m, ElementKind::P1Bubble, 1, false).is_err());
    }

    #[test]
    fn mask_is_exactly_the_boundary() {
        let m = mesh2();
        let s = make_space(m, ElementKind::P2, 2, true).unwrap();
        for g in 0..s.dim_total {
            let x = s.nodes[g / 2];
            let on = x[0] == 0.0 || x[0] == 1.0 || x[1] == 0.0 || x[1] == 1.0;
            assert_eq!(s.dirichlet_mask[g], on);
        }
        assert_eq!(s.dim_free, s.dim_total - s.dirichlet_mask.iter().filter(|b| **b).count());
    }

    #[test]
    fn interpolation_reproduces_space_members() {
        let m = Arc::new(build_structured_mesh(3, Pattern::Crisscross).unwrap());
        let f = |x: [f64; 2]| [x[0] * x[0] + 2.0 * x[0] * x[1] - x[1], 3.0 * x[1] * x[1] - x[0]];
        let s = make_space(m.clone(), ElementKind::P2, 2, false).unwrap();
        let u = s.expand(&s.interpolate(f));
        for t in 0..m.num_triangles() {
            let l = [0.2, 0.5, 0.3];
            let x = s.geometry(t).point(l);
            let (v, g) = s.eval_local(t, l, &u);
            let e = f(x);
            assert!((v[0] - e[0]).abs() < 1e-14 && (v[1] - e[1]).abs() < 1e-14);
            assert!((g[0][0] - (2.0 * x[0] + 2.0 * x[1])).abs() < 1e-12);
            assert!((g[1][1] - 6.0 * x[1]).abs() < 1e-12);
        }
    }
}
