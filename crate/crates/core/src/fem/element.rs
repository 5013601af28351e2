//! Lagrange-type reference elements written in barycentric coordinates.
//!
//! With `l = (l0, l1, l2)` the barycentric coordinates of a point, every basis
//! function is a polynomial in `l`; physical gradients follow from the chain rule
//! `grad phi = sum_k (d phi / d l_k) grad l_k`.

use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElementKind {
    P1,
    P2,
    P1Bubble,
}

/// Where a local degree of freedom sits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DofLocation {
    Vertex(usize),
    /// Midpoint of the local edge joining vertices `k` and `k + 1`.
    Edge(usize),
    Cell,
}

impl ElementKind {
    pub fn num_local(self) -> usize {
        match self {
            ElementKind::P1 => 3,
            ElementKind::P2 => 6,
            ElementKind::P1Bubble => 4,
        }
    }

    /// Polynomial degree of the richest basis function.
    pub fn degree(self) -> usize {
        match self {
            ElementKind::P1 => 1,
            ElementKind::P2 => 2,
            ElementKind::P1Bubble => 3,
        }
    }

    pub fn locations(self) -> &'static [DofLocation] {
        use DofLocation::*;
        match self {
            ElementKind::P1 => &[Vertex(0), Vertex(1), Vertex(2)],
            ElementKind::P2 => &[Vertex(0), Vertex(1), Vertex(2), Edge(0), Edge(1), Edge(2)],
            ElementKind::P1Bubble => &[Vertex(0), Vertex(1), Vertex(2), Cell],
        }
    }

    /// Basis values at barycentric point `l`.
    pub fn values(self, l: [f64; 3], out: &mut [f64]) {
        match self {
            ElementKind::P1 => out[..3].copy_from_slice(&l),
            ElementKind::P2 => {
                for i in 0..3 {
                    out[i] = l[i] * (2.0 * l[i] - 1.0);
                    out[3 + i] = 4.0 * l[i] * l[(i + 1) % 3];
                }
            }
            ElementKind::P1Bubble => {
                out[..3].copy_from_slice(&l);
                out[3] = 27.0 * l[0] * l[1] * l[2];
            }
        }
    }

    /// Derivatives with respect to the three barycentric coordinates.
    pub fn bary_derivatives(self, l: [f64; 3], out: &mut [[f64; 3]]) {
        match self {
            ElementKind::P1 => {
                for (i, d) in out.iter_mut().take(3).enumerate() {
                    *d = [0.0; 3];
                    d[i] = 1.0;
                }
            }
            ElementKind::P2 => {
                for i in 0..3 {
                    let j = (i + 1) % 3;
                    out[i] = [0.0; 3];
                    out[i][i] = 4.0 * l[i] - 1.0;
                    out[3 + i] = [0.0; 3];
                    out[3 + i][i] = 4.0 * l[j];
                    out[3 + i][j] = 4.0 * l[i];
                }
            }
            ElementKind::P1Bubble => {
                for (i, d) in out.iter_mut().take(3).enumerate() {
                    *d = [0.0; 3];
                    d[i] = 1.0;
                }
                out[3] = [27.0 * l[1] * l[2], 27.0 * l[0] * l[2], 27.0 * l[0] * l[1]];
            }
        }
    }

    /// Physical gradients given the gradients of the barycentric coordinates.
    pub fn gradients(self, l: [f64; 3], grad_l: &[[f64; 2]; 3], out: &mut [[f64; 2]]) {
        let mut d = [[0.0; 3]; 6];
        self.bary_derivatives(l, &mut d);
        for (g, di) in out.iter_mut().zip(&d).take(self.num_local()) {
            *g = [0.0; 2];
            for k in 0..3 {
                g[0] += di[k] * grad_l[k][0];
                g[1] += di[k] * grad_l[k][1];
            }
        }
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ElementKind::P1 => "P1",
            ElementKind::P2 => "P2",
            ElementKind::P1Bubble => "P1bubble",
        })
    }
}

impl FromStr for ElementKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "p1" => Ok(ElementKind::P1),
            "p2" => Ok(ElementKind::P2),
            "p1bubble" | "p1b" => Ok(ElementKind::P1Bubble),
            other => Err(format!("unknown element kind '{other}'")),
        }
    }
}

/// Affine geometry of one triangle.
#[derive(Clone, Copy, Debug)]
pub struct TriangleGeometry {
    pub vertices: [[f64; 2]; 3],
    pub area: f64,
    /// Gradients of the barycentric coordinates.
    pub grad_l: [[f64; 2]; 3],
}

impl TriangleGeometry {
    pub fn new(vertices: [[f64; 2]; 3]) -> Self {
        let [p0, p1, p2] = vertices;
        let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
        let inv = 1.0 / det;
        // grad l_i is the inward normal of the opposite edge scaled by 1/det
        let grad_l = [
            [(p1[1] - p2[1]) * inv, (p2[0] - p1[0]) * inv],
            [(p2[1] - p0[1]) * inv, (p0[0] - p2[0]) * inv],
            [(p0[1] - p1[1]) * inv, (p1[0] - p0[0]) * inv],
        ];
        Self {
            vertices,
            area: 0.5 * det.abs(),
            grad_l,
        }
    }

    /// Maps reference coordinates `(s, t)` to barycentric `(1 - s - t, s, t)`.
    pub fn bary(xi: [f64; 2]) -> [f64; 3] {
        [1.0 - xi[0] - xi[1], xi[0], xi[1]]
    }

    pub fn point(&self, l: [f64; 3]) -> [f64; 2] {
        let v = &self.vertices;
        [
            l[0] * v[0][0] + l[1] * v[1][0] + l[2] * v[2][0],
            l[0] * v[0][1] + l[1] * v[1][1] + l[2] * v[2][1],
        ]
    }

    /// Physical coordinates of a local dof's nodal location.
    pub fn node(&self, loc: DofLocation) -> [f64; 2] {
        match loc {
            DofLocation::Vertex(i) => self.vertices[i],
            DofLocation::Edge(k) => {
                let (a, b) = (self.vertices[k], self.vertices[(k + 1) % 3]);
                [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
            }
            DofLocation::Cell => self.point([1.0 / 3.0; 3]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const KINDS: [ElementKind; 3] = [ElementKind::P1, ElementKind::P2, ElementKind::P1Bubble];

    fn sample_points() -> Vec<[f64; 3]> {
        vec![[0.2, 0.3, 0.5], [0.6, 0.1, 0.3], [1.0 / 3.0; 3], [0.05, 0.9, 0.05]]
    }

    #[test]
    fn partition_of_unity() {
        for kind in KINDS {
            let mut v = [0.0; 6];
            for l in sample_points() {
                kind.values(l, &mut v);
                // the bubble is excluded from the partition
                let n = if kind == ElementKind::P1Bubble { 3 } else { kind.num_local() };
                let s: f64 = v[..n].iter().sum();
                assert!((s - 1.0).abs() < 1e-15, "{kind}: {s}");
            }
        }
    }

    #[test]
    fn nodal_property() {
        let geo = TriangleGeometry::new([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        for kind in [ElementKind::P1, ElementKind::P2] {
            let mut v = [0.0; 6];
            for (i, &loc) in kind.locations().iter().enumerate() {
                let p = geo.node(loc);
                kind.values(TriangleGeometry::bary(p), &mut v);
                for (j, &vj) in v[..kind.num_local()].iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((vj - expect).abs() < 1e-15);
                }
            }
        }
        let mut v = [0.0; 4];
        ElementKind::P1Bubble.values([1.0 / 3.0; 3], &mut v);
        assert!((v[3] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let geo = TriangleGeometry::new([[0.1, 0.2], [0.9, 0.35], [0.3, 0.8]]);
        let h = 1e-6;
        for kind in KINDS {
            let n = kind.num_local();
            for l in sample_points() {
                let x = geo.point(l);
                let mut g = [[0.0; 2]; 6];
                kind.gradients(l, &geo.grad_l, &mut g);
                for d in 0..2 {
                    let mut xp = x;
                    let mut xm = x;
                    xp[d] += h;
                    xm[d] -= h;
                    let bary = |p: [f64; 2]| {
                        let [p0, p1, p2] = geo.vertices;
                        let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
                        let l1 = ((p[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p[1] - p0[1])) / det;
                        let l2 = ((p1[0] - p0[0]) * (p[1] - p0[1]) - (p[0] - p0[0]) * (p1[1] - p0[1])) / det;
                        [1.0 - l1 - l2, l1, l2]
                    };
                    let (mut vp, mut vm) = ([0.0; 6], [0.0; 6]);
                    kind.values(bary(xp), &mut vp);
                    kind.values(bary(xm), &mut vm);
                    for i in 0..n {
                        let fd = (vp[i] - vm[i]) / (2.0 * h);
                        let scale = g[i][d].abs().max(1.0);
                        assert!((fd - g[i][d]).abs() / scale < 1e-7, "{kind} basis {i} dir {d}");
                    }
                }
            }
        }
    }

    #[test]
    fn barycentric_gradients_sum_to_zero() {
        let geo = TriangleGeometry::new([[0.0, 0.0], [0.5, 0.0], [0.5, 0.5]]);
        for d in 0..2 {
            let s: f64 = geo.grad_l.iter().map(|g| g[d]).sum();
            assert!(s.abs() < 1e-15);
        }
        assert!((geo.area - 0.125).abs() < 1e-16);
    }

    #[test]
    fn parse_roundtrip() {
        for kind in KINDS {
            assert_eq!(kind.to_string().parse::<ElementKind>().unwrap(), kind);
        }
        assert!("P3".parse::<ElementKind>().is_err());
    }
}
