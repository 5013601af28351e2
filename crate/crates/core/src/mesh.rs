//! Structured triangulations of the unit square.
//!
//! Two patterns are supported:
//! - `Diagonal`: every grid square is split along its bottom-left to top-right diagonal.
//! - `Crisscross`: every grid square gets a center vertex and is split into four triangles.
//!
//! Triangles are stored counterclockwise. Local edge `k` of a triangle joins local
//! vertices `k` and `(k + 1) % 3`.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use thiserror::Error;

/// Smallest number of subdivisions per side accepted by the builders.
pub const MIN_SUBDIVISIONS: usize = 2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("n below minimum: got {got}, need at least {min}")]
    TooFewSubdivisions { got: usize, min: usize },
    #[error("triangle {0} has non-positive signed area")]
    Orientation(usize),
    #[error("edge ({0}, {1}) shared by {2} triangles")]
    Conformity(usize, usize, usize),
    #[error("Euler relation violated: V - E + T = {0}")]
    Euler(i64),
    #[error("vertex {0} lies outside the unit square")]
    OutOfDomain(usize),
    #[error("unknown mesh pattern '{0}'")]
    UnknownPattern(String),
    #[error("grading exponent must be positive, got {0}")]
    BadGrading(f64),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pattern {
    #[default]
    Diagonal,
    Crisscross,
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Diagonal => write!(f, "diagonal"),
            Pattern::Crisscross => write!(f, "crisscross"),
        }
    }
}

impl FromStr for Pattern {
    type Err = MeshError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "diagonal" => Ok(Pattern::Diagonal),
            "crisscross" => Ok(Pattern::Crisscross),
            other => Err(MeshError::UnknownPattern(other.to_string())),
        }
    }
}

/// A mesh edge with its endpoints (smaller index first).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub boundary: bool,
}

/// Conforming triangulation of the unit square.
#[derive(Clone, Debug)]
pub struct Mesh {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_vertex_mask: Vec<bool>,
    pub edges: Vec<Edge>,
    /// `triangle_edges[t][k]` is the edge joining local vertices `k` and `k + 1`.
    pub triangle_edges: Vec<[usize; 3]>,
    pub pattern: Pattern,
    pub level: usize,
}

/// Mesh-regularity quantities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshMetrics {
    pub h_max: f64,
    pub h_min: f64,
    pub quasi_uniformity: f64,
    pub shape_regularity: f64,
}

/// Builds an `n x n` structured mesh of the unit square.
pub fn build_structured_mesh(n: usize, pattern: Pattern) -> Result<Mesh, MeshError> {
    if n < MIN_SUBDIVISIONS {
        return Err(MeshError::TooFewSubdivisions {
            got: n,
            min: MIN_SUBDIVISIONS,
        });
    }
    let stride = n + 1;
    let mut vertices = Vec::with_capacity(stride * stride + n * n);
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([i as f64 / n as f64, j as f64 / n as f64]);
        }
    }
    let grid = |i: usize, j: usize| j * stride + i;
    let mut triangles = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let v00 = grid(i, j);
            let v10 = grid(i + 1, j);
            let v11 = grid(i + 1, j + 1);
            let v01 = grid(i, j + 1);
            match pattern {
                Pattern::Diagonal => {
                    triangles.push([v00, v10, v11]);
                    triangles.push([v00, v11, v01]);
                }
                Pattern::Crisscross => {
                    let c = vertices.len();
                    vertices.push([(i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64]);
                    triangles.push([v00, v10, c]);
                    triangles.push([v10, v11, c]);
                    triangles.push([v11, v01, c]);
                    triangles.push([v01, v00, c]);
                }
            }
        }
    }
    Ok(Mesh::from_parts(vertices, triangles, pattern, 0))
}

/// Structured mesh with coordinates pushed towards the origin by `t -> t^exponent`.
///
/// Exploratory only: the result is not quasi-uniform for `exponent != 1`.
pub fn build_graded_mesh(n: usize, pattern: Pattern, exponent: f64) -> Result<Mesh, MeshError> {
    if !(exponent > 0.0) {
        return Err(MeshError::BadGrading(exponent));
    }
    let mut mesh = build_structured_mesh(n, pattern)?;
    for v in &mut mesh.vertices {
        v[0] = v[0].powf(exponent);
        v[1] = v[1].powf(exponent);
    }
    Ok(mesh)
}

/// Splits every triangle into four congruent children through its edge midpoints.
pub fn refine_uniform(mesh: &Mesh) -> Mesh {
    let nv = mesh.vertices.len();
    let mut vertices = mesh.vertices.clone();
    for e in &mesh.edges {
        let [a, b] = e.vertices;
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        vertices.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
    }
    let mut triangles = Vec::with_capacity(4 * mesh.triangles.len());
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let [a, b, c] = *tri;
        let [e0, e1, e2] = mesh.triangle_edges[t];
        let (mab, mbc, mca) = (nv + e0, nv + e1, nv + e2);
        triangles.push([a, mab, mca]);
        triangles.push([mab, b, mbc]);
        triangles.push([mca, mbc, c]);
        triangles.push([mab, mbc, mca]);
    }
    Mesh::from_parts(vertices, triangles, mesh.pattern, mesh.level + 1)
}

/// Exact diameters and inradii of every triangle.
pub fn mesh_metrics(mesh: &Mesh) -> MeshMetrics {
    let mut h_max = 0.0f64;
    let mut h_min = f64::INFINITY;
    let mut shape = 0.0f64;
    for t in 0..mesh.triangles.len() {
        let [p0, p1, p2] = mesh.triangle_coords(t);
        let l = [dist(p0, p1), dist(p1, p2), dist(p2, p0)];
        let diam = l[0].max(l[1]).max(l[2]);
        let inradius = 2.0 * mesh.triangle_area(t) / (l[0] + l[1] + l[2]);
        h_max = h_max.max(diam);
        h_min = h_min.min(diam);
        shape = shape.max(diam / inradius);
    }
    MeshMetrics {
        h_max,
        h_min,
        quasi_uniformity: h_max / h_min,
        shape_regularity: shape,
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

impl Mesh {
    fn from_parts(
        vertices: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        pattern: Pattern,
        level: usize,
    ) -> Mesh {
        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for tri in &triangles {
            let mut te = [0usize; 3];
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let idx = *lookup.entry(key).or_insert_with(|| {
                    edges.push(Edge {
                        vertices: [key.0, key.1],
                        boundary: false,
                    });
                    counts.push(0);
                    edges.len() - 1
                });
                counts[idx] += 1;
                te[k] = idx;
            }
            triangle_edges.push(te);
        }
        let mut boundary_vertex_mask = vec![false; vertices.len()];
        for (e, &c) in edges.iter_mut().zip(&counts) {
            e.boundary = c == 1;
            if e.boundary {
                boundary_vertex_mask[e.vertices[0]] = true;
                boundary_vertex_mask[e.vertices[1]] = true;
            }
        }
        Mesh {
            vertices,
            triangles,
            boundary_vertex_mask,
            edges,
            triangle_edges,
            pattern,
            level,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn triangle_coords(&self, t: usize) -> [[f64; 2]; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Signed area (positive for counterclockwise triangles).
    pub fn signed_area(&self, t: usize) -> f64 {
        let [p0, p1, p2] = self.triangle_coords(t);
        0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]))
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        self.signed_area(t).abs()
    }

    /// Re-checks orientation, conformity, the Euler relation and the domain bounds.
    pub fn validate(&self) -> Result<(), MeshError> {
        for t in 0..self.triangles.len() {
            if !(self.signed_area(t) > 0.0) {
                return Err(MeshError::Orientation(t));
            }
        }
        let mut counts = vec![0usize; self.edges.len()];
        for te in &self.triangle_edges {
            for &e in te {
                counts[e] += 1;
            }
        }
        for (e, &c) in self.edges.iter().zip(&counts) {
            let expected = if e.boundary { 1 } else { 2 };
            if c != expected {
                return Err(MeshError::Conformity(e.vertices[0], e.vertices[1], c));
            }
        }
        let euler = self.vertices.len() as i64 - self.edges.len() as i64 + self.triangles.len() as i64;
        if euler != 1 {
            return Err(MeshError::Euler(euler));
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if !(0.0..=1.0).contains(&v[0]) || !(0.0..=1.0).contains(&v[1]) {
                return Err(MeshError::OutOfDomain(i));
            }
        }
        Ok(())
    }

    /// Plain-text dump: `V T E` header, `x y boundary_flag` per vertex, `i j k` per triangle.
    pub fn write_dump<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(
            out,
            "{} {} {}",
            self.vertices.len(),
            self.triangles.len(),
            self.edges.len()
        )?;
        for (v, &b) in self.vertices.iter().zip(&self.boundary_vertex_mask) {
            writeln!(out, "{} {} {}", v[0], v[1], u8::from(b))?;
        }
        for t in &self.triangles {
            writeln!(out, "{} {} {}", t[0], t[1], t[2])?;
        }
        Ok(())
    }

    /// Index of a triangle containing `p` (closed), found by a linear scan.
    pub fn locate(&self, p: [f64; 2]) -> Option<(usize, [f64; 3])> {
        const SLACK: f64 = 1e-12;
        (0..self.triangles.len()).find_map(|t| {
            let bary = self.barycentric(t, p);
            bary.iter().all(|&l| l >= -SLACK).then_some((t, bary))
        })
    }

    pub fn barycentric(&self, t: usize, p: [f64; 2]) -> [f64; 3] {
        let [p0, p1, p2] = self.triangle_coords(t);
        let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
        let l1 = ((p[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p[1] - p0[1])) / det;
        let l2 = ((p1[0] - p0[0]) * (p[1] - p0[1]) - (p[0] - p0[0]) * (p1[1] - p0[1])) / det;
        [1.0 - l1 - l2, l1, l2]
    }
}
