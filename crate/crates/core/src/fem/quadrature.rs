//! Quadrature on the reference triangle `{(x, y): x, y >= 0, x + y <= 1}`.
//!
//! Weights sum to the reference area 1/2.

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ([f64; 2], f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    /// Builds a symmetric rule from barycentric orbits `(weight, a, b)`
    /// where the orbit of `(a, b, 1-a-b)` is expanded under permutation.
    fn from_orbits(degree: usize, centroid: Option<f64>, s21: &[(f64, f64, f64)], s111: &[(f64, f64, f64, f64)]) -> Self {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        if let Some(w) = centroid {
            points.push([1.0 / 3.0, 1.0 / 3.0]);
            weights.push(0.5 * w);
        }
        for &(w, a, b) in s21 {
            // barycentric (a, b, b) and permutations; point = (l1, l2)
            for bary in [[a, b, b], [b, a, b], [b, b, a]] {
                points.push([bary[1], bary[2]]);
                weights.push(0.5 * w);
            }
        }
        for &(w, a, b, c) in s111 {
            for bary in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                points.push([bary[1], bary[2]]);
                weights.push(0.5 * w);
            }
        }
        Self { points, weights, degree }
    }
}

/// 12-point symmetric rule exact to degree 6 (Dunavant).
pub fn triangle_degree6() -> QuadratureRule {
    QuadratureRule::from_orbits(
        6,
        None,
        &[
            (0.116786275726379, 0.501426509658179, 0.249286745170910),
            (0.050844906370207, 0.873821971016996, 0.063089014491502),
        ],
        &[(0.082851075618374, 0.053145049844817, 0.310352451033784, 0.636502499121399)],
    )
}

/// 16-point symmetric rule exact to degree 8 (Dunavant).
pub fn triangle_degree8() -> QuadratureRule {
    QuadratureRule::from_orbits(
        8,
        Some(0.144315607677787),
        &[
            (0.095091634267285, 0.081414823414554, 0.459292588292723),
            (0.103217370534718, 0.658861384496480, 0.170569307751760),
            (0.032458497623198, 0.898905543365938, 0.050547228317031),
        ],
        &[(0.027230314174435, 0.008394777409958, 0.263112829634638, 0.728492392955404)],
    )
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Collapsed (Duffy) tensor Gauss rule; exact to degree `2 n - 2`.
pub fn collapsed_gauss(n: usize) -> QuadratureRule {
    let (x, w) = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (&u, &wu) in x.iter().zip(&w) {
        for (&v, &wv) in x.iter().zip(&w) {
            points.push([u, v * (1.0 - u)]);
            weights.push(wu * wv * (1.0 - u));
        }
    }
    QuadratureRule {
        points,
        weights,
        degree: 2 * n - 2,
    }
}
