use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lbb_lab::fem::quadrature::collapsed_gauss;
use lbb_lab::fem::{AnalyticField, ElementPair, StokesSystem};
use lbb_lab::infsup::{glbb_constant, lbb_constant, weighted_constant};
use lbb_lab::linalg::{dense_eig_oracle, smallest_eigs, CsrMatrix};
use lbb_lab::mesh::{build_structured_mesh, Pattern};

fn system(n: usize, pattern: Pattern, pair: ElementPair) -> StokesSystem {
    StokesSystem::new(Arc::new(build_structured_mesh(n, pattern).unwrap()), pair).unwrap()
}

/// Gradient of the hat function of local vertex `k`, from the coordinates.
fn hat_gradient(c: [[f64; 2]; 3], k: usize) -> [f64; 2] {
    let (a, b) = (c[(k + 1) % 3], c[(k + 2) % 3]);
    let det = (c[1][0] - c[0][0]) * (c[2][1] - c[0][1]) - (c[2][0] - c[0][0]) * (c[1][1] - c[0][1]);
    [(a[1] - b[1]) / det, (b[0] - a[0]) / det]
}

#[test]
fn divergence_rows_match_independent_quadrature() {
    for pair in [ElementPair::TaylorHood, ElementPair::Mini] {
        let sys = system(4, Pattern::Crisscross, pair);
        let v = |p: [f64; 2]| [p[0] * (1.0 - p[0]) * p[1] * (1.0 - p[1]), 0.0];
        let vh = sys.xh.interpolate(v);
        let bv = sys.b.mul_vec(&vh);
        let lifted = AnalyticField::from_fe(&sys.xh, &vh, "v_h");

        // row of q = 1
        assert!(bv.iter().sum::<f64>().abs() <= 1e-12);

        // row of a hat function: -int v_h . grad psi, by a 10x10 collapsed rule
        let rule = collapsed_gauss(10);
        let mesh = &sys.mesh;
        for i in [6usize, 12, 20] {
            let mut expect = 0.0;
            for t in 0..mesh.num_triangles() {
                let Some(k) = mesh.triangles[t].iter().position(|&x| x == i) else {
                    continue;
                };
                let c = mesh.triangle_coords(t);
                let g = hat_gradient(c, k);
                let area = mesh.triangle_area(t);
                for (p, w) in rule.points.iter().zip(&rule.weights) {
                    let x = [
                        c[0][0] + p[0] * (c[1][0] - c[0][0]) + p[1] * (c[2][0] - c[0][0]),
                        c[0][1] + p[0] * (c[1][1] - c[0][1]) + p[1] * (c[2][1] - c[0][1]),
                    ];
                    let val = lifted.value(x);
                    expect -= 2.0 * w * area * (val[0] * g[0] + val[1] * g[1]);
                }
            }
            assert!((bv[i] - expect).abs() <= 1e-10, "{pair} row {i}: {} vs {expect}", bv[i]);
        }
    }
}

#[test]
fn discrete_velocities_vanish_on_the_boundary() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for pair in ElementPair::ALL {
        let sys = system(3, Pattern::Diagonal, pair);
        let u: Vec<f64> = (0..sys.xh.dim_free).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = AnalyticField::from_fe(&sys.xh, &u, "u");
        for s in 0..=40 {
            let t = s as f64 / 40.0;
            for p in [[t, 0.0], [t, 1.0], [0.0, t], [1.0, t]] {
                let v = f.value(p);
                assert!(v[0].abs() <= 1e-14 && v[1].abs() <= 1e-14, "{pair} {p:?} {v:?}");
            }
        }
    }
}

#[test]
fn eigenvalues_survive_diagonal_rescaling() {
    let sys = system(4, Pattern::Diagonal, ElementPair::Mini);
    let s = sys.schur_stiffness().unwrap().matrix().clone();
    let m = sys.mp.to_dense();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let d = DVector::from_fn(s.nrows(), |_, _| rng.gen_range(0.1..10.0));
    let dm = DMatrix::from_diagonal(&d);
    let (s2, m2) = (&dm * &s * &dm, &dm * &m * &dm);
    // D^-1 1 spans the rescaled kernel
    let defl: Vec<f64> = d.iter().map(|x| 1.0 / x).collect();
    let a = smallest_eigs(&s, &CsrMatrix::from_dense(&m), &[sys.ones_p.clone()], 3, 1e-9).unwrap();
    let b = smallest_eigs(&s2, &CsrMatrix::from_dense(&m2), &[defl.clone()], 3, 1e-9).unwrap();
    let o = dense_eig_oracle(&s2, &m2, &[defl]).unwrap();
    for i in 0..3 {
        assert!((a.eigenvalues[i] - b.eigenvalues[i]).abs() <= 1e-8 * a.eigenvalues[i]);
        assert!((o[i] - b.eigenvalues[i]).abs() <= 1e-8 * o[i]);
    }
}

#[test]
fn constants_respect_their_caps() {
    for pattern in [Pattern::Diagonal, Pattern::Crisscross] {
        for pair in [ElementPair::TaylorHood, ElementPair::Mini] {
            let sys = system(5, pattern, pair);
            let beta = lbb_constant(&sys).unwrap().value;
            assert!(beta > 0.0 && beta <= 2f64.sqrt());
            let c = glbb_constant(&sys).unwrap().value;
            assert!(c > 0.0 && c <= 1.0);
            for eps in [1e-3, 1e-1, 1.0, 10.0] {
                let w = weighted_constant(&sys, eps).unwrap().value;
                assert!(w > 0.0 && w <= 2f64.sqrt(), "{pair} {pattern} {eps} {w}");
            }
        }
    }
}
