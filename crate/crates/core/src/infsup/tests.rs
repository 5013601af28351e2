use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::fem::{l2_project_gradient, AnalyticField, ElementPair, StokesSystem};
use crate::linalg::dense_eig_oracle;
use crate::mesh::{build_structured_mesh, Pattern};

fn system(n: usize, pattern: Pattern, pair: ElementPair) -> StokesSystem {
    StokesSystem::new(Arc::new(build_structured_mesh(n, pattern).unwrap()), pair).unwrap()
}

/// `B G^{-1} B^T` by an explicit dense inverse.
fn dense_schur(g: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let gi = g.clone().try_inverse().unwrap();
    let s = b * gi * b.transpose();
    (&s + s.transpose()) * 0.5
}

/// Orthonormal basis of `{q : 1^T Mp q = 0}`.
fn mean_zero_basis(mp: &DMatrix<f64>) -> DMatrix<f64> {
    let n = mp.nrows();
    let w = mp * DVector::from_element(n, 1.0);
    let w = &w / w.norm();
    let proj = DMatrix::identity(n, n) - &w * w.transpose();
    let eig = nalgebra::SymmetricEigen::new(proj);
    let cols: Vec<_> = (0..n)
        .filter(|&i| eig.eigenvalues[i] > 0.5)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect();
    DMatrix::from_columns(&cols)
}

/// Smallest eigenvalue of `S q = lambda M q` on mean-zero pressures.
fn oracle_min(s: &DMatrix<f64>, m: &DMatrix<f64>, mp: &DMatrix<f64>) -> f64 {
    let q = mean_zero_basis(mp);
    let sq = q.transpose() * s * &q;
    let mq = q.transpose() * m * &q;
    dense_eig_oracle(&sq, &mq, &[]).unwrap()[0]
}

fn close(sparse: f64, oracle: f64, scale: f64) -> bool {
    (sparse - oracle).abs() <= 1e-8 * oracle.abs().max(1e-6 * scale)
}

#[test]
fn pencils_match_dense_oracle() {
    for pair in ElementPair::ALL {
        let sys = system(4, Pattern::Diagonal, pair);
        let (a, mv, mp, kp, b) = (
            sys.a.to_dense(),
            sys.mv.to_dense(),
            sys.mp.to_dense(),
            sys.kp.to_dense(),
            sys.b.to_dense(),
        );
        let scale = |s: &DMatrix<f64>, m: &DMatrix<f64>| s.trace() / m.trace();

        let s = dense_schur(&a, &b);
        let lbb = lbb_constant(&sys).unwrap();
        let o = oracle_min(&s, &mp, &mp);
        assert!(close(lbb.eigenvalue, o, scale(&s, &mp)), "{pair} lbb {} vs {o}", lbb.eigenvalue);

        let s = dense_schur(&mv, &b);
        let glbb = glbb_constant(&sys).unwrap();
        let o = oracle_min(&s, &kp, &mp);
        assert!(close(glbb.eigenvalue, o, scale(&s, &kp)), "{pair} glbb {} vs {o}", glbb.eigenvalue);

        let h = &mp + &kp;
        let s = dense_schur(&(&a + &mv), &b);
        let o = oracle_min(&s, &mp, &mp);
        assert!(close(lbb_full_h1(&sys).unwrap().eigenvalue, o, scale(&s, &mp)));

        // weighted pencil with N from the unsimplified formula
        let eps: f64 = 0.5;
        let e = &mp / (eps * eps);
        let n = &h - &h * (&h + &e).try_inverse().unwrap() * &h;
        let n = (&n + n.transpose()) * 0.5;
        let s = dense_schur(&(&mv * (1.0 + eps * eps) + &a * (eps * eps)), &b);
        let o = oracle_min(&s, &n, &mp);
        let w = weighted_constant(&sys, eps).unwrap();
        assert!(close(w.eigenvalue, o, scale(&s, &n)), "{pair} weighted {} vs {o}", w.eigenvalue);
    }
}

#[test]
fn stable_pairs_are_nonsingular_and_glbb_is_capped() {
    for pair in [ElementPair::TaylorHood, ElementPair::Mini] {
        for pattern in [Pattern::Diagonal, Pattern::Crisscross] {
            let sys = system(6, pattern, pair);
            let lbb = lbb_constant(&sys).unwrap();
            let glbb = glbb_constant(&sys).unwrap();
            assert!(!lbb.singular && !glbb.singular);
            assert!(glbb.value <= 1.0 && glbb.value > 0.3, "{pair} {pattern} {}", glbb.value);
            assert!(lbb.value > 0.2);
        }
    }
}

#[test]
fn equal_order_is_singular() {
    let sys = system(4, Pattern::Diagonal, ElementPair::EqualOrder);
    let lbb = lbb_constant(&sys).unwrap();
    assert!(lbb.singular && lbb.value == 0.0 && lbb.mode.is_empty());
    assert!(glbb_constant(&sys).unwrap().singular);
}

#[test]
fn glbb_mode_matches_projected_gradient() {
    let sys = system(4, Pattern::Diagonal, ElementPair::TaylorHood);
    let glbb = glbb_constant(&sys).unwrap();
    let q = &glbb.mode;
    let z = l2_project_gradient(&sys, q).unwrap();
    let zmz: f64 = z.iter().zip(sys.mv.mul_vec(&z)).map(|(a, b)| a * b).sum();
    let qkq: f64 = q.iter().zip(sys.kp.mul_vec(q)).map(|(a, b)| a * b).sum();
    assert!((zmz / qkq - glbb.eigenvalue).abs() <= 1e-8 * glbb.eigenvalue);
}

#[test]
fn weighted_pressure_gram_decreases_in_eps() {
    let sys = system(4, Pattern::Diagonal, ElementPair::Mini);
    let grid = [1e-3, 1e-2, 0.1, 1.0, 10.0];
    let grams: Vec<_> = grid.iter().map(|&e| weighted_pressure_gram(&sys, e).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let q = DVector::from_vec(random_pressure(&mut rng, sys.mh.dim_free));
        let vals: Vec<f64> = grams.iter().map(|n| q.dot(&(n * &q))).collect();
        for w in vals.windows(2) {
            assert!(w[0] >= w[1] * (1.0 - 1e-12), "{vals:?}");
        }
    }
}

#[test]
fn weighted_rejects_bad_eps() {
    let sys = system(2, Pattern::Diagonal, ElementPair::TaylorHood);
    for eps in [0.0, -1.0, f64::NAN, f64::INFINITY] {
        assert!(matches!(weighted_constant(&sys, eps), Err(InfSupError::InvalidEps(_))));
    }
}

#[test]
fn weighted_limits() {
    let sys = system(4, Pattern::Diagonal, ElementPair::TaylorHood);
    let big = weighted_constant(&sys, 1e3).unwrap().value / lbb_full_h1(&sys).unwrap().value;
    let small = weighted_constant(&sys, 1e-6).unwrap().value / glbb_full_h1(&sys).unwrap().value;
    assert!((big - 1.0).abs() < 0.05, "{big}");
    assert!((small - 1.0).abs() < 0.05, "{small}");
}

#[test]
fn inverse_constants_dominate_h_and_match_oracle() {
    let sys = system(4, Pattern::Diagonal, ElementPair::TaylorHood);
    let c = inverse_constants(&sys).unwrap();
    assert!(c.velocity >= sys.h() && c.pressure >= sys.h());
    let mp = sys.mp.to_dense();
    let all = dense_eig_oracle(&(&mp + sys.kp.to_dense()), &mp, &[]).unwrap();
    let expect = sys.h() * all.last().unwrap().sqrt();
    assert!((c.pressure - expect).abs() <= 1e-8 * expect);
}

#[test]
fn fortin_reproduces_discrete_fields() {
    let sys = system(4, Pattern::Crisscross, ElementPair::TaylorHood);
    let w = AnalyticField::w_star();
    let uh = sys.xh.interpolate(|p| w.value(p));
    let lifted = AnalyticField::from_fe(&sys.xh, &uh, "u_h");
    for variant in FortinVariant::ALL {
        let proj = FortinProjector::new(&sys, variant).unwrap();
        let r = proj.apply(&lifted).unwrap();
        let err = r.z.iter().zip(&uh).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err <= 1e-10, "{variant} {err}");
        assert!(r.p.iter().all(|v| v.abs() <= 1e-10));
        let zero = proj.apply(&AnalyticField::zero()).unwrap();
        assert!(zero.z.iter().chain(&zero.p).all(|v| *v == 0.0));
    }
}

#[test]
fn fortin_contract_and_gradient_bound() {
    let sys = system(8, Pattern::Diagonal, ElementPair::TaylorHood);
    let glbb = glbb_constant(&sys).unwrap().value;
    for field in [AnalyticField::v_star(), AnalyticField::w_star()] {
        for variant in FortinVariant::ALL {
            let proj = FortinProjector::new(&sys, variant).unwrap();
            let r = proj.apply(&field).unwrap();
            let d = fortin_diagnostics(&proj, &field, &r).unwrap();
            assert!(d.orthogonality_residual <= 1e-10, "{variant} {d:?}");
            assert!(d.idempotence_gap <= 1e-9, "{variant} {d:?}");
            if variant == FortinVariant::L2 {
                let kp: f64 = r.p.iter().zip(sys.kp.mul_vec(&r.p)).map(|(a, b)| a * b).sum();
                assert!(kp.sqrt() <= d.l2_error / glbb * 1.05);
            }
        }
    }
    let pairing: f64 = sys.b.mul_vec(&fortin_l2(&sys, &AnalyticField::v_star()).unwrap().z).iter().sum();
    assert!(pairing.abs() <= 1e-10);
}

#[test]
fn fortin_on_equal_order_reports_hypothesis() {
    let sys = system(4, Pattern::Diagonal, ElementPair::EqualOrder);
    let err = fortin_l2(&sys, &AnalyticField::w_star()).unwrap_err();
    assert_eq!(err.to_string(), "GLBB hypothesis violated at this level");
    assert!(matches!(fortin_h1(&sys, &AnalyticField::w_star()), Err(InfSupError::HypothesisViolated("LBB"))));
}

#[test]
fn verfurth_identities() {
    let sys = system(4, Pattern::Diagonal, ElementPair::TaylorHood);
    let lbb = lbb_constant(&sys).unwrap();
    let t = verfurth_gap(&sys, &lbb.mode).unwrap();
    assert!((t.sup_term - lbb.value * t.l2_norm).abs() <= 1e-8 * t.sup_term);
    let t = verfurth_gap(&sys, &vec![3.0; sys.mh.dim_free]).unwrap();
    assert_eq!((t.l2_norm, t.sup_term, t.grad_term, t.ratio()), (0.0, 0.0, 0.0, 0.0));
    let c = c_fit(&sys, 20, 42).unwrap();
    assert_eq!(c, c_fit(&sys, 20, 42).unwrap());
    assert!(c >= lbb.value * (1.0 - 1e-10));
}
