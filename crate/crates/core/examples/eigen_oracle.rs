//! The sparse shift-invert eigensolver against a dense reduction on a small
//! pencil, including a clustered one.
//!
//! cargo run --release --example eigen_oracle

use std::sync::Arc;

use lbb_lab::fem::{ElementPair, StokesSystem};
use lbb_lab::infsup::kp_with_mean;
use lbb_lab::linalg::{dense_eig_oracle, smallest_eigs, LinearOperator};
use lbb_lab::mesh::{build_structured_mesh, Pattern};

fn main() {
    for pair in [ElementPair::TaylorHood, ElementPair::Mini] {
        let sys = StokesSystem::new(Arc::new(build_structured_mesh(4, Pattern::Diagonal).unwrap()), pair).unwrap();
        let s = sys.schur_mass().unwrap();
        let m = kp_with_mean(&sys);
        let deflate = [sys.ones_p.clone()];

        let sparse = smallest_eigs(&*s, &m, &deflate, 8, 1e-10).unwrap();
        let dense = dense_eig_oracle(&s.to_dense(), &m, &deflate).unwrap();
        println!("{pair}: GLBB pencil, {} iterations", sparse.iterations);
        for (i, (a, b)) in sparse.eigenvalues.iter().zip(&dense).enumerate() {
            println!("  {i}  {a:.14}  {b:.14}  res {:.1e}", sparse.residual_norms[i]);
        }
    }
}
