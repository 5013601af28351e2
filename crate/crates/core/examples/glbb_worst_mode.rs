//! The pressure attaining the GLBB constant, and what the L2 projection does to
//! its gradient.
//!
//! For the minimizing `q` the projected gradient `z = pi_h grad q` satisfies
//! `|z|^2 = c^2 |grad q|^2`; everything else about `grad q` is lost to the
//! velocity space.
//!
//! cargo run --release --example glbb_worst_mode

use std::sync::Arc;

use lbb_lab::fem::{l2_project_gradient, ElementPair, StokesSystem};
use lbb_lab::infsup::glbb_constant;
use lbb_lab::mesh::{build_structured_mesh, Pattern};

fn quad(m: &lbb_lab::linalg::CsrMatrix, x: &[f64]) -> f64 {
    x.iter().zip(m.mul_vec(x)).map(|(a, b)| a * b).sum()
}

fn main() {
    for pair in [ElementPair::TaylorHood, ElementPair::Mini] {
        let sys = StokesSystem::new(Arc::new(build_structured_mesh(8, Pattern::Diagonal).unwrap()), pair).unwrap();
        let c = glbb_constant(&sys).unwrap();
        let z = l2_project_gradient(&sys, &c.mode).unwrap();
        let ratio = (quad(&sys.mv, &z) / quad(&sys.kp, &c.mode)).sqrt();
        println!("{pair}: c_glbb {:.10}, |pi_h grad q| / |grad q| {ratio:.10}", c.value);

        // nodal values of the mode on the middle row of vertices
        let mid: Vec<String> = (0..sys.mh.dim_free)
            .filter(|&i| (sys.mesh.vertices[i][1] - 0.5).abs() < 1e-12)
            .map(|i| format!("{:+.3}", c.mode[i]))
            .collect();
        println!("  q(x, 1/2): {}", mid.join(" "));
    }
}
