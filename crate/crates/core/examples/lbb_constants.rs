//! LBB and GLBB constants under refinement for the three element pairs.
//!
//! Taylor-Hood and mini stay bounded away from zero; equal order P1-P1 has a
//! nontrivial pressure kernel at every level.
//!
//! cargo run --release --example lbb_constants [diagonal|crisscross]

use std::sync::Arc;

use lbb_lab::fem::{ElementPair, StokesSystem};
use lbb_lab::infsup::{glbb_constant, lbb_constant};
use lbb_lab::mesh::{build_structured_mesh, Pattern};

fn main() {
    let pattern: Pattern = std::env::args().nth(1).map(|s| s.parse().unwrap()).unwrap_or(Pattern::Diagonal);
    println!("{pattern} meshes");
    println!("element        n    dim_v  dim_p  beta_lbb     c_glbb       residuals");
    for pair in ElementPair::ALL {
        for n in [4, 8, 16] {
            let mesh = Arc::new(build_structured_mesh(n, pattern).unwrap());
            let sys = StokesSystem::new(mesh, pair).unwrap();
            let lbb = lbb_constant(&sys).unwrap();
            let glbb = glbb_constant(&sys).unwrap();
            let flag = if lbb.singular || glbb.singular { "  singular" } else { "" };
            println!(
                "{:<12} {n:>3} {:>8} {:>6}  {:.8}  {:.8}  {:.1e} {:.1e}{flag}",
                pair.to_string(),
                sys.xh.dim_free,
                sys.mh.dim_free,
                lbb.value,
                glbb.value,
                lbb.residual,
                glbb.residual
            );
        }
    }
}
