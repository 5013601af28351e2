//! Both sides of `c |q| <= sup_v (div v, q) / |grad v| + h |grad q|` for random
//! pressures, and the fitted constant per level.
//!
//! cargo run --release --example local_gradient_fit [seed]

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lbb_lab::fem::{ElementPair, StokesSystem};
use lbb_lab::infsup::{c_fit, lbb_constant, random_pressure, verfurth_gap};
use lbb_lab::mesh::{build_structured_mesh, Pattern};

fn main() {
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse().unwrap()).unwrap_or(42);
    for pair in ElementPair::ALL {
        println!("{pair}");
        for n in [4, 8, 16] {
            let sys = StokesSystem::new(Arc::new(build_structured_mesh(n, Pattern::Diagonal).unwrap()), pair).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = verfurth_gap(&sys, &random_pressure(&mut rng, sys.mh.dim_free)).unwrap();
            // the LBB mode makes the sup term as small as it gets
            let lbb = lbb_constant(&sys).unwrap();
            let worst = if lbb.singular {
                "singular".to_string()
            } else {
                format!("{:.4}", verfurth_gap(&sys, &lbb.mode).unwrap().ratio())
            };
            println!(
                "  n={n:<3} one probe: |q| {:.4e} sup {:.4e} h|grad q| {:.4e}   c_fit(200) {:.4}   ratio at LBB mode {worst}",
                t.l2_norm,
                t.sup_term,
                t.grad_term,
                c_fit(&sys, 200, seed).unwrap()
            );
        }
    }
}
