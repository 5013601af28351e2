//! Weighted inf-sup constant over eps, with the two limiting regimes.
//!
//! Small eps measures velocities in L2 and pressures in H1 (the GLBB side);
//! large eps measures velocities in H1 and pressures in L2 (the LBB side).
//!
//! cargo run --release --example weighted_sweep

use std::sync::Arc;

use lbb_lab::fem::{ElementPair, StokesSystem};
use lbb_lab::infsup::{glbb_full_h1, lbb_full_h1, weighted_constant};
use lbb_lab::mesh::{build_structured_mesh, Pattern};

fn main() {
    let eps_grid = [1e-6, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e3];
    for pair in [ElementPair::TaylorHood, ElementPair::Mini] {
        println!("{pair}");
        print!("   n ");
        for eps in eps_grid {
            print!(" {eps:>8.0e}");
        }
        println!("   glbb_h1  lbb_h1");
        for n in [4, 8, 16] {
            let sys = StokesSystem::new(Arc::new(build_structured_mesh(n, Pattern::Diagonal).unwrap()), pair).unwrap();
            print!("{n:>4} ");
            for eps in eps_grid {
                print!(" {:>8.5}", weighted_constant(&sys, eps).unwrap().value);
            }
            println!(
                "   {:.5}  {:.5}",
                glbb_full_h1(&sys).unwrap().value,
                lbb_full_h1(&sys).unwrap().value
            );
        }
    }
}
