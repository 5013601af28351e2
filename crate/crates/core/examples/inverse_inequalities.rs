//! `h sqrt(lambda_max)` of the H1-versus-L2 pencils of both spaces.
//!
//! cargo run --release --example inverse_inequalities

use std::sync::Arc;

use lbb_lab::fem::{ElementPair, StokesSystem};
use lbb_lab::infsup::inverse_constants;
use lbb_lab::mesh::{build_structured_mesh, Pattern};

fn main() {
    for pattern in [Pattern::Diagonal, Pattern::Crisscross] {
        for pair in ElementPair::ALL {
            let mut row = format!("{pattern:<10} {:<12}", pair.to_string());
            for n in [4, 8, 16, 32] {
                let sys = StokesSystem::new(Arc::new(build_structured_mesh(n, pattern).unwrap()), pair).unwrap();
                let c = inverse_constants(&sys).unwrap();
                row += &format!("  {:7.4}/{:6.4}", c.velocity, c.pressure);
            }
            println!("{row}");
        }
    }
}
