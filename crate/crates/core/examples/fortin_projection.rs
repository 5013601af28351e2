//! L2 and H1 Fortin projections of the smooth test fields.
//!
//! cargo run --release --example fortin_projection

use std::sync::Arc;

use lbb_lab::fem::{AnalyticField, ElementPair, StokesSystem};
use lbb_lab::infsup::{fortin_diagnostics, FortinProjector, FortinVariant};
use lbb_lab::mesh::{build_structured_mesh, Pattern};

fn main() {
    let fields = [AnalyticField::v_star(), AnalyticField::w_star()];
    for pair in [ElementPair::TaylorHood, ElementPair::Mini, ElementPair::EqualOrder] {
        println!("{pair}");
        for n in [4, 8, 16] {
            let sys = StokesSystem::new(Arc::new(build_structured_mesh(n, Pattern::Diagonal).unwrap()), pair).unwrap();
            for variant in FortinVariant::ALL {
                let projector = match FortinProjector::new(&sys, variant) {
                    Ok(p) => p,
                    Err(e) => {
                        println!("  n={n:<3} {variant}: {e}");
                        continue;
                    }
                };
                for field in &fields {
                    let r = projector.apply(field).unwrap();
                    let d = fortin_diagnostics(&projector, field, &r).unwrap();
                    println!(
                        "  n={n:<3} {variant} {:<7} |v-Fv| {:.3e}  FL2 {:.3e}  FH1 {:.5}  orth {:.1e}  idem {:.1e}",
                        field.name, d.l2_error, d.fl2_ratio, d.fh1_ratio, d.orthogonality_residual, d.idempotence_gap
                    );
                }
            }
        }
    }
}
