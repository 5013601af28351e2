//! Structured meshes of the unit square and their regularity under refinement.
//!
//! cargo run --example mesh_refinement

use lbb_lab::mesh::{build_graded_mesh, build_structured_mesh, mesh_metrics, refine_uniform, Pattern};

fn main() {
    println!("pattern     n   vertices triangles  h_max      quasi_unif shape_reg");
    for pattern in [Pattern::Diagonal, Pattern::Crisscross] {
        for n in [4, 8, 16, 32] {
            let mesh = build_structured_mesh(n, pattern).unwrap();
            mesh.validate().unwrap();
            let m = mesh_metrics(&mesh);
            println!(
                "{:<10} {n:>3} {:>9} {:>9}  {:.6}  {:.4}     {:.4}",
                pattern.to_string(),
                mesh.num_vertices(),
                mesh.num_triangles(),
                m.h_max,
                m.quasi_uniformity,
                m.shape_regularity
            );
        }
    }

    // red refinement keeps the shapes, halves h
    let coarse = build_structured_mesh(4, Pattern::Crisscross).unwrap();
    let fine = refine_uniform(&coarse);
    let (a, b) = (mesh_metrics(&coarse), mesh_metrics(&fine));
    println!("\nrefine_uniform: h {:.4} -> {:.4}, shape {:.4} -> {:.4}", a.h_max, b.h_max, a.shape_regularity, b.shape_regularity);

    // graded meshes are exploratory, they lose quasi-uniformity
    let graded = build_graded_mesh(8, Pattern::Diagonal, 2.0).unwrap();
    println!("graded (t^2): quasi_uniformity {:.2}", mesh_metrics(&graded).quasi_uniformity);

    let mut dump = Vec::new();
    build_structured_mesh(2, Pattern::Diagonal).unwrap().write_dump(&mut dump).unwrap();
    println!("\n{}", String::from_utf8(dump).unwrap());
}
