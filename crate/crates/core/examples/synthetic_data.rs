//! The two synthetic generators.
//!
//! cargo run --example synthetic_data

use isokernel::datasets::{gen_gaussians, gen_w_gaussians};

fn main() -> isokernel::Result<()> {
    let g = gen_gaussians(3, 4, 10.0, 1)?;
    println!("{}: {} points in {} dims", g.name, g.len(), g.dim);
    for (p, l) in g.points.iter().zip(g.labels.as_ref().unwrap()) {
        println!("  label {l}: {:?}", p.to_dense_vec().iter().map(|v| (v * 100.0).round() / 100.0).collect::<Vec<_>>());
    }
    let w = gen_w_gaussians(5, 3, 1.0, 2.0, 1)?;
    println!("{}: {} points in {} dims", w.name, w.len(), w.dim);
    for p in &w.points {
        println!("  nonzero coordinates: {:?}", p.iter_nonzero().map(|(j, _)| j).collect::<Vec<_>>());
    }
    Ok(())
}
