//! Fit an Isolation Kernel, encode points and compare them.
//!
//! cargo run --example fit_encode

use isokernel::kernel::{feature_space_distance, ik_distance, io, similarity};
use isokernel::{FeatureVector, IkModel};

fn main() -> isokernel::Result<()> {
    let data: Vec<FeatureVector> = (0..200)
        .map(|i| {
            let x = i as f64 / 20.0;
            FeatureVector::dense(vec![x.cos() * x, x.sin() * x])
        })
        .collect::<isokernel::Result<_>>()?;
    let model = IkModel::fit(&data, 16, 200, 7)?;
    let codes = model.encode_all(&data)?;

    for (i, j) in [(0, 1), (0, 10), (0, 199), (100, 101)] {
        println!(
            "points {i:>3} {j:>3}: similarity {:.3}  ik_distance {:.3}  feature distance {:.3}",
            similarity(&codes[i], &codes[j])?,
            ik_distance(&codes[i], &codes[j])?,
            feature_space_distance(&codes[i], &codes[j])?
        );
    }

    let mut text = Vec::new();
    io::write_model(&model, &mut text)?;
    let back = io::read_model(&text[..])?;
    println!("model survives a text round trip: {}", back == model);
    Ok(())
}
