//! IK Gram matrix and the explicit feature map that reproduces it.
//!
//! cargo run --example gram_export

use isokernel::kernel::{feature_row, gram};
use isokernel::{FeatureVector, IkModel};

fn main() -> isokernel::Result<()> {
    let data: Vec<FeatureVector> = [[0.0, 0.0], [0.1, 0.0], [3.0, 3.0], [3.2, 2.9], [8.0, 0.0]]
        .iter()
        .map(|p| FeatureVector::dense(p.to_vec()))
        .collect::<isokernel::Result<_>>()?;
    let model = IkModel::fit(&data, 2, 100, 3)?;
    for row in gram(&model, &data)? {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.2}")).collect();
        println!("{}", cells.join(" "));
    }

    let code = model.encode(&data[0])?;
    let row = feature_row(&code);
    let norm: f64 = row.iter().map(|(_, v)| v * v).sum();
    println!("feature row: {} nonzeros of {} columns, squared norm {norm}", row.len(), model.t() * model.psi());
    Ok(())
}
