//! Skewness of the 5-occurrence distribution on uniform data.
//!
//! cargo run --release --example hubness

use isokernel::experiments::{hubness_sweep, MeasureKind};

fn main() -> isokernel::Result<()> {
    let measures = [MeasureKind::Gaussian { sigma: 5.0 }, MeasureKind::Ik { psi: 32 }];
    for (d, kind, res) in hubness_sweep(&[3, 20, 100], 1000, 5, &measures, 200, 3)? {
        let max = res.o_k.iter().max().copied().unwrap_or(0);
        println!("{:<12} d={d:<4} skewness {:>6.3}  largest O_5 {max}", kind.label(), res.skewness);
    }
    Ok(())
}
