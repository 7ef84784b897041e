//! Monte Carlo frequency of each Voronoi cell for a random point.
//!
//! cargo run --release --example cell_probability

use isokernel::experiments::{cell_probability_test, Distribution};

fn main() -> isokernel::Result<()> {
    for g in Distribution::ALL {
        for d in [2, 100] {
            let r = cell_probability_test(4, g, Distribution::Uniform, d, 20_000, 9)?;
            let f: Vec<String> = r.frequencies.iter().map(|v| format!("{v:.4}")).collect();
            println!(
                "G={:<11} d={d:<4} frequencies [{}]  band +-{:.4}  inside: {}",
                g.name(),
                f.join(", "),
                r.band,
                r.within_band()
            );
        }
    }
    Ok(())
}
