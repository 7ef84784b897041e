//! Monte Carlo rate at which two distinct points share a cell in every
//! one of t partitionings, next to 1/psi^t.
//!
//! cargo run --release --example collision_rate

use isokernel::experiments::{collision_test, Distribution};

fn main() -> isokernel::Result<()> {
    for (psi, t) in [(2, 1), (4, 2), (16, 1), (16, 4)] {
        let r = collision_test(psi, t, 100, Distribution::Uniform, 100_000, 5)?;
        println!(
            "psi={psi:<3} t={t}: rate {:.3e}  1/psi^t {:.3e}  within 3 sigma of it: {}",
            r.rate,
            r.bound,
            r.within_bound()
        );
    }
    Ok(())
}
