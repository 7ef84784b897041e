//! Adjusted mutual information between labelings.
//!
//! cargo run --example ami

use isokernel::experiments::ami;

fn main() -> isokernel::Result<()> {
    let truth = [0, 0, 0, 1, 1, 1, 2, 2, 2];
    println!("identical        {:.4}", ami(&truth, &truth)?);
    println!("relabeled        {:.4}", ami(&truth, &[5, 5, 5, 9, 9, 9, 1, 1, 1])?);
    println!("one point moved  {:.4}", ami(&truth, &[0, 0, 1, 1, 1, 1, 2, 2, 2])?);
    println!("single cluster   {:.4}", ami(&truth, &[0; 9])?);
    Ok(())
}
