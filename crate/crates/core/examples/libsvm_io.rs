//! Parse LIBSVM text, min-max normalize, and write CSV.
//!
//! cargo run --example libsvm_io

use isokernel::datasets::{minmax_normalize, parse_libsvm, write_csv, write_libsvm};

fn main() -> isokernel::Result<()> {
    let text = "# toy data\n1 1:0.5 3:2\n-1 2:4\n+1 1:1.5 2:1 3:1\n";
    let ds = parse_libsvm(text.as_bytes())?;
    println!("{} points, dimension {}, labels {:?}", ds.len(), ds.dim, ds.labels);

    let norm = minmax_normalize(&ds)?;
    let mut out = Vec::new();
    write_csv(&norm, &["normalized toy data".to_string()], &mut out)?;
    print!("{}", String::from_utf8_lossy(&out));

    out.clear();
    write_libsvm(&norm, &[], &mut out)?;
    print!("{}", String::from_utf8_lossy(&out));
    Ok(())
}
