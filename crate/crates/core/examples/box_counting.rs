//! Exact ball counts of self-affine attractors.
//!
//! Run with `cargo run --release --example box_counting`.

use nadim::{Aifs, BoxOptions, FieldElement, FieldSpec, Matrix, Result, WordSpace};

fn main() -> Result<()> {
    let spec = FieldSpec::padic(2)?.with_precision(32)?;
    let ws = WordSpace::new(vec![Matrix::pi_diagonal(spec, &[1, 2]); 3])?;
    let b = [[0, 0], [1, 3], [5, 1]]
        .iter()
        .map(|v| v.iter().map(|&x| FieldElement::from_integer(spec, x)).collect())
        .collect();
    let aifs = Aifs::new(ws, b)?;

    let opts = BoxOptions { workers: 4, ..Default::default() };
    let table = aifs.box_count_table(1, 10, &opts)?;
    print!("{}", table.to_csv());
    println!("slope {:.6}, affinity dimension {:.6}", table.slope(), (1.0 + 3f64.log2()) / 2.0);
    Ok(())
}
