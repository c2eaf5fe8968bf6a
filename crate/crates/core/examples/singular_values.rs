//! Isometric decomposition `T = P D Q` and the minor-based singular values.
//!
//! Run with `cargo run --example singular_values`.

use nadim::svd::{singular_valuations_by_minors, svd};
use nadim::{FieldElement, FieldSpec, Matrix, Result};

fn main() -> Result<()> {
    let spec = FieldSpec::padic(5)?.with_precision(12)?;
    let t = Matrix::from_integers(spec, &[&[5, 10, 1], &[25, 3, 0], &[0, 50, 125]])?;
    println!("T =\n{t}");

    let d = svd(&t)?;
    println!("singular valuations {:?}, norms {:?}", d.valuations, d.singular_values());
    println!("P isometric: {}, Q isometric: {}", d.p.is_isometry()?, d.q.is_isometry()?);
    println!("P D Q == T: {}", d.reconstruct()?.eq_at_precision(&t));
    println!("from minors: {:?}", singular_valuations_by_minors(&t)?);

    // [[1 - c, -c], [1, 1]] is an isometry whenever |c| < 1
    let one = FieldElement::one(spec);
    let c = FieldElement::from_integer(spec, 15);
    let iso = Matrix::from_rows(spec, vec![vec![one.sub(&c)?, c.neg()], vec![one.clone(), one]])?;
    println!("isometry: {}, valuations {:?}", iso.is_isometry()?, svd(&iso)?.valuations);
    Ok(())
}
