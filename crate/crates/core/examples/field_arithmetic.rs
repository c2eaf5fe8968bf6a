//! Arithmetic in Q_3 and F_3((1/X)) side by side.
//!
//! Run with `cargo run --example field_arithmetic`.

use nadim::{FieldElement, FieldSpec, Result};

fn main() -> Result<()> {
    let padic = FieldSpec::padic(3)?;
    let laurent = FieldSpec::laurent(3)?;

    for spec in [padic, laurent] {
        let one = FieldElement::one(spec);
        let three = one.add(&one)?.add(&one)?;
        println!("{}: 1 + 1 + 1 = {three} (valuation {})", spec.kind(), three.valuation());
    }

    // 1/2 in Q_3 is 2 + 3 + 3^2 + ...
    let half = FieldElement::embed_rational(padic.with_precision(8)?, 1, 2)?;
    println!("1/2 in Q_3 = {half}");
    let two = FieldElement::from_integer(half.spec(), 2);
    println!("2 * (1/2) = {}", two.mul(&half)?);

    let x = FieldElement::parse(padic, "pi^-2*(1,2,0,1)")?;
    let inv = x.inv()?;
    println!("x = {x}, |x| = {}, |1/x| = {}", x.norm(), inv.norm());

    // balls of radius 3^-t are digit cylinders
    let y = x.add(&FieldElement::pi_pow(padic, 2))?;
    let t = 2;
    println!(
        "x and x + 9 share the key at t = {t}: {}",
        x.digit_prefix(t, -2)? == y.digit_prefix(t, -2)?
    );
    Ok(())
}
