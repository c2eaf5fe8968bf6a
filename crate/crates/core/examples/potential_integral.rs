//! Monte-Carlo potential integrals `∫ ||T x||^-s dx` over the unit ball.
//!
//! Run with `cargo run --release --example potential_integral`.

use nadim::attractor::{potential_integral_mc, trial_rng, unit_potential_closed_form};
use nadim::{FieldSpec, Matrix, Result};

fn main() -> Result<()> {
    let spec = FieldSpec::padic(3)?.with_precision(24)?;
    let mut rng = trial_rng(0, 0);
    let est = potential_integral_mc(&Matrix::identity(spec, 1), 0.5, 100_000, &mut rng)?;
    println!(
        "T = I, s = 0.5: {:.5} +- {:.5}, closed form {:.5}",
        est.mean,
        est.std_error,
        unit_potential_closed_form(3, 0.5)
    );

    // the integral times phi^s(T) stays bounded as T varies
    for i in 0..5 {
        let t = Matrix::haar(spec, 2, 2, 1, &mut rng);
        let est = potential_integral_mc(&t, 1.5, 20_000, &mut trial_rng(1, i))?;
        println!("random T #{i}: mean {:>10.3}, mean * phi^1.5(T) = {:.3}", est.mean, est.statistic);
    }
    Ok(())
}
