//! The singular value function `phi^s` and its submultiplicativity.
//!
//! Run with `cargo run --example singular_value_function`.

use nadim::svf::{phi, s_grid, submultiplicativity_report};
use nadim::{FieldSpec, Matrix, Result};

fn main() -> Result<()> {
    let spec = FieldSpec::laurent(2)?;
    let t = Matrix::pi_diagonal(spec, &[1, 3]);
    let u = Matrix::pi_diagonal(spec, &[3, 1]);

    for s in [0.5, 1.0, 1.5, 2.0, 3.0] {
        println!("phi^{s}(T) = 2^{}", phi(&t, s)?.log_q_value);
    }

    println!("\n  s    log phi(TU)   log phi(T)phi(U)   exact  equal");
    for c in submultiplicativity_report(&t, &u, &s_grid(0.5, 4.0))? {
        println!(
            "{:>4}  {:>11}  {:>17}  {:>6}  {:>5}",
            c.s, c.lhs_log_q, c.rhs_log_q, c.exact, c.equality
        );
    }
    Ok(())
}
