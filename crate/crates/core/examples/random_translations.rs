//! Box dimension of `K(b)` for Haar-random translations.
//!
//! Run with `cargo run --release --example random_translations`.

use nadim::attractor::{random_translation_experiment, ExperimentOptions};
use nadim::{FieldSpec, Matrix, Result, WordSpace};

fn main() -> Result<()> {
    let spec = FieldSpec::laurent(3)?.with_precision(32)?;
    let ws = WordSpace::new(vec![Matrix::pi_diagonal(spec, &[1]); 2])?;
    let opts = ExperimentOptions { trials: 10, seed: 0, t_min: 4, t_max: 12, ..Default::default() };
    let report = random_translation_experiment(&ws, &opts)?;
    println!("target min(n, d) = {:.6}", report.target);
    for t in &report.trials {
        println!("trial {:>2}: estimate {:.6} deviation {:+.2e}", t.trial, t.estimate, t.deviation);
    }
    println!("{:.0}% within {}", 100.0 * report.fraction_within_band, report.band);
    Ok(())
}
