//! Brackets for the critical exponent of the pressure.
//!
//! Run with `cargo run --release --example affinity_dimension`.

use nadim::attractor::trial_rng;
use nadim::pressure::{critical_exponent, critical_exponent_with, series_tail_probe, PressureOptions};
use nadim::{FieldSpec, Matrix, Result, WordSpace};

fn main() -> Result<()> {
    let p3 = FieldSpec::padic(3)?;
    let cantor = WordSpace::new(vec![Matrix::pi_diagonal(p3, &[1]); 2])?;
    let b = critical_exponent(&cantor, 4, 1e-9)?;
    println!("two maps x -> 3x: [{:.10}, {:.10}], log2/log3 = {:.10}", b.s_lower, b.s_upper, 2f64.ln() / 3f64.ln());
    for s in [0.0, b.s_upper, b.s_upper + 0.1] {
        println!("  series at s = {s:.4}: {:?}", series_tail_probe(&cantor, s, 8)?);
    }

    let p2 = FieldSpec::padic(2)?;
    let diag = WordSpace::new(vec![Matrix::pi_diagonal(p2, &[1, 2]); 3])?;
    let b = critical_exponent(&diag, 6, 1e-9)?;
    println!("three maps diag(2, 4): s_upper = {:.10}, (1 + log2 3)/2 = {:.10}", b.s_upper, (1.0 + 3f64.log2()) / 2.0);

    // four anisotropic maps in random orientations: only a bracket is available
    let mut rng = trial_rng(1, 0);
    let squash = Matrix::pi_diagonal(p2, &[1, 2]);
    let maps = (0..4)
        .map(|_| Matrix::haar(p2, 2, 2, 0, &mut rng).mul(&squash)?.mul(&Matrix::haar(p2, 2, 2, 0, &mut rng)))
        .collect::<Result<Vec<_>>>()?;
    let ws = WordSpace::new(maps)?;
    println!("random maps have singular valuations {:?}", ws.map_valuations());
    let opts = PressureOptions { k_max: Some(7), workers: 2, ..Default::default() };
    let b = critical_exponent_with(&ws, &opts)?;
    println!("bracket [{:.6}, {:.6}] after {} products", b.s_lower, b.s_upper, b.nodes);
    for (k, root) in b.roots.iter().enumerate() {
        println!("  s_{} = {root:.6}", k + 1);
    }
    Ok(())
}
