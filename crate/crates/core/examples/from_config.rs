//! Load a JSON system description and run commands on it in-process.
//!
//! Run with `cargo run --example from_config -- examples/configs/shear.json`.

use nadim::cli::{parse_config, run, Cli, Command, Format};
use nadim::Result;

fn main() -> Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/shear.json").into());
    let config = parse_config(&path)?;
    println!("{} maps on {}^{}", config.maps.len(), config.spec.kind(), config.n);

    let cli = Cli {
        command: Command::Dim,
        config: path.into(),
        s: None,
        kmax: Some(6),
        tmin: None,
        tmax: None,
        trials: None,
        seed: None,
        samples: None,
        workers: 2,
        format: Format::Json,
    };
    print!("{}", run(&cli)?.output);
    Ok(())
}
