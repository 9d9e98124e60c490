//! One controller plus an adaptive coupling strength: c grows until the
//! network follows the target, then stops.
//!
//! `cargo run --release --example adaptive_pinning`

use pinsync::dynamics::{simulate, CouplingMode, SimulationConfig};
use pinsync::network::{generate, GeneratorConfig};
use pinsync::oscillators::Oscillator;

fn main() -> pinsync::Result<()> {
    let mut g = GeneratorConfig::small_world(100, 0);
    g.k = 20;
    let mut cfg = SimulationConfig::new(Oscillator::lorenz(), generate(&g)?);
    cfg.mode = CouplingMode::AdaptiveLinear;
    cfg.c0 = 0.0;
    cfg.adaptive_gain = 1e-4;
    cfg.t_end = 30.0;
    cfg.sample_every = 2000;

    let r = simulate(&cfg)?;
    println!("pinned node {}", r.pinned);
    println!("{:>6} {:>11} {:>9}", "t", "E", "c");
    for k in 0..r.times.len() {
        println!("{:6.1} {:11.3e} {:9.4}", r.times[k], r.sync_error[k], r.coupling[k]);
    }
    Ok(())
}
