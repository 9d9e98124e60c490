//! Fixed coupling strength chosen from the symmetric criterion, then simulated.
//!
//! `cargo run --release --example fixed_gain`

use pinsync::dynamics::{simulate, CouplingMode, SimulationConfig};
use pinsync::network::{generate, GeneratorConfig};
use pinsync::oscillators::Oscillator;
use pinsync::spectral::{pin, symmetric_eigenvalues};

fn main() -> pinsync::Result<()> {
    let mut g = GeneratorConfig::small_world(50, 0);
    g.k = 20;
    g.weight_low = 1.5;
    g.weight_high = 3.0;
    let a = generate(&g)?;

    let mut cfg = SimulationConfig::new(Oscillator::lorenz(), a.clone());
    cfg.mode = CouplingMode::Linear;
    cfg.eps = 100.0;
    cfg.dt = 5e-4;
    cfg.t_end = 10.0;
    cfg.sample_every = 2000;

    let pinned =
        pinsync::dynamics::select_pinned_node(&a, cfg.pin, &pinsync::network::analyze_structure(&a), cfg.seed)?;
    let spec = symmetric_eigenvalues(&pin(&a, cfg.eps, pinned)?.to_dense())?;
    cfg.c0 = (15.5 / -spec.largest() * 1.15).ceil();
    println!(
        "pinned node {pinned}, lambda_1 = {:.4}, c = {}, stiffness c|lambda_min|dt = {:.2}",
        spec.largest(),
        cfg.c0,
        cfg.c0 * -spec.smallest() * cfg.dt
    );

    let r = simulate(&cfg)?;
    for (t, e) in r.times.iter().zip(&r.sync_error) {
        println!("t = {t:5.1}  E = {e:.3e}");
    }
    Ok(())
}
