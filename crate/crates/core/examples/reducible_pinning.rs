//! On a network with a root block and a sink block only the root is a
//! useful place for the single controller.
//!
//! `cargo run --release --example reducible_pinning`

use pinsync::dynamics::{simulate, PinStrategy, SimulationConfig};
use pinsync::network::{analyze_structure, CouplingMatrix};
use pinsync::oscillators::Oscillator;

fn main() -> pinsync::Result<()> {
    // Nodes 0..5 form a complete root block; nodes 5..12 a complete sink
    // block, each sink node listening to one root node.
    let m = 12;
    let mut w = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            if i != j && (i < 5) == (j < 5) {
                w[i][j] = 1.0;
            }
        }
        if i >= 5 {
            w[i][i % 5] = 1.0;
        }
    }
    let a = CouplingMatrix::from_weighted_adjacency(&w)?;
    let s = analyze_structure(&a);
    println!("components {:?}, root {:?}", s.components, s.root());

    for (label, strategy) in [("root", PinStrategy::RootScc), ("sink", PinStrategy::Explicit(7))] {
        let mut cfg = SimulationConfig::new(Oscillator::lorenz(), a.clone());
        cfg.c0 = 5.0;
        cfg.t_end = 15.0;
        cfg.pin = strategy;
        let r = simulate(&cfg)?;
        println!("pin {label} (node {}): E(0) = {:.2}, E(T) = {:.3e}", r.pinned, r.sync_error[0], r.final_error());
    }
    Ok(())
}
