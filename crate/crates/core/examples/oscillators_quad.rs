//! Node dynamics and sampled QUAD constants.
//!
//! `cargo run --release --example oscillators_quad`

use pinsync::oscillators::{estimate_quad, uniform_delta_grid, Oscillator, QuadSettings};

fn main() -> pinsync::Result<()> {
    let grid: Vec<f64> = (0..=80).map(|k| 0.5 * k as f64).collect();
    for osc in [Oscillator::lorenz(), Oscillator::chen(), Oscillator::rossler(), Oscillator::chua()] {
        let x = [1.0, 2.0, 3.0];
        let f = osc.eval(&x, 0.0)?;
        let j = osc.jacobian(&x)?;
        println!("{}: f(1,2,3) = {:?}, trace Df = {:.3}", osc.name(), f, j.trace());

        let mut settings = QuadSettings::new(3, osc.default_init_box());
        settings.samples = 20_000;
        settings.delta_grid = uniform_delta_grid(&grid, 3);
        let q = estimate_quad(&osc, &settings)?;
        println!("  QUAD over {:?}: delta = {}, eta = {:.3} (sampled, not certified)", q.bounds, q.delta[0], q.eta);
    }
    Ok(())
}
