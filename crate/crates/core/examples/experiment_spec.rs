//! Drive everything from a TOML experiment spec, as the `pinsync` binary does.
//!
//! `cargo run --release --example experiment_spec`

use pinsync::experiment::{self, ExperimentSpec};

const SPEC: &str = r#"
name = "demo"
seeds = [0, 1]

[network]
kind = "small-world"
m = 30
k = 8
weight_low = 1.0
weight_high = 2.0

[oscillator]
kind = "chua"

[control]
mode = "linear"
c0 = 12.0

[integration]
dt = 5e-4
t_end = 10.0
sample_every = 2000

[checks]
criteria = ["T2", "T3", "T1"]
horizon = 20.0

[checks.quad]
samples = 20000
grid = [0.0, 4.0, 8.5, 12.0]
"#;

fn main() -> pinsync::Result<()> {
    let dir = std::env::temp_dir().join("pinsync-demo");
    let mut spec = ExperimentSpec::parse(SPEC)?;
    spec.output_dir = dir.clone();

    for (seed, reports) in experiment::check(&spec)? {
        for r in reports {
            println!("seed {seed}: {} satisfied = {} ({})", r.theorem, r.satisfied, r.details);
        }
    }

    let out = experiment::run(&spec)?;
    for run in &out.runs {
        println!(
            "seed {}: pinned {}, E(T) = {:.3e}, converged = {}",
            run.seed,
            run.pinned,
            run.result.final_error(),
            run.converged
        );
    }
    for f in &out.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
