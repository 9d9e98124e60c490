//! Pinned spectra and the global synchronization criteria.
//!
//! `cargo run --example spectral_criteria`

use pinsync::network::{generate, GeneratorConfig};
use pinsync::spectral::{check_global_criterion, left_perron, pin, symmetric_eigenvalues, GlobalCriterion};

fn main() -> pinsync::Result<()> {
    let mut cfg = GeneratorConfig::small_world(50, 0);
    cfg.k = 20;
    cfg.weight_low = 1.5;
    cfg.weight_high = 3.0;
    let a = generate(&cfg)?;
    let eps = 100.0;
    let p = 0;

    let spec = symmetric_eigenvalues(&pin(&a, eps, p)?.to_dense())?;
    println!("lambda_1 = {:.5}, lambda_min = {:.2} (bound eps/m = {:.2})", spec.largest(), spec.smallest(), eps / 50.0);

    // Lorenz needs Delta around 15.5 per component; find the smallest c that works.
    let delta = [15.5; 3];
    let c_min = 15.5 / -spec.largest();
    println!("smallest c for the symmetric test: {c_min:.2}");
    for c in [10.0, 18.0] {
        let r = check_global_criterion(GlobalCriterion::Symmetric, &a, eps, p, c, &delta, 1.0)?;
        println!("c = {c:>4}: {} satisfied = {}, worst margin {:+.3}", r.theorem, r.satisfied, r.worst_margin());
    }

    // Directed networks use Perron weights.
    let mut dcfg = GeneratorConfig::random_sparse(50, 0.2, 1);
    dcfg.weight_low = 1.5;
    dcfg.weight_high = 3.0;
    let d = generate(&dcfg)?;
    let xi = left_perron(&d)?;
    let (lo, hi) = xi.values().iter().fold((f64::MAX, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
    println!("Perron weights of a directed network: min {lo:.4}, max {hi:.4}");
    for c in [30.0, 200.0] {
        let r = check_global_criterion(GlobalCriterion::Asymmetric, &d, eps, p, c, &delta, 1.0)?;
        println!("c = {c:>5}:\n{}", r.to_record());
    }

    // Nonlinear coupling rescales lambda_1 by the smallest slope of g.
    let r = check_global_criterion(GlobalCriterion::Nonlinear, &a, eps, p, 36.0, &delta, 0.5)?;
    println!(
        "{} with slope 0.5 and c = 36: satisfied = {}, worst margin {:+.3}",
        r.theorem,
        r.satisfied,
        r.worst_margin()
    );
    Ok(())
}
