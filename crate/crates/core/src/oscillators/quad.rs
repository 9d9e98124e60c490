use rand::Rng;

use super::Oscillator;
use crate::error::{invalid, Error, Result};
use crate::rng::{stream_rng, Stream};

/// Minimum number of sample pairs accepted by [`estimate_quad`].
pub const MIN_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadSettings {
    /// Diagonal of `P`, all entries positive.
    pub p: Vec<f64>,
    /// Per-dimension sampling interval.
    pub bounds: Vec<(f64, f64)>,
    pub samples: usize,
    pub seed: u64,
    /// Candidate diagonals of `Δ`, tried from smallest component sum upward.
    pub delta_grid: Vec<Vec<f64>>,
}

impl QuadSettings {
    /// `P = I`, 10⁵ samples, uniform grid `{0, 5, ..., 50}`.
    pub fn new(n: usize, bounds: Vec<(f64, f64)>) -> Self {
        let values: Vec<f64> = (0..=10).map(|k| 5.0 * k as f64).collect();
        Self { p: vec![1.0; n], bounds, samples: 100_000, seed: 0, delta_grid: uniform_delta_grid(&values, n) }
    }
}

/// Componentwise-equal candidates `Δ = δ I` for each `δ` in `values`.
pub fn uniform_delta_grid(values: &[f64], n: usize) -> Vec<Vec<f64>> {
    values.iter().map(|&d| vec![d; n]).collect()
}

/// Sampled QUAD constants. Never certified: the sampled supremum is a lower
/// bound on the true one.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadEstimate {
    pub p: Vec<f64>,
    pub delta: Vec<f64>,
    pub eta: f64,
    pub bounds: Vec<(f64, f64)>,
    pub samples: usize,
    pub certified: bool,
}

/// For sample pairs `(x, y)` uniform in the box, finds the first `Δ` in the
/// grid for which
/// `max (x − y)ᵀP(f(x) − Δx − f(y) + Δy) / |x − y|²` is negative, and reports
/// `η` as the negated maximum.
pub fn estimate_quad(osc: &Oscillator, settings: &QuadSettings) -> Result<QuadEstimate> {
    let n = osc.dimension();
    osc.validate()?;
    if settings.p.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: settings.p.len() });
    }
    if settings.p.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
        return Err(invalid("p", "P must be a positive diagonal"));
    }
    if settings.bounds.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: settings.bounds.len() });
    }
    if settings.bounds.iter().any(|&(lo, hi)| !(lo <= hi && lo.is_finite() && hi.is_finite())) {
        return Err(invalid("box", "each interval needs finite lo <= hi"));
    }
    if settings.samples < MIN_SAMPLES {
        return Err(invalid("samples", format!("need at least {MIN_SAMPLES}, got {}", settings.samples)));
    }
    if settings.delta_grid.is_empty() || settings.delta_grid.iter().any(|d| d.len() != n) {
        return Err(invalid("delta_grid", format!("need one or more candidates of length {n}")));
    }

    // Per sample: dᵀP(f(x) − f(y)) / |d|², and p_k d_k² / |d|².
    let mut rng = stream_rng(settings.seed, Stream::QuadSampling);
    let mut base = Vec::with_capacity(settings.samples);
    let mut weights = Vec::with_capacity(settings.samples * n);
    let (mut x, mut y) = (vec![0.0; n], vec![0.0; n]);
    let (mut fx, mut fy) = (vec![0.0; n], vec![0.0; n]);
    while base.len() < settings.samples {
        for k in 0..n {
            let (lo, hi) = settings.bounds[k];
            x[k] = lo + (hi - lo) * rng.gen::<f64>();
            y[k] = lo + (hi - lo) * rng.gen::<f64>();
        }
        let norm2: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
        if norm2 == 0.0 {
            continue;
        }
        osc.eval_into(&x, 0.0, &mut fx);
        osc.eval_into(&y, 0.0, &mut fy);
        let mut num = 0.0;
        for k in 0..n {
            let d = x[k] - y[k];
            num += d * settings.p[k] * (fx[k] - fy[k]);
            weights.push(settings.p[k] * d * d / norm2);
        }
        base.push(num / norm2);
    }

    let mut order: Vec<usize> = (0..settings.delta_grid.len()).collect();
    order.sort_by(|&a, &b| {
        let sa: f64 = settings.delta_grid[a].iter().sum();
        let sb: f64 = settings.delta_grid[b].iter().sum();
        sa.total_cmp(&sb)
    });

    let mut best_max = f64::INFINITY;
    for idx in order {
        let delta = &settings.delta_grid[idx];
        let max = base
            .iter()
            .zip(weights.chunks_exact(n))
            .map(|(b, w)| b - w.iter().zip(delta).map(|(w, d)| w * d).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        if max < 0.0 {
            return Ok(QuadEstimate {
                p: settings.p.clone(),
                delta: delta.clone(),
                eta: -max,
                bounds: settings.bounds.clone(),
                samples: settings.samples,
                certified: false,
            });
        }
        best_max = best_max.min(max);
    }
    Err(Error::QuadInfeasible { best_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn contracting_linear_field() {
        let osc = Oscillator::linear(&(DMatrix::identity(3, 3) * -2.0)).unwrap();
        let mut s = QuadSettings::new(3, vec![(-1.0, 1.0); 3]);
        s.delta_grid = uniform_delta_grid(&[0.0], 3);
        let q = estimate_quad(&osc, &s).unwrap();
        assert_eq!(q.delta, vec![0.0; 3]);
        assert!(q.eta >= 1.9 && q.eta <= 2.0 + 1e-12, "{}", q.eta);
        assert!(!q.certified);
    }

    #[test]
    fn expanding_linear_field_needs_delta() {
        let osc = Oscillator::linear(&DMatrix::identity(3, 3)).unwrap();
        let mut s = QuadSettings::new(3, vec![(-1.0, 1.0); 3]);
        s.delta_grid = uniform_delta_grid(&[-1.0, 0.0], 3);
        assert!(matches!(estimate_quad(&osc, &s), Err(Error::QuadInfeasible { .. })));
        s.delta_grid = uniform_delta_grid(&[0.0, 2.0, 1.5], 3);
        let q = estimate_quad(&osc, &s).unwrap();
        assert_eq!(q.delta, vec![1.5; 3]);
        assert!((q.eta - 0.5).abs() < 1e-9);
    }

    #[test]
    fn same_seed_same_estimate() {
        let mut s = QuadSettings::new(3, vec![(-30.0, 30.0), (-30.0, 30.0), (0.0, 60.0)]);
        s.samples = 5_000;
        s.seed = 3;
        let a = estimate_quad(&Oscillator::lorenz(), &s).unwrap();
        let b = estimate_quad(&Oscillator::lorenz(), &s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn too_few_samples_rejected() {
        let mut s = QuadSettings::new(3, vec![(-1.0, 1.0); 3]);
        s.samples = 10;
        assert!(estimate_quad(&Oscillator::lorenz(), &s).is_err());
    }
}
