use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::network::{analyze_structure, CouplingMatrix};

/// Positive left null vector `ξ` of an irreducible coupling matrix,
/// normalized so that `Σ ξ_i = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerronWeights {
    xi: Vec<f64>,
}

impl PerronWeights {
    pub fn values(&self) -> &[f64] {
        &self.xi
    }

    /// The same direction rescaled so that `max ξ_i = 1`.
    pub fn unit_max(&self) -> PerronWeights {
        let top = self.xi.iter().copied().fold(0.0, f64::max);
        PerronWeights { xi: self.xi.iter().map(|v| v / top).collect() }
    }

    /// `Ξ = diag(ξ)`.
    pub fn diag_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(&self.xi))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PerronOptions {
    pub tolerance: f64,
    /// `None` uses `10 m ln m + 1000`.
    pub max_iterations: Option<usize>,
}

impl Default for PerronOptions {
    fn default() -> Self {
        Self { tolerance: 1e-12, max_iterations: None }
    }
}

/// Left Perron weights with default options.
pub fn left_perron(a: &CouplingMatrix) -> Result<PerronWeights> {
    left_perron_with(a, PerronOptions::default())
}

/// Power iteration on the column-stochastic `B = I + Aᵀ/(2 max|a_ii|)`,
/// whose fixed point is the left null vector of `A`, followed by one direct
/// solve of the bordered system `Aᵀξ = 0, Σξ = 1` to polish the residual.
pub fn left_perron_with(a: &CouplingMatrix, opts: PerronOptions) -> Result<PerronWeights> {
    let structure = analyze_structure(a);
    if !structure.irreducible {
        return Err(Error::Reducible { components: structure.components.len() });
    }
    let m = a.size();
    if m == 1 {
        return Ok(PerronWeights { xi: vec![1.0] });
    }
    let scale = 2.0 * a.max_abs_diagonal();
    let cap = opts.max_iterations.unwrap_or_else(|| (10.0 * m as f64 * (m as f64).ln()).ceil() as usize + 1000);

    let mut x = vec![1.0 / m as f64; m];
    let mut iterations = 0;
    while iterations < cap {
        iterations += 1;
        let ax = a.mul_transpose_vec(&x);
        let mut next: Vec<f64> = x.iter().zip(&ax).map(|(xi, d)| xi + d / scale).collect();
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= total);
        let change = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = next;
        if change < opts.tolerance {
            break;
        }
    }

    let norm = a.inf_norm();
    let residual = |v: &[f64]| a.mul_transpose_vec(v).iter().fold(0.0f64, |acc, r| acc.max(r.abs()));
    let acceptable = |v: &[f64]| v.iter().all(|&c| c > 0.0) && residual(v) < 1e-9 * norm;

    if let Some(polished) = bordered_solve(a) {
        if acceptable(&polished) && residual(&polished) <= residual(&x) {
            x = polished;
        }
    }
    if !acceptable(&x) {
        return Err(Error::PerronNotConverged { iterations, residual: residual(&x) });
    }
    Ok(PerronWeights { xi: x })
}

fn bordered_solve(a: &CouplingMatrix) -> Option<Vec<f64>> {
    let m = a.size();
    let mut sys = a.to_dense().transpose();
    sys.row_mut(m - 1).fill(1.0);
    let mut rhs = DVector::zeros(m);
    rhs[m - 1] = 1.0;
    let sol = sys.lu().solve(&rhs)?;
    let total: f64 = sol.iter().sum();
    Some(sol.iter().map(|v| v / total).collect())
}
