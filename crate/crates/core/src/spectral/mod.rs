//! Spectral objects of pinned networks and the synchronization criteria
//! built on them.
//!
//! Pinning node `p` with gain `eps` turns `A` into `Ã = A - eps * e_p e_pᵀ`.
//! For a symmetric irreducible `A` every eigenvalue of `Ã` is negative; its
//! largest eigenvalue `λ₁(Ã)` sets how much coupling strength the network
//! needs to overpower the node dynamics.

mod criteria;
mod perron;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{invalid, Error, Result};
use crate::network::CouplingMatrix;

pub use criteria::{
    check_global_criterion, check_local_criterion, CriterionReport, GlobalCriterion, LocalCheck, SpectralInput,
    Theorem, STRICT_MARGIN,
};
pub use perron::{left_perron, PerronOptions, PerronWeights};

/// Relative asymmetry accepted by [`symmetric_eigenvalues`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// `A` with `eps` subtracted from the pinned node's diagonal entry.
#[derive(Debug, Clone, PartialEq)]
pub struct PinnedMatrix {
    base: CouplingMatrix,
    eps: f64,
    pinned: usize,
}

pub fn pin(a: &CouplingMatrix, eps: f64, pinned: usize) -> Result<PinnedMatrix> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid("eps", format!("control gain must be positive, got {eps}")));
    }
    if pinned >= a.size() {
        return Err(Error::IndexOutOfRange { index: pinned, len: a.size() });
    }
    Ok(PinnedMatrix { base: a.clone(), eps, pinned })
}

impl PinnedMatrix {
    pub fn base(&self) -> &CouplingMatrix {
        &self.base
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn pinned(&self) -> usize {
        self.pinned
    }

    pub fn size(&self) -> usize {
        self.base.size()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let v = self.base.get(i, j);
        if i == self.pinned && j == self.pinned {
            v - self.eps
        } else {
            v
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = self.base.to_dense();
        d[(self.pinned, self.pinned)] -= self.eps;
        d
    }
}

/// Eigenvalues of a real symmetric matrix, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `λ₁`, the largest eigenvalue.
    pub fn largest(&self) -> f64 {
        self.values[0]
    }

    pub fn smallest(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn inf_norm(s: &DMatrix<f64>) -> f64 {
    s.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Eigenvalues of `(S + Sᵀ)/2`. Rejects inputs whose asymmetry exceeds
/// [`SYMMETRY_TOLERANCE`] relative to `||S||_inf`, and validates the
/// residual of the two extreme eigenpairs.
pub fn symmetric_eigenvalues(s: &DMatrix<f64>) -> Result<Spectrum> {
    if s.nrows() != s.ncols() {
        return Err(Error::NonSquare { rows: s.nrows(), row: 0, cols: s.ncols() });
    }
    if s.nrows() == 0 {
        return Err(invalid("matrix", "empty matrix has no spectrum"));
    }
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { what: "matrix entry" });
    }
    let norm = inf_norm(s);
    let deviation = inf_norm(&(s - s.transpose()));
    let tolerance = SYMMETRY_TOLERANCE * norm;
    if deviation > tolerance {
        return Err(Error::Asymmetric { deviation, tolerance });
    }
    let sym = (s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym.clone());

    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let bound = 1e-8 * norm.max(f64::MIN_POSITIVE);
    for &k in [order[0], *order.last().unwrap()].iter() {
        let v: DVector<f64> = eig.eigenvectors.column(k).into_owned();
        let residual = (&sym * &v - &v * eig.eigenvalues[k]).amax();
        if residual > bound && norm > 0.0 {
            return Err(Error::EigenResidual { residual, bound });
        }
    }
    Ok(Spectrum { values: order.iter().map(|&k| eig.eigenvalues[k]).collect() })
}

/// `{ΞÃ}ˢ = (ΞÃ + ÃᵀΞ)/2`, exactly symmetric by construction.
pub fn weighted_symmetric_part(xi: &PerronWeights, pinned: &PinnedMatrix) -> Result<DMatrix<f64>> {
    let m = pinned.size();
    let w = xi.values();
    if w.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: w.len() });
    }
    let a = pinned.to_dense();
    let mut out = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = 0.5 * (w[i] * a[(i, j)] + w[j] * a[(j, i)]);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out)
}
