use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Strictly increasing scalar map applied componentwise to node states in
/// nonlinear coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CouplingFunction {
    Identity,
    /// `g(x) = a x + b sin x`, increasing when `a > |b|`.
    AffineSine {
        a: f64,
        b: f64,
    },
}

impl CouplingFunction {
    pub fn affine_sine(a: f64, b: f64) -> Result<Self> {
        let g = CouplingFunction::AffineSine { a, b };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            CouplingFunction::Identity => Ok(()),
            CouplingFunction::AffineSine { a, b } => {
                if a.is_finite() && b.is_finite() && a > b.abs() {
                    Ok(())
                } else {
                    Err(invalid("coupling function", format!("affine-sine needs a > |b|, got a = {a}, b = {b}")))
                }
            }
        }
    }

    /// Certified lower bound on `(g(u) − g(v)) / (u − v)`.
    pub fn alpha_lower(&self) -> f64 {
        match *self {
            CouplingFunction::Identity => 1.0,
            CouplingFunction::AffineSine { a, b } => a - b.abs(),
        }
    }

    /// Upper bound on the slope of `g`.
    pub fn alpha_upper(&self) -> f64 {
        match *self {
            CouplingFunction::Identity => 1.0,
            CouplingFunction::AffineSine { a, b } => a + b.abs(),
        }
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            CouplingFunction::Identity => x,
            CouplingFunction::AffineSine { a, b } => a * x + b * x.sin(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|&v| self.apply(v)).collect()
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, &v) in out.iter_mut().zip(x) {
            *o = self.apply(v);
        }
    }
}
