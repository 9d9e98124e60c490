//! Node dynamics `f(x)` with analytic Jacobians, monotone coupling functions,
//! and sampling estimates of the QUAD constants.

mod coupling;
mod quad;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use coupling::CouplingFunction;
pub use quad::{estimate_quad, uniform_delta_grid, QuadEstimate, QuadSettings};

/// Constant terms of the Rössler system.
const ROSSLER_A: f64 = 0.2;
const ROSSLER_B: f64 = 0.2;

/// Intrinsic dynamics of one node. All kinds are autonomous.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Oscillator {
    /// `ẋ = β(y − x), ẏ = αx − y − xz, ż = xy − bz`.
    Lorenz { beta: f64, alpha: f64, b: f64 },
    /// `ẋ = a(y − x), ẏ = (c − a)x − xz + cy, ż = xy − bz`. With `yz_term`
    /// the `xz` term of the second equation is replaced by `yz`.
    Chen {
        a: f64,
        b: f64,
        c: f64,
        #[serde(default)]
        yz_term: bool,
    },
    /// `ẋ = −(y + z), ẏ = x + 0.2y, ż = 0.2 + z(x − μ)`. With `alt_sign`
    /// the first equation reads `ẋ = −(y − z)`.
    Rossler {
        mu: f64,
        #[serde(default)]
        alt_sign: bool,
    },
    /// `ẋ = k(y − h(x)), ẏ = x − y + z, ż = −l y`, see [`chua_h`].
    Chua { k: f64, l: f64 },
    /// `ẋ = M x` with `M` stored row-major.
    Linear { n: usize, matrix: Vec<f64> },
}

impl Oscillator {
    pub fn lorenz() -> Self {
        Oscillator::Lorenz { beta: 10.0, alpha: 28.0, b: 8.0 / 3.0 }
    }

    pub fn chen() -> Self {
        Oscillator::Chen { a: 35.0, b: 3.0, c: 28.0, yz_term: false }
    }

    pub fn rossler() -> Self {
        Oscillator::Rossler { mu: 5.7, alt_sign: false }
    }

    pub fn chua() -> Self {
        Oscillator::Chua { k: 9.0, l: 100.0 / 7.0 }
    }

    pub fn linear(matrix: &DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(invalid("matrix", "linear oscillator needs a nonempty square matrix"));
        }
        let n = matrix.nrows();
        let osc = Oscillator::Linear { n, matrix: matrix.transpose().as_slice().to_vec() };
        osc.validate()?;
        Ok(osc)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Oscillator::Lorenz { .. } => "lorenz",
            Oscillator::Chen { .. } => "chen",
            Oscillator::Rossler { .. } => "rossler",
            Oscillator::Chua { .. } => "chua",
            Oscillator::Linear { .. } => "linear",
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Oscillator::Linear { n, .. } => *n,
            _ => 3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |vals: &[f64]| vals.iter().all(|v| v.is_finite());
        let ok = match self {
            Oscillator::Lorenz { beta, alpha, b } => finite(&[*beta, *alpha, *b]),
            Oscillator::Chen { a, b, c, .. } => finite(&[*a, *b, *c]),
            Oscillator::Rossler { mu, .. } => mu.is_finite(),
            Oscillator::Chua { k, l } => finite(&[*k, *l]),
            Oscillator::Linear { n, matrix } => {
                if *n == 0 || matrix.len() != n * n {
                    return Err(invalid("matrix", format!("expected {} entries for n = {n}", n * n)));
                }
                finite(matrix)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(invalid("oscillator", "parameters must be finite"))
        }
    }

    /// Default per-dimension box for random initial states.
    pub fn default_init_box(&self) -> Vec<(f64, f64)> {
        match self {
            Oscillator::Lorenz { .. } | Oscillator::Chen { .. } => vec![(-20.0, 20.0), (-20.0, 20.0), (0.0, 50.0)],
            // Starts with z < 0 escape to infinity for roughly one draw in seven.
            Oscillator::Rossler { .. } => vec![(-10.0, 10.0), (-10.0, 10.0), (0.0, 10.0)],
            Oscillator::Chua { .. } => vec![(-2.0, 2.0); 3],
            Oscillator::Linear { n, .. } => vec![(-1.0, 1.0); *n],
        }
    }

    /// `f(x, t)`, checked.
    pub fn eval(&self, x: &[f64], t: f64) -> Result<Vec<f64>> {
        self.check_state(x)?;
        let mut out = vec![0.0; x.len()];
        self.eval_into(x, t, &mut out);
        Ok(out)
    }

    /// Unchecked `f(x, t)` for the integrator's inner loop.
    #[inline]
    pub fn eval_into(&self, x: &[f64], _t: f64, out: &mut [f64]) {
        match *self {
            Oscillator::Lorenz { beta, alpha, b } => {
                out[0] = beta * (x[1] - x[0]);
                out[1] = alpha * x[0] - x[1] - x[0] * x[2];
                out[2] = x[0] * x[1] - b * x[2];
            }
            Oscillator::Chen { a, b, c, yz_term } => {
                let cross = if yz_term { x[1] * x[2] } else { x[0] * x[2] };
                out[0] = a * (x[1] - x[0]);
                out[1] = (c - a) * x[0] - cross + c * x[1];
                out[2] = x[0] * x[1] - b * x[2];
            }
            Oscillator::Rossler { mu, alt_sign } => {
                out[0] = if alt_sign { -(x[1] - x[2]) } else { -(x[1] + x[2]) };
                out[1] = x[0] + ROSSLER_A * x[1];
                out[2] = ROSSLER_B + x[2] * (x[0] - mu);
            }
            Oscillator::Chua { k, l } => {
                out[0] = k * (x[1] - chua_h(x[0]));
                out[1] = x[0] - x[1] + x[2];
                out[2] = -l * x[1];
            }
            Oscillator::Linear { n, ref matrix } => {
                for (i, o) in out.iter_mut().enumerate().take(n) {
                    *o = matrix[i * n..(i + 1) * n].iter().zip(x).map(|(a, b)| a * b).sum();
                }
            }
        }
    }

    /// Analytic Jacobian `Df(x)`. At Chua's kinks `|x₁| = 1` the slope of the
    /// middle segment is used.
    pub fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_state(x)?;
        let n = self.dimension();
        let mut out = vec![0.0; n * n];
        self.jacobian_into(x, &mut out);
        Ok(DMatrix::from_row_slice(n, n, &out))
    }

    /// Row-major Jacobian into `out` (length `n * n`).
    #[rustfmt::skip]
    pub fn jacobian_into(&self, x: &[f64], out: &mut [f64]) {
        match *self {
            Oscillator::Lorenz { beta, alpha, b } => out.copy_from_slice(&[
                -beta, beta, 0.0,
                alpha - x[2], -1.0, -x[0],
                x[1], x[0], -b,
            ]),
            Oscillator::Chen { a, b, c, yz_term } => {
                let row1 = if yz_term {
                    [c - a, -x[2] + c, -x[1]]
                } else {
                    [c - a - x[2], c, -x[0]]
                };
                out.copy_from_slice(&[
                    -a, a, 0.0,
                    row1[0], row1[1], row1[2],
                    x[1], x[0], -b,
                ]);
            }
            Oscillator::Rossler { mu, alt_sign } => out.copy_from_slice(&[
                0.0, -1.0, if alt_sign { 1.0 } else { -1.0 },
                1.0, ROSSLER_A, 0.0,
                x[2], 0.0, x[0] - mu,
            ]),
            Oscillator::Chua { k, l } => out.copy_from_slice(&[
                -k * chua_h_slope(x[0]), k, 0.0,
                1.0, -1.0, 1.0,
                0.0, -l, 0.0,
            ]),
            Oscillator::Linear { ref matrix, .. } => out.copy_from_slice(matrix),
        }
    }

    fn check_state(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch { expected: self.dimension(), got: x.len() });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "oscillator state" });
        }
        Ok(())
    }
}

/// Chua's piecewise-linear nonlinearity `h(x) = (2/7)x − (3/14)(|x + 1| − |x − 1|)`.
pub fn chua_h(x: f64) -> f64 {
    (2.0 / 7.0) * x - (3.0 / 14.0) * ((x + 1.0).abs() - (x - 1.0).abs())
}

/// `h'(x)`: `−1/7` on `[−1, 1]`, `2/7` outside.
pub fn chua_h_slope(x: f64) -> f64 {
    if x.abs() <= 1.0 {
        -1.0 / 7.0
    } else {
        2.0 / 7.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64]) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-12, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn lorenz_at_ones() {
        close(&Oscillator::lorenz().eval(&[1.0, 1.0, 1.0], 0.0).unwrap(), &[0.0, 26.0, -5.0 / 3.0]);
    }

    #[test]
    fn chen_at_ones() {
        close(&Oscillator::chen().eval(&[1.0, 1.0, 1.0], 0.0).unwrap(), &[0.0, 20.0, -2.0]);
    }

    #[test]
    fn chua_origin_is_equilibrium() {
        close(&Oscillator::chua().eval(&[0.0; 3], 0.0).unwrap(), &[0.0; 3]);
    }

    #[test]
    fn rossler_sign_flag() {
        let x = [1.0, 2.0, 3.0];
        assert_eq!(Oscillator::rossler().eval(&x, 0.0).unwrap()[0], -5.0);
        let alt = Oscillator::Rossler { mu: 5.7, alt_sign: true };
        assert_eq!(alt.eval(&x, 0.0).unwrap()[0], 1.0);
    }

    #[test]
    fn lorenz_jacobian_at_ones() {
        let j = Oscillator::lorenz().jacobian(&[1.0, 1.0, 1.0]).unwrap();
        let expect = DMatrix::from_row_slice(3, 3, &[-10.0, 10.0, 0.0, 27.0, -1.0, -1.0, 1.0, 1.0, -8.0 / 3.0]);
        assert!((j - expect).amax() < 1e-15);
    }

    #[test]
    fn linear_jacobian_is_constant() {
        let m = DMatrix::from_row_slice(2, 2, &[-1.0, 2.0, 0.5, -3.0]);
        let osc = Oscillator::linear(&m).unwrap();
        assert_eq!(osc.jacobian(&[4.0, -7.0]).unwrap(), m);
        close(&osc.eval(&[1.0, 1.0], 0.0).unwrap(), &[1.0, -2.5]);
    }

    #[test]
    fn chua_h_values() {
        assert_eq!(chua_h(0.0), 0.0);
        assert!((chua_h(1.0) + 1.0 / 7.0).abs() < 1e-15);
        assert!((chua_h(10.0) - 17.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn chua_kink_uses_middle_slope() {
        assert_eq!(chua_h_slope(1.0), -1.0 / 7.0);
        assert_eq!(chua_h_slope(-1.0), -1.0 / 7.0);
        assert_eq!(chua_h_slope(1.0 + 1e-12), 2.0 / 7.0);
    }

    #[test]
    fn rejects_bad_state() {
        let osc = Oscillator::lorenz();
        assert!(matches!(osc.eval(&[1.0, 2.0], 0.0), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(osc.eval(&[1.0, f64::NAN, 0.0], 0.0), Err(Error::NonFinite { .. })));
        assert!(osc.jacobian(&[f64::INFINITY, 0.0, 0.0]).is_err());
    }
}
