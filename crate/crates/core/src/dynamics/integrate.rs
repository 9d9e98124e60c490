//! Classical fixed-step fourth-order Runge-Kutta.

use crate::error::{Error, Result};

/// Reusable RK4 stage buffers for systems of a fixed dimension.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        Self { k: std::array::from_fn(|_| vec![0.0; dim]), tmp: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.tmp.len()
    }

    /// Advances `y` from `t` to `t + dt` in place. `f(t, y, dy)` writes the
    /// derivative. If any stage (1-4) or the update itself is non-finite, `y`
    /// is left untouched and [`Error::Diverged`] reports the stage.
    pub fn step<F>(&mut self, mut f: F, t: f64, y: &mut [f64], dt: f64) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        debug_assert_eq!(y.len(), self.dim());
        let half = 0.5 * dt;
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;

        f(t, y, k1);
        check(k1, t, 1)?;
        for ((o, yi), ki) in tmp.iter_mut().zip(y.iter()).zip(k1.iter()) {
            *o = yi + half * ki;
        }
        f(t + half, tmp, k2);
        check(k2, t, 2)?;
        for ((o, yi), ki) in tmp.iter_mut().zip(y.iter()).zip(k2.iter()) {
            *o = yi + half * ki;
        }
        f(t + half, tmp, k3);
        check(k3, t, 3)?;
        for ((o, yi), ki) in tmp.iter_mut().zip(y.iter()).zip(k3.iter()) {
            *o = yi + dt * ki;
        }
        f(t + dt, tmp, k4);
        check(k4, t, 4)?;

        let sixth = dt / 6.0;
        for i in 0..tmp.len() {
            tmp[i] = y[i] + sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
        }
        check(tmp, t, 4)?;
        y.copy_from_slice(tmp);
        Ok(())
    }
}

fn check(v: &[f64], time: f64, stage: usize) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Diverged { time, stage })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(dt: f64, t_end: f64) -> f64 {
        let mut rk = Rk4::new(1);
        let mut y = [1.0];
        let steps = (t_end / dt).round() as usize;
        for k in 0..steps {
            rk.step(|_, y, dy| dy[0] = -y[0], k as f64 * dt, &mut y, dt).unwrap();
        }
        y[0]
    }

    #[test]
    fn single_decay_step() {
        // 1 - h + h²/2 - h³/6 + h⁴/24 at h = 0.1
        let y = decay(0.1, 0.1);
        assert!((y - 0.904_837_5).abs() < 1e-12, "{y}");
        assert!((y - (-0.1f64).exp()).abs() < 1e-7);
    }

    #[test]
    fn zero_field_is_fixed() {
        let mut rk = Rk4::new(3);
        let mut y = [1.0, -2.0, 3.5];
        rk.step(|_, _, dy| dy.fill(0.0), 0.0, &mut y, 0.25).unwrap();
        assert_eq!(y, [1.0, -2.0, 3.5]);
    }

    #[test]
    fn fourth_order_convergence() {
        let exact = (-1.0f64).exp();
        let e1 = (decay(0.1, 1.0) - exact).abs();
        let e2 = (decay(0.05, 1.0) - exact).abs();
        let order = (e1 / e2).log2();
        assert!((3.9..=4.1).contains(&order), "order {order}");
    }

    #[test]
    fn blow_up_reports_stage_and_keeps_state() {
        let mut rk = Rk4::new(1);
        let mut y = [1.0];
        let err = rk.step(|t, _, dy| dy[0] = if t > 0.0 { f64::NAN } else { 1.0 }, 0.0, &mut y, 0.1).unwrap_err();
        assert!(matches!(err, Error::Diverged { stage: 2, .. }), "{err}");
        assert_eq!(y, [1.0]);
    }
}
