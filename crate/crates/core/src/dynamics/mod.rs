//! The controlled network: `m` identical oscillators coupled through `A`,
//! one of them pinned to a target trajectory `s(t)` of the uncoupled system.
//!
//! ```text
//! ẋ_i = f(x_i) + c Σ_j a_ij φ(x_j)  −  [i = p] c ε (φ(x_p) − φ(s))
//! ṡ   = f(s)
//! ċ   = (α/2) Σ_i (x_i − s)ᵀ P (x_i − s)        (adaptive mode, else 0)
//! ```
//!
//! `φ` is the identity for linear coupling and a monotone
//! [`CouplingFunction`] for nonlinear coupling. The target is integrated
//! alongside the network with the same RK4 stages.

mod integrate;
mod pinning;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::network::{analyze_structure, CouplingMatrix};
use crate::oscillators::{CouplingFunction, Oscillator};
use crate::rng::{stream_rng, Stream};

pub use integrate::Rk4;
pub use pinning::{select_pinned_node, PinStrategy};

/// Runs stop once `E(t)` exceeds this.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CouplingMode {
    /// Fixed `c = c0`, identity coupling.
    Linear,
    /// Fixed `c = c0`, coupling and control act through `g`.
    Nonlinear(CouplingFunction),
    /// Identity coupling with `c(t)` driven by the adaptive law from `c0`.
    AdaptiveLinear,
}

/// Strength of the pinning feedback in adaptive mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControlScaling {
    /// `c(t) ε`, the controller grows with the coupling strength.
    WithCoupling,
    /// `c0 ε` throughout, for ablation runs.
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationConfig {
    pub oscillator: Oscillator,
    pub coupling: CouplingMatrix,
    pub mode: CouplingMode,
    pub c0: f64,
    pub eps: f64,
    /// `α` of the adaptive law.
    pub adaptive_gain: f64,
    /// Diagonal of `P` in the adaptive law.
    pub p: Vec<f64>,
    pub dt: f64,
    pub t_end: f64,
    /// Record every this many steps (the final step is always recorded).
    pub sample_every: usize,
    pub seed: u64,
    pub init_box: Vec<(f64, f64)>,
    /// Target initial state; drawn from `init_box` when absent.
    pub s0: Option<Vec<f64>>,
    /// Explicit initial node states (`m * n`, node-major); drawn when absent.
    pub x0: Option<Vec<f64>>,
    pub pin: PinStrategy,
    pub control: ControlScaling,
}

impl SimulationConfig {
    /// Linear coupling with `c0 = 1`, `ε = 100`, `dt = 1e-3`, `T = 10`.
    pub fn new(oscillator: Oscillator, coupling: CouplingMatrix) -> Self {
        let n = oscillator.dimension();
        Self {
            init_box: oscillator.default_init_box(),
            oscillator,
            coupling,
            mode: CouplingMode::Linear,
            c0: 1.0,
            eps: 100.0,
            adaptive_gain: 1.0,
            p: vec![1.0; n],
            dt: 1e-3,
            t_end: 10.0,
            sample_every: 100,
            seed: 0,
            s0: None,
            x0: None,
            pin: PinStrategy::MaxColumnSum,
            control: ControlScaling::WithCoupling,
        }
    }

    pub fn nodes(&self) -> usize {
        self.coupling.size()
    }

    pub fn dimension(&self) -> usize {
        self.oscillator.dimension()
    }

    pub fn steps(&self) -> usize {
        ((self.t_end / self.dt).round() as usize).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        self.oscillator.validate()?;
        let (m, n) = (self.nodes(), self.dimension());
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.dt) {
            return Err(invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= self.dt && self.t_end.is_finite()) {
            return Err(invalid("t_end", format!("must be at least dt, got {}", self.t_end)));
        }
        if !positive(self.eps) {
            return Err(invalid("eps", format!("must be positive, got {}", self.eps)));
        }
        if !(self.c0 >= 0.0 && self.c0.is_finite()) {
            return Err(invalid("c0", format!("must be finite and >= 0, got {}", self.c0)));
        }
        if self.mode == CouplingMode::AdaptiveLinear && !positive(self.adaptive_gain) {
            return Err(invalid("adaptive_gain", format!("must be positive, got {}", self.adaptive_gain)));
        }
        if let CouplingMode::Nonlinear(g) = self.mode {
            g.validate()?;
        }
        if self.p.len() != n || !self.p.iter().all(|&p| positive(p)) {
            return Err(invalid("p", format!("need {n} positive entries")));
        }
        if self.sample_every == 0 {
            return Err(invalid("sample_every", "must be at least 1"));
        }
        if self.init_box.len() != n
            || self.init_box.iter().any(|&(lo, hi)| !(lo <= hi && lo.is_finite() && hi.is_finite()))
        {
            return Err(invalid("init_box", format!("need {n} finite intervals with lo <= hi")));
        }
        if let Some(s0) = &self.s0 {
            if s0.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: s0.len() });
            }
        }
        if let Some(x0) = &self.x0 {
            if x0.len() != m * n {
                return Err(Error::DimensionMismatch { expected: m * n, got: x0.len() });
            }
        }
        Ok(())
    }

    /// SHA-256 of the serialized configuration, hex encoded.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("configuration serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

/// Node states, target, and coupling strength at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    pub t: f64,
    pub m: usize,
    pub n: usize,
    /// Node states, node-major: node `i` is `x[i*n..(i+1)*n]`.
    pub x: Vec<f64>,
    pub s: Vec<f64>,
    pub c: f64,
}

impl NetworkState {
    pub fn node(&self, i: usize) -> &[f64] {
        &self.x[i * self.n..(i + 1) * self.n]
    }

    fn to_vector(&self) -> Vec<f64> {
        let mut y = Vec::with_capacity(self.x.len() + self.n + 1);
        y.extend_from_slice(&self.x);
        y.extend_from_slice(&self.s);
        y.push(self.c);
        y
    }

    fn from_vector(t: f64, m: usize, n: usize, y: &[f64]) -> Self {
        let mn = m * n;
        Self { t, m, n, x: y[..mn].to_vec(), s: y[mn..mn + n].to_vec(), c: y[mn + n] }
    }

    pub fn is_finite(&self) -> bool {
        self.c.is_finite() && self.x.iter().chain(&self.s).all(|v| v.is_finite())
    }
}

/// `E = sqrt(Σ_i |x_i − s|² / m)`.
pub fn sync_error(state: &NetworkState) -> f64 {
    sync_error_raw(&state.x, &state.s, state.m, state.n)
}

fn sync_error_raw(x: &[f64], s: &[f64], m: usize, n: usize) -> f64 {
    let total: f64 = x.chunks_exact(n).map(|xi| xi.iter().zip(s).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()).sum();
    (total / m as f64).sqrt()
}

/// Right-hand side over the flat state `[X, s, c]` with scratch buffers.
struct ControlledNetwork<'a> {
    cfg: &'a SimulationConfig,
    pinned: usize,
    m: usize,
    n: usize,
    g: Option<CouplingFunction>,
    phi: Vec<f64>,
    phi_s: Vec<f64>,
    acc: Vec<f64>,
}

impl<'a> ControlledNetwork<'a> {
    fn new(cfg: &'a SimulationConfig, pinned: usize) -> Self {
        let (m, n) = (cfg.nodes(), cfg.dimension());
        let g = match cfg.mode {
            CouplingMode::Nonlinear(g) => Some(g),
            _ => None,
        };
        let phi_len = if g.is_some() { m * n } else { 0 };
        Self { cfg, pinned, m, n, g, phi: vec![0.0; phi_len], phi_s: vec![0.0; n], acc: vec![0.0; n] }
    }

    fn dim(&self) -> usize {
        self.m * self.n + self.n + 1
    }

    fn eval(&mut self, t: f64, y: &[f64], dy: &mut [f64]) {
        let (m, n) = (self.m, self.n);
        let mn = m * n;
        let cfg = self.cfg;
        let (x, rest) = y.split_at(mn);
        let s = &rest[..n];
        let c = rest[n];
        let control = match (cfg.mode, cfg.control) {
            (CouplingMode::AdaptiveLinear, ControlScaling::Fixed) => cfg.c0 * cfg.eps,
            _ => c * cfg.eps,
        };

        let phi: &[f64] = match self.g {
            Some(g) => {
                g.eval_into(x, &mut self.phi);
                g.eval_into(s, &mut self.phi_s);
                &self.phi
            }
            None => {
                self.phi_s.copy_from_slice(s);
                x
            }
        };

        let a = &cfg.coupling;
        let (dx, drest) = dy.split_at_mut(mn);
        for i in 0..m {
            let out = &mut dx[i * n..(i + 1) * n];
            cfg.oscillator.eval_into(&x[i * n..(i + 1) * n], t, out);
            let phi_i = &phi[i * n..(i + 1) * n];
            let d = a.diagonal(i);
            if n == 3 {
                // All shipped oscillators are three-dimensional.
                let mut acc = [d * phi_i[0], d * phi_i[1], d * phi_i[2]];
                for (j, w) in a.row(i) {
                    let pj = &phi[3 * j..3 * j + 3];
                    acc[0] += w * pj[0];
                    acc[1] += w * pj[1];
                    acc[2] += w * pj[2];
                }
                self.acc.copy_from_slice(&acc);
            } else {
                for k in 0..n {
                    self.acc[k] = d * phi_i[k];
                }
                for (j, w) in a.row(i) {
                    let phi_j = &phi[j * n..(j + 1) * n];
                    for k in 0..n {
                        self.acc[k] += w * phi_j[k];
                    }
                }
            }
            for k in 0..n {
                out[k] += c * self.acc[k];
            }
            if i == self.pinned {
                for k in 0..n {
                    out[k] -= control * (phi_i[k] - self.phi_s[k]);
                }
            }
        }

        cfg.oscillator.eval_into(s, t, &mut drest[..n]);
        drest[n] = if cfg.mode == CouplingMode::AdaptiveLinear {
            let mut sum = 0.0;
            for xi in x.chunks_exact(n) {
                for k in 0..n {
                    let d = xi[k] - s[k];
                    sum += cfg.p[k] * d * d;
                }
            }
            0.5 * cfg.adaptive_gain * sum
        } else {
            0.0
        };
    }
}

fn check_state_shape(config: &SimulationConfig, state: &NetworkState) -> Result<()> {
    let (m, n) = (config.nodes(), config.dimension());
    if state.m != m || state.n != n || state.x.len() != m * n || state.s.len() != n {
        return Err(Error::DimensionMismatch { expected: m * n + n, got: state.x.len() + state.s.len() });
    }
    if !state.is_finite() {
        return Err(Error::Diverged { time: state.t, stage: 0 });
    }
    Ok(())
}

/// Time derivative of `state`, returned as a [`NetworkState`] whose fields
/// hold `ẋ`, `ṡ`, and `ċ` (and `t` unchanged).
pub fn rhs(config: &SimulationConfig, pinned: usize, state: &NetworkState) -> Result<NetworkState> {
    check_state_shape(config, state)?;
    if pinned >= config.nodes() {
        return Err(Error::IndexOutOfRange { index: pinned, len: config.nodes() });
    }
    let mut sys = ControlledNetwork::new(config, pinned);
    let y = state.to_vector();
    let mut dy = vec![0.0; sys.dim()];
    sys.eval(state.t, &y, &mut dy);
    Ok(NetworkState::from_vector(state.t, state.m, state.n, &dy))
}

/// One RK4 step of the controlled network.
pub fn rk4_step(config: &SimulationConfig, pinned: usize, state: &NetworkState, dt: f64) -> Result<NetworkState> {
    check_state_shape(config, state)?;
    if pinned >= config.nodes() {
        return Err(Error::IndexOutOfRange { index: pinned, len: config.nodes() });
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid("dt", format!("must be positive, got {dt}")));
    }
    let mut sys = ControlledNetwork::new(config, pinned);
    let mut y = state.to_vector();
    let mut rk = Rk4::new(sys.dim());
    rk.step(|t, y, dy| sys.eval(t, y, dy), state.t, &mut y, dt)?;
    Ok(NetworkState::from_vector(state.t + dt, state.m, state.n, &y))
}

/// Sampled trajectory of a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub times: Vec<f64>,
    /// `E(t)` at each sample.
    pub sync_error: Vec<f64>,
    /// `c(t)` at each sample.
    pub coupling: Vec<f64>,
    pub final_state: NetworkState,
    pub pinned: usize,
    /// Time at which the run was cut short by a non-finite value or `E > 1e12`.
    pub diverged_at: Option<f64>,
    pub config_digest: String,
}

impl RunResult {
    pub fn diverged(&self) -> bool {
        self.diverged_at.is_some()
    }

    pub fn final_error(&self) -> f64 {
        *self.sync_error.last().unwrap()
    }

    pub fn final_coupling(&self) -> f64 {
        *self.coupling.last().unwrap()
    }

    /// Sample nearest to time `t`.
    pub fn sample_at(&self, t: f64) -> (f64, f64) {
        let k = self
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
            .map(|(k, _)| k)
            .unwrap();
        (self.sync_error[k], self.coupling[k])
    }
}

/// Initial state drawn as the run would: `s0` first, then every node.
pub fn initial_state(config: &SimulationConfig) -> Result<NetworkState> {
    config.validate()?;
    let (m, n) = (config.nodes(), config.dimension());
    let mut rng = stream_rng(config.seed, Stream::InitialState);
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
        config.init_box.iter().map(|&(lo, hi)| lo + (hi - lo) * rng.gen::<f64>()).collect()
    };
    let s = match &config.s0 {
        Some(s0) => s0.clone(),
        None => draw(&mut rng),
    };
    let x = match &config.x0 {
        Some(x0) => x0.clone(),
        None => (0..m).flat_map(|_| draw(&mut rng)).collect(),
    };
    let state = NetworkState { t: 0.0, m, n, x, s, c: config.c0 };
    if !state.is_finite() {
        return Err(Error::NonFinite { what: "initial state" });
    }
    Ok(state)
}

/// Integrates the controlled network from `t = 0` to `t_end`.
pub fn simulate(config: &SimulationConfig) -> Result<RunResult> {
    let start = initial_state(config)?;
    let structure = analyze_structure(&config.coupling);
    let pinned = select_pinned_node(&config.coupling, config.pin, &structure, config.seed)?;
    let (m, n) = (start.m, start.n);

    let mut sys = ControlledNetwork::new(config, pinned);
    let mut rk = Rk4::new(sys.dim());
    let mut y = start.to_vector();
    let mn = m * n;
    let steps = config.steps();
    let capacity = steps / config.sample_every + 2;
    let mut times = Vec::with_capacity(capacity);
    let mut errors = Vec::with_capacity(capacity);
    let mut coupling = Vec::with_capacity(capacity);

    let e0 = sync_error_raw(&y[..mn], &y[mn..mn + n], m, n);
    times.push(0.0);
    errors.push(e0);
    coupling.push(y[mn + n]);

    let mut diverged_at = None;
    let mut t = 0.0;
    for k in 1..=steps {
        let t_prev = (k - 1) as f64 * config.dt;
        if let Err(err) = rk.step(|t, y, dy| sys.eval(t, y, dy), t_prev, &mut y, config.dt) {
            match err {
                Error::Diverged { time, .. } => {
                    diverged_at = Some(time);
                    break;
                }
                other => return Err(other),
            }
        }
        t = k as f64 * config.dt;
        let e = sync_error_raw(&y[..mn], &y[mn..mn + n], m, n);
        if !(e <= DIVERGENCE_THRESHOLD) {
            diverged_at = Some(t);
        }
        if k % config.sample_every == 0 || k == steps || diverged_at.is_some() {
            times.push(t);
            errors.push(e);
            coupling.push(y[mn + n]);
        }
        if diverged_at.is_some() {
            break;
        }
    }
    if diverged_at.is_some() && *times.last().unwrap() != t {
        times.push(t);
        errors.push(sync_error_raw(&y[..mn], &y[mn..mn + n], m, n));
        coupling.push(y[mn + n]);
    }

    Ok(RunResult {
        times,
        sync_error: errors,
        coupling,
        final_state: NetworkState::from_vector(t, m, n, &y),
        pinned,
        diverged_at,
        config_digest: config.digest(),
    })
}
