use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::dynamics::{ControlScaling, CouplingMode, PinStrategy};
use crate::error::{invalid, Error, Result};
use crate::network::{GeneratorConfig, NetworkKind};
use crate::oscillators::{uniform_delta_grid, CouplingFunction, Oscillator, QuadSettings};
use crate::spectral::Theorem;

/// One experiment family: a network recipe, node dynamics, controller,
/// integration settings, and the seeds to sweep.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub seeds: Vec<u64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// A run counts as converged when the final `E` is below this.
    #[serde(default = "default_threshold")]
    pub convergence_threshold: f64,
    pub network: NetworkSpec,
    pub oscillator: OscillatorSpec,
    #[serde(default)]
    pub control: ControlSpec,
    #[serde(default)]
    pub integration: IntegrationSpec,
    #[serde(default)]
    pub checks: Option<ChecksSpec>,
    /// Directory of the spec file; relative network paths resolve against it.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_threshold() -> f64 {
    1e-3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NetworkSource {
    SmallWorld,
    RandomSparse,
    /// Triplet file named by `path`.
    File,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub kind: NetworkSource,
    pub m: Option<usize>,
    pub k: Option<usize>,
    pub p_rewire: Option<f64>,
    pub density: Option<f64>,
    pub symmetric: Option<bool>,
    pub weight_low: Option<f64>,
    pub weight_high: Option<f64>,
    /// Fixed network seed; by default each run seed also seeds the network.
    pub seed: Option<u64>,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OscillatorKind {
    Lorenz,
    Chen,
    Rossler,
    Chua,
    Linear,
}

/// Oscillator kind plus optional parameter overrides.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorSpec {
    pub kind: OscillatorKind,
    pub beta: Option<f64>,
    pub alpha: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub mu: Option<f64>,
    pub k: Option<f64>,
    pub l: Option<f64>,
    pub yz_term: Option<bool>,
    pub alt_sign: Option<bool>,
    /// Row-major `M` of the linear oscillator.
    pub matrix: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeSpec {
    Linear,
    Nonlinear,
    AdaptiveLinear,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSpec {
    #[serde(default = "default_mode")]
    pub mode: ModeSpec,
    #[serde(default = "default_c0")]
    pub c0: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_gain")]
    pub adaptive_gain: f64,
    /// Diagonal of `P`; defaults to ones.
    pub p: Option<Vec<f64>>,
    #[serde(default = "default_pin")]
    pub pin: PinStrategy,
    /// Coupling function for nonlinear mode.
    pub g: Option<CouplingFunction>,
    #[serde(default = "default_scaling")]
    pub scaling: ControlScaling,
}

fn default_mode() -> ModeSpec {
    ModeSpec::Linear
}
fn default_c0() -> f64 {
    1.0
}
fn default_eps() -> f64 {
    100.0
}
fn default_gain() -> f64 {
    1.0
}
fn default_pin() -> PinStrategy {
    PinStrategy::MaxColumnSum
}
fn default_scaling() -> ControlScaling {
    ControlScaling::WithCoupling
}

impl Default for ControlSpec {
    fn default() -> Self {
        Self {
            mode: default_mode(),
            c0: default_c0(),
            eps: default_eps(),
            adaptive_gain: default_gain(),
            p: None,
            pin: default_pin(),
            g: None,
            scaling: default_scaling(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationSpec {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_sample_every")]
    pub sample_every: usize,
    /// `[lo, hi]` per state dimension; the oscillator default otherwise.
    pub init_box: Option<Vec<[f64; 2]>>,
    pub s0: Option<Vec<f64>>,
}

fn default_dt() -> f64 {
    1e-3
}
fn default_t_end() -> f64 {
    10.0
}
fn default_sample_every() -> usize {
    100
}

impl Default for IntegrationSpec {
    fn default() -> Self {
        Self {
            dt: default_dt(),
            t_end: default_t_end(),
            sample_every: default_sample_every(),
            init_box: None,
            s0: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksSpec {
    /// Any of `T1`, `T2`, `T3`, `T4`.
    pub criteria: Vec<String>,
    /// Coupling strength to test; defaults to `control.c0`.
    pub c: Option<f64>,
    /// Explicit `Δ` diagonal. Exclusive with `quad`.
    pub delta: Option<Vec<f64>>,
    pub quad: Option<QuadSpec>,
    /// Margin of the local criterion.
    #[serde(default = "default_eta")]
    pub eta: f64,
    /// Horizon of the local criterion.
    #[serde(default = "default_horizon")]
    pub horizon: f64,
}

fn default_eta() -> f64 {
    0.1
}
fn default_horizon() -> f64 {
    100.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadSpec {
    #[serde(default = "default_quad_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// Sampling box; the oscillator's initial-state box otherwise.
    #[serde(rename = "box")]
    pub bounds: Option<Vec<[f64; 2]>>,
    pub p: Option<Vec<f64>>,
    /// Candidate values `δ` for `Δ = δ I`.
    pub grid: Option<Vec<f64>>,
}

fn default_quad_samples() -> usize {
    100_000
}

impl ExperimentSpec {
    /// Parses TOML text. Syntax and schema errors carry the line number.
    pub fn parse(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1).unwrap_or(0);
            Error::Parse { line, message: e.message().to_string() }
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut spec = Self::parse(&text)?;
        spec.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(invalid("name", "must not be empty"));
        }
        if self.name.contains(['/', '\\']) {
            return Err(invalid("name", "must not contain path separators"));
        }
        if self.seeds.is_empty() {
            return Err(invalid("seeds", "need at least one seed"));
        }
        if !(self.convergence_threshold > 0.0) {
            return Err(invalid("convergence_threshold", "must be positive"));
        }
        if self.network.kind == NetworkSource::File && self.network.path.is_none() {
            return Err(invalid("network.path", "required for kind = \"file\""));
        }
        if self.network.kind != NetworkSource::File && self.network.m.is_none() {
            return Err(invalid("network.m", "required for generated networks"));
        }
        if (self.control.mode == ModeSpec::Nonlinear) != self.control.g.is_some() {
            return Err(invalid("control.g", "required in nonlinear mode and only there"));
        }
        let osc = self.oscillator()?;
        let n = osc.dimension();
        if let Some(b) = &self.integration.init_box {
            if b.len() != n {
                return Err(invalid("integration.init_box", format!("need {n} intervals")));
            }
        }
        if let Some(checks) = &self.checks {
            for c in &checks.criteria {
                c.parse::<Theorem>().map_err(|_| invalid("checks.criteria", format!("unknown criterion {c:?}")))?;
            }
            if checks.delta.is_some() && checks.quad.is_some() {
                return Err(invalid("checks", "give either delta or quad, not both"));
            }
            if let Some(d) = &checks.delta {
                if d.len() != n {
                    return Err(invalid("checks.delta", format!("need {n} entries")));
                }
            }
        }
        Ok(())
    }

    /// The oscillator with overrides applied.
    pub fn oscillator(&self) -> Result<Oscillator> {
        let o = &self.oscillator;
        let unexpected = |allowed: &[&str]| -> Result<()> {
            let given = [
                ("beta", o.beta.is_some()),
                ("alpha", o.alpha.is_some()),
                ("a", o.a.is_some()),
                ("b", o.b.is_some()),
                ("c", o.c.is_some()),
                ("mu", o.mu.is_some()),
                ("k", o.k.is_some()),
                ("l", o.l.is_some()),
                ("yz_term", o.yz_term.is_some()),
                ("alt_sign", o.alt_sign.is_some()),
                ("matrix", o.matrix.is_some()),
            ];
            match given.iter().find(|(name, set)| *set && !allowed.contains(name)) {
                Some((name, _)) => Err(invalid("oscillator", format!("parameter {name} does not apply to this kind"))),
                None => Ok(()),
            }
        };
        let osc = match o.kind {
            OscillatorKind::Lorenz => {
                unexpected(&["beta", "alpha", "b"])?;
                let Oscillator::Lorenz { beta, alpha, b } = Oscillator::lorenz() else { unreachable!() };
                Oscillator::Lorenz {
                    beta: o.beta.unwrap_or(beta),
                    alpha: o.alpha.unwrap_or(alpha),
                    b: o.b.unwrap_or(b),
                }
            }
            OscillatorKind::Chen => {
                unexpected(&["a", "b", "c", "yz_term"])?;
                let Oscillator::Chen { a, b, c, yz_term } = Oscillator::chen() else { unreachable!() };
                Oscillator::Chen {
                    a: o.a.unwrap_or(a),
                    b: o.b.unwrap_or(b),
                    c: o.c.unwrap_or(c),
                    yz_term: o.yz_term.unwrap_or(yz_term),
                }
            }
            OscillatorKind::Rossler => {
                unexpected(&["mu", "alt_sign"])?;
                let Oscillator::Rossler { mu, alt_sign } = Oscillator::rossler() else { unreachable!() };
                Oscillator::Rossler { mu: o.mu.unwrap_or(mu), alt_sign: o.alt_sign.unwrap_or(alt_sign) }
            }
            OscillatorKind::Chua => {
                unexpected(&["k", "l"])?;
                let Oscillator::Chua { k, l } = Oscillator::chua() else { unreachable!() };
                Oscillator::Chua { k: o.k.unwrap_or(k), l: o.l.unwrap_or(l) }
            }
            OscillatorKind::Linear => {
                unexpected(&["matrix"])?;
                let rows =
                    o.matrix.as_ref().ok_or_else(|| invalid("oscillator.matrix", "required for kind = \"linear\""))?;
                let n = rows.len();
                if rows.iter().any(|r| r.len() != n) {
                    return Err(invalid("oscillator.matrix", "must be square"));
                }
                Oscillator::Linear { n, matrix: rows.concat() }
            }
        };
        osc.validate()?;
        Ok(osc)
    }

    pub fn mode(&self) -> Result<CouplingMode> {
        Ok(match self.control.mode {
            ModeSpec::Linear => CouplingMode::Linear,
            ModeSpec::AdaptiveLinear => CouplingMode::AdaptiveLinear,
            ModeSpec::Nonlinear => {
                let g = self.control.g.ok_or_else(|| invalid("control.g", "required in nonlinear mode"))?;
                g.validate()?;
                CouplingMode::Nonlinear(g)
            }
        })
    }

    /// Generator settings for run seed `seed`, or `None` for file networks.
    pub fn generator(&self, seed: u64) -> Option<GeneratorConfig> {
        let net = &self.network;
        let m = net.m?;
        let seed = net.seed.unwrap_or(seed);
        let mut g = match net.kind {
            NetworkSource::SmallWorld => GeneratorConfig::small_world(m, seed),
            NetworkSource::RandomSparse => GeneratorConfig::random_sparse(m, net.density.unwrap_or(0.2), seed),
            NetworkSource::File => return None,
        };
        if g.kind == NetworkKind::SmallWorld {
            g.density = net.density.unwrap_or(g.density);
        }
        g.k = net.k.unwrap_or(g.k);
        g.p_rewire = net.p_rewire.unwrap_or(g.p_rewire);
        g.symmetric = net.symmetric.unwrap_or(g.symmetric);
        g.weight_low = net.weight_low.unwrap_or(g.weight_low);
        g.weight_high = net.weight_high.unwrap_or(g.weight_high);
        Some(g)
    }

    /// Resolved triplet-file path for file networks.
    pub fn network_path(&self) -> Option<PathBuf> {
        self.network.path.as_ref().map(|p| if p.is_absolute() { p.clone() } else { self.base_dir.join(p) })
    }

    /// QUAD settings when the spec asks for an estimate.
    pub fn quad_settings(&self, osc: &Oscillator) -> Option<QuadSettings> {
        let q = self.checks.as_ref()?.quad.as_ref()?;
        let n = osc.dimension();
        let bounds = match &q.bounds {
            Some(b) => b.iter().map(|&[lo, hi]| (lo, hi)).collect(),
            None => osc.default_init_box(),
        };
        let mut s = QuadSettings::new(n, bounds);
        s.samples = q.samples;
        s.seed = q.seed;
        if let Some(p) = &q.p {
            s.p = p.clone();
        }
        if let Some(grid) = &q.grid {
            s.delta_grid = uniform_delta_grid(grid, n);
        }
        Some(s)
    }

    pub fn requested_criteria(&self) -> Vec<Theorem> {
        self.checks.as_ref().map(|c| c.criteria.iter().filter_map(|s| s.parse().ok()).collect()).unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "demo"
seeds = [1, 2]

[network]
kind = "small-world"
m = 20
k = 2

[oscillator]
kind = "lorenz"
"#;

    #[test]
    fn minimal_spec_gets_defaults() {
        let s = ExperimentSpec::parse(MINIMAL).unwrap();
        assert_eq!(s.control.eps, 100.0);
        assert_eq!(s.integration.dt, 1e-3);
        assert_eq!(s.convergence_threshold, 1e-3);
        assert_eq!(s.oscillator().unwrap(), Oscillator::lorenz());
        let g = s.generator(5).unwrap();
        assert_eq!((g.m, g.k, g.seed), (20, 2, 5));
    }

    #[test]
    fn overrides_apply() {
        let text = MINIMAL.replace("kind = \"lorenz\"", "kind = \"chen\"\nyz_term = true\nc = 20.0");
        let s = ExperimentSpec::parse(&text).unwrap();
        assert_eq!(s.oscillator().unwrap(), Oscillator::Chen { a: 35.0, b: 3.0, c: 20.0, yz_term: true });
    }

    #[test]
    fn foreign_parameter_rejected() {
        let text = MINIMAL.replace("kind = \"lorenz\"", "kind = \"lorenz\"\nmu = 3.0");
        assert!(matches!(ExperimentSpec::parse(&text), Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn unknown_key_reports_line() {
        let text = MINIMAL.replace("k = 2", "k = 2\nbogus = 1");
        match ExperimentSpec::parse(&text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 9, "{message}");
                assert!(message.contains("bogus"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_value_type_reports_line() {
        let text = MINIMAL.replace("m = 20", "m = \"twenty\"");
        assert!(matches!(ExperimentSpec::parse(&text), Err(Error::Parse { line: 7, .. })));
    }

    #[test]
    fn empty_seed_list_rejected() {
        let text = MINIMAL.replace("[1, 2]", "[]");
        assert!(matches!(ExperimentSpec::parse(&text), Err(Error::InvalidParameter { field: "seeds", .. })));
    }

    #[test]
    fn explicit_pin_and_nonlinear_mode() {
        let text = format!(
            "{MINIMAL}\n[control]\nmode = \"nonlinear\"\npin = {{ explicit = 3 }}\ng = {{ kind = \"affine-sine\", a = 2.0, b = 1.0 }}\n"
        );
        let s = ExperimentSpec::parse(&text).unwrap();
        assert_eq!(s.control.pin, PinStrategy::Explicit(3));
        assert_eq!(s.mode().unwrap(), CouplingMode::Nonlinear(CouplingFunction::AffineSine { a: 2.0, b: 1.0 }));
    }
}
