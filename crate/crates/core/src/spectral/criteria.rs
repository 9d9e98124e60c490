use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use super::{left_perron, pin, symmetric_eigenvalues, weighted_symmetric_part, SYMMETRY_TOLERANCE};
use crate::dynamics::Rk4;
use crate::error::{invalid, Error, Result};
use crate::network::{analyze_structure, CouplingMatrix};
use crate::oscillators::Oscillator;

/// A margin counts as negative only below this value.
pub const STRICT_MARGIN: f64 = -1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem {
    T1Local,
    T2Symmetric,
    T3Asymmetric,
    T4Nonlinear,
}

impl Theorem {
    pub fn name(self) -> &'static str {
        match self {
            Theorem::T1Local => "T1-local",
            Theorem::T2Symmetric => "T2-symmetric",
            Theorem::T3Asymmetric => "T3-asymmetric",
            Theorem::T4Nonlinear => "T4-nonlinear",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "T1" | "T1-LOCAL" => Ok(Theorem::T1Local),
            "T2" | "T2-SYMMETRIC" => Ok(Theorem::T2Symmetric),
            "T3" | "T3-ASYMMETRIC" => Ok(Theorem::T3Asymmetric),
            "T4" | "T4-NONLINEAR" => Ok(Theorem::T4Nonlinear),
            _ => Err(invalid("theorem", format!("unknown criterion {s:?}"))),
        }
    }
}

/// The global criteria, which need a QUAD `Δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlobalCriterion {
    Symmetric,
    Asymmetric,
    Nonlinear,
}

impl GlobalCriterion {
    pub fn theorem(self) -> Theorem {
        match self {
            GlobalCriterion::Symmetric => Theorem::T2Symmetric,
            GlobalCriterion::Asymmetric => Theorem::T3Asymmetric,
            GlobalCriterion::Nonlinear => Theorem::T4Nonlinear,
        }
    }
}

/// The spectral quantity a criterion was evaluated with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralInput {
    /// Largest eigenvalue of `Ã`.
    Lambda1(f64),
    /// Largest eigenvalue of `{ΞÃ}ˢ`, with `ξ` scaled to `max ξ_i = 1`.
    MuMax(f64),
}

impl SpectralInput {
    pub fn value(self) -> f64 {
        match self {
            SpectralInput::Lambda1(v) | SpectralInput::MuMax(v) => v,
        }
    }

    fn key(self) -> &'static str {
        match self {
            SpectralInput::Lambda1(_) => "lambda1",
            SpectralInput::MuMax(_) => "mu_max",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub theorem: Theorem,
    pub satisfied: bool,
    /// One margin per state dimension for the global criteria; the single
    /// value `max μ(t) + cλ₁ + η` for the local one.
    pub margins: Vec<f64>,
    pub spectral: SpectralInput,
    pub eps: f64,
    pub c: f64,
    pub pinned: usize,
    /// `max_t μ(t)` of the local check.
    pub max_mu: Option<f64>,
    pub details: String,
}

impl CriterionReport {
    fn new(theorem: Theorem, margins: Vec<f64>, spectral: SpectralInput, eps: f64, c: f64, pinned: usize) -> Self {
        let satisfied = margins.iter().all(|&m| m < STRICT_MARGIN);
        Self { theorem, satisfied, margins, spectral, eps, c, pinned, max_mu: None, details: String::new() }
    }

    pub fn worst_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `key=value` lines.
    pub fn to_record(&self) -> String {
        let margins: Vec<String> = self.margins.iter().map(|m| format!("{m:e}")).collect();
        let mut out = format!(
            "theorem={}\nsatisfied={}\n{}={:e}\nmargins={}\neps={:e}\nc={:e}\npinned={}\n",
            self.theorem,
            self.satisfied,
            self.spectral.key(),
            self.spectral.value(),
            margins.join(","),
            self.eps,
            self.c,
            self.pinned,
        );
        if let Some(mu) = self.max_mu {
            out.push_str(&format!("max_mu={mu:e}\n"));
        }
        if !self.details.is_empty() {
            out.push_str(&format!("details={}\n", self.details.replace('\n', " ")));
        }
        out
    }

    /// Inverse of [`CriterionReport::to_record`]. Unknown keys are ignored.
    pub fn from_record(text: &str) -> Result<Self> {
        let mut theorem = None;
        let mut satisfied = None;
        let mut spectral = None;
        let mut margins = None;
        let (mut eps, mut c, mut pinned) = (None, None, None);
        let mut max_mu = None;
        let mut details = String::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: line_no, message: format!("expected key=value, got {line:?}") })?;
            let num = |v: &str| -> Result<f64> {
                v.trim()
                    .parse()
                    .map_err(|_| Error::Parse { line: line_no, message: format!("bad number {v:?} for {key}") })
            };
            match key {
                "theorem" => {
                    theorem = Some(
                        value.parse::<Theorem>().map_err(|e| Error::Parse { line: line_no, message: e.to_string() })?,
                    )
                }
                "satisfied" => {
                    satisfied = Some(
                        value
                            .parse::<bool>()
                            .map_err(|_| Error::Parse { line: line_no, message: format!("bad flag {value:?}") })?,
                    )
                }
                "lambda1" => spectral = Some(SpectralInput::Lambda1(num(value)?)),
                "mu_max" => spectral = Some(SpectralInput::MuMax(num(value)?)),
                "margins" => {
                    margins = Some(if value.is_empty() {
                        Vec::new()
                    } else {
                        value.split(',').map(num).collect::<Result<Vec<_>>>()?
                    })
                }
                "eps" => eps = Some(num(value)?),
                "c" => c = Some(num(value)?),
                "pinned" => {
                    pinned = Some(
                        value
                            .parse::<usize>()
                            .map_err(|_| Error::Parse { line: line_no, message: format!("bad index {value:?}") })?,
                    )
                }
                "max_mu" => max_mu = Some(num(value)?),
                "details" => details = value.to_string(),
                _ => {}
            }
        }
        let missing = |k: &str| Error::Parse { line: 0, message: format!("missing key {k}") };
        Ok(Self {
            theorem: theorem.ok_or_else(|| missing("theorem"))?,
            satisfied: satisfied.ok_or_else(|| missing("satisfied"))?,
            margins: margins.ok_or_else(|| missing("margins"))?,
            spectral: spectral.ok_or_else(|| missing("lambda1 or mu_max"))?,
            eps: eps.ok_or_else(|| missing("eps"))?,
            c: c.ok_or_else(|| missing("c"))?,
            pinned: pinned.ok_or_else(|| missing("pinned"))?,
            max_mu,
            details,
        })
    }
}

fn require_symmetric_irreducible(a: &CouplingMatrix) -> Result<()> {
    if !a.is_symmetric(SYMMETRY_TOLERANCE) {
        let deviation = a.asymmetry();
        return Err(Error::Asymmetric { deviation, tolerance: SYMMETRY_TOLERANCE * a.inf_norm() });
    }
    let structure = analyze_structure(a);
    if !structure.irreducible {
        return Err(Error::Reducible { components: structure.components.len() });
    }
    Ok(())
}

/// `λ₁(Ã)` of a symmetric irreducible coupling matrix.
pub(crate) fn pinned_lambda1(a: &CouplingMatrix, eps: f64, pinned: usize) -> Result<f64> {
    require_symmetric_irreducible(a)?;
    let p = pin(a, eps, pinned)?;
    Ok(symmetric_eigenvalues(&p.to_dense())?.largest())
}

/// Evaluates a global criterion with the QUAD diagonal `delta`.
///
/// * symmetric: `Δ_k + c λ₁(Ã)`
/// * asymmetric: `Δ_k + c μ_max({ΞÃ}ˢ)`
/// * nonlinear: `Δ_k + α c λ₁(Ã)`, with `α = alpha_lower`
///
/// For the asymmetric case the largest eigenvalue of `{ΞÃ}ˢ` is used; all
/// its eigenvalues are negative once a node is pinned.
pub fn check_global_criterion(
    kind: GlobalCriterion,
    a: &CouplingMatrix,
    eps: f64,
    pinned: usize,
    c: f64,
    delta: &[f64],
    alpha_lower: f64,
) -> Result<CriterionReport> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(invalid("c", format!("coupling strength must be finite and >= 0, got {c}")));
    }
    if delta.is_empty() || delta.iter().any(|d| !d.is_finite()) {
        return Err(invalid("delta", "need a nonempty finite diagonal"));
    }
    let (spectral, scale) = match kind {
        GlobalCriterion::Symmetric => (SpectralInput::Lambda1(pinned_lambda1(a, eps, pinned)?), c),
        GlobalCriterion::Nonlinear => {
            if !(alpha_lower > 0.0 && alpha_lower.is_finite()) {
                return Err(invalid("alpha_lower", format!("must be positive, got {alpha_lower}")));
            }
            (SpectralInput::Lambda1(pinned_lambda1(a, eps, pinned)?), alpha_lower * c)
        }
        GlobalCriterion::Asymmetric => {
            // The proof needs `[Ξ(cÃ + Δ_k I)]ˢ < 0`. With `max ξ_i = 1` we have
            // `Δ_k Ξ <= Δ_k I`, so `Δ_k + c μ_max < 0` is sufficient, and for
            // symmetric `A` the test coincides with the symmetric one.
            let xi = left_perron(a)?.unit_max();
            let p = pin(a, eps, pinned)?;
            let w = weighted_symmetric_part(&xi, &p)?;
            (SpectralInput::MuMax(symmetric_eigenvalues(&w)?.largest()), c)
        }
    };
    let margins = delta.iter().map(|d| d + scale * spectral.value()).collect();
    let mut report = CriterionReport::new(kind.theorem(), margins, spectral, eps, c, pinned);
    report.details = format!("{} {:.6e}, worst margin {:.6e}", spectral.key(), spectral.value(), report.worst_margin());
    Ok(report)
}

/// Parameters of the local criterion check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalCheck {
    pub c: f64,
    pub eps: f64,
    pub pinned: usize,
    pub eta: f64,
    /// Length of the sampled target trajectory.
    pub horizon: f64,
    pub dt: f64,
}

impl LocalCheck {
    /// Horizon 100 at `dt = 1e-3`.
    pub fn new(c: f64, eps: f64, pinned: usize, eta: f64) -> Self {
        Self { c, eps, pinned, eta, horizon: 100.0, dt: 1e-3 }
    }
}

/// Largest eigenvalue of the symmetric part of `Df(s)`.
pub(crate) fn jacobian_mu(osc: &Oscillator, s: &[f64], jac: &mut [f64], sym: &mut DMatrix<f64>) -> f64 {
    let n = s.len();
    osc.jacobian_into(s, jac);
    for i in 0..n {
        for j in 0..n {
            sym[(i, j)] = 0.5 * (jac[i * n + j] + jac[j * n + i]);
        }
    }
    sym.clone().symmetric_eigenvalues().max()
}

/// Integrates `ṡ = f(s)` over `[0, horizon]` and tests
/// `max_t μ(t) < −cλ₁(Ã) − η`, where `μ(t)` is the largest eigenvalue of the
/// symmetric part of `Df(s(t))`. Only a finite horizon can be sampled, so a
/// positive answer means "satisfied over `[0, horizon]`".
pub fn check_local_criterion(
    osc: &Oscillator,
    s0: &[f64],
    a: &CouplingMatrix,
    check: &LocalCheck,
) -> Result<CriterionReport> {
    osc.validate()?;
    let n = osc.dimension();
    if s0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: s0.len() });
    }
    if s0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { what: "initial target state" });
    }
    if !(check.dt > 0.0 && check.dt.is_finite()) {
        return Err(invalid("dt", format!("must be positive, got {}", check.dt)));
    }
    if !(check.horizon >= 0.0 && check.horizon.is_finite()) {
        return Err(invalid("horizon", format!("must be finite and >= 0, got {}", check.horizon)));
    }
    if !(check.eta > 0.0 && check.eta.is_finite()) {
        return Err(invalid("eta", format!("must be positive, got {}", check.eta)));
    }
    if !(check.c >= 0.0 && check.c.is_finite()) {
        return Err(invalid("c", format!("must be finite and >= 0, got {}", check.c)));
    }
    let lambda1 = pinned_lambda1(a, check.eps, check.pinned)?;

    let mut s = s0.to_vec();
    let mut jac = vec![0.0; n * n];
    let mut sym = DMatrix::zeros(n, n);
    let mut rk = Rk4::new(n);
    let steps = (check.horizon / check.dt).round() as usize;
    let mut max_mu = jacobian_mu(osc, &s, &mut jac, &mut sym);
    for k in 0..steps {
        rk.step(|t, y, dy| osc.eval_into(y, t, dy), k as f64 * check.dt, &mut s, check.dt)?;
        max_mu = max_mu.max(jacobian_mu(osc, &s, &mut jac, &mut sym));
    }

    let threshold = -check.c * lambda1 - check.eta;
    let margin = max_mu - threshold;
    let mut report = CriterionReport::new(
        Theorem::T1Local,
        vec![margin],
        SpectralInput::Lambda1(lambda1),
        check.eps,
        check.c,
        check.pinned,
    );
    report.max_mu = Some(max_mu);
    report.details =
        format!("max mu(t) {max_mu:.6e} against threshold {threshold:.6e}; sampled over [0, {}] only", check.horizon);
    Ok(report)
}
