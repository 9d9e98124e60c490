//! Spec-driven experiment pipelines: `run` (simulate every seed and write
//! traces), `check` (criterion reports only) and `gen` (emit the network).
//!
//! Output files for a spec named `name`:
//!
//! * `<name>-<seed>.csv` with header `t,E,c`, one row per sample;
//! * `<name>-<seed>.report`, `key=value` sections with the criterion
//!   reports and the final state of the run;
//! * `<name>-summary.csv` with `seed,final_E,final_c,converged`.

mod spec;

use std::fmt::Write as _;
use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::dynamics::{initial_state, select_pinned_node, simulate, RunResult, SimulationConfig};
use crate::error::{invalid, Error, Result};
use crate::network::{analyze_structure, generate, CouplingMatrix, NetworkStructure};
use crate::oscillators::{estimate_quad, CouplingFunction, Oscillator, QuadEstimate};
use crate::spectral::{
    check_global_criterion, check_local_criterion, CriterionReport, GlobalCriterion, LocalCheck, Theorem,
};

pub use spec::{
    ChecksSpec, ControlSpec, ExperimentSpec, IntegrationSpec, ModeSpec, NetworkSource, NetworkSpec, OscillatorKind,
    OscillatorSpec, QuadSpec,
};

/// Node count imposed by `--desk-scale`.
pub const DESK_SCALE_NODES: usize = 100;

/// Command-line adjustments applied on top of a spec.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    /// Replace the spec's seed list with this single seed.
    pub seed_override: Option<u64>,
    pub out_dir: Option<PathBuf>,
    /// Force `m = 100` on generated networks.
    pub desk_scale: bool,
}

impl RunOptions {
    /// The spec with the options applied.
    pub fn apply(&self, spec: &ExperimentSpec) -> Result<ExperimentSpec> {
        let mut spec = spec.clone();
        if let Some(seed) = self.seed_override {
            spec.seeds = vec![seed];
        }
        if let Some(dir) = &self.out_dir {
            spec.output_dir = dir.clone();
        }
        if self.desk_scale {
            if spec.network.kind == NetworkSource::File {
                return Err(invalid("desk_scale", "a network read from file cannot be rescaled"));
            }
            spec.network.m = Some(DESK_SCALE_NODES);
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Process exit status for an error: 2 for spec problems, 3 for I/O, 1 for
/// everything else (criterion preconditions, numerical failures).
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::InvalidParameter { .. } => 2,
        Error::Io(_) => 3,
        _ => 1,
    }
}

/// Network and pinned node for one seed.
#[derive(Debug, Clone)]
pub struct PreparedNetwork {
    pub matrix: CouplingMatrix,
    pub structure: NetworkStructure,
    pub pinned: usize,
}

pub fn build_network(spec: &ExperimentSpec, seed: u64) -> Result<CouplingMatrix> {
    match spec.generator(seed) {
        Some(g) => generate(&g),
        None => {
            let path = spec.network_path().ok_or_else(|| invalid("network.path", "missing"))?;
            let file =
                fs::File::open(&path).map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
            CouplingMatrix::read_triplets(BufReader::new(file))
        }
    }
}

pub fn prepare_network(spec: &ExperimentSpec, seed: u64) -> Result<PreparedNetwork> {
    let matrix = build_network(spec, seed)?;
    let structure = analyze_structure(&matrix);
    let pinned = select_pinned_node(&matrix, spec.control.pin, &structure, seed)?;
    Ok(PreparedNetwork { matrix, structure, pinned })
}

/// Simulation settings for one seed on a prepared network.
pub fn simulation_config(spec: &ExperimentSpec, matrix: CouplingMatrix, seed: u64) -> Result<SimulationConfig> {
    let osc = spec.oscillator()?;
    let mut cfg = SimulationConfig::new(osc, matrix);
    cfg.mode = spec.mode()?;
    cfg.c0 = spec.control.c0;
    cfg.eps = spec.control.eps;
    cfg.adaptive_gain = spec.control.adaptive_gain;
    if let Some(p) = &spec.control.p {
        cfg.p = p.clone();
    }
    cfg.pin = spec.control.pin;
    cfg.control = spec.control.scaling;
    cfg.dt = spec.integration.dt;
    cfg.t_end = spec.integration.t_end;
    cfg.sample_every = spec.integration.sample_every;
    cfg.seed = seed;
    if let Some(b) = &spec.integration.init_box {
        cfg.init_box = b.iter().map(|&[lo, hi]| (lo, hi)).collect();
    }
    cfg.s0 = spec.integration.s0.clone();
    cfg.validate()?;
    Ok(cfg)
}

/// `Δ` for the global criteria: explicit, or a QUAD estimate.
pub fn resolve_delta(spec: &ExperimentSpec, osc: &Oscillator) -> Result<Option<(Vec<f64>, Option<QuadEstimate>)>> {
    let Some(checks) = &spec.checks else { return Ok(None) };
    if let Some(d) = &checks.delta {
        return Ok(Some((d.clone(), None)));
    }
    match spec.quad_settings(osc) {
        Some(settings) => {
            let q = estimate_quad(osc, &settings)?;
            Ok(Some((q.delta.clone(), Some(q))))
        }
        None => Ok(None),
    }
}

fn alpha_lower(spec: &ExperimentSpec) -> f64 {
    spec.control.g.map(|g| g.alpha_lower()).unwrap_or(CouplingFunction::Identity.alpha_lower())
}

/// Evaluates one requested criterion.
pub fn evaluate_criterion(
    spec: &ExperimentSpec,
    theorem: Theorem,
    net: &PreparedNetwork,
    delta: Option<&[f64]>,
    s0: &[f64],
) -> Result<CriterionReport> {
    let checks = spec.checks.as_ref().ok_or_else(|| invalid("checks", "no checks requested"))?;
    let c = checks.c.unwrap_or(spec.control.c0);
    let eps = spec.control.eps;
    let global = |kind: GlobalCriterion| -> Result<CriterionReport> {
        let delta = delta.ok_or_else(|| invalid("checks", format!("{theorem} needs delta or quad settings")))?;
        check_global_criterion(kind, &net.matrix, eps, net.pinned, c, delta, alpha_lower(spec))
    };
    match theorem {
        Theorem::T2Symmetric => global(GlobalCriterion::Symmetric),
        Theorem::T3Asymmetric => global(GlobalCriterion::Asymmetric),
        Theorem::T4Nonlinear => {
            if spec.control.g.is_none() {
                return Err(invalid("control.g", "T4 needs a coupling function"));
            }
            global(GlobalCriterion::Nonlinear)
        }
        Theorem::T1Local => {
            let mut local = LocalCheck::new(c, eps, net.pinned, checks.eta);
            local.horizon = checks.horizon;
            local.dt = spec.integration.dt;
            check_local_criterion(&spec.oscillator()?, s0, &net.matrix, &local)
        }
    }
}

/// Criterion outcome as recorded in reports: a report or the reason the
/// criterion could not be evaluated.
pub type CheckOutcome = (Theorem, std::result::Result<CriterionReport, String>);

fn run_checks(spec: &ExperimentSpec, net: &PreparedNetwork, delta: Option<&[f64]>, s0: &[f64]) -> Vec<CheckOutcome> {
    spec.requested_criteria()
        .into_iter()
        .map(|t| (t, evaluate_criterion(spec, t, net, delta, s0).map_err(|e| e.to_string())))
        .collect()
}

/// Everything produced for one seed.
#[derive(Debug, Clone)]
pub struct SeedRun {
    pub seed: u64,
    pub pinned: usize,
    pub checks: Vec<CheckOutcome>,
    pub result: RunResult,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub runs: Vec<SeedRun>,
    pub quad: Option<QuadEstimate>,
    pub files: Vec<PathBuf>,
}

fn run_seed(spec: &ExperimentSpec, seed: u64, delta: Option<&[f64]>) -> Result<SeedRun> {
    let net = prepare_network(spec, seed)?;
    let cfg = simulation_config(spec, net.matrix.clone(), seed)?;
    let s0 = initial_state(&cfg)?.s;
    let checks = run_checks(spec, &net, delta, &s0);
    let result = simulate(&cfg)?;
    let final_e = result.final_error();
    let converged = !result.diverged() && final_e < spec.convergence_threshold;
    Ok(SeedRun { seed, pinned: net.pinned, checks, result, converged })
}

/// Runs every seed (in parallel) and writes the per-seed and summary files.
pub fn run(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let osc = spec.oscillator()?;
    let resolved = resolve_delta(spec, &osc)?;
    let delta = resolved.as_ref().map(|(d, _)| d.as_slice());
    let runs = spec.seeds.par_iter().map(|&seed| run_seed(spec, seed, delta)).collect::<Result<Vec<_>>>()?;

    fs::create_dir_all(&spec.output_dir)?;
    let mut files = Vec::new();
    for run in &runs {
        let csv = spec.output_dir.join(format!("{}-{}.csv", spec.name, run.seed));
        write_file(&csv, |w| write_trace(w, &run.result))?;
        files.push(csv);
        let report = spec.output_dir.join(format!("{}-{}.report", spec.name, run.seed));
        let quad = resolved.as_ref().and_then(|(_, q)| q.as_ref());
        write_file(&report, |w| w.write_all(seed_report(spec, run, quad).as_bytes()).map_err(Error::from))?;
        files.push(report);
    }
    let summary = spec.output_dir.join(format!("{}-summary.csv", spec.name));
    write_file(&summary, |w| {
        writeln!(w, "seed,final_E,final_c,converged")?;
        for run in &runs {
            writeln!(
                w,
                "{},{:.16e},{:.16e},{}",
                run.seed,
                run.result.final_error(),
                run.result.final_coupling(),
                run.converged
            )?;
        }
        Ok(())
    })?;
    files.push(summary);
    Ok(ExperimentOutcome { runs, quad: resolved.and_then(|(_, q)| q), files })
}

/// Criterion reports for every seed, without simulating. Fails on the first
/// criterion whose preconditions do not hold.
pub fn check(spec: &ExperimentSpec) -> Result<Vec<(u64, Vec<CriterionReport>)>> {
    spec.validate()?;
    if spec.requested_criteria().is_empty() {
        return Err(invalid("checks.criteria", "nothing to check"));
    }
    let osc = spec.oscillator()?;
    let resolved = resolve_delta(spec, &osc)?;
    let delta = resolved.as_ref().map(|(d, _)| d.as_slice());
    spec.seeds
        .iter()
        .map(|&seed| {
            let net = prepare_network(spec, seed)?;
            let cfg = simulation_config(spec, net.matrix.clone(), seed)?;
            let s0 = initial_state(&cfg)?.s;
            let reports = spec
                .requested_criteria()
                .into_iter()
                .map(|t| evaluate_criterion(spec, t, &net, delta, &s0))
                .collect::<Result<Vec<_>>>()?;
            Ok((seed, reports))
        })
        .collect()
}

/// Writes `<name>-<seed>.check` files for the reports of [`check`].
pub fn write_check_reports(spec: &ExperimentSpec, reports: &[(u64, Vec<CriterionReport>)]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(&spec.output_dir)?;
    let mut files = Vec::new();
    for (seed, list) in reports {
        let path = spec.output_dir.join(format!("{}-{}.check", spec.name, seed));
        let text: Vec<String> = list.iter().map(|r| format!("[check]\n{}", r.to_record())).collect();
        write_file(&path, |w| w.write_all(text.join("\n").as_bytes()).map_err(Error::from))?;
        files.push(path);
    }
    Ok(files)
}

/// Writes the network of every seed as `<name>-<seed>.tri`.
pub fn gen(spec: &ExperimentSpec) -> Result<Vec<PathBuf>> {
    spec.validate()?;
    fs::create_dir_all(&spec.output_dir)?;
    let mut files = Vec::new();
    for &seed in &spec.seeds {
        let a = build_network(spec, seed)?;
        let path = spec.output_dir.join(format!("{}-{}.tri", spec.name, seed));
        write_file(&path, |w| a.write_triplets(w))?;
        files.push(path);
    }
    Ok(files)
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<fs::File>) -> Result<()>) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}

/// `t,E,c` rows in 17-significant-digit scientific notation.
pub fn write_trace<W: Write>(w: &mut W, r: &RunResult) -> Result<()> {
    writeln!(w, "t,E,c")?;
    for ((t, e), c) in r.times.iter().zip(&r.sync_error).zip(&r.coupling) {
        writeln!(w, "{t:.16e},{e:.16e},{c:.16e}")?;
    }
    Ok(())
}

/// Parses a trace written by [`write_trace`].
pub fn read_trace(text: &str) -> Result<Vec<(f64, f64, f64)>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "t,E,c")) => {}
        _ => return Err(Error::Parse { line: 1, message: "expected header t,E,c".into() }),
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let bad = || Error::Parse { line: i + 1, message: format!("bad row {l:?}") };
            let v: Vec<f64> = l.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
            match v.as_slice() {
                &[t, e, c] => Ok((t, e, c)),
                _ => Err(bad()),
            }
        })
        .collect()
}

fn seed_report(spec: &ExperimentSpec, run: &SeedRun, quad: Option<&QuadEstimate>) -> String {
    let r = &run.result;
    let mut out = String::new();
    let _ = writeln!(out, "[run]");
    let _ = writeln!(out, "name={}", spec.name);
    let _ = writeln!(out, "seed={}", run.seed);
    let _ = writeln!(out, "nodes={}", r.final_state.m);
    let _ = writeln!(out, "pinned={}", run.pinned);
    let _ = writeln!(out, "config_digest={}", r.config_digest);
    if let Some(q) = quad {
        let delta: Vec<String> = q.delta.iter().map(|d| format!("{d:e}")).collect();
        let _ = writeln!(out, "\n[quad]");
        let _ = writeln!(out, "delta={}", delta.join(","));
        let _ = writeln!(out, "eta={:e}", q.eta);
        let _ = writeln!(out, "samples={}", q.samples);
        let _ = writeln!(out, "certified={}", q.certified);
    }
    for (theorem, outcome) in &run.checks {
        let _ = writeln!(out, "\n[check]");
        match outcome {
            Ok(report) => out.push_str(&report.to_record()),
            Err(reason) => {
                let _ = writeln!(out, "theorem={theorem}\nsatisfied=false\nerror={reason}");
            }
        }
    }
    let _ = writeln!(out, "\n[result]");
    let _ = writeln!(out, "final_t={:.16e}", r.final_state.t);
    let _ = writeln!(out, "final_E={:.16e}", r.final_error());
    let _ = writeln!(out, "final_c={:.16e}", r.final_coupling());
    let _ = writeln!(out, "diverged={}", r.diverged());
    if let Some(t) = r.diverged_at {
        let _ = writeln!(out, "diverged_at={t:.16e}");
    }
    let _ = writeln!(out, "converged={}", run.converged);
    out
}
