//! Config-driven runs and parameter sweeps, and the files they write.
//!
//! A run writes into one directory:
//! - `timeseries.csv`: one row per time-grid sample, columns in [`timeseries_columns`]
//! - `wigner_<mode>_<t>.csv` / `.json`
//! - `quadrature_<mode>_<t>.csv` (`quadrature_<mode>_phi<φ>_<t>.csv` for φ ≠ 0)
//! - `joint_quadrature_<t>.csv`
//! - `components_<t>.json`
//! - `meta.json`: resolved config, column names, status and file list
//!
//! `<t>` is the sample time in shortest round-trip form, or `steady`.

pub mod config;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::dynamics::{evolve_partial, lindblad_rhs, steady_state, EvolveOptions, SteadyStateOptions};
use crate::error::{Error, Result};
use crate::fock::{ladder_operators, partial_trace, DensityMatrix, Dims, FockSpace, StateVector, Subsystem, C64};
use crate::models::{build_one_mode, build_two_mode, cat_state, steady_alpha, CatParity, CouplingSpec, SystemModel};
use crate::observables::{dominant_eigencomponents, fidelity_pure, number_and_parity, summarize, Summary};
use crate::phasespace::{
    default_quadrature_axis, joint_quadrature_distribution, linspace, quadrature_distribution, square_axes, wigner,
};

pub use config::{
    ComponentsSpec, EnergyUnit, InitialState, JointQuadratureSpec, MixtureComponent, ModeLabel, Outputs,
    QuadratureSpec, ScenarioConfig, Snapshot, SteadyStateSpec, SweepSpec, SystemKind, TimeGrid, Truncation,
    WignerSpec,
};

/// Hand-written JSON schema of [`ScenarioConfig`].
pub const CONFIG_SCHEMA: &str = include_str!("../../schema/scenario.schema.json");

pub const TOOL_NAME: &str = "catsim";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Column order of `timeseries.csv`.
pub fn timeseries_columns(two_mode: bool) -> Vec<&'static str> {
    let mut c = vec!["t", "n_a", "parity_a", "entropy", "purity"];
    if two_mode {
        c.extend(["n_b", "negativity", "mutual_information"]);
    }
    c.push("trace_drift");
    c
}

/// Column order of `sweep.csv`.
pub const SWEEP_COLUMNS: [&str; 7] = [
    "value",
    "alpha_abs",
    "alpha_arg",
    "max_fidelity",
    "final_purity",
    "final_entropy",
    "min_wigner",
];

pub fn build_model(cfg: &ScenarioConfig) -> Result<SystemModel> {
    let na = cfg.truncation.a;
    match cfg.system {
        SystemKind::OneMode => build_one_mode(&cfg.mode_a, na),
        kind => {
            let pb = cfg.mode_b.as_ref().ok_or_else(|| Error::config("mode_b", "missing"))?;
            let nb = cfg.truncation.b.ok_or_else(|| Error::config("truncation.b", "missing"))?;
            let coupling = if kind == SystemKind::TwoModeLinear {
                CouplingSpec::linear(cfg.coupling)
            } else {
                CouplingSpec::nonlinear(cfg.coupling)
            };
            build_two_mode(&cfg.mode_a, pb, &coupling, na, nb)
        }
    }
}

fn pure_single(s: &InitialState, n: usize, cfg: &ScenarioConfig) -> Result<StateVector> {
    let space = FockSpace::new(n)?;
    match s {
        InitialState::Fock { n: k } => StateVector::fock(space.dims(), *k),
        InitialState::Superposition { amplitudes } => {
            let v = DVector::from_fn(n, |k, _| amplitudes.get(k).copied().unwrap_or_default());
            StateVector::normalized(v, space.dims())
        }
        InitialState::Coherent { alpha } => StateVector::coherent(*alpha, space),
        InitialState::Cat { xi, parity } => {
            let xi = match xi {
                Some(z) => *z,
                None => steady_alpha(&cfg.mode_a)?,
            };
            cat_state(xi, *parity, n)
        }
        InitialState::Mixture { .. } | InitialState::Product { .. } => {
            Err(Error::InvalidParameter("expected a pure single-mode state".into()))
        }
    }
}

fn single_density(s: &InitialState, n: usize, cfg: &ScenarioConfig) -> Result<DensityMatrix> {
    match s {
        InitialState::Mixture { components } => {
            let parts: Vec<(f64, DensityMatrix)> = components
                .iter()
                .map(|c| Ok((c.probability, pure_single(&c.state, n, cfg)?.to_density())))
                .collect::<Result<_>>()?;
            let refs: Vec<(f64, &DensityMatrix)> = parts.iter().map(|(p, r)| (*p, r)).collect();
            DensityMatrix::mixture(&refs)
        }
        _ => Ok(pure_single(s, n, cfg)?.to_density()),
    }
}

/// ρ(0) described by `cfg.initial`.
pub fn initial_state(cfg: &ScenarioConfig) -> Result<DensityMatrix> {
    match &cfg.initial {
        InitialState::Product { a, b } => {
            let nb = cfg.truncation.b.ok_or_else(|| Error::config("truncation.b", "missing"))?;
            Ok(single_density(a, cfg.truncation.a, cfg)?.tensor(&single_density(b, nb, cfg)?))
        }
        s => single_density(s, cfg.truncation.a, cfg),
    }
}

/// Reduced state of one mode (the state itself for one-mode systems).
pub fn mode_state(rho: &DensityMatrix, mode: ModeLabel) -> Result<DensityMatrix> {
    match rho.dims() {
        Dims::Pair(na, nb) => {
            let keep = match mode {
                ModeLabel::A => Subsystem::A,
                ModeLabel::B => Subsystem::B,
            };
            partial_trace(rho, (na, nb), keep)
        }
        _ => Ok(rho.clone()),
    }
}

/// Per-sample record of a run.
#[derive(Clone, Debug, Serialize)]
pub struct SampleRow {
    pub t: f64,
    pub summary: Summary,
    pub trace_drift: f64,
}

/// What a finished run leaves behind besides its files.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub dir: PathBuf,
    /// File names relative to `dir`, sorted.
    pub files: Vec<String>,
    pub rows: Vec<SampleRow>,
    /// Steady state if one was requested, else the last sample.
    pub final_state: DensityMatrix,
    pub steady: Option<DensityMatrix>,
    /// Largest overlap of mode a with the even cat at the steady amplitude
    /// over the time grid.
    pub max_even_cat_fidelity: Option<f64>,
    pub min_eigenvalue: f64,
}

struct Writer {
    dir: PathBuf,
    files: Vec<String>,
}

impl Writer {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: String, body: &str) -> Result<()> {
        let path = self.dir.join(&name);
        std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        if !self.files.contains(&name) {
            self.files.push(name);
        }
        Ok(())
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| format!("{v}"))
}

fn timeseries_csv(rows: &[SampleRow], two_mode: bool) -> String {
    let mut out = timeseries_columns(two_mode).join(",");
    out.push('\n');
    for r in rows {
        let s = &r.summary;
        let _ = write!(out, "{},{},{},{},{}", r.t, s.n_a, s.parity_a, s.entropy, s.purity);
        if two_mode {
            let _ = write!(
                out,
                ",{},{},{}",
                fmt_opt(s.n_b),
                fmt_opt(s.negativity),
                fmt_opt(s.mutual_information)
            );
        }
        let _ = writeln!(out, ",{}", r.trace_drift);
    }
    out
}

/// Default Wigner half-width: |α_ss| + 3, or √⟨n⟩ + 3 without a steady amplitude.
fn default_half_width(cfg: &ScenarioConfig, rho: &DensityMatrix) -> f64 {
    match steady_alpha(&cfg.mode_a) {
        Ok(a) if a.norm().is_finite() => a.norm() + 3.0,
        _ => number_and_parity(rho).0.max(0.0).sqrt() + 3.0,
    }
}

#[derive(Serialize)]
struct ComponentRecord {
    weight: f64,
    mean_photon_number: f64,
    parity: f64,
}

fn component_records(rho: &DensityMatrix, k: usize) -> Result<Vec<ComponentRecord>> {
    dominant_eigencomponents(rho, k)?
        .into_iter()
        .map(|c| {
            let (n, p) = number_and_parity(&c.state.to_density());
            Ok(ComponentRecord {
                weight: c.weight,
                mean_photon_number: n,
                parity: p,
            })
        })
        .collect()
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Runs one scenario and writes its files into `dir`.
///
/// Integration failures still write the samples reached so far, with
/// `meta.json` marked `partial`, before the error is returned.
pub fn run_scenario(cfg: &ScenarioConfig, dir: &Path) -> Result<RunOutcome> {
    cfg.validate()?;
    let model = build_model(cfg)?;
    let rho0 = initial_state(cfg)?;
    let two = cfg.system.is_two_mode();
    let mut out = Writer::new(dir)?;

    let grid = cfg.time.times();
    let mut times = grid.clone();
    times.extend(cfg.snapshot_times());
    times.sort_by(f64::total_cmp);
    times.dedup();

    let opts = EvolveOptions::from(cfg.tolerances);
    let (traj, failure) = evolve_partial(&model, &rho0, &times, &opts)?;

    let on_grid = |t: f64| grid.iter().any(|g| *g == t);
    let mut rows = Vec::new();
    for ((t, rho), diag) in traj.times.iter().zip(&traj.states).zip(&traj.diagnostics) {
        if on_grid(*t) {
            rows.push(SampleRow {
                t: *t,
                summary: summarize(rho)?,
                trace_drift: diag.trace_drift,
            });
        }
    }
    let min_eigenvalue = traj
        .diagnostics
        .iter()
        .filter_map(|d| d.min_eigenvalue)
        .fold(f64::INFINITY, f64::min);
    if cfg.outputs.observables {
        out.write("timeseries.csv".into(), &timeseries_csv(&rows, two))?;
    }

    let cat_target = steady_alpha(&cfg.mode_a)
        .ok()
        .filter(|a| a.norm() > 0.0)
        .map(|a| cat_state(a, CatParity::Even, cfg.truncation.a))
        .transpose()?;
    let max_even_cat_fidelity = match &cat_target {
        Some(cat) => {
            let mut best = f64::NEG_INFINITY;
            for (t, rho) in traj.times.iter().zip(&traj.states) {
                if on_grid(*t) {
                    best = best.max(fidelity_pure(cat, &mode_state(rho, ModeLabel::A)?)?);
                }
            }
            best.is_finite().then_some(best)
        }
        None => None,
    };

    let mut steady = None;
    let mut steady_info = Value::Null;
    let mut error = failure;
    if error.is_none() {
        if let Some(spec) = &cfg.steady_state {
            let sopts = SteadyStateOptions {
                tol: spec.tol,
                t_max: spec.t_max,
                integrator: cfg.tolerances,
            };
            // Propagation continues from the end of the trajectory.
            match steady_state(&model, spec.method, traj.last(), &sopts) {
                Ok(rho) => {
                    let residual = lindblad_rhs(&model, &rho)?.max_abs();
                    steady_info = json!({"method": spec.method, "tol": spec.tol, "residual": residual});
                    steady = Some(rho);
                }
                Err(e) => error = Some(e),
            }
        }
    }

    let lookup = |s: &Snapshot| -> Option<&DensityMatrix> {
        match s {
            Snapshot::Steady => steady.as_ref(),
            Snapshot::At(t) => traj.times.iter().position(|x| x == t).map(|i| &traj.states[i]),
        }
    };

    for w in &cfg.outputs.wigner {
        for s in &w.at {
            let Some(rho) = lookup(s) else { continue };
            let r = mode_state(rho, w.mode)?;
            let hw = w.half_width.unwrap_or_else(|| default_half_width(cfg, &r));
            let (re, im) = square_axes(hw, w.points);
            let g = wigner(&r, &re, &im)?;
            let stem = format!("wigner_{}_{}", w.mode.as_str(), s.label());
            out.write(format!("{stem}.csv"), &g.to_csv("w"))?;
            out.write(format!("{stem}.json"), &serde_json::to_string(&g).expect("grid serializes"))?;
        }
    }
    for q in &cfg.outputs.quadrature {
        for s in &q.at {
            let Some(rho) = lookup(s) else { continue };
            let r = mode_state(rho, q.mode)?;
            let xs = match q.x_max {
                Some(h) => linspace(-h, h, q.points),
                None => default_quadrature_axis(number_and_parity(&r).0, q.points),
            };
            let d = quadrature_distribution(&r, q.phi, &xs)?;
            let name = if q.phi == 0.0 {
                format!("quadrature_{}_{}.csv", q.mode.as_str(), s.label())
            } else {
                format!("quadrature_{}_phi{}_{}.csv", q.mode.as_str(), q.phi, s.label())
            };
            out.write(name, &d.to_csv())?;
        }
    }
    for q in &cfg.outputs.joint_quadrature {
        for s in &q.at {
            let Some(rho) = lookup(s) else { continue };
            let xs = match q.x_max {
                Some(h) => linspace(-h, h, q.points),
                None => {
                    let summary = summarize(rho)?;
                    let nbar = summary.n_a.max(summary.n_b.unwrap_or(0.0));
                    default_quadrature_axis(nbar, q.points)
                }
            };
            let j = joint_quadrature_distribution(rho, None, &xs, &xs)?;
            out.write(format!("joint_quadrature_{}.csv", s.label()), &j.to_csv())?;
        }
    }
    if let Some(c) = &cfg.outputs.components {
        for s in &c.at {
            let Some(rho) = lookup(s) else { continue };
            let mut modes = BTreeMap::new();
            modes.insert("a", component_records(&mode_state(rho, ModeLabel::A)?, c.k)?);
            if two {
                modes.insert("b", component_records(&mode_state(rho, ModeLabel::B)?, c.k)?);
            }
            let t = match s {
                Snapshot::At(t) => json!(t),
                Snapshot::Steady => json!("steady"),
            };
            out.write(
                format!("components_{}.json", s.label()),
                &to_json(&json!({"at": t, "k": c.k, "modes": modes})),
            )?;
        }
    }

    let mut files = out.files.clone();
    files.push("meta.json".into());
    files.sort();
    let meta = json!({
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "status": if error.is_some() { "partial" } else { "complete" },
        "error": error.as_ref().map(|e| e.to_string()),
        "config": cfg.to_value(),
        "energy_unit": cfg.energy_unit,
        "truncation": cfg.truncation,
        "tolerances": cfg.tolerances,
        "columns": {"timeseries": timeseries_columns(two)},
        "steady_state": steady_info,
        "samples_reached": rows.len(),
        "max_trace_drift": traj.max_trace_drift(),
        "min_eigenvalue": min_eigenvalue,
        "files": files,
    });
    out.write("meta.json".into(), &to_json(&meta))?;
    if let Some(e) = error {
        return Err(e);
    }
    let final_state = match &steady {
        Some(s) => s.clone(),
        None => traj
            .states
            .last()
            .cloned()
            .ok_or_else(|| Error::Numerical("empty trajectory".into()))?,
    };
    Ok(RunOutcome {
        dir: dir.to_path_buf(),
        files,
        rows,
        final_state,
        steady,
        max_even_cat_fidelity,
        min_eigenvalue,
    })
}

/// Summary of one sweep point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: Value,
    /// √⟨n⟩ of the heaviest even-parity eigencomponent of mode a.
    pub alpha_abs: f64,
    /// arg⟨a²⟩/2 of the same component.
    pub alpha_arg: f64,
    pub max_fidelity: f64,
    pub final_purity: f64,
    pub final_entropy: f64,
    pub min_wigner: f64,
}

/// Eigencomponents lighter than this carry no amplitude information.
const FIT_MIN_WEIGHT: f64 = 1e-9;

/// Amplitude estimate from the dominant even-parity eigencomponent of `rho_a`,
/// or from the dominant component when the even sector is empty.
pub fn fit_alpha(rho_a: &DensityMatrix) -> Result<C64> {
    let n = rho_a.dim();
    let l = ladder_operators(FockSpace::new(n)?);
    let a2 = &l.annihilation * &l.annihilation;
    let comps = dominant_eigencomponents(rho_a, n)?;
    let even = comps
        .iter()
        .find(|c| c.weight > FIT_MIN_WEIGHT && number_and_parity(&c.state.to_density()).1 > 0.0)
        .or(comps.first())
        .ok_or_else(|| Error::Numerical("no eigencomponents".into()))?;
    let psi = even.state.amplitudes();
    let nbar = number_and_parity(&even.state.to_density()).0;
    let m2 = (psi.adjoint() * a2.matrix() * psi)[(0, 0)];
    Ok(C64::from_polar(nbar.max(0.0).sqrt(), 0.5 * m2.arg()))
}

fn sweep_point_row(cfg: &ScenarioConfig, value: Value, outcome: &RunOutcome) -> Result<SweepRow> {
    let rho_a = mode_state(&outcome.final_state, ModeLabel::A)?;
    let alpha = fit_alpha(&rho_a)?;
    let (re, im) = square_axes(default_half_width(cfg, &rho_a), 201);
    let w = wigner(&rho_a, &re, &im)?;
    Ok(SweepRow {
        value,
        alpha_abs: alpha.norm(),
        alpha_arg: alpha.arg(),
        max_fidelity: outcome.max_even_cat_fidelity.unwrap_or(f64::NAN),
        final_purity: crate::observables::purity(&outcome.final_state),
        final_entropy: crate::observables::von_neumann_entropy(&outcome.final_state),
        min_wigner: w.min(),
    })
}

fn value_label(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Per-point configs of a sweep, each with the sweep block removed.
pub fn sweep_points(cfg: &ScenarioConfig) -> Result<Vec<(Value, ScenarioConfig)>> {
    let sw = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::config("sweep", "config has no sweep block"))?;
    let mut base = cfg.to_value();
    base.as_object_mut().expect("config is an object").remove("sweep");
    let overrides: Vec<(Value, Vec<(String, Value)>)> = match &sw.parameter {
        Some(p) => sw
            .values
            .iter()
            .map(|v| (v.clone(), vec![(p.clone(), v.clone())]))
            .collect(),
        None => sw
            .points
            .iter()
            .enumerate()
            .map(|(i, m)| (json!(i), m.iter().map(|(k, v)| (k.clone(), v.clone())).collect()))
            .collect(),
    };
    overrides
        .into_iter()
        .enumerate()
        .map(|(i, (label, sets))| {
            let mut v = base.clone();
            for (path, val) in sets {
                config::set_path(&mut v, &path, val)?;
            }
            let point = ScenarioConfig::from_value(v).map_err(|e| match e {
                Error::Config { path, message } => Error::config(format!("sweep[{i}] {path}"), message),
                other => other,
            })?;
            Ok((label, point))
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub dir: PathBuf,
}

/// Runs every sweep point (in parallel, `workers` threads) under
/// `dir/point_<i>/` and writes `dir/sweep.csv`.
pub fn run_sweep(cfg: &ScenarioConfig, dir: &Path, workers: Option<usize>) -> Result<SweepOutcome> {
    let points = sweep_points(cfg)?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let workers = workers
        .or(cfg.sweep.as_ref().and_then(|s| s.workers))
        .unwrap_or_else(rayon::current_num_threads)
        .max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
    let results: Vec<Result<SweepRow>> = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, (label, pcfg))| {
                let pdir = dir.join(format!("point_{i}"));
                let outcome = run_scenario(pcfg, &pdir)?;
                sweep_point_row(pcfg, label.clone(), &outcome)
            })
            .collect()
    });

    let mut csv = SWEEP_COLUMNS.join(",");
    csv.push('\n');
    let mut rows = Vec::new();
    let mut first_err = None;
    for ((label, _), res) in points.iter().zip(results) {
        match res {
            Ok(r) => {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{}",
                    csv_field(&value_label(&r.value)),
                    r.alpha_abs,
                    r.alpha_arg,
                    r.max_fidelity,
                    r.final_purity,
                    r.final_entropy,
                    r.min_wigner
                );
                rows.push(r);
            }
            Err(e) => {
                log::error!("sweep point {}: {e}", value_label(label));
                let _ = writeln!(csv, "{},NaN,NaN,NaN,NaN,NaN,NaN", csv_field(&value_label(label)));
                first_err.get_or_insert(e);
            }
        }
    }
    let path = dir.join("sweep.csv");
    std::fs::write(&path, csv).map_err(|e| Error::io(&path, e))?;
    match first_err {
        Some(e) => Err(e),
        None => Ok(SweepOutcome {
            rows,
            dir: dir.to_path_buf(),
        }),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Applies a `--truncation N[,M]` override.
pub fn override_truncation(cfg: &mut ScenarioConfig, spec: &str) -> Result<()> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let parse = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::config("--truncation", format!("\"{s}\" is not a positive integer")))
    };
    match parts.as_slice() {
        [a] => {
            cfg.truncation.a = parse(a)?;
            if cfg.truncation.b.is_some() {
                cfg.truncation.b = Some(cfg.truncation.a);
            }
        }
        [a, b] => {
            cfg.truncation.a = parse(a)?;
            cfg.truncation.b = Some(parse(b)?);
        }
        _ => return Err(Error::config("--truncation", "expected N or N,M")),
    }
    cfg.validate()
}

#[cfg(test)]
mod tests;
