//! Scenario configuration: one JSON document per run.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dynamics::{IntegratorOptions, SteadyStateMethod};
use crate::error::{Error, Result};
use crate::fock::C64;
use crate::models::{CatParity, ModeParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    OneMode,
    TwoModeLinear,
    TwoModeNonlinear,
}

impl SystemKind {
    pub fn is_two_mode(self) -> bool {
        self != SystemKind::OneMode
    }
}

/// Unit in which every rate, drive and time of the config is expressed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyUnit {
    /// Two-photon decay rate of mode a, so `mode_a.eta` is normally 1.
    EtaA,
    /// |G_a|/10, for configs without two-photon loss on mode a.
    #[serde(rename = "g_a_over_10")]
    GAOver10,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    pub a: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
}

/// Initial state. Two-mode systems take a `product`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    Fock {
        n: usize,
    },
    /// Σ c_k |k⟩, normalized on load.
    Superposition {
        #[serde(with = "crate::complex_serde::vec")]
        amplitudes: Vec<C64>,
    },
    Mixture {
        components: Vec<MixtureComponent>,
    },
    Coherent {
        #[serde(with = "crate::complex_serde")]
        alpha: C64,
    },
    /// Cat of amplitude `xi`; omitted `xi` means the steady amplitude of mode a.
    Cat {
        #[serde(default, with = "opt_complex", skip_serializing_if = "Option::is_none")]
        xi: Option<C64>,
        parity: CatParity,
    },
    Product {
        a: Box<InitialState>,
        b: Box<InitialState>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureComponent {
    pub probability: f64,
    pub state: InitialState,
}

mod opt_complex {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "crate::complex_serde")] C64);

    pub fn serialize<S: Serializer>(z: &Option<C64>, s: S) -> Result<S::Ok, S::Error> {
        z.map(Wrap).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<C64>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_max: f64,
    pub samples: usize,
}

impl TimeGrid {
    pub fn times(&self) -> Vec<f64> {
        crate::phasespace::linspace(0.0, self.t_max, self.samples)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteadyStateSpec {
    #[serde(default = "default_method")]
    pub method: SteadyStateMethod,
    #[serde(default = "default_steady_tol")]
    pub tol: f64,
    #[serde(default = "default_steady_t_max")]
    pub t_max: f64,
}

fn default_method() -> SteadyStateMethod {
    SteadyStateMethod::Propagate
}

fn default_steady_tol() -> f64 {
    1e-6
}

fn default_steady_t_max() -> f64 {
    1e4
}

/// A sample time, or the steady state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Snapshot {
    At(f64),
    Steady,
}

impl Snapshot {
    /// File-name label.
    pub fn label(&self) -> String {
        match self {
            Snapshot::At(t) => format!("{t}"),
            Snapshot::Steady => "steady".into(),
        }
    }
}

impl Serialize for Snapshot {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Snapshot::At(t) => s.serialize_f64(*t),
            Snapshot::Steady => s.serialize_str("steady"),
        }
    }
}

impl<'de> Deserialize<'de> for Snapshot {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(t) => Ok(Snapshot::At(t)),
            Raw::Str(s) if s == "steady" => Ok(Snapshot::Steady),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "expected a time or \"steady\", got \"{s}\""
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeLabel {
    A,
    B,
}

impl ModeLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ModeLabel::A => "a",
            ModeLabel::B => "b",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerSpec {
    #[serde(default = "mode_a")]
    pub mode: ModeLabel,
    pub at: Vec<Snapshot>,
    /// Grid spans ±half_width on both axes; default |α_ss| + 3.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(default = "default_grid_points")]
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    #[serde(default = "mode_a")]
    pub mode: ModeLabel,
    pub at: Vec<Snapshot>,
    #[serde(default)]
    pub phi: f64,
    /// Axis spans ±x_max; default √(2⟨n⟩) + 5.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    #[serde(default = "default_quad_points")]
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointQuadratureSpec {
    pub at: Vec<Snapshot>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    #[serde(default = "default_grid_points")]
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentsSpec {
    pub at: Vec<Snapshot>,
    #[serde(default = "default_k")]
    pub k: usize,
}

fn mode_a() -> ModeLabel {
    ModeLabel::A
}

fn default_grid_points() -> usize {
    201
}

fn default_quad_points() -> usize {
    401
}

fn default_k() -> usize {
    2
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    /// Write `timeseries.csv`.
    #[serde(default = "yes")]
    pub observables: bool,
    #[serde(default)]
    pub wigner: Vec<WignerSpec>,
    #[serde(default)]
    pub quadrature: Vec<QuadratureSpec>,
    #[serde(default)]
    pub joint_quadrature: Vec<JointQuadratureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<ComponentsSpec>,
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            observables: true,
            wigner: Vec::new(),
            quadrature: Vec::new(),
            joint_quadrature: Vec::new(),
            components: None,
        }
    }
}

/// Parameter sweep: either one dotted config path over `values`, or a list of
/// override maps (`{"mode_a.gamma": 0.1, "coupling": 0.5}`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameter: Option<String>,
    #[serde(default)]
    pub values: Vec<Value>,
    #[serde(default)]
    pub points: Vec<serde_json::Map<String, Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub system: SystemKind,
    pub energy_unit: EnergyUnit,
    pub mode_a: ModeParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode_b: Option<ModeParams>,
    /// Coupling strength g (two-mode systems).
    #[serde(default)]
    pub coupling: f64,
    pub truncation: Truncation,
    pub initial: InitialState,
    pub time: TimeGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steady_state: Option<SteadyStateSpec>,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub tolerances: IntegratorOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    /// Reserved; every pipeline stage is deterministic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn default_name() -> String {
    "scenario".into()
}

impl ScenarioConfig {
    /// Parses and validates a JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| Error::config("$", format!("invalid JSON: {e}")))?;
        Self::from_value(value)
    }

    pub fn from_value(value: Value) -> Result<Self> {
        let cfg: ScenarioConfig = serde_path_to_error::deserialize(value).map_err(|e| {
            let path = e.path().to_string();
            Error::config(if path == "." { "$".into() } else { path }, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// Snapshot times that are not on the regular time grid.
    pub fn snapshot_times(&self) -> Vec<f64> {
        let o = &self.outputs;
        let all = o
            .wigner
            .iter()
            .flat_map(|w| &w.at)
            .chain(o.quadrature.iter().flat_map(|q| &q.at))
            .chain(o.joint_quadrature.iter().flat_map(|q| &q.at))
            .chain(o.components.iter().flat_map(|c| &c.at));
        let mut ts: Vec<f64> = all
            .filter_map(|s| match s {
                Snapshot::At(t) => Some(*t),
                Snapshot::Steady => None,
            })
            .collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        ts
    }

    fn uses_steady(&self) -> bool {
        let o = &self.outputs;
        o.wigner
            .iter()
            .flat_map(|w| &w.at)
            .chain(o.quadrature.iter().flat_map(|q| &q.at))
            .chain(o.joint_quadrature.iter().flat_map(|q| &q.at))
            .chain(o.components.iter().flat_map(|c| &c.at))
            .any(|s| *s == Snapshot::Steady)
    }

    pub fn validate(&self) -> Result<()> {
        let rate_check = |p: &ModeParams, path: &str| -> Result<()> {
            p.validate().map_err(|e| Error::config(path, e.to_string()))
        };
        rate_check(&self.mode_a, "mode_a")?;
        match self.energy_unit {
            EnergyUnit::EtaA if self.mode_a.eta == 0.0 => {
                return Err(Error::config(
                    "energy_unit",
                    "eta_a is zero; use \"g_a_over_10\"",
                ));
            }
            EnergyUnit::EtaA if (self.mode_a.eta - 1.0).abs() > 1e-12 => {
                log::warn!("energy_unit is eta_a but mode_a.eta = {}", self.mode_a.eta);
            }
            EnergyUnit::GAOver10 if (self.mode_a.drive.norm() - 10.0).abs() > 1e-9 => {
                log::warn!("energy_unit is g_a_over_10 but |mode_a.drive| = {}", self.mode_a.drive.norm());
            }
            _ => {}
        }
        let two = self.system.is_two_mode();
        match (&self.mode_b, two) {
            (Some(p), true) => rate_check(p, "mode_b")?,
            (None, true) => return Err(Error::config("mode_b", "required for two-mode systems")),
            (Some(_), false) => return Err(Error::config("mode_b", "only valid for two-mode systems")),
            (None, false) => {}
        }
        if self.system == SystemKind::TwoModeNonlinear
            && self.mode_b.is_some_and(|p| p.drive.norm() != 0.0)
        {
            return Err(Error::config(
                "mode_b.drive",
                "mode b is driven only through the nonlinear coupling",
            ));
        }
        if !(self.coupling.is_finite() && self.coupling >= 0.0) {
            return Err(Error::config("coupling", "must be finite and non-negative"));
        }
        if !two && self.coupling != 0.0 {
            return Err(Error::config("coupling", "only valid for two-mode systems"));
        }
        if self.truncation.a < 4 {
            return Err(Error::config("truncation.a", "must be at least 4"));
        }
        match (self.truncation.b, two) {
            (Some(b), true) if b < 4 => return Err(Error::config("truncation.b", "must be at least 4")),
            (None, true) => return Err(Error::config("truncation.b", "required for two-mode systems")),
            (Some(_), false) => return Err(Error::config("truncation.b", "only valid for two-mode systems")),
            _ => {}
        }
        self.validate_initial()?;
        if !(self.time.t_max.is_finite() && self.time.t_max > 0.0) {
            return Err(Error::config("time.t_max", "must be positive and finite"));
        }
        if self.time.samples < 2 {
            return Err(Error::config("time.samples", "must be at least 2"));
        }
        if let Some(s) = &self.steady_state {
            if !(s.tol > 0.0 && s.tol.is_finite()) {
                return Err(Error::config("steady_state.tol", "must be positive"));
            }
            if !(s.t_max > 0.0 && s.t_max.is_finite()) {
                return Err(Error::config("steady_state.t_max", "must be positive and finite"));
            }
        } else if self.uses_steady() {
            return Err(Error::config(
                "steady_state",
                "required when an output asks for the \"steady\" snapshot",
            ));
        }
        self.tolerances
            .validate()
            .map_err(|e| Error::config("tolerances", e.to_string()))?;
        self.validate_outputs()?;
        if let Some(sw) = &self.sweep {
            validate_sweep(sw)?;
        }
        Ok(())
    }

    fn validate_initial(&self) -> Result<()> {
        let two = self.system.is_two_mode();
        match (&self.initial, two) {
            (InitialState::Product { a, b }, true) => {
                check_single(a, self.truncation.a, "initial.a")?;
                check_single(b, self.truncation.b.unwrap_or(0), "initial.b")
            }
            (_, true) => Err(Error::config("initial", "two-mode systems take a product state")),
            (InitialState::Product { .. }, false) => {
                Err(Error::config("initial", "product states need two modes"))
            }
            (s, false) => check_single(s, self.truncation.a, "initial"),
        }
    }

    fn validate_outputs(&self) -> Result<()> {
        let two = self.system.is_two_mode();
        let t_max = self.time.t_max;
        let check_at = |at: &[Snapshot], path: String| -> Result<()> {
            if at.is_empty() {
                return Err(Error::config(path, "needs at least one snapshot"));
            }
            for (i, s) in at.iter().enumerate() {
                if let Snapshot::At(t) = s {
                    if !(t.is_finite() && *t >= 0.0 && *t <= t_max) {
                        return Err(Error::config(format!("{path}[{i}]"), "must lie in [0, time.t_max]"));
                    }
                }
            }
            Ok(())
        };
        let check_mode = |m: ModeLabel, path: String| -> Result<()> {
            if m == ModeLabel::B && !two {
                return Err(Error::config(path, "mode b requires a two-mode system"));
            }
            Ok(())
        };
        for (i, w) in self.outputs.wigner.iter().enumerate() {
            check_at(&w.at, format!("outputs.wigner[{i}].at"))?;
            check_mode(w.mode, format!("outputs.wigner[{i}].mode"))?;
            check_extent(w.half_width, format!("outputs.wigner[{i}].half_width"))?;
            check_points(w.points, format!("outputs.wigner[{i}].points"))?;
        }
        for (i, q) in self.outputs.quadrature.iter().enumerate() {
            check_at(&q.at, format!("outputs.quadrature[{i}].at"))?;
            check_mode(q.mode, format!("outputs.quadrature[{i}].mode"))?;
            if !q.phi.is_finite() {
                return Err(Error::config(format!("outputs.quadrature[{i}].phi"), "must be finite"));
            }
            check_extent(q.x_max, format!("outputs.quadrature[{i}].x_max"))?;
            check_points(q.points, format!("outputs.quadrature[{i}].points"))?;
        }
        for (i, q) in self.outputs.joint_quadrature.iter().enumerate() {
            if !two {
                return Err(Error::config(
                    format!("outputs.joint_quadrature[{i}]"),
                    "joint distributions need two modes",
                ));
            }
            check_at(&q.at, format!("outputs.joint_quadrature[{i}].at"))?;
            check_extent(q.x_max, format!("outputs.joint_quadrature[{i}].x_max"))?;
            check_points(q.points, format!("outputs.joint_quadrature[{i}].points"))?;
        }
        if let Some(c) = &self.outputs.components {
            check_at(&c.at, "outputs.components.at".into())?;
            if c.k == 0 {
                return Err(Error::config("outputs.components.k", "must be at least 1"));
            }
        }
        Ok(())
    }
}

fn check_extent(v: Option<f64>, path: String) -> Result<()> {
    match v {
        Some(x) if !(x.is_finite() && x > 0.0) => Err(Error::config(path, "must be positive and finite")),
        _ => Ok(()),
    }
}

fn check_points(n: usize, path: String) -> Result<()> {
    if n < 2 {
        return Err(Error::config(path, "must be at least 2"));
    }
    Ok(())
}

fn check_single(s: &InitialState, n: usize, path: &str) -> Result<()> {
    match s {
        InitialState::Fock { n: k } => {
            if *k >= n {
                return Err(Error::config(format!("{path}.n"), format!("exceeds truncation {n}")));
            }
        }
        InitialState::Superposition { amplitudes } => {
            if amplitudes.len() > n {
                return Err(Error::config(
                    format!("{path}.amplitudes"),
                    format!("{} amplitudes exceed truncation {n}", amplitudes.len()),
                ));
            }
            if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::config(format!("{path}.amplitudes"), "must be finite"));
            }
            if amplitudes.iter().all(|z| z.norm() == 0.0) {
                return Err(Error::config(format!("{path}.amplitudes"), "all amplitudes are zero"));
            }
        }
        InitialState::Mixture { components } => {
            if components.is_empty() {
                return Err(Error::config(format!("{path}.components"), "must not be empty"));
            }
            let mut total = 0.0;
            for (i, c) in components.iter().enumerate() {
                let p = format!("{path}.components[{i}]");
                if !(c.probability >= 0.0 && c.probability.is_finite()) {
                    return Err(Error::config(format!("{p}.probability"), "must be non-negative"));
                }
                if matches!(c.state, InitialState::Mixture { .. } | InitialState::Product { .. }) {
                    return Err(Error::config(format!("{p}.state"), "must be a pure single-mode state"));
                }
                check_single(&c.state, n, &format!("{p}.state"))?;
                total += c.probability;
            }
            if (total - 1.0).abs() > 1e-10 {
                return Err(Error::config(
                    format!("{path}.components"),
                    format!("probabilities sum to {total}, not 1"),
                ));
            }
        }
        InitialState::Coherent { alpha } => {
            if !alpha.re.is_finite() || !alpha.im.is_finite() {
                return Err(Error::config(format!("{path}.alpha"), "must be finite"));
            }
        }
        InitialState::Cat { xi, parity } => {
            if let Some(z) = xi {
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::config(format!("{path}.xi"), "must be finite"));
                }
                if *parity == CatParity::Odd && z.norm() == 0.0 {
                    return Err(Error::config(format!("{path}.xi"), "odd cat needs a nonzero amplitude"));
                }
            }
        }
        InitialState::Product { .. } => {
            return Err(Error::config(path, "nested product states are not supported"));
        }
    }
    Ok(())
}

fn validate_sweep(sw: &SweepSpec) -> Result<()> {
    match (&sw.parameter, sw.points.is_empty()) {
        (Some(p), true) => {
            if p.is_empty() {
                return Err(Error::config("sweep.parameter", "must not be empty"));
            }
            if sw.values.is_empty() {
                return Err(Error::config("sweep.values", "must not be empty"));
            }
        }
        (None, false) => {
            if !sw.values.is_empty() {
                return Err(Error::config("sweep.values", "only valid together with sweep.parameter"));
            }
        }
        (Some(_), false) => {
            return Err(Error::config("sweep", "give either parameter/values or points, not both"));
        }
        (None, true) => return Err(Error::config("sweep", "needs parameter/values or points")),
    }
    if sw.workers == Some(0) {
        return Err(Error::config("sweep.workers", "must be at least 1"));
    }
    Ok(())
}

/// Writes `value` at a dotted path (`mode_a.gamma`), creating objects on the way.
pub fn set_path(root: &mut Value, path: &str, value: Value) -> Result<()> {
    let mut cur = root;
    let parts: Vec<&str> = path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::config("sweep.parameter", format!("malformed path \"{path}\"")));
    }
    for (i, part) in parts.iter().enumerate() {
        let obj = cur.as_object_mut().ok_or_else(|| {
            Error::config("sweep.parameter", format!("\"{}\" is not an object", parts[..i].join(".")))
        })?;
        if i + 1 == parts.len() {
            obj.insert((*part).to_string(), value);
            return Ok(());
        }
        cur = obj
            .entry((*part).to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!("path has at least one segment")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn base() -> Value {
        json!({
            "system": "one_mode",
            "energy_unit": "eta_a",
            "mode_a": {"kerr": 1, "eta": 1, "drive": [7.0710678118654755, -7.0710678118654755]},
            "truncation": {"a": 20},
            "initial": {"kind": "fock", "n": 0},
            "time": {"t_max": 1, "samples": 11}
        })
    }

    fn err_path(v: Value) -> String {
        match ScenarioConfig::from_value(v) {
            Err(Error::Config { path, .. }) => path,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = ScenarioConfig::from_value(base()).unwrap();
        assert_eq!(cfg.name, "scenario");
        assert!(cfg.outputs.observables);
        assert_eq!(cfg.tolerances, IntegratorOptions::default());
        assert_eq!(cfg.time.times().len(), 11);
    }

    #[test]
    fn round_trip_is_stable() {
        let mut v = base();
        v["outputs"] = json!({"wigner": [{"at": [0.5, "steady"]}], "components": {"at": ["steady"]}});
        v["steady_state"] = json!({"tol": 1e-7});
        v["initial"] = json!({"kind": "mixture", "components": [
            {"probability": 0.5, "state": {"kind": "fock", "n": 0}},
            {"probability": 0.5, "state": {"kind": "cat", "parity": "odd"}}
        ]});
        let cfg = ScenarioConfig::from_value(v).unwrap();
        let again = ScenarioConfig::from_value(cfg.to_value()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.to_value(), again.to_value());
    }

    #[test]
    fn unknown_fields_report_their_path() {
        let mut v = base();
        v["mode_a"]["gama"] = json!(0.1);
        assert_eq!(err_path(v), "mode_a.gama");
        let mut v = base();
        v["initial"] = json!({"kind": "fock", "m": 0});
        assert_eq!(err_path(v), "initial");
        let mut v = base();
        v["time"]["samples"] = json!("many");
        assert_eq!(err_path(v), "time.samples");
    }

    #[test]
    fn semantic_errors_report_their_path() {
        let mut v = base();
        v["mode_a"]["eta"] = json!(0);
        assert_eq!(err_path(v), "energy_unit");
        let mut v = base();
        v["initial"] = json!({"kind": "fock", "n": 25});
        assert_eq!(err_path(v), "initial.n");
        let mut v = base();
        v["initial"] = json!({"kind": "mixture", "components": [
            {"probability": 0.5, "state": {"kind": "fock", "n": 0}}
        ]});
        assert_eq!(err_path(v), "initial.components");
        let mut v = base();
        v["sweep"] = json!({"parameter": "mode_a.gamma", "values": []});
        assert_eq!(err_path(v), "sweep.values");
        let mut v = base();
        v["outputs"] = json!({"wigner": [{"at": ["steady"]}]});
        assert_eq!(err_path(v), "steady_state");
        let mut v = base();
        v["outputs"] = json!({"wigner": [{"at": [2.0]}]});
        assert_eq!(err_path(v), "outputs.wigner[0].at[0]");
        let mut v = base();
        v["mode_b"] = json!({});
        assert_eq!(err_path(v), "mode_b");
    }

    #[test]
    fn g_unit_for_undamped_drive() {
        let mut v = base();
        v["mode_a"]["eta"] = json!(0);
        v["energy_unit"] = json!("g_a_over_10");
        ScenarioConfig::from_value(v.clone()).unwrap();
        v["energy_unit"] = json!("eta_a");
        assert_eq!(err_path(v), "energy_unit");
    }

    #[test]
    fn two_mode_rules() {
        let mut v = base();
        v["system"] = json!("two_mode_nonlinear");
        v["mode_b"] = json!({"kerr": 1, "eta": 1});
        v["coupling"] = json!(1.0);
        v["truncation"] = json!({"a": 8, "b": 8});
        assert_eq!(err_path(v.clone()), "initial");
        v["initial"] = json!({"kind": "product", "a": {"kind": "fock", "n": 0}, "b": {"kind": "fock", "n": 0}});
        ScenarioConfig::from_value(v.clone()).unwrap();
        v["mode_b"]["drive"] = json!([1, 0]);
        assert_eq!(err_path(v), "mode_b.drive");
    }

    #[test]
    fn set_path_creates_objects() {
        let mut v = base();
        set_path(&mut v, "mode_a.gamma", json!(0.3)).unwrap();
        set_path(&mut v, "steady_state.tol", json!(1e-5)).unwrap();
        assert_eq!(v["mode_a"]["gamma"], json!(0.3));
        let cfg = ScenarioConfig::from_value(v.clone()).unwrap();
        assert_eq!(cfg.mode_a.gamma, 0.3);
        assert!(set_path(&mut v, "mode_a.gamma.x", json!(1)).is_err());
        assert!(set_path(&mut v, "a..b", json!(1)).is_err());
    }
}
