//! Experiment configuration: strict JSON schema, documented defaults,
//! `key=value` overrides and semantic validation.

use std::path::Path;

use clap::ValueEnum;
use degenflow_core::classifier::ClassifierOptions;
use degenflow_core::problem::{CoefficientSpec, ConditionTolerances};
use degenflow_core::{CoefficientSet, DomainSpec, SolverConfig};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ExperimentKind {
    Solve,
    Classify,
    EntropyCheck,
    StabilityPair,
    ViscositySweep,
    CroccoDemo,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Solve => "solve",
            ExperimentKind::Classify => "classify",
            ExperimentKind::EntropyCheck => "entropy_check",
            ExperimentKind::StabilityPair => "stability_pair",
            ExperimentKind::ViscositySweep => "viscosity_sweep",
            ExperimentKind::CroccoDemo => "crocco_demo",
        }
    }

    fn needs_solver(self) -> bool {
        !matches!(self, ExperimentKind::Classify | ExperimentKind::CroccoDemo)
    }
}

/// Initial data `u₀(x)`. Coordinates `ξ` are rescaled to the unit bounding box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    Constant {
        value: f64,
    },
    /// `offset + amplitude ∏ sin(wavenumber π ξ_i)`
    Sine {
        #[serde(default)]
        offset: f64,
        amplitude: f64,
        wavenumber: f64,
    },
    /// `offset + gradient · x`
    Linear {
        offset: f64,
        gradient: Vec<f64>,
    },
    /// `inside` where `max_i |x_i - center_i| < half_width`, else `outside`.
    Box {
        center: Vec<f64>,
        half_width: f64,
        inside: f64,
        #[serde(default)]
        outside: f64,
    },
    /// `amplitude cos²(π r / 2R)` for `r = |x - center| < R`, else zero.
    Bump {
        center: Vec<f64>,
        radius: f64,
        amplitude: f64,
    },
}

impl InitialCondition {
    pub fn eval(&self, domain: &DomainSpec, x: &[f64]) -> f64 {
        match self {
            InitialCondition::Constant { value } => *value,
            InitialCondition::Sine { offset, amplitude, wavenumber } => {
                let (lo, hi) = domain.bounding_box();
                let prod: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, xi)| (wavenumber * std::f64::consts::PI * (xi - lo[i]) / (hi[i] - lo[i])).sin())
                    .product();
                offset + amplitude * prod
            }
            InitialCondition::Linear { offset, gradient } => {
                offset + gradient.iter().zip(x).map(|(g, xi)| g * xi).sum::<f64>()
            }
            InitialCondition::Box { center, half_width, inside, outside } => {
                let r = center.iter().zip(x).map(|(c, xi)| (xi - c).abs()).fold(0.0, f64::max);
                if r < *half_width {
                    *inside
                } else {
                    *outside
                }
            }
            InitialCondition::Bump { center, radius, amplitude } => {
                let r = center.iter().zip(x).map(|(c, xi)| (xi - c) * (xi - c)).sum::<f64>().sqrt();
                if r < *radius {
                    amplitude * (0.5 * std::f64::consts::PI * r / radius).cos().powi(2)
                } else {
                    0.0
                }
            }
        }
    }

    fn validate(&self, field: &str, dim: usize) -> Result<(), CliError> {
        let check_len = |name: &str, len: usize| {
            if len == dim {
                Ok(())
            } else {
                Err(CliError::validation(format!("{field}.{name}"), format!("expected {dim} entries, found {len}")))
            }
        };
        match self {
            InitialCondition::Linear { gradient, .. } => check_len("gradient", gradient.len()),
            InitialCondition::Box { center, half_width, .. } => {
                check_len("center", center.len())?;
                positive(&format!("{field}.half_width"), *half_width)
            }
            InitialCondition::Bump { center, radius, .. } => {
                check_len("center", center.len())?;
                positive(&format!("{field}.radius"), *radius)
            }
            InitialCondition::Constant { .. } | InitialCondition::Sine { .. } => Ok(()),
        }
    }
}

/// A compactly supported spatial test function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpTest {
    pub center: Vec<f64>,
    pub radius: f64,
}

fn default_k_count() -> usize {
    9
}

fn default_window() -> [f64; 2] {
    [0.1, 0.9]
}

fn default_classify_times() -> Vec<f64> {
    vec![0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationConfig {
    /// Explicit entropy levels; when absent, `k_count` levels spanning the
    /// solution range are used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_values: Option<Vec<f64>>,
    #[serde(default = "default_k_count")]
    pub k_count: usize,
    #[serde(default)]
    pub etas: Vec<f64>,
    /// Boundary-weight widths for entropy tests and the comparison functional.
    #[serde(default)]
    pub lambdas: Vec<f64>,
    /// Interior test functions; when absent, one bump about the center of the
    /// bounding box with radius `0.8 ·` inradius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bumps: Option<Vec<BumpTest>>,
    /// Time window of the test functions as fractions of `final_time`.
    #[serde(default = "default_window")]
    pub window: [f64; 2],
    /// Growth constant the L¹ distance is checked against.
    #[serde(default)]
    pub c_declared: f64,
    /// Flags one-cell jumps above this fraction of the oscillation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jump_threshold: Option<f64>,
    #[serde(default)]
    pub classifier: ClassifierOptions,
    #[serde(default = "default_classify_times")]
    pub classify_times: Vec<f64>,
    #[serde(default)]
    pub conditions: ConditionTolerances,
}

impl Default for VerificationConfig {
    fn default() -> Self {
        Self {
            k_values: None,
            k_count: default_k_count(),
            etas: Vec::new(),
            lambdas: Vec::new(),
            bumps: None,
            window: default_window(),
            c_declared: 0.0,
            jump_threshold: None,
            classifier: ClassifierOptions::default(),
            classify_times: default_classify_times(),
            conditions: ConditionTolerances::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CroccoProfileKind {
    /// `u = tanh y`, `w = 1 - η²`
    Tanh,
    /// `u = 1 - e^{-y}`, `w = 1 - η`
    Exponential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CroccoConfig {
    pub profile: CroccoProfileKind,
    /// Profiles are sampled on `[0, length]`.
    pub length: f64,
    pub points: usize,
    /// Uniform `η` samples of `w`.
    pub samples: usize,
    pub tolerance: f64,
}

impl Default for CroccoConfig {
    fn default() -> Self {
        Self { profile: CroccoProfileKind::Tanh, length: 10.0, points: 1000, samples: 1000, tolerance: 1e-3 }
    }
}

fn default_snapshots() -> usize {
    20
}

fn default_output_dir() -> String {
    "out".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Filled from the command line when absent; must agree with it otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<ExperimentKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    /// Grid nodes per axis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<usize>>,
    #[serde(default)]
    pub coefficients: CoefficientSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialCondition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_v: Option<InitialCondition>,
    /// Equispaced snapshots after `t = 0`.
    #[serde(default = "default_snapshots")]
    pub snapshots: usize,
    #[serde(default)]
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub verification: VerificationConfig,
    #[serde(default)]
    pub crocco: CroccoConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
    #[serde(default)]
    pub seed: u64,
}

/// One `key=value` override; `key` is a dotted path, numeric segments index
/// arrays, and `value` is JSON or else a bare string.
#[derive(Debug, Clone, PartialEq)]
pub struct Override {
    pub path: Vec<String>,
    pub value: Value,
}

impl std::str::FromStr for Override {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let (key, raw) =
            s.split_once('=').ok_or_else(|| CliError::validation("override", format!("`{s}` is not key=value")))?;
        let path: Vec<String> = key.split('.').map(str::to_owned).collect();
        if path.iter().any(String::is_empty) {
            return Err(CliError::validation("override", format!("`{key}` has an empty path segment")));
        }
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_owned()));
        Ok(Override { path, value })
    }
}

impl Override {
    fn apply(&self, root: &mut Value) -> Result<(), CliError> {
        let key = self.path.join(".");
        let mut node = root;
        for segment in &self.path {
            node = match node {
                Value::Array(items) => {
                    let index: usize = segment
                        .parse()
                        .map_err(|_| CliError::validation(key.clone(), format!("`{segment}` is not an array index")))?;
                    let len = items.len();
                    items
                        .get_mut(index)
                        .ok_or_else(|| CliError::validation(key.clone(), format!("index {index} out of {len}")))?
                }
                Value::Object(map) => map.entry(segment.clone()).or_insert(Value::Null),
                Value::Null => {
                    *node = Value::Object(Default::default());
                    node.as_object_mut().expect("just set").entry(segment.clone()).or_insert(Value::Null)
                }
                _ => return Err(CliError::validation(key.clone(), format!("`{segment}` indexes a scalar"))),
            };
        }
        *node = self.value.clone();
        Ok(())
    }
}

/// Parses a config, applying overrides before the schema check.
pub fn parse_config(text: &str, origin: &str, overrides: &[Override]) -> Result<ExperimentConfig, CliError> {
    let syntax = |e: serde_json::Error| CliError::Syntax {
        path: origin.to_owned(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    };
    let mut value: Value = serde_json::from_str(text).map_err(syntax)?;
    if overrides.is_empty() {
        // parsing the text keeps line numbers for schema errors
        return serde_json::from_str(text).map_err(syntax);
    }
    for o in overrides {
        o.apply(&mut value)?;
    }
    serde_json::from_value(value).map_err(|e| CliError::validation("config", e.to_string()))
}

pub fn load_config(path: &Path, overrides: &[Override]) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::io(path, source))?;
    parse_config(&text, &path.display().to_string(), overrides)
}

fn positive(field: &str, value: f64) -> Result<(), CliError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(CliError::validation(field, format!("must be positive, got {value}")))
    }
}

fn require<'a, T>(value: &'a Option<T>, field: &str, kind: ExperimentKind) -> Result<&'a T, CliError> {
    value.as_ref().ok_or_else(|| CliError::validation(field, format!("required for {}", kind.name())))
}

impl ExperimentConfig {
    /// Sets the kind from the command line, rejecting a conflicting one.
    pub fn with_kind(mut self, kind: ExperimentKind) -> Result<Self, CliError> {
        match self.kind {
            Some(k) if k != kind => {
                Err(CliError::validation("kind", format!("config says {} but {} was requested", k.name(), kind.name())))
            }
            _ => {
                self.kind = Some(kind);
                Ok(self)
            }
        }
    }

    pub fn kind(&self) -> Result<ExperimentKind, CliError> {
        self.kind.ok_or_else(|| CliError::validation("kind", "no experiment kind given"))
    }

    pub fn domain(&self) -> Result<&DomainSpec, CliError> {
        require(&self.domain, "domain", self.kind()?)
    }

    pub fn counts(&self) -> Result<&[usize], CliError> {
        require(&self.counts, "counts", self.kind()?).map(Vec::as_slice)
    }

    pub fn solver(&self) -> Result<&SolverConfig, CliError> {
        require(&self.solver, "solver", self.kind()?)
    }

    pub fn initial(&self) -> Result<&InitialCondition, CliError> {
        require(&self.initial, "initial", self.kind()?)
    }

    pub fn initial_v(&self) -> Result<&InitialCondition, CliError> {
        require(&self.initial_v, "initial_v", self.kind()?)
    }

    /// Kind-specific required fields and value ranges.
    pub fn validate(&self) -> Result<(), CliError> {
        let kind = self.kind()?;
        let v = &self.verification;
        if kind == ExperimentKind::CroccoDemo {
            let c = &self.crocco;
            positive("crocco.length", c.length)?;
            positive("crocco.tolerance", c.tolerance)?;
            if c.points < 3 {
                return Err(CliError::validation("crocco.points", "need at least 3 points"));
            }
            if c.samples < 2 {
                return Err(CliError::validation("crocco.samples", "need at least 2 samples"));
            }
            return Ok(());
        }
        let domain = self.domain()?;
        domain.validate().map_err(|e| CliError::validation("domain", e.to_string()))?;
        let counts = self.counts()?;
        if counts.len() != domain.dim() {
            return Err(CliError::validation(
                "counts",
                format!("expected {} entries, found {}", domain.dim(), counts.len()),
            ));
        }
        CoefficientSet::new(domain.clone(), self.coefficients.clone())
            .map_err(|e| CliError::validation("coefficients", e.to_string()))?;
        positive("verification.classifier.tol", v.classifier.tol)?;
        positive("verification.conditions.pointwise", v.conditions.pointwise)?;
        positive("verification.conditions.holder_bound", v.conditions.holder_bound)?;
        if kind == ExperimentKind::Classify {
            if let Some(t) = v.classify_times.iter().find(|t| !(**t >= 0.0)) {
                return Err(CliError::validation("verification.classify_times", format!("negative time {t}")));
            }
            return Ok(());
        }
        if kind.needs_solver() {
            self.solver()?.validate().map_err(|e| CliError::validation("solver", e.to_string()))?;
            self.initial()?.validate("initial", domain.dim())?;
            if self.snapshots == 0 {
                return Err(CliError::validation("snapshots", "need at least one snapshot"));
            }
        }
        match kind {
            ExperimentKind::StabilityPair => {
                self.initial_v()?.validate("initial_v", domain.dim())?;
                if !v.c_declared.is_finite() {
                    return Err(CliError::validation("verification.c_declared", "must be finite"));
                }
            }
            ExperimentKind::ViscositySweep => {
                if self.epsilons.is_empty() {
                    return Err(CliError::validation("epsilons", "required for viscosity_sweep"));
                }
                for e in &self.epsilons {
                    positive("epsilons", *e)?;
                }
                if self.epsilons.windows(2).any(|w| !(w[1] < w[0])) {
                    return Err(CliError::validation("epsilons", "must be strictly decreasing"));
                }
            }
            ExperimentKind::EntropyCheck => {
                if v.k_values.as_ref().is_some_and(Vec::is_empty) || v.k_count == 0 {
                    return Err(CliError::validation("verification.k_values", "need at least one level"));
                }
                if let Some(bumps) = &v.bumps {
                    for b in bumps {
                        positive("verification.bumps.radius", b.radius)?;
                    }
                }
            }
            _ => {}
        }
        for eta in &v.etas {
            positive("verification.etas", *eta)?;
        }
        for lambda in &v.lambdas {
            positive("verification.lambdas", *lambda)?;
        }
        if let Some(t) = v.jump_threshold {
            positive("verification.jump_threshold", t)?;
        }
        let [lo, hi] = v.window;
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(CliError::validation("verification.window", format!("[{lo}, {hi}] is not inside [0, 1]")));
        }
        Ok(())
    }
}
