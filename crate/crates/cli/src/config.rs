//! Declarative experiment configuration: one TOML file describes one
//! experiment writing into one output directory.
//!
//! Parsing is strict (unknown keys rejected), validation collects every
//! offending field, and the manifest hash is taken over the canonical
//! re-serialization of the parsed structure, so formatting and comments
//! never affect it while every semantically meaningful field does.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

use heavytail::construct::ProcessKind;
use heavytail::density::DensityModel;
use heavytail::diagnostics::GFunction;
use heavytail::rng::NormalMethod;
use heavytail::sde::{ReflectionScheme, StepPolicy};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub density: DensitySection,
    pub experiment: ExperimentSection,
    #[serde(rename = "process", default)]
    pub processes: Vec<ProcessSection>,
    pub run: RunSection,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DensitySection {
    /// `pareto_shifted`, `half_student_like`, or `perturbed_pareto`.
    pub model: String,
    pub m: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    /// `tv`, `hitting`, `lln`, `bvp`, `identities`, `sweep`, or `compare`.
    pub kind: String,
    #[serde(default = "default_ensemble")]
    pub ensemble: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0_list: Option<Vec<f64>>,
    #[serde(default = "default_k")]
    pub k_threshold: f64,
    #[serde(default = "default_n_barrier")]
    pub n_barrier: f64,
    #[serde(default = "default_q_max")]
    pub q_max: usize,
    #[serde(default = "default_alpha_fractions")]
    pub alpha_fractions: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_list: Option<Vec<f64>>,
    #[serde(default = "default_g_function")]
    pub g_function: String,
    #[serde(default = "default_epsilon_fraction")]
    pub epsilon_fraction: f64,
    /// Multiple of the predicted mean hitting time used as the censoring
    /// horizon.
    #[serde(default = "default_horizon_factor")]
    pub horizon_factor: f64,
    /// Enforce the theoretical TV envelope on accelerated-process curves
    /// (violation exits with the scientific-invariant code).
    #[serde(default)]
    pub check_envelope: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProcessSection {
    /// `langevin_y`, `accelerated_x`, or `bibby_z`.
    pub kind: String,
    #[serde(default = "default_c")]
    pub c1: f64,
    #[serde(default = "default_c")]
    pub c2: f64,
    /// `uniform` or `adaptive_speed`.
    pub step_mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub master_seed: u64,
    pub output_dir: String,
    #[serde(default)]
    pub emit_paths: bool,
    #[serde(default)]
    pub emit_svg: bool,
    /// 0 means all available parallelism.
    #[serde(default)]
    pub threads: usize,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default = "default_quantile_level")]
    pub quantile_level: f64,
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
    #[serde(default = "default_normal_method")]
    pub normal_method: String,
    #[serde(default = "default_reflection")]
    pub reflection: String,
    #[serde(default = "default_paths_dump_limit")]
    pub paths_dump_limit: usize,
}

fn default_ensemble() -> usize {
    10_000
}
fn default_k() -> f64 {
    1.0
}
fn default_n_barrier() -> f64 {
    1000.0
}
fn default_q_max() -> usize {
    4
}
fn default_alpha_fractions() -> Vec<f64> {
    vec![0.5]
}
fn default_g_function() -> String {
    "power_tail".into()
}
fn default_epsilon_fraction() -> f64 {
    0.1
}
fn default_horizon_factor() -> f64 {
    8.0
}
fn default_c() -> f64 {
    1.0
}
fn default_bins() -> usize {
    64
}
fn default_quantile_level() -> f64 {
    0.999
}
fn default_bootstrap() -> usize {
    200
}
fn default_normal_method() -> String {
    "inverse_cdf".into()
}
fn default_reflection() -> String {
    "absolute".into()
}
fn default_paths_dump_limit() -> usize {
    100
}

/// Experiment kinds the runner dispatches on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Tv,
    Hitting,
    Lln,
    Bvp,
    Identities,
    Sweep,
    Compare,
}

impl ExperimentKind {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "tv" => ExperimentKind::Tv,
            "hitting" => ExperimentKind::Hitting,
            "lln" => ExperimentKind::Lln,
            "bvp" => ExperimentKind::Bvp,
            "identities" => ExperimentKind::Identities,
            "sweep" => ExperimentKind::Sweep,
            "compare" => ExperimentKind::Compare,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Tv => "tv",
            ExperimentKind::Hitting => "hitting",
            ExperimentKind::Lln => "lln",
            ExperimentKind::Bvp => "bvp",
            ExperimentKind::Identities => "identities",
            ExperimentKind::Sweep => "sweep",
            ExperimentKind::Compare => "compare",
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("config parse error: {e}"))
    }

    pub fn to_canonical_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 over the canonical serialization.
    pub fn semantic_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.to_canonical_toml().as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn density_model(&self) -> Result<DensityModel, String> {
        let d = &self.density;
        match d.model.as_str() {
            "pareto_shifted" => Ok(DensityModel::ParetoShifted { m: d.m }),
            "half_student_like" => {
                Ok(DensityModel::HalfStudentLike { m: d.m, s: d.s.unwrap_or(1.0) })
            }
            "perturbed_pareto" => {
                Ok(DensityModel::PerturbedPareto { m: d.m, eps: d.eps.unwrap_or(0.3) })
            }
            other => Err(format!("density.model: unknown model '{other}'")),
        }
    }

    pub fn experiment_kind(&self) -> Result<ExperimentKind, String> {
        ExperimentKind::parse(&self.experiment.kind)
            .ok_or_else(|| format!("experiment.kind: unknown kind '{}'", self.experiment.kind))
    }

    pub fn normal_method(&self) -> Result<NormalMethod, String> {
        match self.run.normal_method.as_str() {
            "inverse_cdf" => Ok(NormalMethod::InverseCdf),
            "polar" => Ok(NormalMethod::Polar),
            other => Err(format!("run.normal_method: unknown method '{other}'")),
        }
    }

    pub fn reflection(&self) -> Result<ReflectionScheme, String> {
        match self.run.reflection.as_str() {
            "absolute" => Ok(ReflectionScheme::AbsoluteValue),
            "projection" => Ok(ReflectionScheme::Projection),
            other => Err(format!("run.reflection: unknown scheme '{other}'")),
        }
    }

    /// Validate every field, returning the full list of problems.
    pub fn validate(&self) -> Result<(), Vec<String>> {
        let mut problems = Vec::new();
        let d = &self.density;
        if let Err(e) = self.density_model() {
            problems.push(e);
        }
        if !(d.m > 3.0) {
            problems.push(format!(
                "density.m: {} violates the requirement m > 3",
                d.m
            ));
        }
        if let Some(s) = d.s {
            if !(s > 0.0) {
                problems.push(format!("density.s: {s} must be positive"));
            }
        }
        if let Some(eps) = d.eps {
            if !(eps.abs() < 0.5) {
                problems.push(format!("density.eps: {eps} must satisfy |eps| < 1/2"));
            }
        }

        let kind = self.experiment_kind();
        if let Err(e) = &kind {
            problems.push(e.clone());
        }
        let e = &self.experiment;
        if e.ensemble == 0 {
            problems.push("experiment.ensemble: must be positive".into());
        }
        if !(e.k_threshold > 0.0) {
            problems.push(format!("experiment.k_threshold: {} must be positive", e.k_threshold));
        }
        if !(e.n_barrier > e.k_threshold) {
            problems.push(format!(
                "experiment.n_barrier: {} must exceed k_threshold {}",
                e.n_barrier, e.k_threshold
            ));
        }
        if e.q_max == 0 || e.q_max > 8 {
            problems.push(format!("experiment.q_max: {} outside 1..=8", e.q_max));
        }
        for &f in &e.alpha_fractions {
            if !(0.0 < f && f < 1.0) {
                problems.push(format!("experiment.alpha_fractions: {f} outside (0, 1)"));
            }
        }
        if !(e.epsilon_fraction > 0.0) {
            problems.push(format!(
                "experiment.epsilon_fraction: {} must be positive",
                e.epsilon_fraction
            ));
        }
        if !(e.horizon_factor >= 2.0) {
            problems.push(format!(
                "experiment.horizon_factor: {} must be at least 2",
                e.horizon_factor
            ));
        }
        if GFunction::from_name(&e.g_function).is_none() {
            problems.push(format!("experiment.g_function: unknown function '{}'", e.g_function));
        }
        if let Some(cps) = &e.checkpoints {
            if cps.is_empty()
                || cps[0] <= 0.0
                || cps.windows(2).any(|w| w[1] <= w[0])
                || cps.iter().any(|c| !c.is_finite())
            {
                problems.push(
                    "experiment.checkpoints: must be positive and strictly increasing".into(),
                );
            }
        }
        if let Some(ts) = &e.t_list {
            if ts.is_empty() || ts[0] <= 0.0 || ts.windows(2).any(|w| w[1] <= w[0]) {
                problems.push("experiment.t_list: must be positive and strictly increasing".into());
            }
        }
        if let Some(x0) = e.x0 {
            if !(x0 >= 0.0 && x0.is_finite()) {
                problems.push(format!("experiment.x0: {x0} outside the half-line"));
            }
        }
        if let Some(list) = &e.x0_list {
            if list.is_empty() || list.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                problems.push("experiment.x0_list: entries must be non-negative".into());
            }
        }

        if let Ok(k) = kind {
            let needs_checkpoints =
                matches!(k, ExperimentKind::Tv | ExperimentKind::Sweep | ExperimentKind::Compare);
            if needs_checkpoints && e.checkpoints.is_none() {
                problems.push(format!("experiment.checkpoints: required for '{}'", k.name()));
            }
            if matches!(k, ExperimentKind::Tv | ExperimentKind::Compare) && e.x0.is_none() {
                problems.push(format!("experiment.x0: required for '{}'", k.name()));
            }
            if matches!(k, ExperimentKind::Sweep) && e.x0_list.is_none() {
                problems.push("experiment.x0_list: required for 'sweep'".into());
            }
            if matches!(k, ExperimentKind::Hitting) {
                if e.x0.is_none() {
                    problems.push("experiment.x0: required for 'hitting'".into());
                }
                if self.processes.len() != 1 {
                    problems.push("process: 'hitting' needs exactly one process".into());
                }
            }
            if matches!(k, ExperimentKind::Lln) && e.t_list.is_none() {
                problems.push("experiment.t_list: required for 'lln'".into());
            }
            let needs_processes = !matches!(k, ExperimentKind::Bvp | ExperimentKind::Lln);
            if needs_processes && self.processes.is_empty() {
                problems.push("process: at least one process section required".into());
            }
        }

        for (i, p) in self.processes.iter().enumerate() {
            let tag = format!("process[{i}]");
            match p.kind.as_str() {
                "langevin_y" | "accelerated_x" | "bibby_z" => {}
                other => problems.push(format!("{tag}.kind: unknown process '{other}'")),
            }
            if !(p.c1 > 0.0) || !(p.c2 > 0.0) {
                problems.push(format!("{tag}: c1 and c2 must be positive ({}, {})", p.c1, p.c2));
            }
            match p.step_mode.as_str() {
                "uniform" => match p.h {
                    Some(h) if h > 0.0 && h.is_finite() => {}
                    _ => problems.push(format!("{tag}.h: uniform stepping needs a positive h")),
                },
                "adaptive_speed" => {
                    let ok = matches!(p.kappa, Some(k) if k > 0.0 && k.is_finite());
                    if !ok {
                        problems.push(format!("{tag}.kappa: adaptive stepping needs kappa > 0"));
                    }
                    if p.kind != "accelerated_x" {
                        problems.push(format!(
                            "{tag}.step_mode: adaptive_speed requires an accelerated process"
                        ));
                    }
                }
                other => problems.push(format!("{tag}.step_mode: unknown mode '{other}'")),
            }
        }

        let r = &self.run;
        if r.bins < 2 {
            problems.push(format!("run.bins: {} too small", r.bins));
        }
        if !(0.5 < r.quantile_level && r.quantile_level < 1.0) {
            problems.push(format!("run.quantile_level: {} outside (0.5, 1)", r.quantile_level));
        }
        if let Err(e) = self.normal_method() {
            problems.push(e);
        }
        if let Err(e) = self.reflection() {
            problems.push(e);
        }
        if r.output_dir.is_empty() {
            problems.push("run.output_dir: must not be empty".into());
        }

        if problems.is_empty() { Ok(()) } else { Err(problems) }
    }
}

impl ProcessSection {
    pub fn process_kind(&self) -> ProcessKind {
        match self.kind.as_str() {
            "langevin_y" => ProcessKind::LangevinY,
            "accelerated_x" => ProcessKind::AcceleratedX,
            "bibby_z" => ProcessKind::BibbyZ,
            other => unreachable!("validated process kind: {other}"),
        }
    }

    pub fn step_policy(&self, reflection: ReflectionScheme) -> Result<StepPolicy, String> {
        let policy = match self.step_mode.as_str() {
            "uniform" => StepPolicy::uniform(self.h.expect("validated")),
            "adaptive_speed" => {
                let kappa = self.kappa.expect("validated");
                StepPolicy::adaptive_speed(self.h_max.unwrap_or(kappa), kappa)
            }
            other => unreachable!("validated step mode: {other}"),
        };
        policy.map(|p| p.with_reflection(reflection)).map_err(|e| e.to_string())
    }
}

/// Helper used by validation; mirrors the diagnostics enum names.
trait GFunctionExt {
    fn from_name(name: &str) -> Option<GFunction>;
}

impl GFunctionExt for GFunction {
    fn from_name(name: &str) -> Option<GFunction> {
        Some(match name {
            "power_tail" => GFunction::PowerTail,
            "inverse_quadratic" => GFunction::InverseQuadratic,
            "constant" => GFunction::Constant,
            _ => return None,
        })
    }
}

pub fn g_function_from_name(name: &str) -> Option<GFunction> {
    GFunction::from_name(name)
}
