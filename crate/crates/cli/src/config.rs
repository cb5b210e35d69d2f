//! Batch configuration: named regions, features and integrands plus a task
//! list, validated with JSON-pointer error locations.

use std::collections::{BTreeMap, BTreeSet};

use pure_measure_core::lattice::MeasureFixture;
use pure_measure_core::{CalculusRule, DeltaSchedule, SurfaceFixture};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::Expr;

pub const VERSION: &str = "pure-measure/1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("parse error at {pointer}: {message}")]
    Parse { pointer: String, message: String },
    #[error("unknown name '{name}' at {pointer}")]
    UnknownName { pointer: String, name: String },
    #[error("bad schedule at {pointer}: {message}")]
    BadSchedule { pointer: String, message: String },
    #[error("invalid value at {pointer}: {message}")]
    Invalid { pointer: String, message: String },
}

impl ConfigError {
    pub fn pointer(&self) -> &str {
        match self {
            Self::Parse { pointer, .. }
            | Self::UnknownName { pointer, .. }
            | Self::BadSchedule { pointer, .. }
            | Self::Invalid { pointer, .. } => pointer,
        }
    }
}

fn default_samples() -> usize {
    200_000
}

fn default_tol() -> f64 {
    0.02
}

fn default_cap() -> f64 {
    1e3
}

fn default_quantile() -> f64 {
    0.001
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub version: String,
    #[serde(default)]
    pub seed: u64,
    /// Samples per δ-level.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub schedule: DeltaSchedule,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_cap")]
    pub magnitude_cap: f64,
    #[serde(default)]
    pub unbounded_fraction: f64,
    #[serde(default = "default_quantile")]
    pub quantile: f64,
    #[serde(default)]
    pub regions: BTreeMap<String, RegionSpec>,
    #[serde(default)]
    pub features: BTreeMap<String, FeatureSpec>,
    /// Named expressions over `x1..xn`.
    #[serde(default)]
    pub integrands: BTreeMap<String, String>,
    pub tasks: Vec<Task>,
}

/// A region, or the name of one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RegionSpec {
    Name(String),
    Shape(Box<Shape>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Interval([f64; 2]),
    HalfSpace {
        normal: Vec<f64>,
        offset: f64,
    },
    Cusp {
        p: f64,
    },
    Cone {
        apex: Vec<f64>,
        axis: Vec<f64>,
        half_angle: f64,
    },
    Point(Vec<f64>),
    Segment {
        a: Vec<f64>,
        b: Vec<f64>,
    },
    Union(Vec<RegionSpec>),
    Intersection(Vec<RegionSpec>),
    Difference(RegionSpec, RegionSpec),
    Complement(RegionSpec),
    Boundary(RegionSpec),
}

/// A feature, or the name of one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FeatureRef {
    Name(String),
    Spec(Box<FeatureSpec>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FeatureSpec {
    Point(Vec<f64>),
    Segment { a: Vec<f64>, b: Vec<f64> },
    Sphere { center: Vec<f64>, radius: f64 },
    Boundary(RegionSpec),
    Closure(RegionSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    /// `[1/(k+2), 1/(k+1)) × [−1, 1]^{dim−1}`.
    Slabs {
        dim: usize,
    },
    Members(Vec<RegionSpec>),
}

/// Per-task overrides of the global settings.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<DeltaSchedule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub magnitude_cap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unbounded_fraction: Option<f64>,
    /// Antithetic pairs reflected through the sampling-box centre.
    #[serde(default)]
    pub symmetric: bool,
}

/// A function named in `integrands`, with optional named partials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub function: String,
    /// One integrand name per coordinate; central differences when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradient: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Task {
    DensityRatio {
        name: String,
        region: RegionSpec,
        feature: FeatureRef,
        omega: RegionSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weight: Option<String>,
        #[serde(default)]
        options: TaskOptions,
    },
    SharpIntegral {
        name: String,
        integrand: String,
        feature: FeatureRef,
        omega: RegionSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weight: Option<String>,
        #[serde(default)]
        options: TaskOptions,
    },
    ActionInterval {
        name: String,
        integrand: String,
        feature: FeatureRef,
        omega: RegionSpec,
        #[serde(default)]
        options: TaskOptions,
    },
    ConeDensity {
        name: String,
        point: Vec<f64>,
        direction: Vec<f64>,
        half_angle: f64,
        omega: RegionSpec,
        #[serde(default)]
        options: TaskOptions,
    },
    SigmaProbe {
        name: String,
        family: FamilySpec,
        count: usize,
        feature: FeatureRef,
        omega: RegionSpec,
        #[serde(default)]
        options: TaskOptions,
    },
    AuraReport {
        name: String,
        feature: FeatureRef,
        omega: RegionSpec,
        #[serde(default)]
        options: TaskOptions,
    },
    BoundaryTrace {
        name: String,
        integrand: String,
        omega: RegionSpec,
        point: Vec<f64>,
        #[serde(default)]
        options: TaskOptions,
    },
    DensityGradient {
        name: String,
        #[serde(flatten)]
        function: FunctionSpec,
        point: Vec<f64>,
        omega: RegionSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lipschitz: Option<f64>,
        #[serde(default)]
        options: TaskOptions,
    },
    CalculusRuleCheck {
        name: String,
        rule: CalculusRule,
        f1: FunctionSpec,
        f2: FunctionSpec,
        point: Vec<f64>,
        omega: RegionSpec,
        #[serde(default)]
        options: TaskOptions,
    },
    CollarAverage {
        name: String,
        integrand: String,
        fixture: SurfaceFixture,
        #[serde(default)]
        options: TaskOptions,
    },
    GaussCheck {
        name: String,
        /// Integrand names of the field components.
        field: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        divergence: Option<String>,
        fixture: SurfaceFixture,
        #[serde(default)]
        options: TaskOptions,
    },
    Lattice {
        name: String,
        measure: MeasureFixture,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nu: Option<MeasureFixture>,
        /// Sets to evaluate, as atom labels; the full set when empty.
        #[serde(default)]
        sets: Vec<Vec<String>>,
        #[serde(default)]
        options: TaskOptions,
    },
}

impl Task {
    pub fn name(&self) -> &str {
        match self {
            Self::DensityRatio { name, .. }
            | Self::SharpIntegral { name, .. }
            | Self::ActionInterval { name, .. }
            | Self::ConeDensity { name, .. }
            | Self::SigmaProbe { name, .. }
            | Self::AuraReport { name, .. }
            | Self::BoundaryTrace { name, .. }
            | Self::DensityGradient { name, .. }
            | Self::CalculusRuleCheck { name, .. }
            | Self::CollarAverage { name, .. }
            | Self::GaussCheck { name, .. }
            | Self::Lattice { name, .. } => name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::DensityRatio { .. } => "density_ratio",
            Self::SharpIntegral { .. } => "sharp_integral",
            Self::ActionInterval { .. } => "action_interval",
            Self::ConeDensity { .. } => "cone_density",
            Self::SigmaProbe { .. } => "sigma_probe",
            Self::AuraReport { .. } => "aura_report",
            Self::BoundaryTrace { .. } => "boundary_trace",
            Self::DensityGradient { .. } => "density_gradient",
            Self::CalculusRuleCheck { .. } => "calculus_rule_check",
            Self::CollarAverage { .. } => "collar_average",
            Self::GaussCheck { .. } => "gauss_check",
            Self::Lattice { .. } => "lattice",
        }
    }

    pub fn options(&self) -> &TaskOptions {
        match self {
            Self::DensityRatio { options, .. }
            | Self::SharpIntegral { options, .. }
            | Self::ActionInterval { options, .. }
            | Self::ConeDensity { options, .. }
            | Self::SigmaProbe { options, .. }
            | Self::AuraReport { options, .. }
            | Self::BoundaryTrace { options, .. }
            | Self::DensityGradient { options, .. }
            | Self::CalculusRuleCheck { options, .. }
            | Self::CollarAverage { options, .. }
            | Self::GaussCheck { options, .. }
            | Self::Lattice { options, .. } => options,
        }
    }
}

fn escape(token: &str) -> String {
    token.replace('~', "~0").replace('/', "~1")
}

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", escape(key))),
            Segment::Enum { variant } => out.push_str(&format!("/{}", escape(variant))),
            Segment::Unknown => {}
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<Config, ConfigError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let config: Config =
        serde_path_to_error::deserialize(&mut de).map_err(|e| ConfigError::Parse {
            pointer: json_pointer(e.path()),
            message: e.inner().to_string(),
        })?;
    de.end().map_err(|e| ConfigError::Parse {
        pointer: "/".into(),
        message: e.to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

fn invalid(pointer: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        pointer: pointer.into(),
        message: message.into(),
    }
}

fn check_schedule(s: &DeltaSchedule, pointer: String) -> Result<(), ConfigError> {
    s.validate().map_err(|e| ConfigError::BadSchedule {
        pointer,
        message: e
            .to_string()
            .trim_start_matches("bad schedule: ")
            .to_string(),
    })
}

impl Config {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.version != VERSION {
            return Err(invalid(
                "/version",
                format!("expected \"{VERSION}\", found \"{}\"", self.version),
            ));
        }
        if self.samples == 0 {
            return Err(invalid("/samples", "must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(invalid("/tol", "must be positive"));
        }
        if !(self.magnitude_cap > 0.0) {
            return Err(invalid("/magnitude_cap", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.unbounded_fraction) {
            return Err(invalid("/unbounded_fraction", "must lie in [0, 1]"));
        }
        if !(0.0..0.5).contains(&self.quantile) {
            return Err(invalid("/quantile", "must lie in [0, 0.5)"));
        }
        check_schedule(&self.schedule, "/schedule".into())?;
        for (name, src) in &self.integrands {
            Expr::parse(src).map_err(|e| ConfigError::Parse {
                pointer: format!("/integrands/{}", escape(name)),
                message: e.to_string(),
            })?;
        }
        for (name, spec) in &self.regions {
            let ptr = format!("/regions/{}", escape(name));
            self.check_region(spec, &ptr, &mut vec![name.clone()])?;
        }
        for (name, spec) in &self.features {
            self.check_feature_spec(spec, &format!("/features/{}", escape(name)))?;
        }
        let mut seen = BTreeSet::new();
        for (i, task) in self.tasks.iter().enumerate() {
            let ptr = format!("/tasks/{i}");
            if !seen.insert(task.name()) {
                return Err(invalid(
                    format!("{ptr}/name"),
                    format!("duplicate task name '{}'", task.name()),
                ));
            }
            if task.name().is_empty() || task.name().contains(['/', '\\']) {
                return Err(invalid(
                    format!("{ptr}/name"),
                    "task names must be non-empty and free of path separators",
                ));
            }
            self.check_task(task, &ptr)?;
        }
        Ok(())
    }

    fn check_region(
        &self,
        spec: &RegionSpec,
        ptr: &str,
        stack: &mut Vec<String>,
    ) -> Result<(), ConfigError> {
        match spec {
            RegionSpec::Name(n) => {
                let Some(target) = self.regions.get(n) else {
                    return Err(ConfigError::UnknownName {
                        pointer: ptr.into(),
                        name: n.clone(),
                    });
                };
                if stack.contains(n) {
                    return Err(invalid(ptr, format!("region '{n}' refers to itself")));
                }
                stack.push(n.clone());
                self.check_region(target, ptr, stack)?;
                stack.pop();
                Ok(())
            }
            RegionSpec::Shape(shape) => match shape.as_ref() {
                Shape::Union(parts) | Shape::Intersection(parts) => {
                    let key = if matches!(shape.as_ref(), Shape::Union(_)) {
                        "union"
                    } else {
                        "intersection"
                    };
                    if parts.is_empty() {
                        return Err(invalid(format!("{ptr}/{key}"), "needs at least one part"));
                    }
                    for (i, p) in parts.iter().enumerate() {
                        self.check_region(p, &format!("{ptr}/{key}/{i}"), stack)?;
                    }
                    Ok(())
                }
                Shape::Difference(a, b) => {
                    self.check_region(a, &format!("{ptr}/difference/0"), stack)?;
                    self.check_region(b, &format!("{ptr}/difference/1"), stack)
                }
                Shape::Complement(a) => self.check_region(a, &format!("{ptr}/complement"), stack),
                Shape::Boundary(a) => self.check_region(a, &format!("{ptr}/boundary"), stack),
                _ => Ok(()),
            },
        }
    }

    fn check_feature_spec(&self, spec: &FeatureSpec, ptr: &str) -> Result<(), ConfigError> {
        match spec {
            FeatureSpec::Boundary(r) => {
                self.check_region(r, &format!("{ptr}/boundary"), &mut Vec::new())
            }
            FeatureSpec::Closure(r) => {
                self.check_region(r, &format!("{ptr}/closure"), &mut Vec::new())
            }
            _ => Ok(()),
        }
    }

    fn check_feature(&self, f: &FeatureRef, ptr: &str) -> Result<(), ConfigError> {
        match f {
            FeatureRef::Name(n) if !self.features.contains_key(n) => {
                Err(ConfigError::UnknownName {
                    pointer: ptr.into(),
                    name: n.clone(),
                })
            }
            FeatureRef::Name(_) => Ok(()),
            FeatureRef::Spec(s) => self.check_feature_spec(s, ptr),
        }
    }

    fn check_integrand(&self, name: &str, ptr: &str) -> Result<(), ConfigError> {
        if self.integrands.contains_key(name) {
            Ok(())
        } else {
            Err(ConfigError::UnknownName {
                pointer: ptr.into(),
                name: name.into(),
            })
        }
    }

    fn check_function(&self, f: &FunctionSpec, ptr: &str) -> Result<(), ConfigError> {
        self.check_integrand(&f.function, &format!("{ptr}/function"))?;
        for (i, g) in f.gradient.iter().flatten().enumerate() {
            self.check_integrand(g, &format!("{ptr}/gradient/{i}"))?;
        }
        Ok(())
    }

    fn check_task(&self, task: &Task, ptr: &str) -> Result<(), ConfigError> {
        let opts = task.options();
        if let Some(s) = &opts.schedule {
            check_schedule(s, format!("{ptr}/options/schedule"))?;
        }
        if opts.samples == Some(0) {
            return Err(invalid(
                format!("{ptr}/options/samples"),
                "must be at least 1",
            ));
        }
        let region = |r: &RegionSpec, field: &str| {
            self.check_region(r, &format!("{ptr}/{field}"), &mut Vec::new())
        };
        let feature = |f: &FeatureRef| self.check_feature(f, &format!("{ptr}/feature"));
        let integrand = |n: &str, field: &str| self.check_integrand(n, &format!("{ptr}/{field}"));
        match task {
            Task::DensityRatio {
                region: a,
                feature: f,
                omega,
                weight,
                ..
            } => {
                region(a, "region")?;
                feature(f)?;
                region(omega, "omega")?;
                if let Some(w) = weight {
                    integrand(w, "weight")?;
                }
            }
            Task::SharpIntegral {
                integrand: g,
                feature: f,
                omega,
                weight,
                ..
            } => {
                integrand(g, "integrand")?;
                feature(f)?;
                region(omega, "omega")?;
                if let Some(w) = weight {
                    integrand(w, "weight")?;
                }
            }
            Task::ActionInterval {
                integrand: g,
                feature: f,
                omega,
                ..
            } => {
                integrand(g, "integrand")?;
                feature(f)?;
                region(omega, "omega")?;
            }
            Task::ConeDensity { omega, .. } => region(omega, "omega")?,
            Task::SigmaProbe {
                family,
                feature: f,
                omega,
                ..
            } => {
                if let FamilySpec::Members(ms) = family {
                    for (i, m) in ms.iter().enumerate() {
                        region(m, &format!("family/members/{i}"))?;
                    }
                }
                feature(f)?;
                region(omega, "omega")?;
            }
            Task::AuraReport {
                feature: f, omega, ..
            } => {
                feature(f)?;
                region(omega, "omega")?;
            }
            Task::BoundaryTrace {
                integrand: g,
                omega,
                ..
            } => {
                integrand(g, "integrand")?;
                region(omega, "omega")?;
            }
            Task::DensityGradient {
                function, omega, ..
            } => {
                self.check_function(function, ptr)?;
                region(omega, "omega")?;
            }
            Task::CalculusRuleCheck { f1, f2, omega, .. } => {
                self.check_function(f1, &format!("{ptr}/f1"))?;
                self.check_function(f2, &format!("{ptr}/f2"))?;
                region(omega, "omega")?;
            }
            Task::CollarAverage { integrand: g, .. } => integrand(g, "integrand")?,
            Task::GaussCheck {
                field, divergence, ..
            } => {
                for (i, c) in field.iter().enumerate() {
                    integrand(c, &format!("field/{i}"))?;
                }
                if let Some(d) = divergence {
                    integrand(d, "divergence")?;
                }
            }
            Task::Lattice { .. } => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "version": "pure-measure/1",
        "regions": { "omega": { "interval": [-1, 1] }, "pos": { "interval": [0, 1] } },
        "features": { "zero": { "point": [0] } },
        "tasks": [
            { "kind": "density_ratio", "name": "dzero", "region": "pos", "feature": "zero", "omega": "omega" }
        ]
    }"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.samples, 200_000);
        assert_eq!(c.tol, 0.02);
        assert_eq!(c.schedule, DeltaSchedule::default());
        assert_eq!(c.tasks[0].kind(), "density_ratio");
        let echo = serde_json::to_string(&c).unwrap();
        assert_eq!(parse_config(&echo).unwrap(), c);
    }

    #[test]
    fn undefined_region_is_unknown_name() {
        let text = MINIMAL.replace(r#""region": "pos""#, r#""region": "neg""#);
        assert_eq!(
            parse_config(&text),
            Err(ConfigError::UnknownName {
                pointer: "/tasks/0/region".into(),
                name: "neg".into()
            })
        );
    }

    #[test]
    fn bad_ratio_is_bad_schedule() {
        let text = MINIMAL.replace(r#""version""#, r#""schedule": { "ratio": 1.5 }, "version""#);
        assert!(
            matches!(parse_config(&text), Err(ConfigError::BadSchedule { pointer, .. }) if pointer == "/schedule")
        );
        let text = MINIMAL.replace(r#""version""#, r#""schedule": { "delta0": -1 }, "version""#);
        assert!(matches!(
            parse_config(&text),
            Err(ConfigError::BadSchedule { .. })
        ));
    }

    #[test]
    fn parse_errors_point_into_the_document() {
        let text = MINIMAL.replace(
            r#""version": "pure-measure/1","#,
            r#""version": "pure-measure/1", "samples": "many","#,
        );
        match parse_config(&text) {
            Err(ConfigError::Parse { pointer, .. }) => assert_eq!(pointer, "/samples"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_config("{"), Err(ConfigError::Parse { .. })));
        let text = MINIMAL.replace("pure-measure/1", "pure-measure/0");
        assert!(
            matches!(parse_config(&text), Err(ConfigError::Invalid { pointer, .. }) if pointer == "/version")
        );
    }

    #[test]
    fn expressions_and_cycles_are_checked() {
        let text = MINIMAL.replace(r#""tasks""#, r#""integrands": { "f": "sin(" }, "tasks""#);
        assert!(
            matches!(parse_config(&text), Err(ConfigError::Parse { pointer, .. }) if pointer == "/integrands/f")
        );
        let text = MINIMAL.replace(
            r#""pos": { "interval": [0, 1] }"#,
            r#""pos": { "complement": "pos" }"#,
        );
        assert!(matches!(
            parse_config(&text),
            Err(ConfigError::Invalid { .. })
        ));
    }

    #[test]
    fn duplicate_task_names_are_rejected() {
        let task = r#"{ "kind": "density_ratio", "name": "dzero", "region": "pos", "feature": "zero", "omega": "omega" }"#;
        let text = MINIMAL.replace(task, &format!("{task}, {task}"));
        assert!(
            matches!(parse_config(&text), Err(ConfigError::Invalid { pointer, .. }) if pointer == "/tasks/1/name")
        );
    }
}
