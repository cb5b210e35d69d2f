//! Executes a validated configuration and writes `report.json` plus one CSV
//! per probe series.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use pure_measure_core::lattice::{AlgebraSet, FAMeasure, GroundSet, MeasureFixture};
use pure_measure_core::{
    action_interval, aura_report, boundary_trace, calculus_rule_check, collar_average,
    cone_density, density_gradient, density_probe, gauss_check, sharp_integral, sigma_probe,
    Continuity, DiffFunction, EngineError, ExplicitFamily, Feature, Field, ProbeResult,
    ProbeSettings, Region, RegionFamily, SampleSpec, SlabFamily, VectorField,
};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::config::{
    Config, FamilySpec, FeatureRef, FeatureSpec, FunctionSpec, RegionSpec, Shape, Task, VERSION,
};
use crate::expr::Expr;

pub const CSV_HEADER: &str = "delta,value,stderr,hits";

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("unknown task '{0}'")]
    UnknownTask(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaskOutcome {
    pub name: String,
    pub kind: String,
    /// `"ok"` or `"error"`.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    /// CSV files written for this task, relative to the output directory.
    pub csv: Vec<String>,
}

impl TaskOutcome {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub version: String,
    pub config: Config,
    pub tasks: Vec<TaskOutcome>,
}

impl Report {
    /// 0 when every task succeeded, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.tasks.iter().all(TaskOutcome::is_ok) {
            0
        } else {
            2
        }
    }
}

/// Turns configuration specs into core objects.
pub struct Resolver<'a> {
    config: &'a Config,
    fields: BTreeMap<String, Arc<Expr>>,
}

type Res<T> = Result<T, EngineError>;

fn unsupported(msg: impl Into<String>) -> EngineError {
    EngineError::UnsupportedFixture(msg.into())
}

impl<'a> Resolver<'a> {
    /// Expects a configuration that passed validation.
    pub fn new(config: &'a Config) -> Self {
        let fields = config
            .integrands
            .iter()
            .filter_map(|(k, src)| Expr::parse(src).ok().map(|e| (k.clone(), Arc::new(e))))
            .collect();
        Self { config, fields }
    }

    pub fn expr(&self, name: &str) -> Res<Arc<Expr>> {
        self.fields
            .get(name)
            .cloned()
            .ok_or_else(|| unsupported(format!("unknown integrand '{name}'")))
    }

    pub fn field(&self, name: &str) -> Res<Field> {
        Ok(self.expr(name)?)
    }

    pub fn region(&self, spec: &RegionSpec) -> Res<Region> {
        self.region_at(spec, 0)
    }

    fn region_at(&self, spec: &RegionSpec, depth: usize) -> Res<Region> {
        if depth > 64 {
            return Err(unsupported("region nesting too deep"));
        }
        let shape = match spec {
            RegionSpec::Name(n) => {
                let target = self
                    .config
                    .regions
                    .get(n)
                    .ok_or_else(|| unsupported(format!("unknown region '{n}'")))?;
                return self.region_at(target, depth + 1);
            }
            RegionSpec::Shape(s) => s.as_ref(),
        };
        let sub = |r: &RegionSpec| self.region_at(r, depth + 1);
        Ok(match shape {
            Shape::Ball { center, radius } => Region::ball(center.clone(), *radius)?,
            Shape::Box { lo, hi } => Region::cuboid(lo.clone(), hi.clone())?,
            Shape::Interval([a, b]) => Region::interval(*a, *b)?,
            Shape::HalfSpace { normal, offset } => Region::half_space(normal.clone(), *offset)?,
            Shape::Cusp { p } => Region::cusp(*p)?,
            Shape::Cone {
                apex,
                axis,
                half_angle,
            } => Region::cone(apex.clone(), axis.clone(), *half_angle)?,
            Shape::Point(c) => Region::point(c.clone())?,
            Shape::Segment { a, b } => Region::segment(a.clone(), b.clone())?,
            Shape::Union(parts) => Region::union(parts.iter().map(sub).collect::<Res<_>>()?)?,
            Shape::Intersection(parts) => {
                Region::intersection(parts.iter().map(sub).collect::<Res<_>>()?)?
            }
            Shape::Difference(a, b) => Region::difference(sub(a)?, sub(b)?)?,
            Shape::Complement(a) => Region::complement(sub(a)?),
            Shape::Boundary(a) => Region::boundary_of(sub(a)?),
        })
    }

    pub fn feature(&self, f: &FeatureRef) -> Res<Feature> {
        let spec = match f {
            FeatureRef::Name(n) => self
                .config
                .features
                .get(n)
                .ok_or_else(|| unsupported(format!("unknown feature '{n}'")))?,
            FeatureRef::Spec(s) => s.as_ref(),
        };
        Ok(match spec {
            FeatureSpec::Point(c) => Feature::point(c.clone())?,
            FeatureSpec::Segment { a, b } => Feature::segment(a.clone(), b.clone())?,
            FeatureSpec::Sphere { center, radius } => Feature::sphere(center.clone(), *radius)?,
            FeatureSpec::Boundary(r) => Feature::boundary_of(self.region(r)?),
            FeatureSpec::Closure(r) => Feature::from_region(self.region(r)?),
        })
    }

    pub fn function(&self, spec: &FunctionSpec) -> Res<DiffFunction> {
        let value = self.field(&spec.function)?;
        Ok(match &spec.gradient {
            Some(names) => DiffFunction::analytic(
                value,
                names.iter().map(|n| self.field(n)).collect::<Res<_>>()?,
            ),
            None => DiffFunction::finite_difference(value),
        })
    }

    pub fn settings(&self, task: &Task) -> ProbeSettings {
        let c = self.config;
        let o = task.options();
        let sample = SampleSpec {
            samples: o.samples.unwrap_or(c.samples),
            seed: o.seed.unwrap_or(c.seed),
            bbox: None,
            symmetric: o.symmetric,
            magnitude_cap: o.magnitude_cap.unwrap_or(c.magnitude_cap),
            unbounded_fraction: o.unbounded_fraction.unwrap_or(c.unbounded_fraction),
        };
        ProbeSettings {
            schedule: o.schedule.clone().unwrap_or_else(|| c.schedule.clone()),
            sample,
            tol: o.tol.unwrap_or(c.tol),
            quantile: c.quantile,
        }
    }
}

fn check_arity(expr: &Expr, dim: usize, name: &str) -> Res<()> {
    if expr.arity() > dim {
        return Err(unsupported(format!(
            "integrand '{name}' reads x{} in dimension {dim}",
            expr.arity()
        )));
    }
    Ok(())
}

/// Renders a probe series as CSV.
pub fn series_csv(probe: &ProbeResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in &probe.series {
        out.push_str(&format!(
            "{},{},{},{}\n",
            p.delta, p.value, p.stderr, p.hits
        ));
    }
    out
}

struct Output {
    result: Value,
    series: Vec<(String, ProbeResult)>,
}

impl Output {
    fn plain(v: impl Serialize) -> Res<Self> {
        Ok(Self {
            result: to_value(v)?,
            series: Vec::new(),
        })
    }

    fn probe(name: &str, p: ProbeResult) -> Res<Self> {
        Ok(Self {
            result: to_value(&p)?,
            series: vec![(name.to_string(), p)],
        })
    }
}

fn to_value(v: impl Serialize) -> Res<Value> {
    serde_json::to_value(v).map_err(|e| unsupported(e.to_string()))
}

fn lattice_result(
    measure: &MeasureFixture,
    nu: Option<&MeasureFixture>,
    sets: &[Vec<String>],
) -> Result<Value, pure_measure_core::LatticeError> {
    let (ground, mu) = measure.measure()?;
    let chosen: Vec<AlgebraSet> = if sets.is_empty() {
        vec![ground.full()]
    } else {
        sets.iter()
            .map(|s| ground.set(s))
            .collect::<Result<_, _>>()?
    };
    let (pos, neg) = mu.jordan_decompose();
    let (_, pure) = mu.yosida_hewitt();
    let mut rows = Vec::new();
    for &s in &chosen {
        let mut row = json!({
            "set": ground.labels_of(s),
            "measurable": mu.algebra().contains(s),
            "outer_variation": mu.abs().outer_measure(s)?.to_string(),
        });
        if mu.algebra().contains(s) {
            row["value"] = json!(mu.evaluate(s)?.to_string());
            row["total_variation"] = json!(mu.total_variation(s)?.to_string());
            row["positive"] = json!(pos.evaluate(s)?.to_string());
            row["negative"] = json!(neg.evaluate(s)?.to_string());
        }
        rows.push(row);
    }
    let mut out = json!({
        "atoms": ground.labels(),
        "blocks": mu.algebra().blocks().iter().map(|b| ground.labels_of(*b)).collect::<Vec<_>>(),
        "sets": rows,
        "jordan": { "positive": MeasureFixture::from_measure(&ground, &pos), "negative": MeasureFixture::from_measure(&ground, &neg) },
        "pure_part_zero": pure.is_zero(),
    });
    if let Some(nu_fx) = nu {
        let (g2, nu) = nu_fx.measure()?;
        out["nu"] = pair_result(&ground, &mu, &g2, &nu)?;
    }
    Ok(out)
}

fn pair_result(
    ground: &GroundSet,
    mu: &FAMeasure,
    other: &GroundSet,
    nu: &FAMeasure,
) -> Result<Value, pure_measure_core::LatticeError> {
    if ground.labels() != other.labels() {
        return Err(pure_measure_core::LatticeError::AlgebraMismatch);
    }
    let meet = mu.meet(nu)?;
    Ok(json!({
        "meet": MeasureFixture::from_measure(ground, &meet),
        "join": MeasureFixture::from_measure(ground, &mu.join(nu)?),
        "orthogonal": mu.is_orthogonal(nu)?,
        "dominated": mu.le(nu)?,
        "continuous": mu.continuity_check(nu, Continuity::Ac)?,
        "weakly_continuous": mu.continuity_check(nu, Continuity::Wac)?,
    }))
}

fn execute(r: &Resolver<'_>, task: &Task) -> Res<Output> {
    let settings = r.settings(task);
    let name = task.name();
    match task {
        Task::DensityRatio {
            region,
            feature,
            omega,
            weight,
            ..
        } => {
            let omega = r.region(omega)?;
            let w = weight.as_deref().map(|w| r.field(w)).transpose()?;
            let p = density_probe(
                &r.region(region)?,
                &r.feature(feature)?,
                &omega,
                w.as_deref(),
                &settings,
            )?;
            Output::probe(name, p)
        }
        Task::SharpIntegral {
            integrand,
            feature,
            omega,
            weight,
            ..
        } => {
            let omega = r.region(omega)?;
            let f = r.expr(integrand)?;
            check_arity(&f, omega.dim(), integrand)?;
            let w = weight.as_deref().map(|w| r.field(w)).transpose()?;
            let p = sharp_integral(
                f.as_ref(),
                &r.feature(feature)?,
                &omega,
                w.as_deref(),
                &settings,
            )?;
            Output::probe(name, p)
        }
        Task::ActionInterval {
            integrand,
            feature,
            omega,
            ..
        } => {
            let omega = r.region(omega)?;
            let f = r.expr(integrand)?;
            check_arity(&f, omega.dim(), integrand)?;
            Output::plain(action_interval(
                f.as_ref(),
                &r.feature(feature)?,
                &omega,
                &settings,
            )?)
        }
        Task::ConeDensity {
            point,
            direction,
            half_angle,
            omega,
            ..
        } => {
            let p = cone_density(point, direction, *half_angle, &r.region(omega)?, &settings)?;
            Output::probe(name, p)
        }
        Task::SigmaProbe {
            family,
            count,
            feature,
            omega,
            ..
        } => {
            let omega = r.region(omega)?;
            let fam: Box<dyn RegionFamily> = match family {
                FamilySpec::Slabs { dim } => Box::new(SlabFamily { dim: *dim }),
                FamilySpec::Members(ms) => Box::new(ExplicitFamily {
                    members: ms.iter().map(|m| r.region(m)).collect::<Res<_>>()?,
                    dim: omega.dim(),
                }),
            };
            let rep = sigma_probe(
                fam.as_ref(),
                *count,
                &r.feature(feature)?,
                &omega,
                &settings,
            )?;
            let mut series: Vec<(String, ProbeResult)> = rep
                .members
                .iter()
                .enumerate()
                .map(|(k, p)| (format!("{name}.member{k}"), p.clone()))
                .collect();
            series.push((format!("{name}.union"), rep.union.clone()));
            Ok(Output {
                result: to_value(&rep)?,
                series,
            })
        }
        Task::AuraReport { feature, omega, .. } => Output::plain(aura_report(
            &r.feature(feature)?,
            &r.region(omega)?,
            &settings,
        )?),
        Task::BoundaryTrace {
            integrand,
            omega,
            point,
            ..
        } => {
            let omega = r.region(omega)?;
            let f = r.expr(integrand)?;
            check_arity(&f, omega.dim(), integrand)?;
            Output::probe(name, boundary_trace(f.as_ref(), &omega, point, &settings)?)
        }
        Task::DensityGradient {
            function,
            point,
            omega,
            lipschitz,
            ..
        } => {
            let rep =
                density_gradient(&r.function(function)?, point, &r.region(omega)?, &settings)?;
            let mut v = to_value(&rep)?;
            if let Some(l) = lipschitz {
                v["within_lipschitz"] = json!(rep.gradient_box.within_lipschitz(*l, settings.tol));
            }
            Ok(Output {
                result: v,
                series: Vec::new(),
            })
        }
        Task::CalculusRuleCheck {
            rule,
            f1,
            f2,
            point,
            omega,
            ..
        } => {
            let (f1, f2) = (r.function(f1)?, r.function(f2)?);
            let rep = calculus_rule_check(
                *rule,
                &f1,
                &f2,
                point,
                &r.region(omega)?,
                &settings,
                settings.tol,
            )?;
            Output::plain(rep)
        }
        Task::CollarAverage {
            integrand, fixture, ..
        } => {
            let f = r.expr(integrand)?;
            check_arity(&f, fixture.dim(), integrand)?;
            let p = collar_average(f.as_ref(), fixture, &settings)?;
            let reference = pure_measure_core::surface_reference(f.as_ref(), fixture)?;
            let mut out = Output::probe(name, p)?;
            out.result["surface_reference"] = json!(reference);
            Ok(out)
        }
        Task::GaussCheck {
            field,
            divergence,
            fixture,
            ..
        } => {
            let mut phi = VectorField::new(field.iter().map(|c| r.field(c)).collect::<Res<_>>()?);
            if let Some(d) = divergence {
                phi = phi.with_divergence(r.field(d)?);
            }
            Output::plain(gauss_check(&phi, fixture, &settings.sample)?)
        }
        Task::Lattice {
            measure, nu, sets, ..
        } => {
            let v = lattice_result(measure, nu.as_ref(), sets)
                .map_err(|e| unsupported(e.to_string()))?;
            Ok(Output {
                result: v,
                series: Vec::new(),
            })
        }
    }
}

fn write(path: &Path, contents: &str) -> Result<(), RunError> {
    fs::write(path, contents).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs the tasks (all of them when `only` is empty) and writes the outputs
/// into `out_dir`.
pub fn run(config: &Config, out_dir: &Path, only: &[String]) -> Result<Report, RunError> {
    for name in only {
        if !config.tasks.iter().any(|t| t.name() == name) {
            return Err(RunError::UnknownTask(name.clone()));
        }
    }
    fs::create_dir_all(out_dir).map_err(|source| RunError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let resolver = Resolver::new(config);
    let mut outcomes = Vec::new();
    for task in &config.tasks {
        if !only.is_empty() && !only.iter().any(|n| n == task.name()) {
            continue;
        }
        let mut outcome = TaskOutcome {
            name: task.name().to_string(),
            kind: task.kind().to_string(),
            status: "ok".into(),
            error: None,
            result: None,
            csv: Vec::new(),
        };
        let series = match execute(&resolver, task) {
            Ok(out) => {
                outcome.result = Some(out.result);
                out.series
            }
            Err(e) => {
                outcome.status = "error".into();
                outcome.error = Some(e.to_string());
                match e {
                    // the series still shows where the mass blows up
                    EngineError::Unintegrable(p) => {
                        outcome.result = Some(to_value(p.as_ref()).unwrap_or(Value::Null));
                        vec![(task.name().to_string(), *p)]
                    }
                    _ => Vec::new(),
                }
            }
        };
        for (stem, probe) in series {
            let file = format!("{stem}.csv");
            write(&out_dir.join(&file), &series_csv(&probe))?;
            outcome.csv.push(file);
        }
        outcomes.push(outcome);
    }
    let report = Report {
        version: VERSION.to_string(),
        config: config.clone(),
        tasks: outcomes,
    };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    write(&out_dir.join("report.json"), &text)?;
    Ok(report)
}
