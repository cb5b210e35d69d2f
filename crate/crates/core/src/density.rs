//! Density measures evaluated as limits of weighted volume ratios over the
//! shrinking reference sets `F_δ ∩ Ω`.
//!
//! Every δ-level draws its samples from one stream keyed by δ, so quantities
//! probed at the same δ (numerator and denominator, nested sets, family
//! members) see identical points.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Bounds, Feature, GeometryError, Region};
use crate::quadrature::{
    ess_range_stream, mc_integral_stream, mc_ratio, QuadratureError, RatioEstimate, SampleSpec,
    ScalarField,
};

/// A shareable scalar field.
pub type Field = Arc<dyn ScalarField>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("reference set F_δ ∩ Ω carries no mass at δ = {delta}")]
    VanishingReference { delta: f64 },
    #[error("series has {0} entries, at least 3 are required")]
    TooShort(usize),
    #[error("integrand is not integrable near the feature ({} non-finite, {} over cap)", .0.nonfinite, .0.over_cap)]
    Unintegrable(Box<ProbeResult>),
    #[error("point lies {distance:e} from the boundary")]
    NotOnBoundary { distance: f64 },
    #[error("unsupported fixture: {0}")]
    UnsupportedFixture(String),
    #[error("cone half-angle {0} must lie in (0, π/2)")]
    BadAngle(f64),
    #[error("bad schedule: {0}")]
    BadSchedule(String),
}

pub type Result<T, E = EngineError> = std::result::Result<T, E>;

/// Geometric radii `δ_k = delta0 · ratio^k`, `k = 0..count`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaSchedule {
    /// `None` picks half the feature's bounding-box diagonal, or half of
    /// Ω's when the feature is a point.
    #[serde(default)]
    pub delta0: Option<f64>,
    #[serde(default = "default_ratio")]
    pub ratio: f64,
    #[serde(default = "default_count")]
    pub count: usize,
}

fn default_ratio() -> f64 {
    0.5
}

fn default_count() -> usize {
    12
}

impl Default for DeltaSchedule {
    fn default() -> Self {
        Self {
            delta0: None,
            ratio: default_ratio(),
            count: default_count(),
        }
    }
}

impl DeltaSchedule {
    pub fn new(delta0: f64, ratio: f64, count: usize) -> Result<Self> {
        let s = Self {
            delta0: Some(delta0),
            ratio,
            count,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(d) = self.delta0 {
            if !(d > 0.0 && d.is_finite()) {
                return Err(EngineError::BadSchedule(format!(
                    "delta0 = {d} must be positive"
                )));
            }
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(EngineError::BadSchedule(format!(
                "ratio = {} must lie in (0, 1)",
                self.ratio
            )));
        }
        if self.count < 3 {
            return Err(EngineError::BadSchedule(format!(
                "count = {} must be at least 3",
                self.count
            )));
        }
        Ok(())
    }

    pub fn auto_delta0(feature: &Feature, omega: &Region) -> f64 {
        let half_diag = |b: Bounds| match b {
            Bounds::Bounded(b) if b.diagonal() > 0.0 && b.diagonal().is_finite() => {
                Some(b.diagonal() / 2.0)
            }
            _ => None,
        };
        half_diag(feature.bounds())
            .or_else(|| half_diag(omega.bounds()))
            .unwrap_or(1.0)
    }

    pub fn resolve(&self, feature: &Feature, omega: &Region) -> Result<Self> {
        self.validate()?;
        Ok(Self {
            delta0: Some(
                self.delta0
                    .unwrap_or_else(|| Self::auto_delta0(feature, omega)),
            ),
            ..self.clone()
        })
    }

    pub fn deltas(&self, feature: &Feature, omega: &Region) -> Result<Vec<f64>> {
        let d0 = self.resolve(feature, omega)?.delta0.unwrap_or(1.0);
        Ok((0..self.count)
            .map(|k| d0 * self.ratio.powi(k as i32))
            .collect())
    }
}

/// Everything a probe needs besides its inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeSettings {
    pub schedule: DeltaSchedule,
    pub sample: SampleSpec,
    /// Spread below which a tail window counts as converged.
    pub tol: f64,
    /// Quantile level of the essential-range surrogate.
    pub quantile: f64,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        Self {
            schedule: DeltaSchedule::default(),
            sample: SampleSpec::default(),
            tol: 0.02,
            quantile: 0.001,
        }
    }
}

impl ProbeSettings {
    pub fn new(schedule: DeltaSchedule, sample: SampleSpec) -> Self {
        Self {
            schedule,
            sample,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, tol: f64) -> Self {
        Self { lo, hi, tol }
    }

    pub fn point(x: f64, tol: f64) -> Self {
        Self::new(x, x, tol)
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_valid(&self) -> bool {
        self.lo <= self.hi + self.tol
    }

    /// Membership with both ends widened by `tol`.
    pub fn contains(&self, x: f64) -> bool {
        self.lo - self.tol <= x && x <= self.hi + self.tol
    }

    /// `self ⊆ other`, with `other` widened by `slack`.
    pub fn within(&self, other: &Self, slack: f64) -> bool {
        self.lo >= other.lo - slack && self.hi <= other.hi + slack
    }

    /// Minkowski sum.
    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.lo + other.lo, self.hi + other.hi, self.tol + other.tol)
    }

    pub fn scale(&self, c: f64) -> Self {
        let (a, b) = (c * self.lo, c * self.hi);
        Self::new(a.min(b), a.max(b), c.abs() * self.tol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Converged,
    Oscillating,
    Insufficient,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub delta: f64,
    pub value: f64,
    pub stderr: f64,
    pub hits: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub series: Vec<SeriesPoint>,
    pub limit: Interval,
    pub verdict: Verdict,
    /// Some level saw more non-finite or over-cap samples than tolerated.
    pub unbounded: bool,
    pub nonfinite: usize,
    pub over_cap: usize,
}

impl ProbeResult {
    /// Midpoint of the limit interval.
    pub fn value(&self) -> f64 {
        self.limit.mid()
    }

    pub fn is_converged(&self) -> bool {
        self.verdict == Verdict::Converged
    }
}

fn window(s: &[SeriesPoint]) -> (f64, f64) {
    s.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.value - p.stderr), hi.max(p.value + p.stderr))
        })
}

/// Tail-window limit test on a series ordered by decreasing δ.
///
/// With `w = ⌈K/3⌉`, the last `w` entries widened by their stderr give
/// `[lo, hi]`. The verdict is converged when `hi − lo ≤ tol`. It is
/// oscillating when the spread stays above `tol`, has not shrunk below a
/// quarter of the previous window's spread, and stays inside that window's
/// envelope widened by half its spread. Anything else is insufficient.
pub fn limit_estimate(series: &[SeriesPoint], tol: f64) -> Result<(Interval, Verdict)> {
    let k = series.len();
    if k < 3 {
        return Err(EngineError::TooShort(k));
    }
    let w = k.div_ceil(3);
    let (lo, hi) = window(&series[k - w..]);
    if !(lo.is_finite() && hi.is_finite()) {
        return Ok((Interval::new(lo, hi, tol), Verdict::Insufficient));
    }
    let interval = Interval::new(lo, hi, tol);
    let spread = hi - lo;
    if spread <= tol {
        return Ok((interval, Verdict::Converged));
    }
    let (plo, phi) = window(&series[k - 2 * w..k - w]);
    let prev = phi - plo;
    let bounded = lo >= plo - prev / 2.0 && hi <= phi + prev / 2.0;
    let verdict = if prev > tol && spread >= prev / 4.0 && bounded {
        Verdict::Oscillating
    } else {
        Verdict::Insufficient
    };
    Ok((interval, verdict))
}

/// `F_δ ∩ Ω`.
pub fn reference_set(feature: &Feature, omega: &Region, delta: f64) -> Result<Region> {
    if feature.dim() != omega.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: omega.dim(),
            found: feature.dim(),
        }
        .into());
    }
    Ok(Region::intersection(vec![
        feature.neighborhood(delta)?,
        omega.clone(),
    ])?)
}

/// Stream key shared by everything sampled at radius `delta`.
fn stream(delta: f64) -> u64 {
    delta.to_bits()
}

fn indicator(a: &Region) -> impl Fn(&[f64]) -> f64 + Send + Sync + '_ {
    move |x: &[f64]| if a.contains(x) { 1.0 } else { 0.0 }
}

fn ratio_at(
    g: &dyn ScalarField,
    feature: &Feature,
    omega: &Region,
    delta: f64,
    weight: Option<&dyn ScalarField>,
    spec: &SampleSpec,
) -> Result<RatioEstimate> {
    let reference = reference_set(feature, omega, delta)?;
    match mc_ratio(&reference, weight, g, spec, stream(delta))? {
        Some(r) if r.hits > 0 => Ok(r),
        _ => Err(EngineError::VanishingReference { delta }),
    }
}

/// `∫_{A∩F_δ∩Ω} w dλ / ∫_{F_δ∩Ω} w dλ`, with `w ≡ 1` when no weight is given.
pub fn density_ratio(
    a: &Region,
    feature: &Feature,
    omega: &Region,
    delta: f64,
    weight: Option<&dyn ScalarField>,
    spec: &SampleSpec,
) -> Result<crate::quadrature::Estimate> {
    Ok(ratio_at(&indicator(a), feature, omega, delta, weight, spec)?.as_estimate())
}

/// Weighted means of `g(δ, ·)` over `F_δ ∩ Ω` along the schedule, with the
/// limit verdict. Unbounded levels are flagged, not rejected.
pub(crate) fn mean_series<G>(
    g: G,
    feature: &Feature,
    omega: &Region,
    weight: Option<&dyn ScalarField>,
    settings: &ProbeSettings,
) -> Result<ProbeResult>
where
    G: Fn(f64, &[f64]) -> f64 + Send + Sync,
{
    let deltas = settings.schedule.deltas(feature, omega)?;
    let levels: Vec<RatioEstimate> = deltas
        .par_iter()
        .map(|&delta| {
            let at = |x: &[f64]| g(delta, x);
            ratio_at(&at, feature, omega, delta, weight, &settings.sample)
        })
        .collect::<Result<_>>()?;
    let series: Vec<SeriesPoint> = deltas
        .iter()
        .zip(&levels)
        .map(|(&delta, r)| SeriesPoint {
            delta,
            value: r.ratio,
            stderr: r.stderr,
            hits: r.hits,
        })
        .collect();
    let (limit, verdict) = limit_estimate(&series, settings.tol)?;
    Ok(ProbeResult {
        series,
        limit,
        verdict,
        unbounded: levels
            .iter()
            .any(|r| r.as_estimate().is_unbounded(&settings.sample)),
        nonfinite: levels.iter().map(|r| r.nonfinite).sum(),
        over_cap: levels.iter().map(|r| r.over_cap).sum(),
    })
}

/// Density profile `δ ↦ density_ratio(A, F, Ω, δ)` and its limit.
pub fn density_probe(
    a: &Region,
    feature: &Feature,
    omega: &Region,
    weight: Option<&dyn ScalarField>,
    settings: &ProbeSettings,
) -> Result<ProbeResult> {
    let ind = indicator(a);
    mean_series(|_, x| ind(x), feature, omega, weight, settings)
}

/// The sharp integral `∮_F f dμ` as the limit of weighted means of `f`
/// over `F_δ ∩ Ω`. Fails with [`EngineError::Unintegrable`], carrying the
/// full series, when the quadrature flags `f` as unbounded.
pub fn sharp_integral(
    f: &dyn ScalarField,
    feature: &Feature,
    omega: &Region,
    weight: Option<&dyn ScalarField>,
    settings: &ProbeSettings,
) -> Result<ProbeResult> {
    let res = mean_series(|_, x| f.eval(x), feature, omega, weight, settings)?;
    if res.unbounded {
        return Err(EngineError::Unintegrable(Box::new(res)));
    }
    Ok(res)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionLevel {
    pub delta: f64,
    pub lower: f64,
    pub upper: f64,
    /// Running max of `lower` over the enveloped levels.
    pub env_lower: f64,
    /// Running min of `upper` over the enveloped levels.
    pub env_upper: f64,
    pub hits: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionInterval {
    pub interval: Interval,
    pub levels: Vec<ActionLevel>,
}

/// `[lim ess inf, lim ess sup]` of `g(δ, ·)` on `F_δ ∩ Ω`, estimated by
/// sample quantiles under a monotone envelope in δ.
///
/// For a field that does not depend on δ the envelope runs over the whole
/// schedule. A δ-dependent field only has comparable levels near the limit,
/// so its envelope starts at the tail window of [`limit_estimate`].
pub(crate) fn action_interval_by<G>(
    g: G,
    depends_on_delta: bool,
    feature: &Feature,
    omega: &Region,
    settings: &ProbeSettings,
) -> Result<ActionInterval>
where
    G: Fn(f64, &[f64]) -> f64 + Send + Sync,
{
    let deltas = settings.schedule.deltas(feature, omega)?;
    let ranges = deltas
        .par_iter()
        .map(|&delta| {
            let reference = reference_set(feature, omega, delta)?;
            let at = |x: &[f64]| g(delta, x);
            match ess_range_stream(
                &at,
                &reference,
                &settings.sample,
                settings.quantile,
                stream(delta),
            ) {
                Err(QuadratureError::NoHits) => Err(EngineError::VanishingReference { delta }),
                other => Ok(other?),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let start = if depends_on_delta {
        deltas.len() - deltas.len().div_ceil(3)
    } else {
        0
    };
    let mut env = (f64::NEG_INFINITY, f64::INFINITY);
    let levels: Vec<ActionLevel> = deltas
        .iter()
        .zip(ranges)
        .enumerate()
        .map(|(k, (&delta, r))| {
            if k < start {
                env = (r.lower, r.upper);
            } else {
                env = (env.0.max(r.lower), env.1.min(r.upper));
            }
            ActionLevel {
                delta,
                lower: r.lower,
                upper: r.upper,
                env_lower: env.0,
                env_upper: env.1,
                hits: r.hits,
            }
        })
        .collect();
    let (mut lo, mut hi) = env;
    if lo > hi {
        let m = 0.5 * (lo + hi);
        (lo, hi) = (m, m);
    }
    Ok(ActionInterval {
        interval: Interval::new(lo, hi, settings.tol),
        levels,
    })
}

/// The set of values `⟨μ, f⟩` over density measures at `F`.
pub fn action_interval(
    f: &dyn ScalarField,
    feature: &Feature,
    omega: &Region,
    settings: &ProbeSettings,
) -> Result<ActionInterval> {
    action_interval_by(|_, x| f.eval(x), false, feature, omega, settings)
}

/// Density of the cone `K(x, v, α)` at the point `x`.
pub fn cone_density(
    x: &[f64],
    v: &[f64],
    alpha: f64,
    omega: &Region,
    settings: &ProbeSettings,
) -> Result<ProbeResult> {
    if !(alpha > 0.0 && alpha < std::f64::consts::FRAC_PI_2) {
        return Err(EngineError::BadAngle(alpha));
    }
    let cone = Region::cone(x.to_vec(), v.to_vec(), alpha)?;
    let feature = Feature::point(x.to_vec())?;
    density_probe(&cone, &feature, omega, None, settings)
}

/// An indexed family of regions with a known union.
pub trait RegionFamily: Sync {
    fn member(&self, k: usize) -> Region;
    /// The union of the whole family, not just of the probed members.
    fn union(&self) -> Region;
}

/// Slabs `[1/(k+2), 1/(k+1)) × [−1, 1]^{n−1}`, `k = 0, 1, …`, whose union
/// is `(0, 1/2) × [−1, 1]^{n−1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SlabFamily {
    pub dim: usize,
}

impl SlabFamily {
    fn slab(&self, a: f64, b: f64) -> Region {
        let mut lo = vec![-1.0; self.dim];
        let mut hi = vec![1.0; self.dim];
        lo[0] = a;
        hi[0] = b;
        Region::Box { lo, hi }
    }
}

impl RegionFamily for SlabFamily {
    fn member(&self, k: usize) -> Region {
        self.slab(1.0 / (k as f64 + 2.0), 1.0 / (k as f64 + 1.0))
    }

    fn union(&self) -> Region {
        self.slab(0.0, 0.5)
    }
}

/// A finite family given by its members; the union is theirs.
#[derive(Clone, Debug, PartialEq)]
pub struct ExplicitFamily {
    pub members: Vec<Region>,
    pub dim: usize,
}

impl RegionFamily for ExplicitFamily {
    fn member(&self, k: usize) -> Region {
        self.members
            .get(k)
            .cloned()
            .unwrap_or_else(|| empty_region(self.dim))
    }

    fn union(&self) -> Region {
        if self.members.is_empty() {
            empty_region(self.dim)
        } else {
            Region::Union(self.members.clone())
        }
    }
}

fn empty_region(dim: usize) -> Region {
    Region::empty(dim).unwrap_or(Region::Union(Vec::new()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaReport {
    pub members: Vec<ProbeResult>,
    pub member_limits: Vec<f64>,
    pub sum: f64,
    pub union: ProbeResult,
    pub union_limit: f64,
    pub difference: f64,
    /// `tol` plus the half-widths of every limit interval involved.
    pub tolerance: f64,
    pub violation: bool,
}

/// Compares `Σ_k μ(A_k)` over the first `m` members with `μ(⋃ A_k)`.
pub fn sigma_probe(
    family: &dyn RegionFamily,
    m: usize,
    feature: &Feature,
    omega: &Region,
    settings: &ProbeSettings,
) -> Result<SigmaReport> {
    let members = (0..m)
        .map(|k| density_probe(&family.member(k), feature, omega, None, settings))
        .collect::<Result<Vec<_>>>()?;
    let union = density_probe(&family.union(), feature, omega, None, settings)?;
    let member_limits: Vec<f64> = members.iter().map(ProbeResult::value).collect();
    let sum: f64 = member_limits.iter().sum();
    let union_limit = union.value();
    let difference = (sum - union_limit).abs();
    let tolerance = settings.tol
        + members.iter().map(|r| r.limit.width() / 2.0).sum::<f64>()
        + union.limit.width() / 2.0;
    Ok(SigmaReport {
        member_limits,
        sum,
        union_limit,
        difference,
        tolerance,
        violation: difference > tolerance,
        members,
        union,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuraLevel {
    pub delta: f64,
    /// `λ(F_δ ∩ Ω)`.
    pub volume: f64,
    pub stderr: f64,
    pub hits: usize,
    /// Density of `F_δ ∩ Ω` itself.
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuraReport {
    pub levels: Vec<AuraLevel>,
    /// Volumes decrease along the schedule within their stderr.
    pub decreasing: bool,
}

/// Volumes of `F_δ ∩ Ω` along the schedule, each carrying full mass.
pub fn aura_report(
    feature: &Feature,
    omega: &Region,
    settings: &ProbeSettings,
) -> Result<AuraReport> {
    let deltas = settings.schedule.deltas(feature, omega)?;
    let levels = deltas
        .par_iter()
        .map(|&delta| {
            let reference = reference_set(feature, omega, delta)?;
            let vol = mc_integral_stream(
                &|_: &[f64]| 1.0,
                &reference,
                &settings.sample,
                stream(delta),
            )?;
            if vol.hits == 0 {
                return Err(EngineError::VanishingReference { delta });
            }
            let mass = ratio_at(
                &indicator(&reference),
                feature,
                omega,
                delta,
                None,
                &settings.sample,
            )?;
            Ok(AuraLevel {
                delta,
                volume: vol.value,
                stderr: vol.stderr,
                hits: vol.hits,
                mass: mass.ratio,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let decreasing = levels
        .windows(2)
        .all(|w| w[1].volume <= w[0].volume + w[0].stderr + w[1].stderr);
    Ok(AuraReport { levels, decreasing })
}
