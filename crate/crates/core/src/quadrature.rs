//! Seeded Monte Carlo quadrature over regions.
//!
//! Samples are drawn uniformly from a bounding box in fixed-size chunks.
//! Each chunk owns a generator seeded from `(seed, stream, chunk)`, chunks
//! are evaluated in parallel and merged in index order, so an estimate
//! depends only on the [`SampleSpec`] and never on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Aabb, Bounds, Region, MAX_DIM};

/// Two-sided 95% normal quantile; every reported `stderr` is this many
/// standard errors.
pub const Z95: f64 = 1.96;

/// Sampling units per chunk.
pub const CHUNK_UNITS: usize = 2048;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("region is unbounded and no bounding box was supplied")]
    UnboundedRegion,
    #[error("no sample landed in the region")]
    NoHits,
    #[error("invalid sample specification: {0}")]
    InvalidSpec(String),
}

pub type Result<T, E = QuadratureError> = std::result::Result<T, E>;

/// A real-valued field on ℝⁿ.
pub trait ScalarField: Send + Sync {
    fn eval(&self, x: &[f64]) -> f64;
}

impl<F> ScalarField for F
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn eval(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    /// Number of sample points `N`.
    pub samples: usize,
    pub seed: u64,
    /// Overrides the region's own bounding box.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bbox: Option<Aabb>,
    /// Draw points in antithetic pairs `(x, x̄)` reflected through the
    /// centre of the sampling box. Odd integrands about that centre then
    /// cancel pair by pair.
    #[serde(default)]
    pub symmetric: bool,
    /// Integrand samples with `|f| > magnitude_cap` count as unbounded.
    pub magnitude_cap: f64,
    /// Largest tolerated fraction of non-finite or over-cap samples.
    pub unbounded_fraction: f64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self {
            samples: 200_000,
            seed: 0,
            bbox: None,
            symmetric: false,
            magnitude_cap: 1e3,
            unbounded_fraction: 0.0,
        }
    }
}

impl SampleSpec {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            ..Self::default()
        }
    }

    pub fn symmetric(mut self, on: bool) -> Self {
        self.symmetric = on;
        self
    }

    pub fn with_bbox(mut self, bbox: Aabb) -> Self {
        self.bbox = Some(bbox);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(QuadratureError::InvalidSpec("samples must be ≥ 1".into()));
        }
        if !(self.magnitude_cap > 0.0) {
            return Err(QuadratureError::InvalidSpec(
                "magnitude_cap must be positive".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.unbounded_fraction) {
            return Err(QuadratureError::InvalidSpec(
                "unbounded_fraction must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }

    fn points_per_unit(&self) -> usize {
        if self.symmetric {
            2
        } else {
            1
        }
    }

    fn units(&self) -> usize {
        self.samples.div_ceil(self.points_per_unit())
    }

    /// Points actually drawn (rounded up to whole antithetic pairs).
    pub fn drawn(&self) -> usize {
        self.units() * self.points_per_unit()
    }
}

/// A Monte Carlo estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    /// `1.96 σ̂ / √N`.
    pub stderr: f64,
    /// Samples that landed in the region.
    pub hits: usize,
    #[serde(rename = "N")]
    pub samples: usize,
    pub seed: u64,
    /// Hits whose integrand value was not finite; excluded from the mean.
    #[serde(default)]
    pub nonfinite: usize,
    /// Hits whose integrand magnitude exceeded the cap; still averaged.
    #[serde(default)]
    pub over_cap: usize,
}

impl Estimate {
    fn empty(spec: &SampleSpec) -> Self {
        Self {
            value: 0.0,
            stderr: 0.0,
            hits: 0,
            samples: spec.drawn(),
            seed: spec.seed,
            nonfinite: 0,
            over_cap: 0,
        }
    }

    /// Whether the share of non-finite or over-cap samples exceeds the
    /// tolerated fraction of hits.
    pub fn is_unbounded(&self, spec: &SampleSpec) -> bool {
        let bad = (self.nonfinite + self.over_cap) as f64;
        bad > 0.0 && bad > spec.unbounded_fraction * self.hits.max(1) as f64
    }
}

/// Quantile surrogate for `(ess inf, ess sup)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EssRange {
    pub lower: f64,
    pub upper: f64,
    pub lower_unbounded: bool,
    pub upper_unbounded: bool,
    pub hits: usize,
}

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn chunk_seed(seed: u64, stream: u64, chunk: u64) -> u64 {
    mix64(mix64(mix64(seed) ^ stream) ^ chunk)
}

/// Resolves the box to sample from: the region's bounds, cut down to the
/// spec's box when one is given and tightened by [`Region::clipped_bounds`].
/// Integrals are taken over `region ∩ bbox`. `Ok(None)` means that set is
/// empty.
pub fn sampling_box(region: &Region, spec: &SampleSpec) -> Result<Option<Aabb>> {
    let clip = match (&spec.bbox, region.bounds()) {
        (_, Bounds::Empty) => return Ok(None),
        (Some(b), Bounds::Bounded(own)) => match b.intersect(&own) {
            Some(c) => c,
            None => return Ok(None),
        },
        (Some(b), Bounds::Unbounded) => b.clone(),
        (None, Bounds::Bounded(own)) => own,
        (None, Bounds::Unbounded) => return Err(QuadratureError::UnboundedRegion),
    };
    Ok(region.clipped_bounds(&clip).filter(|t| t.volume() > 0.0))
}

/// Per-chunk state of a reduction.
pub(crate) trait Accumulator: Send + Sized {
    fn merge(&mut self, later: Self);
}

/// Runs `visit` over every sampling unit (one point, or an antithetic pair)
/// and merges per-chunk accumulators in chunk order.
pub(crate) fn for_each_unit<A, M, V>(
    bbox: &Aabb,
    spec: &SampleSpec,
    stream: u64,
    make: M,
    visit: V,
) -> A
where
    A: Accumulator,
    M: Fn() -> A + Sync,
    V: Fn(&mut A, &[f64], Option<&[f64]>) + Sync,
{
    let n = bbox.dim();
    let units = spec.units();
    let chunks = units.div_ceil(CHUNK_UNITS);
    let width: Vec<f64> = bbox.lo.iter().zip(&bbox.hi).map(|(l, h)| h - l).collect();
    let partials: Vec<A> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(chunk_seed(spec.seed, stream, c as u64));
            let mut acc = make();
            let count = CHUNK_UNITS.min(units - c * CHUNK_UNITS);
            let mut p = [0.0; MAX_DIM];
            let mut q = [0.0; MAX_DIM];
            for _ in 0..count {
                for i in 0..n {
                    let t = rng.random::<f64>() * width[i];
                    p[i] = bbox.lo[i] + t;
                    q[i] = bbox.hi[i] - t;
                }
                if spec.symmetric {
                    visit(&mut acc, &p[..n], Some(&q[..n]));
                } else {
                    visit(&mut acc, &p[..n], None);
                }
            }
            acc
        })
        .collect();
    let mut it = partials.into_iter();
    let mut total = it.next().unwrap_or_else(&make);
    for part in it {
        total.merge(part);
    }
    total
}

/// Sums of per-unit values `y_u` plus bookkeeping.
#[derive(Clone, Debug, Default)]
struct MeanStats {
    sum: f64,
    sum_sq: f64,
    units: usize,
    hits: usize,
    nonfinite: usize,
    over_cap: usize,
}

impl Accumulator for MeanStats {
    fn merge(&mut self, later: Self) {
        self.sum += later.sum;
        self.sum_sq += later.sum_sq;
        self.units += later.units;
        self.hits += later.hits;
        self.nonfinite += later.nonfinite;
        self.over_cap += later.over_cap;
    }
}

impl MeanStats {
    fn push(&mut self, y: f64) {
        self.sum += y;
        self.sum_sq += y * y;
        self.units += 1;
    }

    fn mean_and_stderr(&self) -> (f64, f64) {
        let m = self.units as f64;
        let mean = self.sum / m;
        let var = if self.units > 1 {
            ((self.sum_sq - m * mean * mean) / (m - 1.0)).max(0.0)
        } else {
            0.0
        };
        (mean, Z95 * (var / m).sqrt())
    }
}

/// Lebesgue volume of `region`.
pub fn mc_volume(region: &Region, spec: &SampleSpec) -> Result<Estimate> {
    mc_integral(&|_: &[f64]| 1.0, region, spec)
}

/// `∫_region f dλ`. Non-finite samples are tallied and contribute nothing.
pub fn mc_integral(f: &dyn ScalarField, region: &Region, spec: &SampleSpec) -> Result<Estimate> {
    mc_integral_stream(f, region, spec, 0)
}

pub(crate) fn mc_integral_stream(
    f: &dyn ScalarField,
    region: &Region,
    spec: &SampleSpec,
    stream: u64,
) -> Result<Estimate> {
    spec.validate()?;
    let Some(bbox) = sampling_box(region, spec)? else {
        return Ok(Estimate::empty(spec));
    };
    let per_unit = spec.points_per_unit() as f64;
    let cap = spec.magnitude_cap;
    let stats = for_each_unit(&bbox, spec, stream, MeanStats::default, |acc, p, q| {
        let mut y = 0.0;
        for x in std::iter::once(p).chain(q) {
            if region.contains(x) {
                acc.hits += 1;
                let v = f.eval(x);
                if !v.is_finite() {
                    acc.nonfinite += 1;
                    continue;
                }
                if v.abs() > cap {
                    acc.over_cap += 1;
                }
                y += v;
            }
        }
        acc.push(y / per_unit);
    });
    let vol = bbox.volume();
    let (mean, se) = stats.mean_and_stderr();
    Ok(Estimate {
        value: vol * mean,
        stderr: vol * se,
        hits: stats.hits,
        samples: spec.drawn(),
        seed: spec.seed,
        nonfinite: stats.nonfinite,
        over_cap: stats.over_cap,
    })
}

#[derive(Default)]
struct Values {
    finite: Vec<f64>,
    above_cap: bool,
    below_cap: bool,
}

impl Accumulator for Values {
    fn merge(&mut self, later: Self) {
        self.finite.extend(later.finite);
        self.above_cap |= later.above_cap;
        self.below_cap |= later.below_cap;
    }
}

/// Empirical `q` and `1 − q` quantiles of `f` over the samples in `region`.
/// An endpoint is reported as infinite when some sample passes the
/// magnitude cap on that side.
pub fn ess_range(
    f: &dyn ScalarField,
    region: &Region,
    spec: &SampleSpec,
    q: f64,
) -> Result<EssRange> {
    ess_range_stream(f, region, spec, q, 0)
}

pub(crate) fn ess_range_stream(
    f: &dyn ScalarField,
    region: &Region,
    spec: &SampleSpec,
    q: f64,
    stream: u64,
) -> Result<EssRange> {
    spec.validate()?;
    if !(0.0..0.5).contains(&q) {
        return Err(QuadratureError::InvalidSpec(format!(
            "quantile {q} must lie in [0, 0.5)"
        )));
    }
    let bbox = sampling_box(region, spec)?.ok_or(QuadratureError::NoHits)?;
    let cap = spec.magnitude_cap;
    let vals = for_each_unit(&bbox, spec, stream, Values::default, |acc, p, q| {
        for x in std::iter::once(p).chain(q) {
            if region.contains(x) {
                let v = f.eval(x);
                if v.is_nan() {
                    continue;
                }
                acc.above_cap |= v > cap;
                acc.below_cap |= v < -cap;
                if v.is_finite() {
                    acc.finite.push(v);
                }
            }
        }
    });
    let hits = vals.finite.len();
    let mut v = vals.finite;
    if v.is_empty() && !(vals.above_cap || vals.below_cap) {
        return Err(QuadratureError::NoHits);
    }
    let (lower, upper) = quantile_pair(&mut v, q);
    Ok(EssRange {
        lower: if vals.below_cap {
            f64::NEG_INFINITY
        } else {
            lower
        },
        upper: if vals.above_cap { f64::INFINITY } else { upper },
        lower_unbounded: vals.below_cap,
        upper_unbounded: vals.above_cap,
        hits,
    })
}

/// `(v_(⌊q(m−1)⌋), v_(⌈(1−q)(m−1)⌉))` of the sorted values.
pub(crate) fn quantile_pair(v: &mut [f64], q: f64) -> (f64, f64) {
    if v.is_empty() {
        return (f64::NEG_INFINITY, f64::INFINITY);
    }
    let last = (v.len() - 1) as f64;
    let lo_idx = (q * last).floor() as usize;
    let hi_idx = ((1.0 - q) * last).ceil() as usize;
    let (_, lo, _) = v.select_nth_unstable_by(lo_idx, f64::total_cmp);
    let lo = *lo;
    let (_, hi, _) = v.select_nth_unstable_by(hi_idx, f64::total_cmp);
    (lo, *hi)
}

/// Sums for the ratio estimator `Σ y_u / Σ x_u`.
#[derive(Clone, Debug, Default)]
pub(crate) struct RatioStats {
    sx: f64,
    sy: f64,
    sxx: f64,
    syy: f64,
    sxy: f64,
    units: usize,
    pub hits: usize,
    pub nonfinite: usize,
    pub over_cap: usize,
}

impl Accumulator for RatioStats {
    fn merge(&mut self, later: Self) {
        self.sx += later.sx;
        self.sy += later.sy;
        self.sxx += later.sxx;
        self.syy += later.syy;
        self.sxy += later.sxy;
        self.units += later.units;
        self.hits += later.hits;
        self.nonfinite += later.nonfinite;
        self.over_cap += later.over_cap;
    }
}

/// Weighted ratio `∫_R w g dλ / ∫_R w dλ` together with the reference mass
/// `∫_R w dλ`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct RatioEstimate {
    pub ratio: f64,
    pub stderr: f64,
    pub reference_mass: f64,
    pub hits: usize,
    pub samples: usize,
    pub seed: u64,
    pub nonfinite: usize,
    pub over_cap: usize,
}

impl RatioEstimate {
    pub fn as_estimate(&self) -> Estimate {
        Estimate {
            value: self.ratio,
            stderr: self.stderr,
            hits: self.hits,
            samples: self.samples,
            seed: self.seed,
            nonfinite: self.nonfinite,
            over_cap: self.over_cap,
        }
    }
}

/// Ratio estimator over the reference set `reference`, with numerator
/// integrand `g` and optional weight `w ≥ 0`. Numerator and denominator
/// share every sample. Returns `None` when the reference mass is zero.
pub(crate) fn mc_ratio(
    reference: &Region,
    weight: Option<&dyn ScalarField>,
    g: &dyn ScalarField,
    spec: &SampleSpec,
    stream: u64,
) -> Result<Option<RatioEstimate>> {
    spec.validate()?;
    let Some(bbox) = sampling_box(reference, spec)? else {
        return Ok(None);
    };
    let per_unit = spec.points_per_unit() as f64;
    let cap = spec.magnitude_cap;
    let stats = for_each_unit(&bbox, spec, stream, RatioStats::default, |acc, p, q| {
        let (mut x_u, mut y_u) = (0.0, 0.0);
        for x in std::iter::once(p).chain(q) {
            if !reference.contains(x) {
                continue;
            }
            acc.hits += 1;
            let w = weight.map_or(1.0, |w| w.eval(x));
            if !(w.is_finite() && w >= 0.0) {
                acc.nonfinite += 1;
                continue;
            }
            if w == 0.0 {
                continue;
            }
            let v = g.eval(x);
            if !v.is_finite() {
                acc.nonfinite += 1;
                continue;
            }
            if v.abs() > cap {
                acc.over_cap += 1;
            }
            x_u += w;
            y_u += w * v;
        }
        x_u /= per_unit;
        y_u /= per_unit;
        acc.sx += x_u;
        acc.sy += y_u;
        acc.sxx += x_u * x_u;
        acc.syy += y_u * y_u;
        acc.sxy += x_u * y_u;
        acc.units += 1;
    });
    if !(stats.sx > 0.0) {
        return Ok(None);
    }
    let m = stats.units as f64;
    let ratio = stats.sy / stats.sx;
    // delta method: Var(r) ≈ Var(y − r x) / (m x̄²)
    let resid = (stats.syy - 2.0 * ratio * stats.sxy + ratio * ratio * stats.sxx).max(0.0);
    let var = if stats.units > 1 {
        resid / (m - 1.0)
    } else {
        0.0
    };
    let xbar = stats.sx / m;
    let stderr = Z95 * (var / m).sqrt() / xbar;
    Ok(Some(RatioEstimate {
        ratio,
        stderr,
        reference_mass: bbox.volume() * xbar,
        hits: stats.hits,
        samples: spec.drawn(),
        seed: spec.seed,
        nonfinite: stats.nonfinite,
        over_cap: stats.over_cap,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn disk() -> Region {
        Region::ball(vec![0.0, 0.0], 1.0).unwrap()
    }

    #[test]
    fn unit_disk_area() {
        let est = mc_volume(&disk(), &SampleSpec::new(1_000_000, 7)).unwrap();
        assert!((est.value - PI).abs() <= est.stderr, "{est:?}");
        assert!(est.stderr < 0.01);
        assert_eq!(est.samples, 1_000_000);
        assert!(est.hits <= est.samples);
    }

    #[test]
    fn empty_region_has_zero_volume() {
        let empty =
            Region::intersection(vec![disk(), Region::ball(vec![5.0, 0.0], 1.0).unwrap()]).unwrap();
        let est = mc_volume(&empty, &SampleSpec::new(1000, 1)).unwrap();
        assert_eq!((est.value, est.hits), (0.0, 0));
    }

    #[test]
    fn unit_square_volume_is_exact() {
        let sq = Region::cuboid(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let est = mc_volume(&sq, &SampleSpec::new(10_000, 3)).unwrap();
        // every sample of the bounding box is a hit, up to the measure-zero faces
        assert!((est.value - 1.0).abs() <= est.stderr.max(1e-3));
    }

    #[test]
    fn unbounded_region_is_rejected() {
        let h = Region::half_space(vec![1.0, 0.0], 0.0).unwrap();
        assert_eq!(
            mc_volume(&h, &SampleSpec::new(10, 0)),
            Err(QuadratureError::UnboundedRegion)
        );
        let clipped = SampleSpec::new(10_000, 0).with_bbox(Aabb::cube(&[0.0, 0.0], 1.0));
        let est = mc_volume(&h, &clipped).unwrap();
        assert!((est.value - 2.0).abs() < 4.0 * est.stderr + 1e-9);
    }

    #[test]
    fn integral_examples() {
        let spec = SampleSpec::new(400_000, 11);
        let one = mc_integral(&|_: &[f64]| 1.0, &disk(), &spec).unwrap();
        assert_eq!(one, mc_volume(&disk(), &spec).unwrap());
        let x2 = mc_integral(&|x: &[f64]| x[0] * x[0], &disk(), &spec).unwrap();
        assert!((x2.value - PI / 4.0).abs() <= x2.stderr, "{x2:?}");
        let x = mc_integral(&|x: &[f64]| x[0], &disk(), &spec).unwrap();
        assert!(x.value.abs() <= x.stderr, "{x:?}");
    }

    #[test]
    fn symmetric_sampling_cancels_odd_integrands() {
        let spec = SampleSpec::new(10_000, 5).symmetric(true);
        let x = mc_integral(&|x: &[f64]| x[0].powi(3) + x[1], &disk(), &spec).unwrap();
        assert_eq!(x.value, 0.0);
    }

    #[test]
    fn integral_is_linear_on_a_shared_stream() {
        let spec = SampleSpec::new(50_000, 9);
        let f = |x: &[f64]| x[0].sin() + 2.0;
        let g = |x: &[f64]| x[1] * x[1] - x[0];
        let sum = mc_integral(&|x: &[f64]| f(x) + g(x), &disk(), &spec).unwrap();
        let a = mc_integral(&f, &disk(), &spec).unwrap();
        let b = mc_integral(&g, &disk(), &spec).unwrap();
        assert!((sum.value - (a.value + b.value)).abs() <= 1e-12 * sum.value.abs().max(1.0));
        assert_eq!(sum.hits, a.hits);
    }

    #[test]
    fn estimates_are_deterministic_and_thread_independent() {
        let spec = SampleSpec::new(30_000, 42);
        let a = mc_integral(&|x: &[f64]| x[0].exp(), &disk(), &spec).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| mc_integral(&|x: &[f64]| x[0].exp(), &disk(), &spec).unwrap());
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
        let c = mc_integral(
            &|x: &[f64]| x[0].exp(),
            &disk(),
            &SampleSpec::new(30_000, 43),
        )
        .unwrap();
        assert_ne!(a.value, c.value);
    }

    #[test]
    fn stderr_shrinks_like_root_n() {
        let small = mc_volume(&disk(), &SampleSpec::new(100_000, 1)).unwrap();
        let large = mc_volume(&disk(), &SampleSpec::new(200_000, 1)).unwrap();
        let ratio = small.stderr / large.stderr;
        assert!((ratio / 2f64.sqrt() - 1.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn nonfinite_samples_are_tallied() {
        let line = Region::interval(-1.0, 1.0).unwrap();
        let spec = SampleSpec::new(10_000, 2);
        let est = mc_integral(
            &|x: &[f64]| if x[0] > 0.5 { f64::NAN } else { 1.0 },
            &line,
            &spec,
        )
        .unwrap();
        assert!(est.nonfinite > 2000 && est.nonfinite < 3000);
        assert!((est.value - 1.5).abs() < 0.05);
        assert!(est.is_unbounded(&spec));
    }

    #[test]
    fn ess_range_examples() {
        let spec = SampleSpec::new(200_000, 4);
        let near_zero = Region::interval(0.0, 0.1).unwrap();
        let r = ess_range(&|x: &[f64]| (1.0 / x[0]).sin(), &near_zero, &spec, 0.001).unwrap();
        assert!(
            (r.lower + 1.0).abs() < 0.05 && (r.upper - 1.0).abs() < 0.05,
            "{r:?}"
        );
        let c = ess_range(&|_: &[f64]| 2.5, &disk(), &spec, 0.001).unwrap();
        assert_eq!((c.lower, c.upper), (2.5, 2.5));
        let sym = Region::interval(-1.0, 1.0).unwrap();
        let blow = ess_range(&|x: &[f64]| 1.0 / (x[0] * x[0]), &sym, &spec, 0.001).unwrap();
        assert!(blow.upper_unbounded && blow.upper.is_infinite());
        assert!(!blow.lower_unbounded && blow.lower >= 1.0);
        let empty =
            Region::intersection(vec![disk(), Region::ball(vec![5.0, 0.0], 1.0).unwrap()]).unwrap();
        assert_eq!(
            ess_range(&|_: &[f64]| 0.0, &empty, &spec, 0.001),
            Err(QuadratureError::NoHits)
        );
    }

    #[test]
    fn quantile_indices() {
        let mut v: Vec<f64> = (0..=1000).map(f64::from).collect();
        assert_eq!(quantile_pair(&mut v, 0.001), (1.0, 999.0));
        let mut one = vec![3.0];
        assert_eq!(quantile_pair(&mut one, 0.001), (3.0, 3.0));
    }

    #[test]
    fn spec_validation() {
        assert!(SampleSpec::new(0, 0).validate().is_err());
        let s = SampleSpec {
            unbounded_fraction: 2.0,
            ..SampleSpec::default()
        };
        assert!(s.validate().is_err());
        assert_eq!(SampleSpec::new(11, 0).symmetric(true).drawn(), 12);
    }
}
