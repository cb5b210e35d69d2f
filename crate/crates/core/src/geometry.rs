//! Regions of ℝⁿ described by signed distance fields.
//!
//! Signed distances follow the negative-inside convention: `sdf(x) < 0` for
//! interior points, `> 0` outside, with magnitude equal to the distance to
//! the boundary. Primitives (ball, box, half-space, point, segment, cone)
//! carry exact distances. CSG composites combine distances with `min`/`max`,
//! which only yields a pseudo-distance, but their membership test is an exact
//! boolean combination, and membership is all the quadrature ever uses.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {0} is outside 1..={MAX_DIM}")]
    UnsupportedDimension(usize),
    #[error("neighbourhood radius must be positive, got {0}")]
    NonpositiveDelta(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;

fn check_dim(n: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(GeometryError::UnsupportedDimension(n))
    }
}

fn expect_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(GeometryError::DimensionMismatch { expected, found })
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Axis-aligned box `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Aabb {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        expect_dim(lo.len(), hi.len())?;
        check_dim(lo.len())?;
        if lo.iter().zip(&hi).any(|(l, h)| !(l <= h)) {
            return Err(GeometryError::InvalidParameter(format!(
                "box corners out of order: {lo:?} > {hi:?}"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn cube(center: &[f64], half: f64) -> Self {
        Self {
            lo: center.iter().map(|c| c - half).collect(),
            hi: center.iter().map(|c| c + half).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    pub fn diagonal(&self) -> f64 {
        dist(&self.lo, &self.hi)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| 0.5 * (l + h))
            .collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (l, h))| *l <= *v && *v <= *h)
    }

    pub fn expand(&self, by: f64) -> Self {
        Self {
            lo: self.lo.iter().map(|l| l - by).collect(),
            hi: self.hi.iter().map(|h| h + by).collect(),
        }
    }

    pub fn hull(&self, other: &Self) -> Self {
        Self {
            lo: self
                .lo
                .iter()
                .zip(&other.lo)
                .map(|(a, b)| a.min(*b))
                .collect(),
            hi: self
                .hi
                .iter()
                .zip(&other.hi)
                .map(|(a, b)| a.max(*b))
                .collect(),
        }
    }

    /// `None` when the boxes are disjoint.
    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo: Vec<f64> = self
            .lo
            .iter()
            .zip(&other.lo)
            .map(|(a, b)| a.max(*b))
            .collect();
        let hi: Vec<f64> = self
            .hi
            .iter()
            .zip(&other.hi)
            .map(|(a, b)| a.min(*b))
            .collect();
        if lo.iter().zip(&hi).all(|(l, h)| l <= h) {
            Some(Self { lo, hi })
        } else {
            None
        }
    }

    pub fn is_finite(&self) -> bool {
        all_finite(&self.lo) && all_finite(&self.hi)
    }
}

/// Bounding information for a region.
#[derive(Clone, Debug, PartialEq)]
pub enum Bounds {
    Empty,
    Bounded(Aabb),
    Unbounded,
}

/// Closed sets `F` with their nonnegative distance function `d_F`.
#[derive(Clone, Debug, PartialEq)]
pub enum Feature {
    Point {
        c: Vec<f64>,
    },
    Segment {
        a: Vec<f64>,
        b: Vec<f64>,
    },
    /// The sphere `{|x − c| = r}`.
    Sphere {
        c: Vec<f64>,
        r: f64,
    },
    /// `∂Ω`, with `d_F = |sdf_Ω|` (exact for primitive `Ω`).
    BoundaryOf(Box<Region>),
    /// `cl(Ω)`, with `d_F = max(sdf_Ω, 0)`.
    Closure(Box<Region>),
}

impl Feature {
    pub fn point(c: Vec<f64>) -> Result<Self> {
        check_dim(c.len())?;
        Ok(Self::Point { c })
    }

    pub fn segment(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        expect_dim(a.len(), b.len())?;
        check_dim(a.len())?;
        Ok(Self::Segment { a, b })
    }

    pub fn sphere(c: Vec<f64>, r: f64) -> Result<Self> {
        check_dim(c.len())?;
        if !(r > 0.0) {
            return Err(GeometryError::InvalidParameter(format!(
                "sphere radius {r}"
            )));
        }
        Ok(Self::Sphere { c, r })
    }

    pub fn boundary_of(region: Region) -> Self {
        Self::BoundaryOf(Box::new(region))
    }

    /// Lower-dimensional regions map to their natural feature; anything
    /// else becomes its closure.
    pub fn from_region(region: Region) -> Self {
        match region {
            Region::Point { c } => Self::Point { c },
            Region::Segment { a, b } => Self::Segment { a, b },
            Region::BoundaryOf(inner) => Self::BoundaryOf(inner),
            other => Self::Closure(Box::new(other)),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Point { c } | Self::Sphere { c, .. } => c.len(),
            Self::Segment { a, .. } => a.len(),
            Self::BoundaryOf(r) | Self::Closure(r) => r.dim(),
        }
    }

    /// `d_F(x) ≥ 0`, zero exactly on the closure of `F`.
    pub fn distance(&self, x: &[f64]) -> f64 {
        match self {
            Self::Point { c } => dist(x, c),
            Self::Segment { a, b } => segment_distance(x, a, b),
            Self::Sphere { c, r } => (dist(x, c) - r).abs(),
            Self::BoundaryOf(region) => region.sdf(x).abs(),
            Self::Closure(region) => region.sdf(x).max(0.0),
        }
    }

    /// Whether `distance` is an exact Euclidean distance.
    pub fn is_exact(&self) -> bool {
        match self {
            Self::Point { .. } | Self::Segment { .. } | Self::Sphere { .. } => true,
            Self::BoundaryOf(r) | Self::Closure(r) => r.is_exact(),
        }
    }

    pub fn bounds(&self) -> Bounds {
        match self {
            Self::Point { c } => Bounds::Bounded(Aabb::cube(c, 0.0)),
            Self::Segment { a, b } => Bounds::Bounded(Aabb::cube(a, 0.0).hull(&Aabb::cube(b, 0.0))),
            Self::Sphere { c, r } => Bounds::Bounded(Aabb::cube(c, *r)),
            Self::BoundaryOf(r) | Self::Closure(r) => r.bounds(),
        }
    }

    /// The open neighbourhood `F_δ = {d_F < δ}`.
    pub fn neighborhood(&self, delta: f64) -> Result<Region> {
        neighborhood_region(self, delta)
    }
}

/// `F_δ` as a region. Membership is `d_F(x) < δ`.
pub fn neighborhood_region(feature: &Feature, delta: f64) -> Result<Region> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(GeometryError::NonpositiveDelta(delta));
    }
    Ok(Region::Neighborhood {
        feature: Box::new(feature.clone()),
        delta,
    })
}

fn segment_distance(x: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let mut ab = [0.0; MAX_DIM];
    let mut ax = [0.0; MAX_DIM];
    let n = a.len();
    for i in 0..n {
        ab[i] = b[i] - a[i];
        ax[i] = x[i] - a[i];
    }
    let len2 = dot(&ab[..n], &ab[..n]);
    let t = if len2 > 0.0 {
        (dot(&ax[..n], &ab[..n]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (0..n)
        .map(|i| {
            let d = x[i] - (a[i] + t * ab[i]);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Set operations accepted by [`csg`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CsgOp {
    Union,
    Intersection,
    Difference,
    Complement,
}

/// A region of ℝⁿ.
#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    Ball {
        c: Vec<f64>,
        r: f64,
    },
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    /// `{x : normal·x < offset}` with a unit normal.
    HalfSpace {
        normal: Vec<f64>,
        offset: f64,
    },
    /// The planar cusp `{0 < x₁ < 1, |x₂| < x₁^p}` with its tip at the origin.
    Cusp {
        p: f64,
    },
    /// The open cone of points whose direction from `apex` is within
    /// `half_angle` of `axis` (unit), apex excluded.
    Cone {
        apex: Vec<f64>,
        axis: Vec<f64>,
        half_angle: f64,
    },
    /// A single point: no interior, `sdf = |x − c|`.
    Point {
        c: Vec<f64>,
    },
    /// A segment: no interior, `sdf` = distance to the segment.
    Segment {
        a: Vec<f64>,
        b: Vec<f64>,
    },
    /// The boundary of a region: no interior, `sdf = |sdf_Ω|`.
    BoundaryOf(Box<Region>),
    Neighborhood {
        feature: Box<Feature>,
        delta: f64,
    },
    Union(Vec<Region>),
    Intersection(Vec<Region>),
    Difference(Box<Region>, Box<Region>),
    Complement(Box<Region>),
}

impl Region {
    pub fn ball(c: Vec<f64>, r: f64) -> Result<Self> {
        check_dim(c.len())?;
        if !(r > 0.0) || !all_finite(&c) {
            return Err(GeometryError::InvalidParameter(format!("ball radius {r}")));
        }
        Ok(Self::Ball { c, r })
    }

    pub fn cuboid(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let b = Aabb::new(lo, hi)?;
        if !b.is_finite() {
            return Err(GeometryError::InvalidParameter(
                "box corners must be finite".into(),
            ));
        }
        Ok(Self::Box { lo: b.lo, hi: b.hi })
    }

    /// The open interval `(a, b)` in ℝ¹.
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::cuboid(vec![a], vec![b])
    }

    pub fn half_space(normal: Vec<f64>, offset: f64) -> Result<Self> {
        check_dim(normal.len())?;
        let len = norm(&normal);
        if !(len > 0.0) || !len.is_finite() {
            return Err(GeometryError::InvalidParameter(
                "half-space normal must be nonzero".into(),
            ));
        }
        Ok(Self::HalfSpace {
            normal: normal.iter().map(|v| v / len).collect(),
            offset: offset / len,
        })
    }

    pub fn cusp(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(GeometryError::InvalidParameter(format!(
                "cusp exponent {p} must be ≥ 1"
            )));
        }
        Ok(Self::Cusp { p })
    }

    pub fn cone(apex: Vec<f64>, axis: Vec<f64>, half_angle: f64) -> Result<Self> {
        expect_dim(apex.len(), axis.len())?;
        check_dim(apex.len())?;
        let len = norm(&axis);
        if !(len > 0.0) {
            return Err(GeometryError::InvalidParameter(
                "cone axis must be nonzero".into(),
            ));
        }
        if !(half_angle > 0.0 && half_angle < std::f64::consts::PI) {
            return Err(GeometryError::InvalidParameter(format!(
                "cone half-angle {half_angle}"
            )));
        }
        Ok(Self::Cone {
            apex,
            axis: axis.iter().map(|v| v / len).collect(),
            half_angle,
        })
    }

    pub fn point(c: Vec<f64>) -> Result<Self> {
        check_dim(c.len())?;
        Ok(Self::Point { c })
    }

    pub fn segment(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        expect_dim(a.len(), b.len())?;
        check_dim(a.len())?;
        Ok(Self::Segment { a, b })
    }

    pub fn boundary_of(region: Region) -> Self {
        Self::BoundaryOf(Box::new(region))
    }

    /// The empty set of ℝⁿ, as a degenerate box at the origin.
    pub fn empty(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self::Box {
            lo: vec![0.0; n],
            hi: vec![0.0; n],
        })
    }

    pub fn union(parts: Vec<Region>) -> Result<Self> {
        Self::check_same_dim(&parts)?;
        Ok(Self::Union(parts))
    }

    pub fn intersection(parts: Vec<Region>) -> Result<Self> {
        Self::check_same_dim(&parts)?;
        Ok(Self::Intersection(parts))
    }

    pub fn difference(a: Region, b: Region) -> Result<Self> {
        expect_dim(a.dim(), b.dim())?;
        Ok(Self::Difference(Box::new(a), Box::new(b)))
    }

    pub fn complement(a: Region) -> Self {
        Self::Complement(Box::new(a))
    }

    fn check_same_dim(parts: &[Region]) -> Result<()> {
        let Some(first) = parts.first() else {
            return Err(GeometryError::InvalidParameter(
                "empty CSG operand list".into(),
            ));
        };
        for p in &parts[1..] {
            expect_dim(first.dim(), p.dim())?;
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Ball { c, .. } | Self::Point { c } => c.len(),
            Self::Box { lo, .. } => lo.len(),
            Self::HalfSpace { normal, .. } => normal.len(),
            Self::Cusp { .. } => 2,
            Self::Cone { apex, .. } => apex.len(),
            Self::Segment { a, .. } => a.len(),
            Self::BoundaryOf(r) | Self::Complement(r) | Self::Difference(r, _) => r.dim(),
            Self::Neighborhood { feature, .. } => feature.dim(),
            Self::Union(parts) | Self::Intersection(parts) => parts.first().map_or(0, Region::dim),
        }
    }

    /// Signed distance, negative inside. Pseudo-distance for composites.
    pub fn sdf(&self, x: &[f64]) -> f64 {
        match self {
            Self::Ball { c, r } => dist(x, c) - r,
            Self::Box { lo, hi } => {
                let mut outside = 0.0;
                let mut inside = f64::NEG_INFINITY;
                for i in 0..lo.len() {
                    let half = 0.5 * (hi[i] - lo[i]);
                    let q = (x[i] - 0.5 * (hi[i] + lo[i])).abs() - half;
                    if q > 0.0 {
                        outside += q * q;
                    }
                    inside = inside.max(q);
                }
                outside.sqrt() + inside.min(0.0)
            }
            Self::HalfSpace { normal, offset } => dot(normal, x) - offset,
            Self::Cusp { p } => {
                let (x1, x2) = (x[0], x[1]);
                let slope = (1.0 + p * p).sqrt();
                let wall = (x2.abs() - x1.max(0.0).powf(*p)) / slope;
                wall.max(-x1).max(x1 - 1.0)
            }
            Self::Cone {
                apex,
                axis,
                half_angle,
            } => {
                let n = apex.len();
                let mut d = [0.0; MAX_DIM];
                for i in 0..n {
                    d[i] = x[i] - apex[i];
                }
                let len = norm(&d[..n]);
                if len == 0.0 {
                    return 0.0;
                }
                let t = dot(&d[..n], axis);
                let radial = (len * len - t * t).max(0.0).sqrt();
                let angle = radial.atan2(t);
                let gap = angle - half_angle;
                if gap.abs() >= std::f64::consts::FRAC_PI_2 {
                    // nearest boundary point is the apex
                    len.copysign(gap)
                } else {
                    len * gap.sin()
                }
            }
            Self::Point { c } => dist(x, c),
            Self::Segment { a, b } => segment_distance(x, a, b),
            Self::BoundaryOf(r) => r.sdf(x).abs(),
            Self::Neighborhood { feature, delta } => feature.distance(x) - delta,
            Self::Union(parts) => parts.iter().map(|p| p.sdf(x)).fold(f64::INFINITY, f64::min),
            Self::Intersection(parts) => parts
                .iter()
                .map(|p| p.sdf(x))
                .fold(f64::NEG_INFINITY, f64::max),
            Self::Difference(a, b) => a.sdf(x).max(-b.sdf(x)),
            Self::Complement(a) => -a.sdf(x),
        }
    }

    /// Exact membership test.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Self::Ball { c, r } => {
                x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() < r * r
            }
            Self::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (l, h))| l < v && v < h),
            Self::HalfSpace { normal, offset } => dot(normal, x) < *offset,
            Self::Cusp { p } => {
                let (x1, x2) = (x[0], x[1]);
                x1 > 0.0 && x1 < 1.0 && x2.abs() < x1.powf(*p)
            }
            Self::Cone {
                apex,
                axis,
                half_angle,
            } => {
                let n = apex.len();
                let mut d = [0.0; MAX_DIM];
                for i in 0..n {
                    d[i] = x[i] - apex[i];
                }
                let len = norm(&d[..n]);
                len > 0.0 && dot(&d[..n], axis) > len * half_angle.cos()
            }
            Self::Point { .. } | Self::Segment { .. } | Self::BoundaryOf(_) => false,
            Self::Neighborhood { feature, delta } => feature.distance(x) < *delta,
            Self::Union(parts) => parts.iter().any(|p| p.contains(x)),
            Self::Intersection(parts) => parts.iter().all(|p| p.contains(x)),
            Self::Difference(a, b) => a.contains(x) && !b.contains(x),
            Self::Complement(a) => !a.contains(x),
        }
    }

    /// Whether `sdf` is an exact signed distance.
    pub fn is_exact(&self) -> bool {
        match self {
            Self::Ball { .. }
            | Self::Box { .. }
            | Self::HalfSpace { .. }
            | Self::Cone { .. }
            | Self::Point { .. }
            | Self::Segment { .. } => true,
            Self::BoundaryOf(r) => r.is_exact(),
            Self::Neighborhood { feature, .. } => {
                matches!(
                    **feature,
                    Feature::Point { .. } | Feature::Segment { .. } | Feature::Sphere { .. }
                )
            }
            Self::Cusp { .. }
            | Self::Union(_)
            | Self::Intersection(_)
            | Self::Difference(..)
            | Self::Complement(_) => false,
        }
    }

    /// A box containing every interior point.
    pub fn bounds(&self) -> Bounds {
        match self {
            Self::Ball { c, r } => Bounds::Bounded(Aabb::cube(c, *r)),
            Self::Box { lo, hi } => Bounds::Bounded(Aabb {
                lo: lo.clone(),
                hi: hi.clone(),
            }),
            Self::HalfSpace { .. } | Self::Cone { .. } | Self::Complement(_) => Bounds::Unbounded,
            Self::Cusp { .. } => Bounds::Bounded(Aabb {
                lo: vec![0.0, -1.0],
                hi: vec![1.0, 1.0],
            }),
            Self::Point { .. } | Self::Segment { .. } | Self::BoundaryOf(_) => Bounds::Empty,
            Self::Neighborhood { feature, delta } => match feature.bounds() {
                Bounds::Bounded(b) => Bounds::Bounded(b.expand(*delta)),
                other => other,
            },
            Self::Union(parts) => {
                let mut acc: Option<Aabb> = None;
                for p in parts {
                    match p.bounds() {
                        Bounds::Empty => {}
                        Bounds::Unbounded => return Bounds::Unbounded,
                        Bounds::Bounded(b) => acc = Some(acc.map_or(b.clone(), |a| a.hull(&b))),
                    }
                }
                acc.map_or(Bounds::Empty, Bounds::Bounded)
            }
            Self::Intersection(parts) => {
                let mut acc: Option<Aabb> = None;
                for p in parts {
                    match p.bounds() {
                        Bounds::Empty => return Bounds::Empty,
                        Bounds::Unbounded => {}
                        Bounds::Bounded(b) => match acc {
                            None => acc = Some(b),
                            Some(a) => match a.intersect(&b) {
                                Some(c) => acc = Some(c),
                                None => return Bounds::Empty,
                            },
                        },
                    }
                }
                acc.map_or(Bounds::Unbounded, Bounds::Bounded)
            }
            Self::Difference(a, _) => a.bounds(),
        }
    }

    /// A box containing `self ∩ clip`; `None` when that is known to be empty.
    pub fn clipped_bounds(&self, clip: &Aabb) -> Option<Aabb> {
        match self {
            Self::Cusp { p } => {
                // inside the cusp, x₁ ≤ hi₀ forces |x₂| < hi₀^p
                let x1_hi = clip.hi[0].min(1.0);
                if x1_hi <= 0.0 {
                    return None;
                }
                let reach = x1_hi.powf(*p);
                let own = Aabb {
                    lo: vec![0.0, -reach],
                    hi: vec![x1_hi, reach],
                };
                own.intersect(clip)
            }
            Self::Union(parts) => parts
                .iter()
                .filter_map(|p| p.clipped_bounds(clip))
                .reduce(|a, b| a.hull(&b)),
            Self::Intersection(parts) => {
                let mut acc = clip.clone();
                for p in parts {
                    acc = p.clipped_bounds(&acc)?;
                }
                Some(acc)
            }
            Self::Difference(a, _) => a.clipped_bounds(clip),
            _ => match self.bounds() {
                Bounds::Empty => None,
                Bounds::Unbounded => Some(clip.clone()),
                Bounds::Bounded(b) => b.intersect(clip),
            },
        }
    }
}

/// Combines regions. `Complement` takes only `a`.
pub fn csg(op: CsgOp, a: Region, b: Option<Region>) -> Result<Region> {
    match (op, b) {
        (CsgOp::Complement, None) => Ok(Region::complement(a)),
        (CsgOp::Complement, Some(_)) => Err(GeometryError::InvalidParameter(
            "complement takes a single operand".into(),
        )),
        (_, None) => Err(GeometryError::InvalidParameter(format!(
            "{op:?} needs two operands"
        ))),
        (CsgOp::Union, Some(b)) => Region::union(vec![a, b]),
        (CsgOp::Intersection, Some(b)) => Region::intersection(vec![a, b]),
        (CsgOp::Difference, Some(b)) => Region::difference(a, b),
    }
}

/// `sdf` with a dimension check.
pub fn signed_distance(region: &Region, x: &[f64]) -> Result<f64> {
    expect_dim(region.dim(), x.len())?;
    Ok(region.sdf(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn unit_disk() -> Region {
        Region::ball(vec![0.0, 0.0], 1.0).unwrap()
    }

    #[test]
    fn signed_distance_examples() {
        let disk = unit_disk();
        assert_eq!(signed_distance(&disk, &[2.0, 0.0]).unwrap(), 1.0);
        assert_eq!(signed_distance(&disk, &[0.5, 0.0]).unwrap(), -0.5);
        let origin = Feature::point(vec![0.0, 0.0]).unwrap();
        assert_eq!(origin.distance(&[3.0, 4.0]), 5.0);
        assert_eq!(
            signed_distance(&disk, &[1.0]),
            Err(GeometryError::DimensionMismatch {
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn neighborhood_examples() {
        let zero = Feature::point(vec![0.0]).unwrap();
        let n = neighborhood_region(&zero, 0.3).unwrap();
        assert!(n.contains(&[0.2]));
        assert!(!n.contains(&[0.4]));
        let circle = Feature::boundary_of(unit_disk());
        let collar = circle.neighborhood(0.1).unwrap();
        assert!(collar.contains(&[1.05, 0.0]));
        assert!(!collar.contains(&[0.5, 0.0]));
        assert_eq!(
            neighborhood_region(&zero, 0.0),
            Err(GeometryError::NonpositiveDelta(0.0))
        );
        assert!(neighborhood_region(&zero, -1.0).is_err());
    }

    #[test]
    fn csg_examples() {
        let sq = Region::cuboid(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let hole = Region::ball(vec![0.0, 0.0], 0.5).unwrap();
        let d = csg(CsgOp::Difference, sq.clone(), Some(hole)).unwrap();
        assert!(d.contains(&[0.9, 0.9]));
        assert!(!d.contains(&[0.1, 0.1]));
        let u = csg(CsgOp::Union, sq.clone(), Some(sq.clone())).unwrap();
        for p in [[0.5, 0.5], [1.5, 0.5], [0.0, 0.5], [0.99, 0.01]] {
            assert_eq!(u.contains(&p), sq.contains(&p));
        }
        let c = csg(CsgOp::Complement, unit_disk(), None).unwrap();
        assert!(c.contains(&[2.0, 0.0]));
        assert!(!c.contains(&[0.0, 0.0]));
        assert!(matches!(
            csg(CsgOp::Union, sq, Some(Region::interval(0.0, 1.0).unwrap())),
            Err(GeometryError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn cone_membership_and_distance() {
        let cone = Region::cone(vec![0.0, 0.0], vec![1.0, 0.0], PI / 4.0).unwrap();
        assert!(cone.contains(&[1.0, 0.5]));
        assert!(!cone.contains(&[1.0, 1.5]));
        assert!(!cone.contains(&[0.0, 0.0]));
        // distance from (0, 1) to the ray at 45° is sin(45°)
        assert!((cone.sdf(&[0.0, 1.0]) - (PI / 4.0).sin()).abs() < 1e-12);
        // behind the apex the apex is nearest
        assert!((cone.sdf(&[-2.0, 0.0]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cusp_membership() {
        let cusp = Region::cusp(2.0).unwrap();
        assert!(cusp.contains(&[0.5, 0.2]));
        assert!(!cusp.contains(&[0.5, 0.3]));
        assert!(!cusp.contains(&[-0.1, 0.0]));
        let clip = Aabb::cube(&[0.0, 0.0], 0.1);
        let b = cusp.clipped_bounds(&clip).unwrap();
        assert!((b.hi[1] - 0.01).abs() < 1e-15);
        assert!(Region::cusp(0.5).is_err());
    }

    #[test]
    fn bounds_of_composites() {
        let a = Region::ball(vec![0.0, 0.0], 1.0).unwrap();
        let b = Region::ball(vec![3.0, 0.0], 1.0).unwrap();
        assert_eq!(
            Region::union(vec![a.clone(), b.clone()]).unwrap().bounds(),
            Bounds::Bounded(Aabb {
                lo: vec![-1.0, -1.0],
                hi: vec![4.0, 1.0]
            })
        );
        assert_eq!(
            Region::intersection(vec![a.clone(), b]).unwrap().bounds(),
            Bounds::Empty
        );
        let h = Region::half_space(vec![1.0, 0.0], 0.0).unwrap();
        assert_eq!(
            Region::intersection(vec![a.clone(), h.clone()])
                .unwrap()
                .bounds(),
            Bounds::Bounded(Aabb::cube(&[0.0, 0.0], 1.0))
        );
        assert_eq!(h.bounds(), Bounds::Unbounded);
        assert_eq!(Region::complement(a).bounds(), Bounds::Unbounded);
    }

    #[test]
    fn composite_pseudo_distance_is_conservative() {
        // |pseudo-sdf| never exceeds the distance to the boundary, which is
        // estimated by the nearest boundary crossing on a dense grid
        let sq = Region::cuboid(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let hole = Region::ball(vec![0.5, 0.5], 0.6).unwrap();
        let shapes = [
            Region::difference(sq.clone(), hole.clone()).unwrap(),
            Region::union(vec![sq.clone(), Region::ball(vec![1.5, 0.0], 0.7).unwrap()]).unwrap(),
            Region::intersection(vec![sq, hole]).unwrap(),
        ];
        let m = 240;
        let h = 4.0 / m as f64;
        let grid: Vec<[f64; 2]> = (0..=m)
            .flat_map(|i| (0..=m).map(move |j| [-2.0 + i as f64 * h, -2.0 + j as f64 * h]))
            .collect();
        for shape in &shapes {
            // boundary samples: grid points with a neighbour of opposite membership
            let inside: Vec<bool> = grid.iter().map(|p| shape.contains(p)).collect();
            let mut boundary = Vec::new();
            for i in 0..m {
                for j in 0..m {
                    let k = i * (m + 1) + j;
                    if inside[k] != inside[k + 1] || inside[k] != inside[k + m + 1] {
                        boundary.push(grid[k]);
                    }
                }
            }
            for probe in grid.iter().step_by(97) {
                let d_true = boundary
                    .iter()
                    .map(|b| dist(probe, b))
                    .fold(f64::INFINITY, f64::min);
                assert!(
                    shape.sdf(probe).abs() <= d_true + 2.0 * h,
                    "probe {probe:?}: |sdf| {} > {d_true}",
                    shape.sdf(probe).abs()
                );
            }
        }
    }

    fn point2() -> impl Strategy<Value = [f64; 2]> {
        [-3.0..3.0f64, -3.0..3.0f64]
    }

    proptest! {
        #[test]
        fn primitives_membership_matches_sdf_sign(p in point2()) {
            let prims = [
                unit_disk(),
                Region::cuboid(vec![-1.0, -0.5], vec![2.0, 0.5]).unwrap(),
                Region::half_space(vec![1.0, 2.0], 0.3).unwrap(),
                Region::cone(vec![0.1, 0.0], vec![1.0, 1.0], 0.4).unwrap(),
            ];
            for r in &prims {
                prop_assert_eq!(r.contains(&p), r.sdf(&p) < 0.0, "{:?} at {:?}", r, p);
            }
        }

        #[test]
        fn primitive_sdf_is_one_lipschitz(p in point2(), q in point2()) {
            let prims = [
                unit_disk(),
                Region::cuboid(vec![-1.0, -0.5], vec![2.0, 0.5]).unwrap(),
                Region::half_space(vec![1.0, 2.0], 0.3).unwrap(),
                Region::cone(vec![0.1, 0.0], vec![1.0, 1.0], 0.4).unwrap(),
                Region::segment(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(),
                Region::point(vec![0.3, -0.2]).unwrap(),
            ];
            for r in &prims {
                prop_assert!((r.sdf(&p) - r.sdf(&q)).abs() <= dist(&p, &q) + 1e-12);
            }
        }

        #[test]
        fn neighborhoods_grow_with_delta(p in point2(), d1 in 0.01..1.0f64, extra in 0.0..1.0f64) {
            let features = [
                Feature::point(vec![0.0, 0.0]).unwrap(),
                Feature::segment(vec![-1.0, 0.0], vec![1.0, 0.5]).unwrap(),
                Feature::boundary_of(unit_disk()),
            ];
            for f in &features {
                let small = f.neighborhood(d1).unwrap();
                let large = f.neighborhood(d1 + extra).unwrap();
                prop_assert!(!small.contains(&p) || large.contains(&p));
            }
        }

        #[test]
        fn bounds_cover_members(p in point2()) {
            let shapes = [
                Region::difference(
                    Region::cuboid(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(),
                    Region::ball(vec![0.0, 0.0], 0.5).unwrap(),
                ).unwrap(),
                Region::cusp(1.5).unwrap(),
                Feature::boundary_of(unit_disk()).neighborhood(0.2).unwrap(),
            ];
            for s in &shapes {
                if s.contains(&p) {
                    match s.bounds() {
                        Bounds::Bounded(b) => prop_assert!(b.contains(&p)),
                        other => prop_assert!(false, "unexpected bounds {:?}", other),
                    }
                }
            }
        }
    }
}
