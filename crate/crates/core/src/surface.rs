//! Collar averages against parametric surface quadrature, and the
//! divergence identity on balls and boxes in two and three dimensions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::density::{sharp_integral, EngineError, Field, ProbeResult, ProbeSettings, Result};
use crate::geometry::{Feature, Region, MAX_DIM};
use crate::quadrature::{mc_integral, Estimate, SampleSpec, ScalarField};

/// Step of the central differences used when no divergence is supplied.
pub const DIVERGENCE_STEP: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum SurfaceShape {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

/// A region in ℝ² or ℝ³ whose boundary has an explicit parametrization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceFixture {
    #[serde(flatten)]
    pub shape: SurfaceShape,
    /// Quadrature nodes per parameter direction.
    #[serde(default = "default_nodes")]
    pub nodes: usize,
}

fn default_nodes() -> usize {
    128
}

impl SurfaceFixture {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        let f = Self {
            shape: SurfaceShape::Ball { center, radius },
            nodes: default_nodes(),
        };
        f.validate()?;
        Ok(f)
    }

    pub fn cuboid(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let f = Self {
            shape: SurfaceShape::Box { lo, hi },
            nodes: default_nodes(),
        };
        f.validate()?;
        Ok(f)
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            SurfaceShape::Ball { center, .. } => center.len(),
            SurfaceShape::Box { lo, .. } => lo.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n != 2 && n != 3 {
            return Err(EngineError::UnsupportedFixture(format!(
                "dimension {n}, only 2 and 3 are parametrized"
            )));
        }
        if self.nodes < 4 {
            return Err(EngineError::UnsupportedFixture(format!(
                "{} quadrature nodes",
                self.nodes
            )));
        }
        self.region().map(|_| ())
    }

    pub fn region(&self) -> Result<Region> {
        Ok(match &self.shape {
            SurfaceShape::Ball { center, radius } => Region::ball(center.clone(), *radius)?,
            SurfaceShape::Box { lo, hi } => Region::cuboid(lo.clone(), hi.clone())?,
        })
    }

    /// `∂Ω` as a feature.
    pub fn boundary(&self) -> Result<Feature> {
        Ok(Feature::boundary_of(self.region()?))
    }

    /// Boundary nodes `(point, outward normal, weight)` with weights summing
    /// to the surface measure.
    pub fn boundary_nodes(&self) -> Result<Vec<SurfaceNode>> {
        self.validate()?;
        Ok(nodes_with(&self.shape, self.nodes))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceNode {
    pub point: Vec<f64>,
    pub normal: Vec<f64>,
    pub weight: f64,
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let k = k as f64;
                (p0, p1) = (p1, ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k);
            }
            if n == 1 {
                p0 = 1.0;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let step = p1 / dp;
            z -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn nodes_with(shape: &SurfaceShape, m: usize) -> Vec<SurfaceNode> {
    let mut out = Vec::new();
    match shape {
        SurfaceShape::Ball { center, radius: r } if center.len() == 2 => {
            // trapezoid rule, spectrally accurate for periodic integrands
            for j in 0..m {
                let t = 2.0 * PI * j as f64 / m as f64;
                let u = vec![t.cos(), t.sin()];
                out.push(SurfaceNode {
                    point: vec![center[0] + r * u[0], center[1] + r * u[1]],
                    normal: u,
                    weight: 2.0 * PI * r / m as f64,
                });
            }
        }
        SurfaceShape::Ball { center, radius: r } => {
            // Gauss–Legendre in cos θ, trapezoid in φ
            let (ts, ws) = gauss_legendre(m);
            let nphi = 2 * m;
            for (t, wt) in ts.iter().zip(&ws) {
                let s = (1.0 - t * t).sqrt();
                for j in 0..nphi {
                    let phi = 2.0 * PI * j as f64 / nphi as f64;
                    let u = vec![s * phi.cos(), s * phi.sin(), *t];
                    out.push(SurfaceNode {
                        point: (0..3).map(|i| center[i] + r * u[i]).collect(),
                        normal: u,
                        weight: r * r * wt * 2.0 * PI / nphi as f64,
                    });
                }
            }
        }
        SurfaceShape::Box { lo, hi } => {
            let n = lo.len();
            let (ts, ws) = gauss_legendre(m);
            for axis in 0..n {
                let others: Vec<usize> = (0..n).filter(|&i| i != axis).collect();
                let half: Vec<f64> = others.iter().map(|&i| 0.5 * (hi[i] - lo[i])).collect();
                let mid: Vec<f64> = others.iter().map(|&i| 0.5 * (hi[i] + lo[i])).collect();
                for (side, pos) in [(-1.0, lo[axis]), (1.0, hi[axis])] {
                    let mut normal = vec![0.0; n];
                    normal[axis] = side;
                    let mut idx = vec![0usize; others.len()];
                    loop {
                        let mut point = vec![0.0; n];
                        point[axis] = pos;
                        let mut weight = 1.0;
                        for (k, &i) in others.iter().enumerate() {
                            point[i] = mid[k] + half[k] * ts[idx[k]];
                            weight *= half[k] * ws[idx[k]];
                        }
                        out.push(SurfaceNode {
                            point,
                            normal: normal.clone(),
                            weight,
                        });
                        // odometer over the face's tensor grid
                        let mut k = 0;
                        while k < idx.len() {
                            idx[k] += 1;
                            if idx[k] < m {
                                break;
                            }
                            idx[k] = 0;
                            k += 1;
                        }
                        if k == idx.len() {
                            break;
                        }
                    }
                }
            }
        }
    }
    out
}

/// Surface average of `f` over `∂Ω` by parametric quadrature.
pub fn surface_reference(f: &dyn ScalarField, fixture: &SurfaceFixture) -> Result<f64> {
    let nodes = fixture.boundary_nodes()?;
    let (num, den) = nodes.iter().fold((0.0, 0.0), |(a, b), nd| {
        (a + nd.weight * f.eval(&nd.point), b + nd.weight)
    });
    Ok(num / den)
}

/// Limit of means of `f` over the inner collars `{x ∈ Ω : d(x, ∂Ω) < δ}`.
pub fn collar_average(
    f: &dyn ScalarField,
    fixture: &SurfaceFixture,
    settings: &ProbeSettings,
) -> Result<ProbeResult> {
    fixture.validate()?;
    sharp_integral(f, &fixture.boundary()?, &fixture.region()?, None, settings)
}

/// A vector field with an optional analytic divergence.
#[derive(Clone)]
pub struct VectorField {
    pub components: Vec<Field>,
    pub divergence: Option<Field>,
}

impl std::fmt::Debug for VectorField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VectorField")
            .field("components", &self.components.len())
            .field("analytic_divergence", &self.divergence.is_some())
            .finish()
    }
}

impl VectorField {
    pub fn new(components: Vec<Field>) -> Self {
        Self {
            components,
            divergence: None,
        }
    }

    pub fn with_divergence(mut self, div: Field) -> Self {
        self.divergence = Some(div);
        self
    }

    pub fn divergence_at(&self, x: &[f64]) -> f64 {
        if let Some(d) = &self.divergence {
            return d.eval(x);
        }
        let n = x.len();
        let mut y = [0.0; MAX_DIM];
        y[..n].copy_from_slice(x);
        let mut total = 0.0;
        for (i, c) in self.components.iter().enumerate() {
            y[i] = x[i] + DIVERGENCE_STEP;
            let up = c.eval(&y[..n]);
            y[i] = x[i] - DIVERGENCE_STEP;
            let down = c.eval(&y[..n]);
            y[i] = x[i];
            total += (up - down) / (2.0 * DIVERGENCE_STEP);
        }
        total
    }

    fn flux_density(&self, node: &SurfaceNode) -> f64 {
        self.components
            .iter()
            .zip(&node.normal)
            .map(|(c, n)| c.eval(&node.point) * n)
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussReport {
    /// `∫_Ω div φ dλ` by Monte Carlo.
    pub volume_integral: Estimate,
    /// `∫_∂Ω φ·ν dHⁿ⁻¹` by parametric quadrature.
    pub flux: f64,
    /// Change in the flux when the node count is halved.
    pub parametric_error: f64,
    pub residual: f64,
    /// `3 · (stderr + parametric_error)`.
    pub bound: f64,
    pub within_bound: bool,
}

/// Both sides of the divergence identity on `fixture`.
pub fn gauss_check(
    phi: &VectorField,
    fixture: &SurfaceFixture,
    spec: &SampleSpec,
) -> Result<GaussReport> {
    fixture.validate()?;
    if phi.components.len() != fixture.dim() {
        return Err(EngineError::UnsupportedFixture(format!(
            "field has {} components in dimension {}",
            phi.components.len(),
            fixture.dim()
        )));
    }
    let region = fixture.region()?;
    let div = |x: &[f64]| phi.divergence_at(x);
    let volume_integral = mc_integral(&div, &region, spec)?;
    let flux_with = |m: usize| -> f64 {
        nodes_with(&fixture.shape, m)
            .iter()
            .map(|nd| nd.weight * phi.flux_density(nd))
            .sum()
    };
    let flux = flux_with(fixture.nodes);
    let parametric_error = (flux - flux_with(fixture.nodes / 2)).abs();
    let residual = (volume_integral.value - flux).abs();
    let bound = 3.0 * (volume_integral.stderr + parametric_error);
    Ok(GaussReport {
        within_bound: residual <= bound,
        volume_integral,
        flux,
        parametric_error,
        residual,
        bound,
    })
}
