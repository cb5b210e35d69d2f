//! Boundary traces as shrinking half-ball means and set-valued gradients
//! as action intervals of the gradient at a point.

use serde::{Deserialize, Serialize};

use crate::density::{
    action_interval_by, mean_series, ActionInterval, EngineError, Field, Interval, ProbeResult,
    ProbeSettings, Result,
};
use crate::geometry::{Feature, GeometryError, Region, MAX_DIM};
use crate::quadrature::ScalarField;

/// Largest `|sdf_Ω(x)|` accepted for a boundary point.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Means of `u` over `B(x, δ) ∩ Ω`. The series is returned even when the
/// integrand is unbounded near `x`; check `unbounded` and `verdict`.
pub fn boundary_trace(
    u: &dyn ScalarField,
    omega: &Region,
    x: &[f64],
    settings: &ProbeSettings,
) -> Result<ProbeResult> {
    if x.len() != omega.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: omega.dim(),
            found: x.len(),
        }
        .into());
    }
    let distance = omega.sdf(x).abs();
    if !(distance <= BOUNDARY_TOL) {
        return Err(EngineError::NotOnBoundary { distance });
    }
    let feature = Feature::point(x.to_vec())?;
    mean_series(|_, y| u.eval(y), &feature, omega, None, settings)
}

/// How gradient components are obtained.
#[derive(Clone)]
pub enum Gradient {
    /// One field per coordinate.
    Analytic(Vec<Field>),
    /// Central differences of the function with step `h = δ/10`.
    FiniteDifference,
}

impl std::fmt::Debug for Gradient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Analytic(g) => write!(f, "Analytic({} components)", g.len()),
            Self::FiniteDifference => f.write_str("FiniteDifference"),
        }
    }
}

/// A scalar function together with its gradient.
#[derive(Clone)]
pub struct DiffFunction {
    pub value: Field,
    pub gradient: Gradient,
}

impl std::fmt::Debug for DiffFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DiffFunction")
            .field("gradient", &self.gradient)
            .finish_non_exhaustive()
    }
}

impl DiffFunction {
    pub fn analytic(value: Field, gradient: Vec<Field>) -> Self {
        Self {
            value,
            gradient: Gradient::Analytic(gradient),
        }
    }

    pub fn finite_difference(value: Field) -> Self {
        Self {
            value,
            gradient: Gradient::FiniteDifference,
        }
    }

    /// `∂_i f` at `x`, probed at radius `delta`.
    pub fn partial(&self, i: usize, delta: f64, x: &[f64]) -> f64 {
        match &self.gradient {
            Gradient::Analytic(g) => g[i].eval(x),
            Gradient::FiniteDifference => {
                let h = delta / 10.0;
                let n = x.len();
                let mut y = [0.0; MAX_DIM];
                y[..n].copy_from_slice(x);
                y[i] = x[i] + h;
                let up = self.value.eval(&y[..n]);
                y[i] = x[i] - h;
                let down = self.value.eval(&y[..n]);
                (up - down) / (2.0 * h)
            }
        }
    }

    pub fn sum(&self, other: &Self) -> Self {
        let (f, g) = (self.value.clone(), other.value.clone());
        let value: Field = std::sync::Arc::new(move |x: &[f64]| f.eval(x) + g.eval(x));
        let gradient = match (&self.gradient, &other.gradient) {
            (Gradient::Analytic(a), Gradient::Analytic(b)) => Gradient::Analytic(
                a.iter()
                    .zip(b)
                    .map(|(a, b)| {
                        let (a, b) = (a.clone(), b.clone());
                        std::sync::Arc::new(move |x: &[f64]| a.eval(x) + b.eval(x)) as Field
                    })
                    .collect(),
            ),
            _ => Gradient::FiniteDifference,
        };
        Self { value, gradient }
    }

    pub fn product(&self, other: &Self) -> Self {
        let (f, g) = (self.value.clone(), other.value.clone());
        let value: Field = std::sync::Arc::new(move |x: &[f64]| f.eval(x) * g.eval(x));
        let gradient = match (&self.gradient, &other.gradient) {
            (Gradient::Analytic(a), Gradient::Analytic(b)) => Gradient::Analytic(
                a.iter()
                    .zip(b)
                    .map(|(da, db)| {
                        let (f, g, da, db) = (
                            self.value.clone(),
                            other.value.clone(),
                            da.clone(),
                            db.clone(),
                        );
                        std::sync::Arc::new(move |x: &[f64]| {
                            f.eval(x) * db.eval(x) + g.eval(x) * da.eval(x)
                        }) as Field
                    })
                    .collect(),
            ),
            _ => Gradient::FiniteDifference,
        };
        Self { value, gradient }
    }
}

/// One interval per coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientBox {
    pub intervals: Vec<Interval>,
}

impl GradientBox {
    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    /// Box inside `[−L−tol, L+tol]ⁿ`.
    pub fn within_lipschitz(&self, lipschitz: f64, tol: f64) -> bool {
        let cube = Interval::new(-lipschitz, lipschitz, 0.0);
        self.intervals.iter().all(|iv| iv.within(&cube, tol))
    }

    pub fn contained_in(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim()
            && self
                .intervals
                .iter()
                .zip(&other.intervals)
                .all(|(a, b)| a.within(b, tol))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            intervals: self
                .intervals
                .iter()
                .zip(&other.intervals)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            intervals: self.intervals.iter().map(|a| a.scale(c)).collect(),
        }
    }

    pub fn max_width(&self) -> f64 {
        self.intervals
            .iter()
            .map(Interval::width)
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientReport {
    pub point: Vec<f64>,
    pub gradient_box: GradientBox,
    /// Per-coordinate action profiles.
    pub coordinates: Vec<ActionInterval>,
}

/// `∂_d f(x)`: per coordinate, the action interval of `∂_i f` at `{x}`.
pub fn density_gradient(
    f: &DiffFunction,
    x: &[f64],
    omega: &Region,
    settings: &ProbeSettings,
) -> Result<GradientReport> {
    let n = omega.dim();
    if x.len() != n {
        return Err(GeometryError::DimensionMismatch {
            expected: n,
            found: x.len(),
        }
        .into());
    }
    if let Gradient::Analytic(g) = &f.gradient {
        if g.len() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                found: g.len(),
            }
            .into());
        }
    }
    let feature = Feature::point(x.to_vec())?;
    let by_delta = matches!(f.gradient, Gradient::FiniteDifference);
    let coordinates = (0..n)
        .map(|i| {
            action_interval_by(
                |delta, y| f.partial(i, delta, y),
                by_delta,
                &feature,
                omega,
                settings,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GradientReport {
        point: x.to_vec(),
        gradient_box: GradientBox {
            intervals: coordinates.iter().map(|c| c.interval).collect(),
        },
        coordinates,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CalculusRule {
    Sum,
    Product,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleReport {
    pub rule: CalculusRule,
    pub point: Vec<f64>,
    /// Gradient box of the combined function.
    pub lhs: GradientBox,
    /// Box built from the gradient boxes of the parts.
    pub rhs: GradientBox,
    pub tol: f64,
    pub contained: bool,
}

/// Checks `∂(f₁+f₂) ⊆ ∂f₁ ⊕ ∂f₂` or `∂(f₁f₂) ⊆ f₁(x)∂f₂ ⊕ f₂(x)∂f₁`
/// coordinatewise, with the right side widened by `tol`.
pub fn calculus_rule_check(
    rule: CalculusRule,
    f1: &DiffFunction,
    f2: &DiffFunction,
    x: &[f64],
    omega: &Region,
    settings: &ProbeSettings,
    tol: f64,
) -> Result<RuleReport> {
    let combined = match rule {
        CalculusRule::Sum => f1.sum(f2),
        CalculusRule::Product => f1.product(f2),
    };
    let lhs = density_gradient(&combined, x, omega, settings)?.gradient_box;
    let b1 = density_gradient(f1, x, omega, settings)?.gradient_box;
    let b2 = density_gradient(f2, x, omega, settings)?.gradient_box;
    let rhs = match rule {
        CalculusRule::Sum => b1.add(&b2),
        CalculusRule::Product => b2.scale(f1.value.eval(x)).add(&b1.scale(f2.value.eval(x))),
    };
    Ok(RuleReport {
        rule,
        point: x.to_vec(),
        contained: lhs.contained_in(&rhs, tol),
        lhs,
        rhs,
        tol,
    })
}
