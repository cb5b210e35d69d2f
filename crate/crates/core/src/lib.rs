//! Pure finitely additive measures: exact lattice computations on finite
//! algebras and Monte Carlo probes of density-type measures at features.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod density;
pub mod geometry;
pub mod lattice;
pub mod quadrature;
pub mod surface;
pub mod trace;

pub use density::{
    action_interval, aura_report, cone_density, density_probe, density_ratio, limit_estimate,
    sharp_integral, sigma_probe, ActionInterval, AuraReport, DeltaSchedule, EngineError,
    ExplicitFamily, Field, Interval, ProbeResult, ProbeSettings, RegionFamily, SeriesPoint,
    SigmaReport, SlabFamily, Verdict,
};
pub use geometry::{Aabb, Bounds, CsgOp, Feature, GeometryError, Region};
pub use lattice::{
    AlgebraSet, Continuity, FAMeasure, GroundSet, LatticeError, MeasureFixture, Rational,
    SimpleFunction, SimpleSequence, SubAlgebra,
};
pub use quadrature::{
    ess_range, mc_integral, mc_volume, EssRange, Estimate, QuadratureError, SampleSpec, ScalarField,
};
pub use surface::{
    collar_average, gauss_check, surface_reference, GaussReport, SurfaceFixture, SurfaceShape,
    VectorField,
};
pub use trace::{
    boundary_trace, calculus_rule_check, density_gradient, CalculusRule, DiffFunction, Gradient,
    GradientBox, GradientReport, RuleReport,
};
