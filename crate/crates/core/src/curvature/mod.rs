//! Field-level curvature operators: dω, Yang–Mills curvature, the covariant
//! differential, Riemann/Ricci/scalar/Weyl of a metric, and the Nijenhuis
//! tensor, plus the gauge and diffeomorphism actions they are covariant under.

pub mod acs;
pub mod actions;
pub mod forms;
pub mod metric;

pub use acs::{
    contract_vector_valued, coordinate_field, lie_bracket, nijenhuis, nijenhuis_vector_form, AlmostComplex,
};
pub use actions::{conjugate, gauge_transform, pullback_acs, pullback_form, pullback_metric, pure_gauge};
pub use forms::{covariant_differential, exterior_derivative, yang_mills_curvature, ConnectionField, MatForm, ValueKind};
pub use metric::{
    metric_curvature, metric_curvature_at, riemann_numerator, scalar_value, trace_with, weyl, weyl_at, weyl_numerator,
    CurvaturePack, MetricField, WeylTensor,
};
