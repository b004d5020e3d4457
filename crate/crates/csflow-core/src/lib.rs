//! Numerical laboratory for curve shortening flow of closed curves in R^n.
//!
//! The crate is organized around discrete polyline curves kept at equal
//! chord spacing. On top of that sit:
//!
//! * [`geometry`] — curves, arclength tables, derivative stencils,
//!   Frenet frames, and scalar shape functionals,
//! * [`flow`] — explicit time integration of `∂γ/∂t = ∂²γ/∂s²` with
//!   trajectory recording and runtime verification of evolution
//!   identities and curvature estimates,
//! * [`entropy`] — the Gaussian-weighted length functional and its
//!   maximization over center and scale,
//! * [`singularity`] — type-I/II classification, blow-up rescalings, and
//!   profile matching near the singular time,
//! * [`reference`](crate::reference) — generators for circles, the Grim
//!   Reaper, and Abresch–Langer shrinkers, plus assorted initial data,
//! * [`io`] — the curve file format and canonical report serialization.

pub mod entropy;
pub mod flow;
pub mod geometry;
pub mod io;
pub mod reference;
pub mod singularity;
pub(crate) mod vecn;

pub use entropy::{EntropyResult, EntropySearchConfig, GaussianSpec};
pub use flow::{DiagnosticsRecord, FlowConfig, FlowState, TerminationReason, Trajectory};
pub use geometry::{ArclengthTable, Curve, CurveError, FrenetData};
pub use singularity::{BlowupPoint, ProfileFamily, ProfileMatch, RescaledSnapshot, SingularityReport};
