//! Discrete curves in R^n: representation, arclength parametrization,
//! derivative stencils, Frenet frames, and scalar shape functionals.
//!
//! All types are immutable value objects after construction and all
//! operations are pure, so everything here is safe to evaluate
//! concurrently on shared inputs.

mod curve;
mod deriv;
mod frenet;

pub use curve::{ArclengthTable, Curve, CurveError, MIN_VERTICES};
pub use deriv::{
    d1_field, d2_field, derivatives, first_derivative_nonuniform, interpolate_fraction,
    interpolate_fraction_table, nearest_vertex_at_fraction, second_derivative_nonuniform,
};
pub use frenet::{
    best_fit_plane, frenet_frame, frenet_serret_residual, planarity_defect,
    second_moment_spectrum, torsion_weighted_curvature, total_absolute_curvature,
    weighted_vertex_integral, FrenetData, PlanarityDefect, KAPPA_DEFINED_REL,
};

use crate::vecn;

/// Symmetric Hausdorff distance between two polylines, measuring vertex
/// sets against the opposing polyline (segments included).
pub fn hausdorff_distance(a: &Curve, b: &Curve) -> f64 {
    one_sided_hausdorff(a, b).max(one_sided_hausdorff(b, a))
}

fn one_sided_hausdorff(a: &Curve, b: &Curve) -> f64 {
    let mut worst = 0.0f64;
    for v in a.iter_vertices() {
        worst = worst.max(distance_to_polyline(v, b));
    }
    worst
}

/// Distance from a point to the closest segment of a polyline.
pub fn distance_to_polyline(p: &[f64], c: &Curve) -> f64 {
    let mut best = f64::INFINITY;
    for e in 0..c.num_edges() {
        let (a, b) = c.edge(e);
        best = best.min(distance_to_segment(p, a, b));
    }
    best
}

fn distance_to_segment(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab = vecn::sub(b, a);
    let ap = vecn::sub(p, a);
    let denom = vecn::dot(&ab, &ab);
    let t = if denom > 0.0 { (vecn::dot(&ap, &ab) / denom).clamp(0.0, 1.0) } else { 0.0 };
    let q = vecn::lerp(a, b, t);
    vecn::dist(p, &q)
}
