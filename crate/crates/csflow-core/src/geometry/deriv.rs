//! Finite-difference stencils along the curve parameter.
//!
//! The public entry point [`derivatives`] assumes uniform spacing (enforce
//! with [`Curve::resample`] first) and is second-order accurate. Cyclic
//! stencils are used on closed curves, one-sided ones at open ends.
//! Orders 3 and 4 are built by composing the first- and second-derivative
//! operators, which reproduces the classical wide central stencils in the
//! interior.

use super::curve::{ArclengthTable, Curve};
use crate::vecn;

/// Per-vertex derivative of order `k` (1..=4) with respect to arclength.
/// Returned flat, `curve.dim()` components per vertex.
pub fn derivatives(curve: &Curve, table: &ArclengthTable, k: usize) -> Vec<f64> {
    assert!((1..=4).contains(&k), "derivative order must be 1..=4");
    let h = table.mean_edge();
    let dim = curve.dim();
    let closed = curve.is_closed();
    match k {
        1 => d1_field(curve.raw(), dim, closed, h),
        2 => d2_field(curve.raw(), dim, closed, h),
        3 => d1_field(&d2_field(curve.raw(), dim, closed, h), dim, closed, h),
        _ => d2_field(&d2_field(curve.raw(), dim, closed, h), dim, closed, h),
    }
}

/// First derivative of a field sampled at uniform spacing `h`.
/// `dim` is the number of components per node (1 for a scalar field).
pub fn d1_field(field: &[f64], dim: usize, closed: bool, h: f64) -> Vec<f64> {
    let m = field.len() / dim;
    let mut out = vec![0.0; field.len()];
    let get = |i: usize| &field[i * dim..(i + 1) * dim];
    let two_h = 2.0 * h;
    for i in 0..m {
        let o = &mut out[i * dim..(i + 1) * dim];
        if closed || (i > 0 && i + 1 < m) {
            let prev = get((i + m - 1) % m);
            let next = get((i + 1) % m);
            for c in 0..dim {
                o[c] = (next[c] - prev[c]) / two_h;
            }
        } else if i == 0 {
            let (f0, f1, f2) = (get(0), get(1), get(2));
            for c in 0..dim {
                o[c] = (-3.0 * f0[c] + 4.0 * f1[c] - f2[c]) / two_h;
            }
        } else {
            let (f0, f1, f2) = (get(m - 1), get(m - 2), get(m - 3));
            for c in 0..dim {
                o[c] = (3.0 * f0[c] - 4.0 * f1[c] + f2[c]) / two_h;
            }
        }
    }
    out
}

/// Second derivative of a field sampled at uniform spacing `h`.
pub fn d2_field(field: &[f64], dim: usize, closed: bool, h: f64) -> Vec<f64> {
    let m = field.len() / dim;
    let mut out = vec![0.0; field.len()];
    let get = |i: usize| &field[i * dim..(i + 1) * dim];
    let h2 = h * h;
    for i in 0..m {
        let o = &mut out[i * dim..(i + 1) * dim];
        if closed || (i > 0 && i + 1 < m) {
            let prev = get((i + m - 1) % m);
            let mid = get(i);
            let next = get((i + 1) % m);
            for c in 0..dim {
                o[c] = (next[c] - 2.0 * mid[c] + prev[c]) / h2;
            }
        } else if i == 0 {
            let (f0, f1, f2, f3) = (get(0), get(1), get(2), get(3));
            for c in 0..dim {
                o[c] = (2.0 * f0[c] - 5.0 * f1[c] + 4.0 * f2[c] - f3[c]) / h2;
            }
        } else {
            let (f0, f1, f2, f3) = (get(m - 1), get(m - 2), get(m - 3), get(m - 4));
            for c in 0..dim {
                o[c] = (2.0 * f0[c] - 5.0 * f1[c] + 4.0 * f2[c] - f3[c]) / h2;
            }
        }
    }
    out
}

/// First derivative on a (possibly mildly nonuniform) chord grid, using
/// the three-point stencil that is exact for quadratics.
pub fn first_derivative_nonuniform(curve: &Curve, table: &ArclengthTable) -> Vec<f64> {
    let m = curve.num_vertices();
    let dim = curve.dim();
    let ne = curve.num_edges();
    let mut out = vec![0.0; m * dim];
    for i in 0..m {
        let o = &mut out[i * dim..(i + 1) * dim];
        if curve.is_closed() || (i > 0 && i + 1 < m) {
            let hm = table.edge_lengths[(i + ne - 1) % ne];
            let hp = table.edge_lengths[i % ne];
            let prev = curve.vertex((i + m - 1) % m);
            let mid = curve.vertex(i);
            let next = curve.vertex((i + 1) % m);
            let denom = hm * hp * (hm + hp);
            for c in 0..dim {
                o[c] = (hm * hm * next[c] + (hp * hp - hm * hm) * mid[c] - hp * hp * prev[c])
                    / denom;
            }
        } else if i == 0 {
            let (h0, h1) = (table.edge_lengths[0], table.edge_lengths[1]);
            let (f0, f1, f2) = (curve.vertex(0), curve.vertex(1), curve.vertex(2));
            for c in 0..dim {
                // Derivative at the left node of the interpolating
                // quadratic through the first three points.
                o[c] = -(2.0 * h0 + h1) / (h0 * (h0 + h1)) * f0[c]
                    + (h0 + h1) / (h0 * h1) * f1[c]
                    - h0 / (h1 * (h0 + h1)) * f2[c];
            }
        } else {
            let (h0, h1) = (table.edge_lengths[ne - 1], table.edge_lengths[ne - 2]);
            let (f0, f1, f2) = (curve.vertex(m - 1), curve.vertex(m - 2), curve.vertex(m - 3));
            for c in 0..dim {
                o[c] = (2.0 * h0 + h1) / (h0 * (h0 + h1)) * f0[c]
                    - (h0 + h1) / (h0 * h1) * f1[c]
                    + h0 / (h1 * (h0 + h1)) * f2[c];
            }
        }
    }
    out
}

/// Second derivative on a (possibly mildly nonuniform) chord grid, using
/// the three-point stencil that is exact for quadratics in arclength.
/// Used by the flow integrator between resamples.
pub fn second_derivative_nonuniform(curve: &Curve, table: &ArclengthTable) -> Vec<f64> {
    let m = curve.num_vertices();
    let dim = curve.dim();
    let ne = curve.num_edges();
    let mut out = vec![0.0; m * dim];
    for i in 0..m {
        let o = &mut out[i * dim..(i + 1) * dim];
        if curve.is_closed() || (i > 0 && i + 1 < m) {
            let hm = table.edge_lengths[(i + ne - 1) % ne];
            let hp = table.edge_lengths[i % ne];
            let prev = curve.vertex((i + m - 1) % m);
            let mid = curve.vertex(i);
            let next = curve.vertex((i + 1) % m);
            let denom = hm * hp * (hm + hp);
            for c in 0..dim {
                o[c] = 2.0 * (hm * next[c] - (hm + hp) * mid[c] + hp * prev[c]) / denom;
            }
        } else {
            // Constant second derivative of the quadratic through the
            // three nearest points.
            let (i0, i1, i2, h0, h1) = if i == 0 {
                (0, 1, 2, table.edge_lengths[0], table.edge_lengths[1])
            } else {
                (m - 1, m - 2, m - 3, table.edge_lengths[ne - 1], table.edge_lengths[ne - 2])
            };
            let f0 = curve.vertex(i0);
            let f1 = curve.vertex(i1);
            let f2 = curve.vertex(i2);
            for c in 0..dim {
                o[c] = 2.0
                    * (f0[c] / (h0 * (h0 + h1)) - f1[c] / (h0 * h1) + f2[c] / (h1 * (h0 + h1)));
            }
        }
    }
    out
}

/// Linear interpolation of a per-vertex vector field at arclength
/// fraction `u` in [0, 1), assuming uniformly spaced vertices. For a
/// closed curve the field wraps; for an open one `u` spans first to
/// last vertex.
pub fn interpolate_fraction(field: &[f64], dim: usize, closed: bool, u: f64) -> Vec<f64> {
    let m = field.len() / dim;
    let u = if closed { u.rem_euclid(1.0) } else { u.clamp(0.0, 1.0) };
    let pos = if closed { u * m as f64 } else { u * (m - 1) as f64 };
    let i = (pos.floor() as usize).min(if closed { m - 1 } else { m - 2 });
    let t = pos - i as f64;
    let a = &field[i * dim..(i + 1) * dim];
    let j = (i + 1) % m;
    let b = &field[j * dim..(j + 1) * dim];
    vecn::lerp(a, b, t)
}

/// Like [`interpolate_fraction`], but positions the fraction through the
/// arclength table, so the label stays exact on drifted grids.
pub fn interpolate_fraction_table(
    field: &[f64],
    dim: usize,
    table: &ArclengthTable,
    closed: bool,
    u: f64,
) -> Vec<f64> {
    let m = field.len() / dim;
    let u = if closed { u.rem_euclid(1.0) } else { u.clamp(0.0, 1.0) };
    let target = u * table.total;
    // cumulative is strictly increasing with cumulative[0] = 0.
    let i = match table
        .cumulative
        .binary_search_by(|s| s.partial_cmp(&target).unwrap())
    {
        Ok(exact) => exact.min(m - 1),
        Err(insert) => insert.saturating_sub(1).min(m - 1),
    };
    let last_edge = if closed { m - 1 } else { m - 2 };
    let i = i.min(last_edge);
    let edge = table.edge_lengths[i];
    let t = ((target - table.cumulative[i]) / edge).clamp(0.0, 1.0);
    let a = &field[i * dim..(i + 1) * dim];
    let j = (i + 1) % m;
    let b = &field[j * dim..(j + 1) * dim];
    vecn::lerp(a, b, t)
}

/// Index of the vertex closest to arclength fraction `u`.
pub fn nearest_vertex_at_fraction(table: &ArclengthTable, closed: bool, u: f64) -> usize {
    let m = table.cumulative.len();
    let u = if closed { u.rem_euclid(1.0) } else { u.clamp(0.0, 1.0) };
    let target = u * table.total;
    let mut best = 0usize;
    let mut best_dist = f64::INFINITY;
    for (v, &s) in table.cumulative.iter().enumerate() {
        let mut d = (s - target).abs();
        if closed {
            d = d.min((s + table.total - target).abs());
        }
        if d < best_dist {
            best_dist = d;
            best = v;
        }
    }
    best % m
}
