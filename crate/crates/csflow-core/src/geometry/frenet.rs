//! Discrete Frenet frames, curvature, torsions, and shape functionals.
//!
//! Frames are built per vertex by Gram–Schmidt orthonormalization of the
//! arclength derivatives: the tangent from the first derivative, the
//! normal from the second (so the curvature is the norm of the projected
//! second derivative), binormals from higher ones. When all but one frame
//! vector is defined, the last is completed by the generalized cross
//! product, which keeps it smooth and oriented along the curve — in R^3
//! this is the usual `B = T x N`.
//!
//! The normal is flagged undefined where `kappa * L` falls below a
//! scale-relative threshold instead of being fabricated from noise.

use super::curve::{ArclengthTable, Curve};
use super::deriv;
use crate::vecn;
use nalgebra::DMatrix;

/// `kappa * L` below this leaves the normal (and the rest of the frame)
/// undefined at a vertex.
pub const KAPPA_DEFINED_REL: f64 = 1e-6;

/// A Gram–Schmidt direction shorter than this fraction of the underlying
/// derivative magnitude is treated as degenerate.
const GS_DEFINED_REL: f64 = 1e-6;

/// Per-vertex orthonormal frames with curvature and torsions.
#[derive(Debug, Clone)]
pub struct FrenetData {
    dim: usize,
    /// `frames[v]` holds `ranks[v]` vectors of `dim` components, flat,
    /// ordered tangent, normal, binormals.
    frames: Vec<Vec<f64>>,
    ranks: Vec<usize>,
    kappa: Vec<f64>,
    /// `torsions[v][i]` is the signed Frenet coefficient `tau_{i+1}`,
    /// `NaN` where the stencil reaches undefined frame vectors.
    torsions: Vec<Vec<f64>>,
}

impl FrenetData {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.ranks.len()
    }

    pub fn frame_rank(&self, v: usize) -> usize {
        self.ranks[v]
    }

    /// Frame vector `level` at vertex `v`: 0 tangent, 1 normal, 2 first
    /// binormal, and so on. `None` beyond the frame rank.
    pub fn frame_vector(&self, v: usize, level: usize) -> Option<&[f64]> {
        if level < self.ranks[v] {
            Some(&self.frames[v][level * self.dim..(level + 1) * self.dim])
        } else {
            None
        }
    }

    pub fn tangent(&self, v: usize) -> &[f64] {
        self.frame_vector(v, 0).expect("tangent always defined")
    }

    pub fn normal(&self, v: usize) -> Option<&[f64]> {
        self.frame_vector(v, 1)
    }

    pub fn kappa(&self, v: usize) -> f64 {
        self.kappa[v]
    }

    pub fn kappa_all(&self) -> &[f64] {
        &self.kappa
    }

    /// Signed first torsion, `None` where the frame is too degenerate to
    /// measure it. Planarity checks treat the undefined case as zero.
    pub fn tau1(&self, v: usize) -> Option<f64> {
        self.torsion(v, 1)
    }

    /// Signed `tau_i` (1-based), where measurable.
    pub fn torsion(&self, v: usize, i: usize) -> Option<f64> {
        self.torsions[v]
            .get(i - 1)
            .copied()
            .filter(|t| t.is_finite())
    }

    /// `|tau_1|` with the planar convention that an undefined torsion is 0.
    pub fn tau1_abs_or_zero(&self, v: usize) -> f64 {
        if self.ranks[v] >= 3 {
            self.tau1(v).map(f64::abs).unwrap_or(0.0)
        } else {
            0.0
        }
    }

    pub fn sup_kappa_sq(&self) -> f64 {
        self.kappa.iter().map(|k| k * k).fold(0.0, f64::max)
    }

    pub fn argmax_kappa(&self) -> usize {
        let mut best = 0;
        for v in 1..self.kappa.len() {
            if self.kappa[v] > self.kappa[best] {
                best = v;
            }
        }
        best
    }
}

/// Build the Frenet data for a curve resampled to uniform spacing.
/// The tangent and curvature stencils tolerate a few percent of grid
/// drift (they are exact for quadratics at any spacing), so diagnostics
/// taken between resamples carry no grid-dependent bias.
pub fn frenet_frame(curve: &Curve, table: &ArclengthTable) -> FrenetData {
    let dim = curve.dim();
    let m = curve.num_vertices();
    let max_order = (dim - 1).clamp(2, 4);
    let mut derivs: Vec<Vec<f64>> = (1..=max_order)
        .map(|k| deriv::derivatives(curve, table, k))
        .collect();
    derivs[0] = deriv::first_derivative_nonuniform(curve, table);
    derivs[1] = deriv::second_derivative_nonuniform(curve, table);
    let kappa_floor = KAPPA_DEFINED_REL / table.total;

    let mut frames = Vec::with_capacity(m);
    let mut ranks = Vec::with_capacity(m);
    let mut kappa = Vec::with_capacity(m);

    for v in 0..m {
        let mut frame: Vec<f64> = Vec::with_capacity(dim * dim);
        let d1 = &derivs[0][v * dim..(v + 1) * dim];
        let mut t = d1.to_vec();
        vecn::normalize(&mut t);
        frame.extend_from_slice(&t);

        let d2 = &derivs[1][v * dim..(v + 1) * dim];
        let mut u = d2.to_vec();
        vecn::axpy(&mut u, -vecn::dot(d2, &t), &t);
        let k = vecn::norm(&u);
        kappa.push(k);

        if k >= kappa_floor {
            for x in &mut u {
                *x /= k;
            }
            frame.extend_from_slice(&u);
            for dk in derivs.iter().skip(2) {
                let dv = &dk[v * dim..(v + 1) * dim];
                let mut w = dv.to_vec();
                for f in frame.chunks_exact(dim) {
                    vecn::axpy(&mut w, -vecn::dot(dv, f), f);
                }
                let wn = vecn::norm(&w);
                if wn < GS_DEFINED_REL * vecn::norm(dv) {
                    break;
                }
                for x in &mut w {
                    *x /= wn;
                }
                frame.extend_from_slice(&w);
                if frame.len() == dim * dim {
                    break;
                }
            }
        }

        let mut rank = frame.len() / dim;
        if rank == dim - 1 && rank >= 2 {
            let last = cross_complete(&frame, dim);
            frame.extend_from_slice(&last);
            rank += 1;
        }
        ranks.push(rank);
        frames.push(frame);
    }

    let torsions = extract_torsions(&frames, &ranks, dim, curve.is_closed(), table.mean_edge());

    FrenetData { dim, frames, ranks, kappa, torsions }
}

/// The vector `c` with `det([rows; x]) = <c, x>`, for `dim - 1` rows.
/// Orthogonal to every row and oriented so the completed basis is
/// positively oriented; unit norm when the rows are orthonormal.
fn cross_complete(rows: &[f64], dim: usize) -> Vec<f64> {
    debug_assert_eq!(rows.len(), (dim - 1) * dim);
    let mut c = vec![0.0; dim];
    let mut mat = DMatrix::zeros(dim, dim);
    for (r, row) in rows.chunks_exact(dim).enumerate() {
        for j in 0..dim {
            mat[(r, j)] = row[j];
        }
    }
    for (j, cj) in c.iter_mut().enumerate() {
        for k in 0..dim {
            mat[(dim - 1, k)] = if k == j { 1.0 } else { 0.0 };
        }
        *cj = mat.clone().determinant();
    }
    vecn::normalize(&mut c);
    c
}

/// Torsions as inner products of the differentiated frame fields against
/// the next frame vector, `tau_i = <d(level_i)/ds, level_{i+1}>`.
fn extract_torsions(
    frames: &[Vec<f64>],
    ranks: &[usize],
    dim: usize,
    closed: bool,
    h: f64,
) -> Vec<Vec<f64>> {
    let m = ranks.len();
    let max_rank = ranks.iter().copied().max().unwrap_or(0);
    let mut torsions = vec![Vec::new(); m];
    if max_rank < 3 {
        return torsions;
    }

    // Level fields padded with NaN where undefined, so stencils that
    // touch a degenerate vertex poison the result instead of faking it.
    for level in 1..max_rank - 1 {
        let mut field = vec![f64::NAN; m * dim];
        for v in 0..m {
            if let Some(vec) = frame_vector_raw(frames, ranks, dim, v, level) {
                field[v * dim..(v + 1) * dim].copy_from_slice(vec);
            }
        }
        let dfield = deriv::d1_field(&field, dim, closed, h);
        for v in 0..m {
            if ranks[v] < level + 2 {
                continue;
            }
            let next = frame_vector_raw(frames, ranks, dim, v, level + 1).unwrap();
            let tau = vecn::dot(&dfield[v * dim..(v + 1) * dim], next);
            while torsions[v].len() < level {
                torsions[v].push(f64::NAN);
            }
            torsions[v][level - 1] = tau;
        }
    }
    torsions
}

fn frame_vector_raw<'a>(
    frames: &'a [Vec<f64>],
    ranks: &[usize],
    dim: usize,
    v: usize,
    level: usize,
) -> Option<&'a [f64]> {
    if level < ranks[v] {
        Some(&frames[v][level * dim..(level + 1) * dim])
    } else {
        None
    }
}

/// Integral of `|kappa|` over the curve (midpoint weights on the dual
/// cells). Scaling-invariant; equals `2 pi` times the turning number for
/// convex closed planar curves.
pub fn total_absolute_curvature(
    curve: &Curve,
    table: &ArclengthTable,
    frenet: &FrenetData,
) -> f64 {
    weighted_vertex_integral(curve, table, |v| frenet.kappa(v))
}

/// Integral of `|kappa| tau_1^2` over the curve.
pub fn torsion_weighted_curvature(
    curve: &Curve,
    table: &ArclengthTable,
    frenet: &FrenetData,
) -> f64 {
    weighted_vertex_integral(curve, table, |v| {
        let t1 = frenet.tau1_abs_or_zero(v);
        frenet.kappa(v) * t1 * t1
    })
}

/// Sum of per-vertex values against dual-cell lengths.
pub fn weighted_vertex_integral<F: Fn(usize) -> f64>(
    curve: &Curve,
    table: &ArclengthTable,
    f: F,
) -> f64 {
    let m = curve.num_vertices();
    let ne = curve.num_edges();
    let mut acc = 0.0;
    for v in 0..m {
        let w = if curve.is_closed() {
            0.5 * (table.edge_lengths[(v + ne - 1) % ne] + table.edge_lengths[v])
        } else if v == 0 {
            0.5 * table.edge_lengths[0]
        } else if v + 1 == m {
            0.5 * table.edge_lengths[ne - 1]
        } else {
            0.5 * (table.edge_lengths[v - 1] + table.edge_lengths[v])
        };
        acc += f(v) * w;
    }
    acc
}

/// How far the curve is from lying in a 2-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarityDefect {
    /// RMS distance of the vertices to the best-fit 2-plane through the
    /// centroid, normalized by the curve diameter.
    pub pca_residual: f64,
    /// Largest `|tau_1|` over vertices with a full enough frame; 0 when
    /// no vertex has one.
    pub sup_tau1: f64,
}

/// Planarity diagnostics from the vertex second-moment spectrum.
pub fn planarity_defect(curve: &Curve, frenet: &FrenetData) -> PlanarityDefect {
    let spectrum = second_moment_spectrum(curve);
    // Eigenvalues at the solver's round-off floor are exact zeros.
    let floor = 1e-13 * spectrum.first().copied().unwrap_or(0.0).max(0.0);
    let out_of_plane: f64 =
        spectrum.iter().skip(2).map(|l| l.max(0.0)).filter(|l| *l > floor).sum();
    let diam = curve.diameter();
    let pca_residual = if diam > 0.0 { out_of_plane.sqrt() / diam } else { 0.0 };

    let mut sup_tau1 = 0.0f64;
    for v in 0..curve.num_vertices() {
        if frenet.frame_rank(v) >= 3 {
            sup_tau1 = sup_tau1.max(frenet.tau1_abs_or_zero(v));
        }
    }
    PlanarityDefect { pca_residual, sup_tau1 }
}

/// Eigenvalues of the vertex covariance about the centroid, descending.
pub fn second_moment_spectrum(curve: &Curve) -> Vec<f64> {
    let dim = curve.dim();
    let m = curve.num_vertices();
    let c = curve.centroid();
    let mut cov = DMatrix::zeros(dim, dim);
    for v in curve.iter_vertices() {
        for i in 0..dim {
            for j in 0..dim {
                cov[(i, j)] += (v[i] - c[i]) * (v[j] - c[j]);
            }
        }
    }
    cov /= m as f64;
    let mut eig: Vec<f64> = cov.symmetric_eigen().eigenvalues.iter().copied().collect();
    eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
    eig
}

/// The orthonormal 2-plane basis (through the centroid) spanned by the
/// top two principal directions, as two `dim`-vectors.
pub fn best_fit_plane(curve: &Curve) -> (Vec<f64>, [Vec<f64>; 2]) {
    let dim = curve.dim();
    let m = curve.num_vertices();
    let c = curve.centroid();
    let mut cov = DMatrix::zeros(dim, dim);
    for v in curve.iter_vertices() {
        for i in 0..dim {
            for j in 0..dim {
                cov[(i, j)] += (v[i] - c[i]) * (v[j] - c[j]);
            }
        }
    }
    cov /= m as f64;
    let se = cov.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].partial_cmp(&se.eigenvalues[a]).unwrap());
    let axis = |k: usize| -> Vec<f64> {
        (0..dim).map(|i| se.eigenvectors[(i, order[k])]).collect()
    };
    (c, [axis(0), axis(1)])
}

/// Worst deviation of the differentiated discrete frame from the
/// tridiagonal Frenet–Serret system, over vertices with the full frame.
/// Converges at second order on smooth curves with nonvanishing torsion.
pub fn frenet_serret_residual(curve: &Curve, table: &ArclengthTable, frenet: &FrenetData) -> f64 {
    let dim = curve.dim();
    let m = curve.num_vertices();
    let h = table.mean_edge();
    let closed = curve.is_closed();
    let full = dim;
    // Only meaningful where every vertex in the stencil has a full frame.
    let mut fields: Vec<Vec<f64>> = Vec::with_capacity(full);
    for level in 0..full {
        let mut field = vec![f64::NAN; m * dim];
        for v in 0..m {
            if let Some(vec) = frenet.frame_vector(v, level) {
                field[v * dim..(v + 1) * dim].copy_from_slice(vec);
            }
        }
        fields.push(field);
    }
    let dfields: Vec<Vec<f64>> = fields
        .iter()
        .map(|f| deriv::d1_field(f, dim, closed, h))
        .collect();

    let mut worst = 0.0f64;
    for v in 0..m {
        if frenet.frame_rank(v) < full {
            continue;
        }
        let coeff = |level: usize| -> f64 {
            // Subdiagonal coefficients of the system: kappa, tau_1, ...
            if level == 0 {
                frenet.kappa(v)
            } else {
                frenet.torsion(v, level).unwrap_or(f64::NAN)
            }
        };
        for level in 0..full {
            let dvec = &dfields[level][v * dim..(v + 1) * dim];
            if dvec.iter().any(|x| !x.is_finite()) {
                continue;
            }
            let mut rhs = vec![0.0; dim];
            if level > 0 {
                let below = frenet.frame_vector(v, level - 1).unwrap();
                let c = coeff(level - 1);
                if !c.is_finite() {
                    continue;
                }
                vecn::axpy(&mut rhs, -c, below);
            }
            if level + 1 < full {
                let above = frenet.frame_vector(v, level + 1).unwrap();
                let c = coeff(level);
                if !c.is_finite() {
                    continue;
                }
                vecn::axpy(&mut rhs, c, above);
            }
            let res: f64 = dvec
                .iter()
                .zip(&rhs)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            worst = worst.max(res);
        }
    }
    worst
}
