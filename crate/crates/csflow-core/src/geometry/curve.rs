//! Polyline curves in R^n and arclength-based resampling.

use crate::vecn;
use thiserror::Error;

/// Minimum number of vertices for a valid curve.
pub const MIN_VERTICES: usize = 16;

/// Edges shorter than this fraction of the longest edge are treated as
/// collapsed when building an arclength table.
const DEGENERATE_EDGE_REL: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("curve needs at least {min} vertices, got {got}")]
    TooFewVertices { got: usize, min: usize },
    #[error("ambient dimension must be at least 2, got {0}")]
    AmbientDimTooSmall(usize),
    #[error("vertex data length {len} is not a multiple of dimension {dim}")]
    RaggedData { len: usize, dim: usize },
    #[error("non-finite vertex coordinate at vertex {0}")]
    NonFinite(usize),
    #[error("degenerate edge at index {0} (consecutive vertices coincide)")]
    DegenerateEdge(usize),
    #[error("resample failed to bracket the chord length")]
    ResampleBracket,
}

/// A polyline curve in R^n, closed (cyclic) or open.
///
/// Vertices are stored flat, `dim` coordinates per vertex. A closed curve
/// has an implicit wrap edge from the last vertex back to the first.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    verts: Vec<f64>,
    dim: usize,
    closed: bool,
}

impl Curve {
    pub fn closed(dim: usize, verts: Vec<f64>) -> Result<Self, CurveError> {
        Self::new(dim, verts, true)
    }

    pub fn open(dim: usize, verts: Vec<f64>) -> Result<Self, CurveError> {
        Self::new(dim, verts, false)
    }

    fn new(dim: usize, verts: Vec<f64>, closed: bool) -> Result<Self, CurveError> {
        if dim < 2 {
            return Err(CurveError::AmbientDimTooSmall(dim));
        }
        if verts.len() % dim != 0 {
            return Err(CurveError::RaggedData { len: verts.len(), dim });
        }
        let m = verts.len() / dim;
        if m < MIN_VERTICES {
            return Err(CurveError::TooFewVertices { got: m, min: MIN_VERTICES });
        }
        let curve = Curve { verts, dim, closed };
        for (i, v) in curve.iter_vertices().enumerate() {
            if !vecn::is_finite(v) {
                return Err(CurveError::NonFinite(i));
            }
        }
        for e in 0..curve.num_edges() {
            let (a, b) = curve.edge(e);
            if vecn::dist(a, b) == 0.0 {
                return Err(CurveError::DegenerateEdge(e));
            }
        }
        Ok(curve)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn num_vertices(&self) -> usize {
        self.verts.len() / self.dim
    }

    pub fn num_edges(&self) -> usize {
        if self.closed {
            self.num_vertices()
        } else {
            self.num_vertices() - 1
        }
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.verts[i * self.dim..(i + 1) * self.dim]
    }

    /// Endpoints of edge `e`; for a closed curve the last edge wraps.
    pub fn edge(&self, e: usize) -> (&[f64], &[f64]) {
        let j = (e + 1) % self.num_vertices();
        (self.vertex(e), self.vertex(j))
    }

    pub fn iter_vertices(&self) -> impl Iterator<Item = &[f64]> {
        self.verts.chunks_exact(self.dim)
    }

    pub fn raw(&self) -> &[f64] {
        &self.verts
    }

    pub fn raw_mut(&mut self) -> &mut [f64] {
        &mut self.verts
    }

    /// Rebuild from mutated raw storage, revalidating the invariants.
    pub fn with_vertices(&self, verts: Vec<f64>) -> Result<Self, CurveError> {
        Self::new(self.dim, verts, self.closed)
    }

    /// Mean of the vertices.
    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for v in self.iter_vertices() {
            vecn::axpy(&mut c, 1.0, v);
        }
        let m = self.num_vertices() as f64;
        for x in &mut c {
            *x /= m;
        }
        c
    }

    /// Largest pairwise vertex distance.
    pub fn diameter(&self) -> f64 {
        let m = self.num_vertices();
        let mut best = 0.0f64;
        for i in 0..m {
            for j in (i + 1)..m {
                best = best.max(vecn::dist(self.vertex(i), self.vertex(j)));
            }
        }
        best
    }

    pub fn translated(&self, shift: &[f64]) -> Curve {
        assert_eq!(shift.len(), self.dim);
        let mut out = self.clone();
        for v in out.verts.chunks_exact_mut(self.dim) {
            vecn::axpy(v, 1.0, shift);
        }
        out
    }

    /// Apply a row-major `dim x dim` linear map to every vertex.
    pub fn mapped(&self, matrix: &[f64]) -> Curve {
        assert_eq!(matrix.len(), self.dim * self.dim);
        let mut out = self.clone();
        let mut tmp = vec![0.0; self.dim];
        for v in out.verts.chunks_exact_mut(self.dim) {
            for (r, t) in tmp.iter_mut().enumerate() {
                *t = vecn::dot(&matrix[r * self.dim..(r + 1) * self.dim], v);
            }
            v.copy_from_slice(&tmp);
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> Curve {
        let mut out = self.clone();
        for x in &mut out.verts {
            *x *= factor;
        }
        out
    }

    /// Exact polygonal arclength table.
    pub fn arclength(&self) -> Result<ArclengthTable, CurveError> {
        let ne = self.num_edges();
        let mut edge_lengths = Vec::with_capacity(ne);
        let mut cumulative = Vec::with_capacity(self.num_vertices());
        cumulative.push(0.0);
        let mut total = 0.0;
        let mut max_edge = 0.0f64;
        for e in 0..ne {
            let (a, b) = self.edge(e);
            let len = vecn::dist(a, b);
            max_edge = max_edge.max(len);
            total += len;
            edge_lengths.push(len);
            if e + 1 < self.num_vertices() {
                cumulative.push(total);
            }
        }
        for (e, &len) in edge_lengths.iter().enumerate() {
            if len < DEGENERATE_EDGE_REL * max_edge {
                return Err(CurveError::DegenerateEdge(e));
            }
        }
        Ok(ArclengthTable { edge_lengths, cumulative, total })
    }

    /// Resample to `m` vertices with equal chord lengths.
    ///
    /// The new vertices lie on the input polyline, starting at vertex 0
    /// (both endpoints are kept for an open curve). The common chord
    /// length is solved by bisection so that the walk closes up exactly;
    /// a curve that already has `m` equal edges is a fixed point.
    pub fn resample(&self, m: usize) -> Result<Curve, CurveError> {
        if m < MIN_VERTICES {
            return Err(CurveError::TooFewVertices { got: m, min: MIN_VERTICES });
        }
        let table = self.arclength()?;
        let total = table.total;
        let nchords = if self.closed { m } else { m - 1 };
        let overshoot = 2.0 * total;

        // Signed closure defect of a walk with chord length d.
        let defect = |d: f64| -> f64 {
            match self.walk_chords(d, nchords, overshoot, &table) {
                Some((_, end_path)) => end_path - total,
                None => overshoot,
            }
        };

        let d0 = total / nchords as f64;
        let (mut lo, mut hi);
        if defect(d0) <= 0.0 {
            lo = d0;
            hi = d0;
            for _ in 0..64 {
                hi *= 1.25;
                if defect(hi) > 0.0 {
                    break;
                }
                lo = hi;
            }
        } else {
            hi = d0;
            lo = d0;
            for _ in 0..64 {
                lo *= 0.8;
                if defect(lo) <= 0.0 {
                    break;
                }
                hi = lo;
            }
        }
        if !(defect(lo) <= 0.0 && defect(hi) > 0.0) {
            return Err(CurveError::ResampleBracket);
        }
        for _ in 0..120 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if defect(mid) <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // The lower end of the bracket is always feasible: the walk
        // completed there (an infinitesimally larger chord can run off an
        // open end).
        let (mut points, _) =
            self.walk_chords(lo, nchords, overshoot, &table).ok_or(CurveError::ResampleBracket)?;
        if self.closed {
            points.truncate(m * self.dim);
        } else {
            // Pin the far endpoint exactly.
            points.truncate((m - 1) * self.dim);
            points.extend_from_slice(self.vertex(self.num_vertices() - 1));
        }
        Curve::new(self.dim, points, self.closed)
    }

    /// Walk the polyline taking `nchords` steps of chord length `d`.
    /// Returns the visited points (including the start, excluding the
    /// final landing) and the path position of the final landing. `None`
    /// if a step scans more than `max_scan` of path without a hit.
    fn walk_chords(
        &self,
        d: f64,
        nchords: usize,
        max_scan: f64,
        table: &ArclengthTable,
    ) -> Option<(Vec<f64>, f64)> {
        let ne = self.num_edges();
        let mut points: Vec<f64> = Vec::with_capacity((nchords + 1) * self.dim);
        points.extend_from_slice(self.vertex(0));

        let mut cur = self.vertex(0).to_vec();
        let mut edge = 0usize; // global edge counter (wraps for closed)
        let mut u = 0.0f64; // parameter of `cur` on `edge`
        let mut end_path = 0.0f64;

        for step in 0..nchords {
            let mut found = false;
            let mut scanned = 0.0f64;
            let (mut e, mut umin) = (edge, u);
            while scanned <= max_scan {
                if !self.closed && e >= ne {
                    break;
                }
                let local = e % ne;
                let (a, b) = self.edge(local);
                let elen = table.edge_lengths[local];
                // |a + w (b - a) - cur|^2 = d^2
                let ex: Vec<f64> = vecn::sub(b, a);
                let ac: Vec<f64> = vecn::sub(a, &cur);
                let qa = vecn::dot(&ex, &ex);
                let qb = 2.0 * vecn::dot(&ac, &ex);
                let qc = vecn::dot(&ac, &ac) - d * d;
                let disc = qb * qb - 4.0 * qa * qc;
                if disc >= 0.0 {
                    let sq = disc.sqrt();
                    let mut w_hit = f64::INFINITY;
                    for w in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
                        if w > umin && w <= 1.0 && w < w_hit {
                            w_hit = w;
                        }
                    }
                    if w_hit.is_finite() {
                        cur = vecn::lerp(a, b, w_hit);
                        edge = e;
                        u = w_hit;
                        found = true;
                        if step + 1 == nchords {
                            let wraps = (e / ne) as f64;
                            end_path =
                                wraps * table.total + table.cumulative[local] + w_hit * elen;
                        }
                        break;
                    }
                }
                scanned += elen * (1.0 - umin);
                e += 1;
                umin = 0.0;
            }
            if !found {
                return None;
            }
            if step + 1 < nchords {
                points.extend_from_slice(&cur);
            }
        }
        Some((points, end_path))
    }
}


/// Polygonal arclength data for a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ArclengthTable {
    /// Length of each edge (the wrap edge last, for closed curves).
    pub edge_lengths: Vec<f64>,
    /// Path position of each vertex; `cumulative[0] == 0`.
    pub cumulative: Vec<f64>,
    /// Total polygonal length.
    pub total: f64,
}

impl ArclengthTable {
    pub fn mean_edge(&self) -> f64 {
        self.total / self.edge_lengths.len() as f64
    }

    pub fn min_edge(&self) -> f64 {
        self.edge_lengths.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_edge(&self) -> f64 {
        self.edge_lengths.iter().cloned().fold(0.0, f64::max)
    }

    /// Max/min edge length ratio; 1 for perfectly uniform spacing.
    pub fn edge_ratio(&self) -> f64 {
        self.max_edge() / self.min_edge()
    }
}
