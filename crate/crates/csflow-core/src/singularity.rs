//! Singularity analysis: type-I/II classification, blow-up rescalings
//! anchored to the Frenet frame, the continuous parabolic rescaling, the
//! shrinker fixed-point residual, and curvature-signature matching
//! against the reference profiles.

use crate::flow::{estimate_singular_time, FlowError, Trajectory};
use crate::geometry::{
    best_fit_plane, derivatives, frenet_frame, hausdorff_distance, nearest_vertex_at_fraction,
    planarity_defect, total_absolute_curvature, Curve,
};
use crate::reference::ReferenceLibrary;
use crate::vecn;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SingularityError {
    #[error("frame rank {rank} at the anchor vertex is too low to rescale")]
    DegenerateFrame { rank: usize },
    #[error("snapshot is not near planar (pca residual {0:.3})")]
    NotNearPlanar(f64),
    #[error("omega_hat {omega} does not exceed the last snapshot time {t_last}")]
    BadOmega { omega: f64, t_last: f64 },
    #[error("{0}")]
    Flow(#[from] FlowError),
}

/// Self-similar families the matcher can report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileFamily {
    Circle,
    MultiCircle(u32),
    AbreschLanger(u32, u32),
    GrimReaper,
    Line,
    None,
}

impl ProfileFamily {
    pub fn label(&self) -> String {
        match self {
            ProfileFamily::Circle => "circle".into(),
            ProfileFamily::MultiCircle(m) => format!("multi_circle({m})"),
            ProfileFamily::AbreschLanger(m, n) => format!("abresch_langer({m},{n})"),
            ProfileFamily::GrimReaper => "grim_reaper".into(),
            ProfileFamily::Line => "line".into(),
            ProfileFamily::None => "none".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityType {
    I,
    II,
    Undetermined,
}

impl SingularityType {
    pub fn as_str(&self) -> &'static str {
        match self {
            SingularityType::I => "I",
            SingularityType::II => "II",
            SingularityType::Undetermined => "undetermined",
        }
    }
}

/// Decision thresholds for [`classify`], echoed into every report.
#[derive(Debug, Clone, Copy)]
pub struct ClassifyThresholds {
    /// Max relative slope of `K_t (omega - t)` for type I.
    pub slope: f64,
    /// Growth factor of the same series that forces type II.
    pub growth: f64,
    /// Minimum fit quality of the singular-time fit for type I.
    pub fit: f64,
}

impl Default for ClassifyThresholds {
    fn default() -> Self {
        ClassifyThresholds { slope: 0.2, growth: 3.0, fit: 0.99 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Classification {
    pub kind: SingularityType,
    pub omega_hat: f64,
    pub fit_quality: f64,
    /// Max of `K_t (omega_hat - t)` over the final decade; 1/2 for the
    /// shrinking circle.
    pub limsup_estimate: f64,
    pub rel_slope: f64,
    pub growth: f64,
}

/// Classify the singularity of a blow-up-terminated trajectory from the
/// behaviour of `K_t (omega_hat - t)` over the final decade of curvature
/// growth: flat and well fitted means type I, growth beyond the factor
/// threshold means type II, anything else is left undetermined.
pub fn classify(
    traj: &Trajectory,
    thresholds: &ClassifyThresholds,
) -> Result<Classification, FlowError> {
    let (omega_hat, fit_quality) = estimate_singular_time(traj)?;
    let k_max = traj
        .snapshots
        .iter()
        .map(|s| s.diagnostics.sup_kappa_sq)
        .fold(0.0f64, f64::max);
    let series: Vec<f64> = traj
        .snapshots
        .iter()
        .filter(|s| s.diagnostics.sup_kappa_sq >= k_max / 10.0 && s.t < omega_hat)
        .map(|s| s.diagnostics.sup_kappa_sq * (omega_hat - s.t))
        .collect();
    if series.len() < 2 {
        return Err(FlowError::InsufficientBlowupData(
            "fewer than 2 usable snapshots in the final decade".into(),
        ));
    }
    let first = series[0];
    let last = *series.last().unwrap();
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    let rel_slope = (last - first) / mean.max(1e-300);
    let limsup_estimate = series.iter().cloned().fold(0.0, f64::max);
    // The singular-time fit undershoots omega when the blow-up is
    // super-linear, which cuts the series off near the fitted time; the
    // growth is therefore measured to the series maximum rather than to
    // its final element.
    let growth = limsup_estimate / first.max(1e-300);

    let kind = if rel_slope.abs() < thresholds.slope && fit_quality > thresholds.fit {
        SingularityType::I
    } else if growth > thresholds.growth {
        SingularityType::II
    } else {
        SingularityType::Undetermined
    };
    Ok(Classification { kind, omega_hat, fit_quality, limsup_estimate, rel_slope, growth })
}

/// A space-time point of concentrating curvature.
#[derive(Debug, Clone, Copy)]
pub struct BlowupPoint {
    /// Arclength fraction of the curvature argmax.
    pub fraction: f64,
    pub t: f64,
    /// Rescaling factor, the curvature at the point.
    pub lambda: f64,
    pub snapshot_index: usize,
}

/// A blow-up sequence plus the measured essentialness constant.
#[derive(Debug, Clone)]
pub struct BlowupSequence {
    pub points: Vec<BlowupPoint>,
    pub requested_rho: f64,
    /// `min_j  κ²(p_j, t_j) / max_{t ≤ t_j} K_t`.
    pub measured_rho: f64,
    pub essential: bool,
}

/// Pick the curvature argmax of each of the last `min(10, len)` snapshots
/// and check the essential condition `ρ K_t ≤ κ²(p_j, t_j)` against all
/// earlier recorded times.
pub fn select_blowup_sequence(traj: &Trajectory, rho: f64) -> BlowupSequence {
    assert!(rho > 0.0 && rho <= 1.0, "rho must lie in (0, 1]");
    let n = traj.len();
    let take = n.min(10);
    let mut points = Vec::with_capacity(take);
    let mut measured_rho = f64::INFINITY;
    for idx in n - take..n {
        let snap = &traj.snapshots[idx];
        let frenet = snap.frenet();
        let v = frenet.argmax_kappa();
        let lambda = frenet.kappa(v);
        let table = snap.curve.arclength().expect("table");
        let k_before = traj.snapshots[..=idx]
            .iter()
            .map(|s| s.diagnostics.sup_kappa_sq)
            .fold(0.0f64, f64::max);
        measured_rho = measured_rho.min(lambda * lambda / k_before.max(1e-300));
        points.push(BlowupPoint {
            fraction: table.cumulative[v] / table.total,
            t: snap.t,
            lambda,
            snapshot_index: idx,
        });
    }
    BlowupSequence { points, requested_rho: rho, measured_rho, essential: measured_rho >= rho }
}

/// A rescaled copy of one snapshot.
#[derive(Debug, Clone)]
pub struct RescaledSnapshot {
    pub curve: Curve,
    pub source_time: f64,
    /// True when anchored to the Frenet frame at a blow-up point
    /// (tangent to e1, normal to e2, point at the origin).
    pub frame_anchored: bool,
    /// Slow time `-log(omega - t)/2` for the continuous rescaling.
    pub rescaled_time: Option<f64>,
}

/// Blow-up rescaling about one point: translate it to the origin, scale
/// by its curvature, and rotate the local frame onto the coordinate
/// axes (completing the frame canonically when it is not full).
pub fn rescale_at(traj: &Trajectory, bp: &BlowupPoint) -> Result<RescaledSnapshot, SingularityError> {
    let snap = &traj.snapshots[bp.snapshot_index];
    let curve = &snap.curve;
    let dim = curve.dim();
    let frenet = snap.frenet();
    let table = curve.arclength().expect("table");
    let v = nearest_vertex_at_fraction(&table, curve.is_closed(), bp.fraction);
    let rank = frenet.frame_rank(v);
    if rank < 2 {
        return Err(SingularityError::DegenerateFrame { rank });
    }
    let mut rows: Vec<Vec<f64>> = (0..rank)
        .map(|level| frenet.frame_vector(v, level).unwrap().to_vec())
        .collect();
    complete_basis(&mut rows, dim);

    let anchor = curve.vertex(v).to_vec();
    let mut rotation = vec![0.0; dim * dim];
    for (r, row) in rows.iter().enumerate() {
        rotation[r * dim..(r + 1) * dim].copy_from_slice(row);
    }
    let moved = curve.translated(&vecn::scale(&anchor, -1.0));
    let rotated = moved.mapped(&rotation);
    let rescaled = rotated.scaled(bp.lambda);
    Ok(RescaledSnapshot {
        curve: rescaled,
        source_time: bp.t,
        frame_anchored: true,
        rescaled_time: None,
    })
}

/// Extend `rows` (orthonormal) to a full orthonormal basis of R^dim by
/// Gram–Schmidt over the canonical basis vectors in index order.
fn complete_basis(rows: &mut Vec<Vec<f64>>, dim: usize) {
    let mut canonical = 0usize;
    while rows.len() < dim && canonical < dim {
        let mut cand = vec![0.0; dim];
        cand[canonical] = 1.0;
        canonical += 1;
        for row in rows.iter() {
            let proj = vecn::dot(&cand, row);
            vecn::axpy(&mut cand, -proj, row);
        }
        if vecn::norm(&cand) > 1e-6 {
            vecn::normalize(&mut cand);
            rows.push(cand);
        }
    }
    assert_eq!(rows.len(), dim, "basis completion must succeed for orthonormal input");
}

/// The continuous parabolic rescaling
/// `(2 (omega - t))^{-1/2} (γ - limit point)` tagged with the slow time
/// `-log(omega - t)/2`. The limit point is estimated as the centroid of
/// the final snapshot.
pub fn continuous_rescaling(
    traj: &Trajectory,
    omega_hat: f64,
) -> Result<Vec<RescaledSnapshot>, SingularityError> {
    let t_last = traj.final_state().t;
    if omega_hat <= t_last {
        return Err(SingularityError::BadOmega { omega: omega_hat, t_last });
    }
    let center = traj.final_state().curve.centroid();
    let shift = vecn::scale(&center, -1.0);
    Ok(traj
        .snapshots
        .iter()
        .map(|s| {
            let factor = 1.0 / (2.0 * (omega_hat - s.t)).sqrt();
            RescaledSnapshot {
                curve: s.curve.translated(&shift).scaled(factor),
                source_time: s.t,
                frame_anchored: false,
                rescaled_time: Some(-0.5 * (omega_hat - s.t).ln()),
            }
        })
        .collect())
}

/// RMS deviation from the shrinker fixed-point equation
/// `γ_ss + γ^⊥ = 0` with `γ^⊥ = γ - <γ, T> T`. Zero (to mesh accuracy)
/// exactly on the self-shrinking profiles normalized to shrink to the
/// origin at unit rate.
pub fn shrinker_residual(snapshot: &RescaledSnapshot) -> f64 {
    shrinker_residual_curve(&snapshot.curve)
}

pub fn shrinker_residual_curve(curve: &Curve) -> f64 {
    let table = curve.arclength().expect("table");
    let frenet = frenet_frame(curve, &table);
    let gss = derivatives(curve, &table, 2);
    let dim = curve.dim();
    let m = curve.num_vertices();
    // One-sided stencils pollute open ends; stay three widths away.
    let (lo, hi) = if curve.is_closed() { (0, m) } else { (3, m - 3) };
    let mut acc = 0.0;
    let mut count = 0usize;
    for v in lo..hi {
        let g = curve.vertex(v);
        let t = frenet.tangent(v);
        let tangential = vecn::dot(g, t);
        let mut res = 0.0;
        for c in 0..dim {
            let perp = g[c] - tangential * t[c];
            let r = gss[v * dim + c] + perp;
            res += r * r;
        }
        acc += res;
        count += 1;
    }
    (acc / count.max(1) as f64).sqrt()
}

/// Result of matching a rescaled snapshot against the profile library.
#[derive(Debug, Clone, Copy)]
pub struct ProfileMatch {
    pub family: ProfileFamily,
    /// RMS distance between curvature signatures `κ(s/L)·L`, minimized
    /// over cyclic shifts and reflection.
    pub residual: f64,
    pub winding: i64,
}

/// Signature sample count.
const SIGNATURE_POINTS: usize = 256;

/// Residual above which no family is reported.
const MATCH_CUTOFF: f64 = 0.3;

/// Match a near-planar snapshot against every library profile by its
/// scale-invariant curvature signature.
pub fn match_profile(
    snapshot: &RescaledSnapshot,
    library: &ReferenceLibrary,
) -> Result<ProfileMatch, SingularityError> {
    let curve = &snapshot.curve;
    let table = curve.arclength().expect("table");
    let frenet = frenet_frame(curve, &table);
    let defect = planarity_defect(curve, &frenet);
    if defect.pca_residual >= 0.1 {
        return Err(SingularityError::NotNearPlanar(defect.pca_residual));
    }
    let planar = project_to_plane(curve);
    let sig = signature(&planar);
    let ptable = planar.arclength().expect("table");
    let pfrenet = frenet_frame(&planar, &ptable);
    let winding =
        (total_absolute_curvature(&planar, &ptable, &pfrenet) / (2.0 * PI)).round() as i64;

    let mut best_family = ProfileFamily::None;
    let mut best_residual = f64::INFINITY;
    for profile in &library.profiles {
        let prof_sig = signature(&profile.curve);
        let residual = signature_distance(&sig, planar.is_closed(), &prof_sig);
        if residual < best_residual {
            best_residual = residual;
            best_family = profile.family;
        }
    }
    if best_residual > MATCH_CUTOFF {
        best_family = ProfileFamily::None;
    }
    Ok(ProfileMatch { family: best_family, residual: best_residual, winding })
}

/// Orthogonal projection onto the best-fit 2-plane through the centroid.
fn project_to_plane(curve: &Curve) -> Curve {
    if curve.dim() == 2 {
        return curve.clone();
    }
    let (center, [a1, a2]) = best_fit_plane(curve);
    let mut verts = Vec::with_capacity(curve.num_vertices() * 2);
    for v in curve.iter_vertices() {
        let rel = vecn::sub(v, &center);
        verts.push(vecn::dot(&rel, &a1));
        verts.push(vecn::dot(&rel, &a2));
    }
    let build = if curve.is_closed() { Curve::closed } else { Curve::open };
    build(2, verts).expect("near-planar projection keeps the curve valid")
}

/// Dimensionless curvature signature `κ(s/L)·L` on the common grid. The
/// curvature field is extracted on the curve's own (near-uniform) grid
/// and interpolated in the arclength fraction — resampling the polygon
/// first would alias mesh-level jitter into the curvature.
fn signature(curve: &Curve) -> Vec<f64> {
    let uniform;
    let curve = if curve
        .arclength()
        .map(|t| t.edge_ratio() < 1.1)
        .unwrap_or(false)
    {
        curve
    } else {
        // Rebalance at the curve's own density: upsampling a polyline
        // puts samples on straight chords and destroys the curvature.
        uniform = curve.resample(curve.num_vertices()).expect("signature resample");
        &uniform
    };
    let table = curve.arclength().expect("table");
    let frenet = frenet_frame(curve, &table);
    let kappa: Vec<f64> = (0..curve.num_vertices()).map(|v| frenet.kappa(v)).collect();
    (0..SIGNATURE_POINTS)
        .map(|j| {
            let u = j as f64 / SIGNATURE_POINTS as f64;
            crate::geometry::interpolate_fraction_table(&kappa, 1, &table, curve.is_closed(), u)
                [0]
                * table.total
        })
        .collect()
}

/// RMS difference minimized over reflection and, for closed snapshots,
/// cyclic shifts of the snapshot signature.
fn signature_distance(sig: &[f64], closed: bool, reference: &[f64]) -> f64 {
    let n = sig.len().min(reference.len());
    let shifts = if closed { n } else { 1 };
    let mut best = f64::INFINITY;
    for reflect in [false, true] {
        for shift in 0..shifts {
            let mut acc = 0.0;
            for i in 0..n {
                let j = (i + shift) % n;
                let a = if reflect { sig[n - 1 - j] } else { sig[j] };
                let d = a - reference[i];
                acc += d * d;
            }
            best = best.min((acc / n as f64).sqrt());
        }
    }
    best
}

/// Hausdorff distance between the curve and the unit circle centered at
/// the origin inside the curve's own best-fit plane.
pub fn hausdorff_to_unit_circle(curve: &Curve) -> f64 {
    let dim = curve.dim();
    let (_, [a1, a2]) = best_fit_plane(curve);
    let m = 512;
    let mut verts = vec![0.0; m * dim];
    for i in 0..m {
        let theta = 2.0 * PI * i as f64 / m as f64;
        let v = &mut verts[i * dim..(i + 1) * dim];
        for c in 0..dim {
            v[c] = theta.cos() * a1[c] + theta.sin() * a2[c];
        }
    }
    let circle = Curve::closed(dim, verts).expect("unit circle");
    hausdorff_distance(curve, &circle)
}

/// One row of the planarity trend of the rescaled snapshots.
#[derive(Debug, Clone, Copy)]
pub struct PlanaritySample {
    pub t: f64,
    pub pca_residual: f64,
    pub sup_tau1: f64,
}

/// Everything the blow-up analysis produces for one trajectory.
#[derive(Debug, Clone)]
pub struct SingularityReport {
    pub classification: Classification,
    pub thresholds: ClassifyThresholds,
    pub sequence: BlowupSequence,
    pub snapshots: Vec<RescaledSnapshot>,
    pub continuous: Vec<RescaledSnapshot>,
    pub planarity_series: Vec<PlanaritySample>,
    pub profile: ProfileMatch,
}

/// Run the full pipeline on a blow-up-terminated trajectory: classify,
/// select the blow-up sequence, rescale at each point, track planarity,
/// rescale continuously, and match the final shape against the library.
pub fn analyze(
    traj: &Trajectory,
    library: &ReferenceLibrary,
    thresholds: &ClassifyThresholds,
    rho: f64,
) -> Result<SingularityReport, SingularityError> {
    let classification = classify(traj, thresholds)?;
    let sequence = select_blowup_sequence(traj, rho);
    let mut snapshots = Vec::with_capacity(sequence.points.len());
    let mut planarity_series = Vec::with_capacity(sequence.points.len());
    for bp in &sequence.points {
        let rescaled = rescale_at(traj, bp)?;
        let table = rescaled.curve.arclength().expect("table");
        let frenet = frenet_frame(&rescaled.curve, &table);
        let defect = planarity_defect(&rescaled.curve, &frenet);
        planarity_series.push(PlanaritySample {
            t: bp.t,
            pca_residual: defect.pca_residual,
            sup_tau1: defect.sup_tau1,
        });
        snapshots.push(rescaled);
    }
    let continuous = continuous_rescaling(traj, classification.omega_hat)?;
    let profile = match_profile(snapshots.last().expect("nonempty sequence"), library)?;
    Ok(SingularityReport {
        classification,
        thresholds: *thresholds,
        sequence,
        snapshots,
        continuous,
        planarity_series,
        profile,
    })
}
