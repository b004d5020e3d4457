//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured numbers (run with `--nocapture` to see them all).
//!
//! The heavy trajectories are shared between criteria through lazy
//! statics, so the whole suite stays desk-scale.

use csflow_core::entropy::{entropy, EntropySearchConfig};
use csflow_core::flow::{
    evolve, tac_torsion_budget, verify_bernstein, FlowConfig, FlowState, Trajectory,
};
use csflow_core::geometry::{
    frenet_frame, frenet_serret_residual, planarity_defect, total_absolute_curvature, Curve,
};
use csflow_core::io;
use csflow_core::reference::{
    self, abresch_langer_profile, circle, circle_with_modes, curvature_extrema_count, ellipse,
    grim_reaper, random_low_entropy_curve, Mode, ReferenceLibrary,
};
use csflow_core::singularity::{
    analyze, classify, hausdorff_to_unit_circle, ClassifyThresholds, ProfileFamily,
    SingularityType,
};
use std::f64::consts::PI;
use std::sync::LazyLock;
use std::time::Instant;

const CIRCLE_ENTROPY: f64 = 1.5203469010662807; // sqrt(2 pi / e)

fn entropy_of(curve: &Curve) -> f64 {
    let table = curve.arclength().unwrap();
    let config = EntropySearchConfig::for_curve(curve, &table);
    entropy(curve, &table, &config).lambda
}

/// 2:1 ellipse evolved into its singularity; shared by criteria 4, 6, 7.
static ELLIPSE_TRAJ: LazyLock<Trajectory> = LazyLock::new(|| {
    let initial = ellipse(2, 2.0, 1.0, 256).unwrap();
    let mut config = FlowConfig::blowup(256, 1e4);
    config.snapshot_stride = 50;
    evolve(&initial, &config).unwrap()
});

/// Non-planar perturbed circle in R^4 driven to its singularity
/// (criterion 8). The stride is wide so that the last ten snapshots —
/// the blow-up sequence — span most of the final decade of curvature
/// growth, where the torsion is still decaying above the mesh floor.
static PERTURBED_R4_TRAJ: LazyLock<Trajectory> = LazyLock::new(|| {
    let initial = circle_with_modes(
        4,
        256,
        &[
            Mode { coord: 2, k: 2, cos_amp: 0.0, sin_amp: 0.1 },
            Mode { coord: 3, k: 3, cos_amp: 0.1, sin_amp: 0.0 },
        ],
    )
    .unwrap();
    let mut config = FlowConfig::blowup(256, 100.0);
    config.snapshot_stride = 1200;
    evolve(&initial, &config).unwrap()
});

#[test]
fn criterion_01_shrinking_circle_law() {
    let start = Instant::now();
    let initial = circle(2, 1.0, 1, 256).unwrap();
    let mut config = FlowConfig::blowup(256, 100.0);
    config.snapshot_stride = 50;
    let traj = evolve(&initial, &config).unwrap();
    let elapsed = start.elapsed();

    let mut worst = 0.0f64;
    for snap in &traj.snapshots {
        let c = snap.curve.centroid();
        let mean_r = snap
            .curve
            .iter_vertices()
            .map(|v| v.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
            .sum::<f64>()
            / snap.curve.num_vertices() as f64;
        let law = (1.0 - 2.0 * snap.t).sqrt();
        worst = worst.max((mean_r - law).abs() / law);
    }
    assert!(worst < 0.01, "radius law violated by {worst:.3e}");

    let (omega, quality) = csflow_core::flow::estimate_singular_time(&traj).unwrap();
    assert!(
        (omega - 0.5).abs() <= 2e-3,
        "omega_hat = {omega}, expected 0.500 +- 0.002"
    );
    assert!(elapsed.as_secs() < 60, "run took {elapsed:?}");
    println!(
        "criterion 1: PASS — radius law within {worst:.2e}, omega_hat = {omega:.5} (R² = {quality:.5}), runtime {elapsed:?}"
    );
}

#[test]
fn criterion_02_circle_entropy() {
    let single = entropy_of(&circle(2, 1.0, 1, 256).unwrap());
    assert!(
        (single - CIRCLE_ENTROPY).abs() < 1e-3,
        "entropy(S¹) = {single}, expected {CIRCLE_ENTROPY}"
    );
    let double = entropy_of(&circle(2, 1.0, 2, 512).unwrap());
    assert!(
        (double - 2.0 * CIRCLE_ENTROPY).abs() < 2e-3,
        "entropy(2·S¹) = {double}, expected {}",
        2.0 * CIRCLE_ENTROPY
    );
    println!(
        "criterion 2: PASS — entropy(S¹) = {single:.6}, entropy(doubly covered) = {double:.6}"
    );
}

#[test]
fn criterion_03_grim_reaper_bound() {
    let reaper = grim_reaper(PI / 2.0 - 0.05, 0.0, 2049).unwrap();
    let lambda = entropy_of(&reaper);
    assert!(lambda <= 2.0 + 1e-6, "truncated reaper entropy {lambda} exceeds 2");

    let seq = csflow_core::entropy::grim_reaper_limit_check(0.05, &[1.0, 10.0, 100.0, 1000.0]);
    for pair in seq.windows(2) {
        assert!(
            pair[0].value < pair[1].value,
            "sequence must increase: {} then {}",
            pair[0].value,
            pair[1].value
        );
    }
    let last = seq.last().unwrap().value;
    assert!(last >= 1.95, "final value {last} below 1.95");
    let values: Vec<String> = seq.iter().map(|g| format!("{:.4}", g.value)).collect();
    println!(
        "criterion 3: PASS — sup F = {lambda:.6} ≤ 2, F_(0,N),N sequence = [{}]",
        values.join(", ")
    );
}

#[test]
fn criterion_04_entropy_monotonicity_along_the_flow() {
    let traj = &*ELLIPSE_TRAJ;
    let count = 10usize;
    let picks: Vec<&FlowState> = (0..count)
        .map(|i| &traj.snapshots[i * (traj.len() - 1) / (count - 1)])
        .collect();
    let lambdas: Vec<f64> = picks.iter().map(|s| entropy_of(&s.curve)).collect();
    for (i, pair) in lambdas.windows(2).enumerate() {
        assert!(
            pair[1] <= pair[0] + 3e-3,
            "entropy rose between snapshots {i} and {}: {} -> {}",
            i + 1,
            pair[0],
            pair[1]
        );
    }
    println!(
        "criterion 4: PASS — entropy along the ellipse flow: {:.5} -> {:.5}, non-increasing within 3e-3",
        lambdas.first().unwrap(),
        lambdas.last().unwrap()
    );
}

#[test]
fn criterion_05_total_absolute_curvature_budget() {
    let initial = circle_with_modes(
        4,
        256,
        &[Mode { coord: 2, k: 3, cos_amp: 0.0, sin_amp: 0.2 }],
    )
    .unwrap();
    let mut config = FlowConfig::until(256, 0.08);
    config.snapshot_stride = 25;
    let traj = evolve(&initial, &config).unwrap();

    for pair in traj.snapshots.windows(2) {
        assert!(
            pair[1].diagnostics.tac <= pair[0].diagnostics.tac + 1e-3,
            "tac rose from {} to {}",
            pair[0].diagnostics.tac,
            pair[1].diagnostics.tac
        );
    }
    let (drop, integral) = tac_torsion_budget(&traj);
    assert!(
        drop >= 0.95 * integral - 1e-3,
        "tac drop {drop} does not dominate the torsion integral {integral}"
    );
    println!(
        "criterion 5: PASS — tac non-increasing; drop {drop:.5} vs time-integrated ∫|κ|τ₁² ds = {integral:.5}"
    );
}

#[test]
fn criterion_06_bernstein_bounds_on_the_ellipse() {
    let traj = &*ELLIPSE_TRAJ;
    let report = verify_bernstein(traj).unwrap();
    assert!(
        (report.k0 - 4.0).abs() < 0.05,
        "K0 = {} for the 2:1 ellipse, expected 4",
        report.k0
    );
    assert_eq!(report.violations(), 0, "worst margin {}", report.worst_margin());
    println!(
        "criterion 6: PASS — {} snapshots in (0, 1/(8K₀)], zero violations, worst margin {:.3}",
        report.checks.len(),
        report.worst_margin()
    );
}

#[test]
fn criterion_07_ellipse_is_type_one() {
    let traj = &*ELLIPSE_TRAJ;
    let c = classify(traj, &ClassifyThresholds::default()).unwrap();
    assert_eq!(c.kind, SingularityType::I, "classified {:?}", c.kind);
    assert!(
        c.limsup_estimate >= 0.4 && c.limsup_estimate <= 0.6,
        "limsup estimate {} outside [0.4, 0.6]",
        c.limsup_estimate
    );
    assert!(c.fit_quality > 0.99, "fit quality {}", c.fit_quality);
    println!(
        "criterion 7: PASS — type I, K_t(ω−t) limsup = {:.4}, fit quality {:.5}",
        c.limsup_estimate, c.fit_quality
    );
}

#[test]
fn criterion_08_asymptotic_planarity() {
    let traj = &*PERTURBED_R4_TRAJ;
    let lambda0 = entropy_of(&traj.snapshots[0].curve);
    assert!(lambda0 < 2.0, "initial entropy {lambda0} not below 2");

    let library = ReferenceLibrary::default_library().unwrap();
    let report = analyze(traj, &library, &ClassifyThresholds::default(), 0.5).unwrap();

    let series = &report.planarity_series;
    let final_pca = series.last().unwrap().pca_residual;
    assert!(final_pca < 1e-2, "final pca residual {final_pca}");
    let tau_first = series.first().unwrap().sup_tau1;
    let tau_last = series.last().unwrap().sup_tau1;
    for pair in series.windows(2) {
        assert!(
            pair[1].sup_tau1 <= pair[0].sup_tau1 * 1.25 + 1e-6,
            "sup|τ₁| rose from {} to {}",
            pair[0].sup_tau1,
            pair[1].sup_tau1
        );
    }
    assert!(
        tau_last < 0.5 * tau_first,
        "sup|τ₁| did not decrease over the final decade: {tau_first} -> {tau_last}"
    );

    assert_eq!(report.profile.family, ProfileFamily::Circle, "matched {:?}", report.profile.family);
    assert!(report.profile.residual < 5e-2, "profile residual {}", report.profile.residual);
    assert_eq!(report.profile.winding, 1);
    println!(
        "criterion 8: PASS — entropy₀ = {lambda0:.4} < 2, final pca = {final_pca:.2e}, sup|τ₁| {tau_first:.3e} -> {tau_last:.3e}, profile circle (residual {:.3e})",
        report.profile.residual
    );
}

#[test]
fn criterion_09_abresch_langer_construction() {
    let profile = abresch_langer_profile(2, 3, 1024).unwrap();
    assert!(
        profile.closure_gap_rel < 1e-3,
        "closure gap {} of the length",
        profile.closure_gap_rel
    );
    let curve = &profile.curve;
    let residual = csflow_core::singularity::shrinker_residual_curve(curve);
    assert!(residual < 1e-3, "shrinker residual {residual}");

    let table = curve.arclength().unwrap();
    let frenet = frenet_frame(curve, &table);
    let winding =
        (total_absolute_curvature(curve, &table, &frenet) / (2.0 * PI)).round() as i64;
    assert_eq!(winding, 2);
    assert_eq!(curvature_extrema_count(curve, 1e-4), 6);

    let lambda = entropy_of(&curve.resample(512).unwrap());
    assert!(lambda >= 3.02, "entropy {lambda} below 3.02");
    println!(
        "criterion 9: PASS — AL(2,3): gap {:.2e}·L, residual {residual:.2e}, winding 2, 6 extrema, entropy {lambda:.4}",
        profile.closure_gap_rel
    );
}

#[test]
fn criterion_10_low_entropy_curves_round_out() {
    let library = ReferenceLibrary::default_library().unwrap();
    let mut summaries = Vec::new();
    for seed in 1..=5u64 {
        let initial = random_low_entropy_curve(5, 256, seed).unwrap();
        let lambda0 = entropy_of(&initial);
        assert!(lambda0 < 2.0, "seed {seed}: initial entropy {lambda0}");

        let mut config = FlowConfig::blowup(256, 400.0);
        config.snapshot_stride = 40;
        let traj = evolve(&initial, &config).unwrap();
        let report = analyze(&traj, &library, &ClassifyThresholds::default(), 0.5).unwrap();

        let final_rescaled = report.continuous.last().unwrap();
        let dist = hausdorff_to_unit_circle(&final_rescaled.curve);
        assert!(
            dist < 2e-2,
            "seed {seed}: rescaled limit is {dist} from the unit circle"
        );
        assert!(
            !matches!(
                report.profile.family,
                ProfileFamily::GrimReaper | ProfileFamily::AbreschLanger(_, _)
            ),
            "seed {seed}: matched {:?}",
            report.profile.family
        );
        summaries.push(format!("seed {seed}: λ₀={lambda0:.3}, d={dist:.1e}"));
    }
    println!("criterion 10: PASS — {}", summaries.join("; "));
}

#[test]
fn criterion_11_property_suites() {
    // Frame orthonormality at 1e-8.
    let wavy = circle_with_modes(
        4,
        192,
        &[Mode { coord: 2, k: 2, cos_amp: 0.05, sin_amp: 0.1 }],
    )
    .unwrap()
    .resample(192)
    .unwrap();
    let table = wavy.arclength().unwrap();
    let frenet = frenet_frame(&wavy, &table);
    for v in 0..wavy.num_vertices() {
        for a in 0..frenet.frame_rank(v) {
            for b in a..frenet.frame_rank(v) {
                let dot: f64 = frenet
                    .frame_vector(v, a)
                    .unwrap()
                    .iter()
                    .zip(frenet.frame_vector(v, b).unwrap())
                    .map(|(x, y)| x * y)
                    .sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-8);
            }
        }
    }

    // Frenet–Serret residual drops by at least 3 per mesh halving.
    let residual_at = |m: usize| {
        let c = harmonic_arclength_sampled(m);
        let t = c.arclength().unwrap();
        let f = frenet_frame(&c, &t);
        frenet_serret_residual(&c, &t, &f)
    };
    let ratio = residual_at(128) / residual_at(256);
    assert!(ratio >= 3.0, "convergence ratio {ratio}");

    // Rigid-motion and dilation invariance at 1e-8.
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5);
    let rot = reference::random_rotation(4, &mut rng);
    let moved = wavy.mapped(&rot).translated(&[0.5, -2.0, 1.0, 3.0]);
    let mtable = moved.arclength().unwrap();
    let mfrenet = frenet_frame(&moved, &mtable);
    let tac_a = total_absolute_curvature(&wavy, &table, &frenet);
    let tac_b = total_absolute_curvature(&moved, &mtable, &mfrenet);
    assert!((tac_a - tac_b).abs() < 1e-8);
    let pd_a = planarity_defect(&wavy, &frenet);
    let pd_b = planarity_defect(&moved, &mfrenet);
    assert!((pd_a.pca_residual - pd_b.pca_residual).abs() < 1e-8);
    let scaled = wavy.scaled(2.5);
    let stable = scaled.arclength().unwrap();
    let tac_s = total_absolute_curvature(&scaled, &stable, &frenet_frame(&scaled, &stable));
    assert!((tac_s - tac_a).abs() < 1e-8 * tac_a);

    // Resample idempotence at 1e-9.
    let once = wavy.resample(160).unwrap();
    let twice = once.resample(160).unwrap();
    for (a, b) in once.iter_vertices().zip(twice.iter_vertices()) {
        let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
        assert!(d < 1e-9);
    }

    // Byte-identical reports from identical runs.
    let run = || {
        let circle = circle(2, 1.0, 1, 64).unwrap();
        let mut config = FlowConfig::until(64, 0.02);
        config.snapshot_stride = 20;
        let traj = evolve(&circle, &config).unwrap();
        io::trajectory_report(&traj, &[("initial.kind".into(), "circle".into())])
            .to_pretty_string()
    };
    assert_eq!(run(), run(), "reports must be byte-identical");

    println!("criterion 11: PASS — orthonormality, convergence order ({ratio:.2}x), invariances, idempotence, determinism");
}

/// Harmonic test curve sampled uniformly in exact arclength (see the
/// geometry tests for the rationale: vertices must lie on the smooth
/// curve for clean convergence measurements).
fn harmonic_arclength_sampled(m: usize) -> Curve {
    let speed = |p: f64| {
        let c3 = (3.0 * p).cos();
        (1.0 + 0.36 * c3 * c3).sqrt()
    };
    let fine = 1 << 18;
    let dp = 2.0 * PI / fine as f64;
    let mut cum = Vec::with_capacity(fine + 1);
    cum.push(0.0);
    let mut acc = 0.0;
    for i in 0..fine {
        let a = i as f64 * dp;
        acc += 0.5 * (speed(a) + speed(a + dp)) * dp;
        cum.push(acc);
    }
    let total = acc;
    let mut verts = Vec::with_capacity(3 * m);
    let mut lo = 0usize;
    for k in 0..m {
        let target = total * k as f64 / m as f64;
        while lo + 1 < cum.len() && cum[lo + 1] < target {
            lo += 1;
        }
        let frac = (target - cum[lo]) / (cum[lo + 1] - cum[lo]);
        let p = (lo as f64 + frac) * dp;
        verts.push(p.cos());
        verts.push(p.sin());
        verts.push(0.2 * (3.0 * p).sin());
    }
    Curve::closed(3, verts).unwrap()
}
