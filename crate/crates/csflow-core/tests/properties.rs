//! Property suites: invariances under rigid motions, dilations, and
//! reparametrization, plus the structural flow properties that must hold
//! on arbitrary smooth inputs.

use csflow_core::entropy::{entropy, f_functional, EntropySearchConfig, GaussianSpec};
use csflow_core::flow::{step, FlowConfig, FlowState};
use csflow_core::geometry::{
    frenet_frame, hausdorff_distance, planarity_defect, total_absolute_curvature, Curve,
};
use csflow_core::reference::{circle_with_modes, random_rotation, Mode};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A smooth closed curve: a circle with a few bounded harmonics, in
/// dimension 2 to 5.
fn smooth_curve_strategy() -> impl Strategy<Value = Curve> {
    (
        2usize..=5,
        48usize..=96,
        proptest::collection::vec((-0.12f64..0.12, -0.12f64..0.12, 2u32..=5), 1..4),
    )
        .prop_map(|(dim, m, amps)| {
            let modes: Vec<Mode> = amps
                .iter()
                .enumerate()
                .map(|(i, &(ca, sa, k))| Mode { coord: (2 + i) % dim, k, cos_amp: ca, sin_amp: sa })
                .collect();
            circle_with_modes(dim, m, &modes).expect("bounded harmonics keep the curve valid")
        })
}

fn rotated(curve: &Curve, seed: u64) -> Curve {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rot = random_rotation(curve.dim(), &mut rng);
    curve.mapped(&rot)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn resample_is_idempotent_at_fixed_count(curve in smooth_curve_strategy()) {
        let m = curve.num_vertices();
        let once = curve.resample(m).unwrap();
        let twice = once.resample(m).unwrap();
        for (a, b) in once.iter_vertices().zip(twice.iter_vertices()) {
            let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
            prop_assert!(d < 1e-9, "vertex moved by {d}");
        }
    }

    #[test]
    fn arclength_scales_exactly_under_dilation(
        curve in smooth_curve_strategy(),
        lambda in 0.25f64..4.0,
    ) {
        let l = curve.arclength().unwrap().total;
        let scaled = curve.scaled(lambda).arclength().unwrap().total;
        prop_assert!((scaled - lambda * l).abs() <= 1e-12 * scaled.max(l));
    }

    #[test]
    fn frames_stay_orthonormal(curve in smooth_curve_strategy(), seed in 0u64..1000) {
        let c = rotated(&curve, seed).resample(curve.num_vertices()).unwrap();
        let table = c.arclength().unwrap();
        let frenet = frenet_frame(&c, &table);
        for v in 0..c.num_vertices() {
            let rank = frenet.frame_rank(v);
            for a in 0..rank {
                for b in a..rank {
                    let fa = frenet.frame_vector(v, a).unwrap();
                    let fb = frenet.frame_vector(v, b).unwrap();
                    let dot: f64 = fa.iter().zip(fb).map(|(x, y)| x * y).sum();
                    let want = if a == b { 1.0 } else { 0.0 };
                    prop_assert!((dot - want).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn shape_functionals_are_similarity_invariant(
        curve in smooth_curve_strategy(),
        seed in 0u64..1000,
        lambda in 0.5f64..3.0,
        shift in -5.0f64..5.0,
    ) {
        let table = curve.arclength().unwrap();
        let frenet = frenet_frame(&curve, &table);
        let tac = total_absolute_curvature(&curve, &table, &frenet);
        let planarity = planarity_defect(&curve, &frenet);

        let moved = {
            let r = rotated(&curve, seed);
            let offset = vec![shift; curve.dim()];
            r.translated(&offset)
        };
        let mtable = moved.arclength().unwrap();
        let mfrenet = frenet_frame(&moved, &mtable);
        let mtac = total_absolute_curvature(&moved, &mtable, &mfrenet);
        let mplanarity = planarity_defect(&moved, &mfrenet);
        prop_assert!((tac - mtac).abs() < 1e-8, "tac {tac} vs {mtac}");
        prop_assert!((planarity.pca_residual - mplanarity.pca_residual).abs() < 1e-8);

        let scaled = curve.scaled(lambda);
        let stable = scaled.arclength().unwrap();
        let sfrenet = frenet_frame(&scaled, &stable);
        let stac = total_absolute_curvature(&scaled, &stable, &sfrenet);
        prop_assert!((stac - tac).abs() < 1e-8 * tac, "dilation broke tac: {tac} vs {stac}");
    }

    #[test]
    fn f_functional_is_translation_invariant(
        curve in smooth_curve_strategy(),
        shift in proptest::collection::vec(-10.0f64..10.0, 5),
        t0 in 0.05f64..5.0,
    ) {
        let table = curve.arclength().unwrap();
        let shift = &shift[..curve.dim()];
        let x0 = vec![0.1; curve.dim()];
        let f = f_functional(&curve, &table, &GaussianSpec { x0: x0.clone(), t0 });
        let moved = curve.translated(shift);
        let x0_moved: Vec<f64> = x0.iter().zip(shift).map(|(a, b)| a + b).collect();
        let fm = f_functional(&moved, &moved.arclength().unwrap(), &GaussianSpec { x0: x0_moved, t0 });
        prop_assert!((f - fm).abs() < 1e-12 * f.max(1.0));
    }
}

proptest! {
    // The remaining properties run whole searches or flows per case.
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn entropy_is_similarity_invariant(
        curve in smooth_curve_strategy(),
        seed in 0u64..1000,
    ) {
        // lambda = 2 scales every float exactly; the searches on both
        // sides follow covariant grids. The invariance budget is a
        // multiple of the stall tolerance, so both searches must be
        // given room to actually converge.
        let refine_tol = 1e-7;
        let lam = |c: &Curve| {
            let table = c.arclength().unwrap();
            let mut config = EntropySearchConfig::for_curve(c, &table);
            config.refine_tol = refine_tol;
            config.refine_iters = 600;
            entropy(c, &table, &config)
        };
        let base = lam(&curve);
        let moved = rotated(&curve, seed).scaled(2.0).translated(&vec![0.75; curve.dim()]);
        let transformed = lam(&moved);
        prop_assert!(base.converged && transformed.converged);
        prop_assert!(
            (base.lambda - transformed.lambda).abs() <= 2.0 * refine_tol + 1e-9,
            "entropy moved from {} to {}",
            base.lambda,
            transformed.lambda
        );
    }

    #[test]
    fn flow_commutes_with_exact_parabolic_rescaling(curve in smooth_curve_strategy()) {
        // Doubling lengths multiplies every float by an exact power of
        // two, so the rescaled run reproduces the original bit for bit.
        let m = curve.num_vertices();
        let config = FlowConfig::blowup(m, 1e12);
        let mut a = FlowState::new(0.0, curve.resample(m).unwrap()).unwrap();
        let mut b = FlowState::new(0.0, curve.scaled(2.0).resample(m).unwrap()).unwrap();
        for _ in 0..50 {
            a = step(&a, &config).unwrap();
            b = step(&b, &config).unwrap();
        }
        prop_assert!((b.t - 4.0 * a.t).abs() < 1e-15 * b.t);
        let d = hausdorff_distance(&a.curve.scaled(2.0), &b.curve);
        let scale = a.curve.diameter();
        prop_assert!(d <= 1e-12 * scale, "parabolic rescaling broke: {d}");
    }

    #[test]
    fn flow_is_rotation_equivariant(curve in smooth_curve_strategy(), seed in 0u64..1000) {
        let m = curve.num_vertices();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rot = random_rotation(curve.dim(), &mut rng);
        // Short run without resampling so branch decisions cannot
        // diverge, leaving pure floating-point drift.
        let mut config = FlowConfig::blowup(m, 1e12);
        config.resample_trigger = 1.5;
        let mut a = FlowState::new(0.0, curve.resample(m).unwrap()).unwrap();
        let mut b = FlowState::new(0.0, curve.resample(m).unwrap().mapped(&rot)).unwrap();
        for _ in 0..100 {
            a = step(&a, &config).unwrap();
            b = step(&b, &config).unwrap();
        }
        let d = hausdorff_distance(&a.curve.mapped(&rot), &b.curve);
        prop_assert!(d < 1e-6, "equivariance drift {d}");
    }

    #[test]
    fn length_decreases_along_random_flows(curve in smooth_curve_strategy()) {
        let m = curve.num_vertices();
        let config = FlowConfig::blowup(m, 1e12);
        let mut state = FlowState::new(0.0, curve.resample(m).unwrap()).unwrap();
        for _ in 0..60 {
            let next = step(&state, &config).unwrap();
            prop_assert!(
                next.diagnostics.length <= state.diagnostics.length * (1.0 + 1e-9),
                "length rose from {} to {}",
                state.diagnostics.length,
                next.diagnostics.length
            );
            state = next;
        }
    }
}
