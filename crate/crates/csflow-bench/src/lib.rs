//! Shared fixtures for the benchmark targets.

use csflow_core::geometry::Curve;
use csflow_core::reference::{circle_with_modes, Mode};

/// A mildly non-planar curve in R^4, the typical integrator workload.
pub fn workload_curve(m: usize) -> Curve {
    circle_with_modes(
        4,
        m,
        &[
            Mode { coord: 2, k: 2, cos_amp: 0.0, sin_amp: 0.1 },
            Mode { coord: 3, k: 3, cos_amp: 0.1, sin_amp: 0.0 },
        ],
    )
    .unwrap()
    .resample(m)
    .unwrap()
}
