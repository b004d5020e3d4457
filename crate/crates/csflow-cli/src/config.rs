//! Flat `section.key = value` run configuration files.
//!
//! One documented key-value file drives a run: diffable, language-neutral,
//! echoed verbatim into every report. Lines starting with `#` and blank
//! lines are ignored; keys are namespaced with dots; unknown keys are
//! rejected so typos fail loudly.

use csflow_core::entropy::{EntropySearchConfig, X0Candidates};
use csflow_core::flow::FlowConfig;
use csflow_core::geometry::Curve;
use csflow_core::reference;
use csflow_core::singularity::ClassifyThresholds;
use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

pub struct RunConfig {
    entries: Vec<(String, String)>,
    consumed: std::cell::RefCell<BTreeSet<String>>,
    base_dir: PathBuf,
    pub seed: u64,
}

impl RunConfig {
    pub fn load(path: &Path, seed: u64) -> Result<RunConfig, String> {
        let text = fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", lineno + 1))?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(format!("line {}: empty key or value", lineno + 1));
            }
            if entries.iter().any(|(k, _)| *k == key) {
                return Err(format!("line {}: duplicate key {key}", lineno + 1));
            }
            entries.push((key, value));
        }
        Ok(RunConfig {
            entries,
            consumed: Default::default(),
            base_dir: path.parent().unwrap_or(Path::new(".")).to_path_buf(),
            seed,
        })
    }

    /// Every key-value pair plus the seed, for report echoes.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut echo = self.entries.clone();
        echo.push(("seed".to_string(), self.seed.to_string()));
        echo
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.consumed.borrow_mut().insert(key.to_string());
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, String> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| format!("key {key}: cannot parse {v:?}")),
        }
    }

    fn get_or<T: std::str::FromStr + Copy>(&self, key: &str, default: T) -> Result<T, String> {
        Ok(self.parse::<T>(key)?.unwrap_or(default))
    }

    /// Reject typos: a key is unknown when its section is one the
    /// command read from but the key itself was never asked about, or
    /// when its section does not exist at all. Sections belonging to
    /// other commands are tolerated so one file can drive a whole run.
    pub fn finish(&self, relevant_sections: &[&str]) -> Result<(), String> {
        const KNOWN_SECTIONS: [&str; 5] = ["initial", "flow", "entropy", "singularity", "verify"];
        let consumed = self.consumed.borrow();
        let unknown: Vec<&str> = self
            .entries
            .iter()
            .map(|(k, _)| k.as_str())
            .filter(|key| {
                if consumed.contains(*key) {
                    return false;
                }
                let section = key.split('.').next().unwrap_or("");
                relevant_sections.contains(&section) || !KNOWN_SECTIONS.contains(&section)
            })
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(format!("unknown configuration keys: {}", unknown.join(", ")))
        }
    }

    /// Build the initial curve named by the `initial.*` keys.
    pub fn initial_curve(&self) -> Result<Curve, String> {
        let kind = self
            .raw("initial.kind")
            .ok_or("missing key initial.kind")?
            .to_string();
        let m: usize = self.get_or("initial.vertices", 256)?;
        let dim: usize = self.get_or("initial.dim", 2)?;
        let fail = |e: reference::ReferenceError| e.to_string();
        match kind.as_str() {
            "circle" => {
                let radius: f64 = self.get_or("initial.radius", 1.0)?;
                let cover: u32 = self.get_or("initial.cover", 1)?;
                reference::circle(dim, radius, cover, m).map_err(fail)
            }
            "ellipse" => {
                let a: f64 = self.get_or("initial.a", 2.0)?;
                let b: f64 = self.get_or("initial.b", 1.0)?;
                reference::ellipse(dim, a, b, m).map_err(fail)
            }
            "grim_reaper" => {
                let half_width: f64 =
                    self.get_or("initial.half_width", std::f64::consts::PI / 2.0 - 0.05)?;
                let offset: f64 = self.get_or("initial.offset", 0.0)?;
                reference::grim_reaper(half_width, offset, m).map_err(fail)
            }
            "abresch_langer" => {
                let tm: u32 = self.get_or("initial.m", 2)?;
                let tn: u32 = self.get_or("initial.n", 3)?;
                reference::abresch_langer(tm, tn, m).map_err(fail)
            }
            "figure_eight" => reference::figure_eight(m).map_err(fail),
            "harmonic" => {
                // (cos p, sin p, 0.2 sin 3p, 0, ...) in the requested
                // dimension.
                let amp: f64 = self.get_or("initial.amplitude", 0.2)?;
                let k: u32 = self.get_or("initial.harmonic", 3)?;
                reference::circle_with_modes(
                    dim.max(3),
                    m,
                    &[reference::Mode { coord: 2, k, cos_amp: 0.0, sin_amp: amp }],
                )
                .map_err(fail)
            }
            "perturbed_circle" => {
                reference::random_low_entropy_curve(dim, m, self.seed).map_err(fail)
            }
            "file" => {
                let rel = self.raw("initial.path").ok_or("initial.kind = file needs initial.path")?;
                let path = self.base_dir.join(rel);
                if !path.exists() {
                    return Err(format!("initial curve file not found: {}", path.display()));
                }
                csflow_core::io::read_curve(&path).map_err(|e| e.to_string())
            }
            other => Err(format!("unknown initial.kind {other:?}")),
        }
    }

    pub fn flow_config(&self, default_count: usize) -> Result<FlowConfig, String> {
        let config = FlowConfig {
            cfl_safety: self.get_or("flow.cfl_safety", 0.25)?,
            resample_count: self.get_or("flow.resample_count", default_count)?,
            resample_trigger: self.get_or("flow.resample_trigger", 1.05)?,
            stop_kappa_sq: self.parse("flow.stop_kappa_sq")?,
            stop_time: self.parse("flow.stop_time")?,
            snapshot_stride: self.get_or("flow.snapshot_stride", 50)?,
        };
        config.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }

    pub fn entropy_config(&self, curve: &Curve) -> Result<EntropySearchConfig, String> {
        let table = curve.arclength().map_err(|e| e.to_string())?;
        let defaults = EntropySearchConfig::for_curve(curve, &table);
        let x0_candidates = match self.raw("entropy.x0_candidates") {
            None => defaults.x0_candidates,
            Some("curve_vertices") => X0Candidates::CurveVertices,
            Some("centroid_plus_vertices") => X0Candidates::CentroidPlusVertices,
            Some(other) => return Err(format!("unknown entropy.x0_candidates {other:?}")),
        };
        let config = EntropySearchConfig {
            t0_min: self.get_or("entropy.t0_min", defaults.t0_min)?,
            t0_max: self.get_or("entropy.t0_max", defaults.t0_max)?,
            t0_grid: self.get_or("entropy.t0_grid", defaults.t0_grid)?,
            x0_candidates,
            refine_iters: self.get_or("entropy.refine_iters", defaults.refine_iters)?,
            refine_tol: self.get_or("entropy.refine_tol", defaults.refine_tol)?,
        };
        config.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }

    pub fn classify_thresholds(&self) -> Result<ClassifyThresholds, String> {
        let defaults = ClassifyThresholds::default();
        Ok(ClassifyThresholds {
            slope: self.get_or("singularity.slope_threshold", defaults.slope)?,
            growth: self.get_or("singularity.growth_threshold", defaults.growth)?,
            fit: self.get_or("singularity.fit_threshold", defaults.fit)?,
        })
    }

    pub fn rho(&self) -> Result<f64, String> {
        let rho: f64 = self.get_or("singularity.rho", 0.5)?;
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(format!("singularity.rho = {rho} must lie in (0, 1]"));
        }
        Ok(rho)
    }

    pub fn trajectory_dir(&self) -> Result<PathBuf, String> {
        let rel = self
            .raw("verify.trajectory_dir")
            .ok_or("missing key verify.trajectory_dir")?;
        let dir = self.base_dir.join(rel);
        if !dir.join("trajectory.json").exists() {
            return Err(format!("no trajectory.json under {}", dir.display()));
        }
        Ok(dir)
    }
}
