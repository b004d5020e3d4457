//! The five subcommands and the exit-code contract:
//! 0 clean, 1 configuration or file errors, 2 step failure,
//! 3 undetermined classification, 4 verification failure.

use crate::config::RunConfig;
use csflow_core::entropy;
use csflow_core::flow::{self, IdentityTolerances, TerminationReason, Trajectory};
use csflow_core::io::{self, Json};
use csflow_core::reference::{self, ReferenceLibrary};
use csflow_core::singularity::{self, SingularityType};
use std::fs;
use std::path::Path;

pub enum CliError {
    Config(String),
    StepFailure,
    Undetermined,
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::StepFailure => 2,
            CliError::Undetermined => 3,
            CliError::Verification(_) => 4,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Config(msg) => msg.clone(),
            CliError::StepFailure => "step failure: trajectory terminated early".into(),
            CliError::Undetermined => "classification undetermined (report written)".into(),
            CliError::Verification(msg) => msg.clone(),
        }
    }
}

fn config_err<E: ToString>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

const REPORT_FORMAT_ENTROPY: &str = "csflow-entropy v1";
const REPORT_FORMAT_SINGULARITY: &str = "csflow-singularity v1";
const REPORT_FORMAT_LIBRARY: &str = "csflow-library v1";
const REPORT_FORMAT_VERIFY: &str = "csflow-verify v1";

fn echo_json(config: &RunConfig) -> Json {
    let mut obj = Json::obj();
    for (k, v) in config.echo() {
        obj.push(&k, Json::Str(v));
    }
    obj
}

fn write_report(path: &Path, report: &Json) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(config_err)?;
    }
    fs::write(path, report.to_pretty_string()).map_err(config_err)?;
    Ok(())
}

fn run_flow(config: &RunConfig) -> Result<Trajectory, CliError> {
    let initial = config.initial_curve().map_err(CliError::Config)?;
    let flow_config = config.flow_config(initial.num_vertices()).map_err(CliError::Config)?;
    flow::evolve(&initial, &flow_config).map_err(config_err)
}

pub fn cmd_evolve(config: &RunConfig, out: &Path) -> Result<(), CliError> {
    let traj = run_flow(config)?;
    config.finish(&["initial", "flow"]).map_err(CliError::Config)?;
    io::write_trajectory(out, &traj, &config.echo()).map_err(config_err)?;
    if traj.termination == TerminationReason::StepFailure {
        return Err(CliError::StepFailure);
    }
    Ok(())
}

pub fn cmd_entropy(config: &RunConfig, out: &Path) -> Result<(), CliError> {
    let curve = config.initial_curve().map_err(CliError::Config)?;
    let search = config.entropy_config(&curve).map_err(CliError::Config)?;
    config.finish(&["initial", "entropy"]).map_err(CliError::Config)?;
    let table = curve.arclength().map_err(config_err)?;
    let result = entropy::entropy(&curve, &table, &search);

    let mut report = Json::obj();
    report.push("format_version", Json::Str(REPORT_FORMAT_ENTROPY.into()));
    report.push("config", echo_json(config));
    report.push("lambda", Json::Num(result.lambda));
    report.push("x0", Json::from(result.maximizer.x0.as_slice()));
    report.push("t0", Json::Num(result.maximizer.t0));
    report.push("evaluations", Json::Int(result.evaluations as i64));
    report.push("converged", Json::Bool(result.converged));
    let mut grid = Json::obj();
    grid.push("t0_min", Json::Num(search.t0_min));
    grid.push("t0_max", Json::Num(search.t0_max));
    grid.push("t0_grid", Json::Int(search.t0_grid as i64));
    grid.push(
        "x0_candidates",
        Json::Str(
            match search.x0_candidates {
                entropy::X0Candidates::CurveVertices => "curve_vertices",
                entropy::X0Candidates::CentroidPlusVertices => "centroid_plus_vertices",
            }
            .into(),
        ),
    );
    grid.push("refine_iters", Json::Int(search.refine_iters as i64));
    grid.push("refine_tol", Json::Num(search.refine_tol));
    report.push("grid", grid);
    write_report(&out.join("entropy.json"), &report)?;

    println!("{:.11e}", result.lambda);
    Ok(())
}

pub fn cmd_blowup(config: &RunConfig, out: &Path) -> Result<(), CliError> {
    let traj = run_flow(config)?;
    let thresholds = config.classify_thresholds().map_err(CliError::Config)?;
    let rho = config.rho().map_err(CliError::Config)?;
    config.finish(&["initial", "flow", "singularity"]).map_err(CliError::Config)?;
    if traj.termination != TerminationReason::CurvatureBlowup {
        return Err(CliError::Config(format!(
            "blow-up analysis needs a curvature_blowup trajectory, got {}",
            traj.termination.as_str()
        )));
    }
    io::write_trajectory(out, &traj, &config.echo()).map_err(config_err)?;

    let library = ReferenceLibrary::default_library().map_err(config_err)?;
    let report = singularity::analyze(&traj, &library, &thresholds, rho).map_err(config_err)?;

    let rescaled_dir = out.join("rescaled");
    fs::create_dir_all(&rescaled_dir).map_err(config_err)?;
    let mut snapshot_rows = Vec::new();
    for (j, snap) in report.snapshots.iter().enumerate() {
        let file = format!("rescaled/rescaled_{j}.csv");
        io::write_curve(&out.join(&file), &snap.curve).map_err(config_err)?;
        let mut row = Json::obj();
        row.push("file", Json::Str(file));
        row.push("source_time", Json::Num(snap.source_time));
        row.push("frame_anchored", Json::Bool(snap.frame_anchored));
        snapshot_rows.push(row);
    }
    // The tail of the continuous rescaling, which carries the limit shape.
    let tail = report.continuous.len().saturating_sub(10);
    let mut continuous_rows = Vec::new();
    for (j, snap) in report.continuous.iter().enumerate().skip(tail) {
        let file = format!("rescaled/continuous_{j}.csv");
        io::write_curve(&out.join(&file), &snap.curve).map_err(config_err)?;
        let mut row = Json::obj();
        row.push("file", Json::Str(file));
        row.push("source_time", Json::Num(snap.source_time));
        row.push("rescaled_time", Json::Num(snap.rescaled_time.unwrap_or(f64::NAN)));
        continuous_rows.push(row);
    }

    let c = &report.classification;
    let mut body = Json::obj();
    body.push("format_version", Json::Str(REPORT_FORMAT_SINGULARITY.into()));
    body.push("config", echo_json(config));
    body.push("type", Json::Str(c.kind.as_str().into()));
    body.push("omega_hat", Json::Num(c.omega_hat));
    body.push("fit_quality", Json::Num(c.fit_quality));
    body.push("limsup_estimate", Json::Num(c.limsup_estimate));
    body.push("rel_slope", Json::Num(c.rel_slope));
    body.push("growth", Json::Num(c.growth));
    let mut thr = Json::obj();
    thr.push("slope", Json::Num(report.thresholds.slope));
    thr.push("growth", Json::Num(report.thresholds.growth));
    thr.push("fit", Json::Num(report.thresholds.fit));
    body.push("thresholds", thr);
    let mut seq = Json::obj();
    seq.push("requested_rho", Json::Num(report.sequence.requested_rho));
    seq.push("measured_rho", Json::Num(report.sequence.measured_rho));
    seq.push("essential", Json::Bool(report.sequence.essential));
    let points: Vec<Json> = report
        .sequence
        .points
        .iter()
        .map(|p| {
            let mut row = Json::obj();
            row.push("snapshot_index", Json::Int(p.snapshot_index as i64));
            row.push("t", Json::Num(p.t));
            row.push("fraction", Json::Num(p.fraction));
            row.push("lambda", Json::Num(p.lambda));
            row
        })
        .collect();
    seq.push("points", Json::Arr(points));
    body.push("blowup_sequence", seq);
    body.push("snapshots", Json::Arr(snapshot_rows));
    body.push("continuous", Json::Arr(continuous_rows));
    let planarity: Vec<Json> = report
        .planarity_series
        .iter()
        .map(|s| {
            let mut row = Json::obj();
            row.push("t", Json::Num(s.t));
            row.push("pca_residual", Json::Num(s.pca_residual));
            row.push("sup_tau1", Json::Num(s.sup_tau1));
            row
        })
        .collect();
    body.push("planarity_series", Json::Arr(planarity));
    let mut profile = Json::obj();
    profile.push("family", Json::Str(report.profile.family.label()));
    profile.push("residual", Json::Num(report.profile.residual));
    profile.push("winding", Json::Int(report.profile.winding));
    body.push("profile", profile);
    write_report(&out.join("singularity.json"), &body)?;

    if c.kind == SingularityType::Undetermined {
        return Err(CliError::Undetermined);
    }
    Ok(())
}

pub fn cmd_reference(config: &RunConfig, out: &Path) -> Result<(), CliError> {
    config.finish(&[]).map_err(CliError::Config)?;
    let library = ReferenceLibrary::default_library().map_err(config_err)?;
    let validation = reference::validate(&library);

    fs::create_dir_all(out).map_err(config_err)?;
    let mut members = Vec::new();
    for (i, (profile, report)) in
        library.profiles.iter().zip(&validation.members).enumerate()
    {
        let file = format!("profile_{i}.csv");
        io::write_curve(&out.join(&file), &profile.curve).map_err(config_err)?;
        let mut row = Json::obj();
        row.push("family", Json::Str(profile.family.label()));
        if let singularity::ProfileFamily::AbreschLanger(m, n) = profile.family {
            row.push("m", Json::Int(m as i64));
            row.push("n", Json::Int(n as i64));
        }
        row.push("winding", Json::Int(profile.winding));
        if let Some(res) = profile.shrinker_residual {
            row.push("residual", Json::Num(res));
        }
        row.push("file", Json::Str(file));
        row.push("pass", Json::Bool(report.pass));
        members.push(row);
    }
    let mut body = Json::obj();
    body.push("format_version", Json::Str(REPORT_FORMAT_LIBRARY.into()));
    body.push("config", echo_json(config));
    body.push("members", Json::Arr(members));
    body.push("all_pass", Json::Bool(validation.all_pass()));
    write_report(&out.join("library.json"), &body)?;

    if validation.all_pass() {
        Ok(())
    } else {
        Err(CliError::Verification("library validation failed".into()))
    }
}

pub fn cmd_verify(config: &RunConfig, out: &Path) -> Result<(), CliError> {
    let dir = config.trajectory_dir().map_err(CliError::Config)?;
    config.finish(&["verify"]).map_err(CliError::Config)?;
    let traj = io::load_trajectory(&dir).map_err(config_err)?;
    let identities = flow::verify_identities(&traj, &IdentityTolerances::default())
        .map_err(config_err)?;

    let mut rows = Vec::new();
    for check in &identities.checks {
        let mut row = Json::obj();
        row.push("name", Json::Str(check.name.into()));
        row.push("pass", Json::Bool(check.pass));
        row.push("max_residual", Json::Num(check.max_residual));
        row.push("tolerance", Json::Num(check.tolerance));
        rows.push(row);
    }

    // The derivative estimates, when the trajectory covers the window.
    let bernstein = flow::verify_bernstein(&traj);
    let mut bernstein_pass = true;
    let mut brow = Json::obj();
    match &bernstein {
        Ok(report) => {
            bernstein_pass = report.all_pass();
            brow.push("name", Json::Str("bernstein_bounds".into()));
            brow.push("pass", Json::Bool(bernstein_pass));
            brow.push("checked", Json::Int(report.checks.len() as i64));
            brow.push("worst_margin", Json::Num(report.worst_margin()));
        }
        Err(_) => {
            brow.push("name", Json::Str("bernstein_bounds".into()));
            brow.push("pass", Json::Bool(true));
            brow.push("checked", Json::Int(0));
        }
    }
    rows.push(brow);

    let all_pass = identities.all_pass() && bernstein_pass;
    let mut body = Json::obj();
    body.push("format_version", Json::Str(REPORT_FORMAT_VERIFY.into()));
    body.push("config", echo_json(config));
    body.push("checks", Json::Arr(rows));
    body.push("all_pass", Json::Bool(all_pass));
    write_report(&out.join("verify.json"), &body)?;

    if all_pass {
        Ok(())
    } else {
        let failing = identities
            .first_failure()
            .map(|c| c.name.to_string())
            .unwrap_or_else(|| "bernstein_bounds".into());
        Err(CliError::Verification(format!("identity check failed: {failing}")))
    }
}
