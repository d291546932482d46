//! One pipeline per experiment kind. Each returns its artifacts, a verdict
//! and a short summary for the manifest.

use std::path::Path;
use std::time::Instant;

use degenflow_core::classifier::classify_over_times;
use degenflow_core::problem::validate_conditions;
use degenflow_core::solver::{solve, sup_norm_monitor, uniform_times, viscosity_sweep};
use degenflow_core::verify::{
    comparison_functional, crocco_inverse, crocco_transform, entropy_check, jump_degeneracy_scan, k_sweep,
    l1_contraction_report, SpatialTest, TestFunction, TimeBump,
};
use degenflow_core::{CoefficientSet, Field, Grid, SolverConfig, Trajectory};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{CroccoProfileKind, ExperimentConfig, ExperimentKind, InitialCondition};
use crate::emit::{emit_report, format_g17, format_opt, Artifact, CsvTable};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    /// Every verdict of the run held.
    pub pass: bool,
    pub summary: Value,
}

/// What `execute` wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub pass: bool,
    pub files: Vec<String>,
    pub summary: Value,
}

struct Setup {
    grid: Grid,
    coeffs: CoefficientSet,
}

impl Setup {
    /// Grid and coefficients; an absent `u_range` is set from the initial
    /// data (and zero, the boundary value).
    fn new(cfg: &ExperimentConfig, data: &[&InitialCondition]) -> Result<Self, CliError> {
        let domain = cfg.domain()?.clone();
        let grid = Grid::new(domain.clone(), cfg.counts()?)?;
        let mut coeffs = CoefficientSet::new(domain, cfg.coefficients.clone())?;
        if cfg.coefficients.u_range.is_none() && !data.is_empty() {
            let (mut lo, mut hi) = (0.0f64, 0.0f64);
            for d in data {
                let (l, h) = field(&grid, d).range(&grid);
                lo = lo.min(l);
                hi = hi.max(h);
            }
            coeffs.set_u_range(lo, hi)?;
        }
        Ok(Self { grid, coeffs })
    }
}

fn field(grid: &Grid, ic: &InitialCondition) -> Field {
    Field::from_fn(grid, 0.0, |x| ic.eval(grid.domain(), x))
}

fn run_solver(setup: &Setup, u0: &Field, config: &SolverConfig, snapshots: usize) -> Result<Trajectory, CliError> {
    Ok(solve(u0, &setup.grid, &setup.coeffs, config, &uniform_times(config.final_time, snapshots))?)
}

fn coordinate_header(dim: usize) -> Vec<String> {
    (0..dim).map(|i| format!("x{i}")).collect()
}

fn test_window(cfg: &ExperimentConfig, final_time: f64) -> Result<TimeBump, CliError> {
    let [lo, hi] = cfg.verification.window;
    Ok(TimeBump::within(final_time, lo, hi)?)
}

fn solve_experiment(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let ic = cfg.initial()?;
    let setup = Setup::new(cfg, &[ic])?;
    let grid = &setup.grid;
    let traj = run_solver(&setup, &field(grid, ic), cfg.solver()?, cfg.snapshots)?;
    let monitor = sup_norm_monitor(&traj, &setup.coeffs);
    let pass = monitor.exponential_ok && monitor.strict_ok.unwrap_or(true);
    let times = traj.times();

    let mut diagnostics = CsvTable::new(["t", "sup_norm", "total_variation", "energy"]);
    let d = &traj.diagnostics;
    for (i, t) in times.iter().enumerate() {
        diagnostics.push_numbers(&[*t, d.sup_norm[i], d.total_variation[i], d.energy[i]]);
    }
    let mut header = vec!["t".to_owned()];
    header.extend(coordinate_header(grid.dim()));
    header.push("value".into());
    let mut snapshots = CsvTable::new(header);
    for snap in &traj.snapshots {
        for j in grid.active() {
            let mut row = vec![snap.t];
            row.extend_from_slice(grid.point(j));
            row.push(snap.values[j]);
            snapshots.push_numbers(&row);
        }
    }
    let report = json!({
        "dt": traj.dt,
        "steps": traj.steps,
        "times": times,
        "diagnostics": traj.diagnostics,
        "sup_norm": monitor,
        "pass": pass,
    });
    Ok(Outcome {
        summary: json!({"dt": traj.dt, "steps": traj.steps, "final_sup_norm": traj.last().sup_norm(grid)}),
        artifacts: vec![
            Artifact::json("solve_report.json", &report),
            Artifact::csv("diagnostics.csv", diagnostics),
            Artifact::csv("snapshots.csv", snapshots),
        ],
        pass,
    })
}

fn classify_experiment(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let data: Vec<&InitialCondition> = cfg.initial.iter().collect();
    let setup = Setup::new(cfg, &data)?;
    let grid = &setup.grid;
    let v = &cfg.verification;
    let sweep = classify_over_times(grid, &setup.coeffs, &v.classify_times, &v.classifier)?;
    let mut tolerances = v.conditions.clone();
    if let Some(s) = &cfg.solver {
        tolerances.final_time = s.final_time;
    }
    let conditions = validate_conditions(&setup.coeffs, grid, &tolerances)?;

    let mut header = vec!["t".to_owned(), "node".to_owned()];
    header.extend(coordinate_header(grid.dim()));
    header.extend(
        ["member", "classifiable", "convection", "diffusion_gradient", "diffusion_positive", "fichera_member"]
            .map(String::from),
    );
    let mut table = CsvTable::new(header);
    for snap in &sweep.snapshots {
        for r in &snap.nodes {
            let faces: Vec<_> = r.membership.iter().chain(&r.per_face).collect();
            let fired = |t| faces.iter().any(|m| m.has(t)) as u8;
            let mut row = vec![format_g17(snap.t), r.node.to_string()];
            row.extend(r.point.iter().map(|&x| format_g17(x)));
            row.extend([
                (r.needs_dirichlet() as u8).to_string(),
                (r.classifiable() as u8).to_string(),
                fired(degenflow_core::classifier::Trigger::Convection).to_string(),
                fired(degenflow_core::classifier::Trigger::DiffusionGradient).to_string(),
                fired(degenflow_core::classifier::Trigger::DiffusionPositive).to_string(),
                r.fichera.map(|f| (f.member as u8).to_string()).unwrap_or_default(),
            ]);
            table.push(row);
        }
    }
    let members = sweep.union.len();
    let report = json!({
        "members": members,
        "union": sweep.union,
        "varied": sweep.varied,
        "snapshots": sweep.snapshots,
    });
    Ok(Outcome {
        summary: json!({"members": members, "varied": sweep.varied, "boundary_nodes": grid.boundary().len()}),
        artifacts: vec![
            Artifact::json("sigma_p.json", &report),
            Artifact::csv("sigma_p.csv", table),
            Artifact::json("conditions.json", &conditions),
        ],
        // classification carries no verdict; the conditions are diagnostics
        pass: true,
    })
}

fn entropy_experiment(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let ic = cfg.initial()?;
    let setup = Setup::new(cfg, &[ic])?;
    let grid = &setup.grid;
    let traj = run_solver(&setup, &field(grid, ic), cfg.solver()?, cfg.snapshots)?;
    let v = &cfg.verification;
    let window = test_window(cfg, traj.config.final_time)?;
    let domain = grid.domain();
    let mut tests: Vec<TestFunction> = match &v.bumps {
        Some(bumps) => bumps
            .iter()
            .map(|b| TestFunction::new(window, SpatialTest::Bump { center: b.center.clone(), radius: b.radius }))
            .collect(),
        None => {
            let (lo, hi) = domain.bounding_box();
            let center = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
            vec![TestFunction::new(window, SpatialTest::Bump { center, radius: 0.8 * domain.inradius() })]
        }
    };
    tests.extend(v.lambdas.iter().map(|&lambda| TestFunction::new(window, SpatialTest::BoundaryWeight { lambda })));
    let ks = v.k_values.clone().unwrap_or_else(|| k_sweep(&traj, v.k_count));
    let report = entropy_check(&traj, &setup.coeffs, &ks, &v.etas, &tests)?;

    let mut residuals = CsvTable::new(["k", "eta", "lambda", "residual"]);
    for e in &report.entries {
        residuals.push(vec![format_g17(e.k), format_opt(e.eta), format_opt(e.lambda), format_g17(e.residual)]);
    }
    let mut artifacts = vec![Artifact::json("entropy_report.json", &report), Artifact::csv("residuals.csv", residuals)];
    let mut summary = json!({
        "min_residual": report.min_residual,
        "min_margin": report.min_margin,
        "min_regularized": report.min_regularized,
        "regularized_pass": report.regularized_pass,
        "h": report.h,
    });
    if let Some(threshold) = v.jump_threshold {
        let flags = jump_degeneracy_scan(grid, traj.last(), &setup.coeffs, threshold);
        let mut header = vec!["lower".to_owned(), "upper".to_owned(), "axis".to_owned()];
        header.extend(coordinate_header(grid.dim()));
        header.extend(["jump", "max_a"].map(String::from));
        let mut table = CsvTable::new(header);
        for f in &flags {
            let mut row = vec![f.lower.to_string(), f.upper.to_string(), f.axis.to_string()];
            row.extend(f.midpoint.iter().map(|&x| format_g17(x)));
            row.extend([format_g17(f.jump), format_g17(f.max_a)]);
            table.push(row);
        }
        summary["jump_flags"] = json!(flags.len());
        artifacts.push(Artifact::csv("jump_scan.csv", table));
    }
    Ok(Outcome { pass: report.pass, summary, artifacts })
}

/// Both trajectories on one step: the smaller of the two automatic steps
/// unless the config fixes it.
fn solve_pair(
    setup: &Setup,
    cfg: &ExperimentConfig,
    u0: &Field,
    v0: &Field,
) -> Result<(Trajectory, Trajectory), CliError> {
    let config = cfg.solver()?;
    let u = run_solver(setup, u0, config, cfg.snapshots)?;
    let v = run_solver(setup, v0, config, cfg.snapshots)?;
    if config.dt.is_some() || u.dt == v.dt {
        return Ok((u, v));
    }
    let common = config.clone().with_dt(u.dt.min(v.dt));
    if u.dt < v.dt {
        Ok((u, run_solver(setup, v0, &common, cfg.snapshots)?))
    } else {
        Ok((run_solver(setup, u0, &common, cfg.snapshots)?, v))
    }
}

fn stability_experiment(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let (a, b) = (cfg.initial()?, cfg.initial_v()?);
    let setup = Setup::new(cfg, &[a, b])?;
    let grid = &setup.grid;
    let (u, v) = solve_pair(&setup, cfg, &field(grid, a), &field(grid, b))?;
    let verification = &cfg.verification;
    let l1 = l1_contraction_report(&u, &v, verification.c_declared)?;
    let mut tolerances = verification.conditions.clone();
    tolerances.final_time = u.config.final_time;
    let conditions = validate_conditions(&setup.coeffs, grid, &tolerances)?;

    let mut series = CsvTable::new(["t", "l1_distance"]);
    for (t, d) in l1.times.iter().zip(&l1.distances) {
        series.push_numbers(&[*t, *d]);
    }
    let mut artifacts = Vec::new();
    let mut comparison = Vec::new();
    if !verification.lambdas.is_empty() {
        let window = test_window(cfg, u.config.final_time)?;
        let mut decay = CsvTable::new([
            "lambda",
            "time",
            "diffusion_flat",
            "diffusion_curvature",
            "gradient_from_v",
            "gradient_from_u",
            "convection",
            "divergence",
            "reaction",
            "total",
        ]);
        for &lambda in &verification.lambdas {
            let t = comparison_functional(&u, &v, &setup.coeffs, lambda, window)?;
            decay.push_numbers(&[
                lambda,
                t.time,
                t.diffusion_flat,
                t.diffusion_curvature,
                t.gradient_from_v,
                t.gradient_from_u,
                t.convection,
                t.divergence,
                t.reaction,
                t.total(),
            ]);
            comparison.push(json!({"lambda": lambda, "terms": t, "boundary_magnitudes": t.boundary_magnitudes()}));
        }
        artifacts.push(Artifact::csv("lambda_decay.csv", decay));
    }
    #[derive(Serialize)]
    struct Report<'a> {
        l1: &'a degenflow_core::verify::StabilityReport,
        conditions: &'a [degenflow_core::ConditionReport],
        comparison: &'a [Value],
        dt: f64,
        pass: bool,
    }
    let report = Report { l1: &l1, conditions: &conditions, comparison: &comparison, dt: u.dt, pass: l1.pass };
    artifacts.insert(0, Artifact::json("stability_report.json", &report));
    artifacts.insert(1, Artifact::csv("l1_series.csv", series));
    Ok(Outcome {
        summary: json!({
            "c_fit": l1.c_fit,
            "final_ratio": l1.final_ratio,
            "nonincreasing": l1.nonincreasing,
            "conditions_pass": conditions.iter().all(|c| c.pass),
        }),
        pass: l1.pass,
        artifacts,
    })
}

fn sweep_experiment(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let ic = cfg.initial()?;
    let setup = Setup::new(cfg, &[ic])?;
    let grid = &setup.grid;
    let report = viscosity_sweep(&field(grid, ic), grid, &setup.coeffs, cfg.solver()?, &cfg.epsilons, cfg.snapshots)?;
    let mut series = CsvTable::new(["epsilon", "t", "sup_norm", "total_variation"]);
    for e in &report.entries {
        for (i, t) in report.times.iter().enumerate() {
            series.push_numbers(&[e.epsilon, *t, e.sup_norm[i], e.total_variation[i]]);
        }
    }
    let mut energy = CsvTable::new(["epsilon", "dt", "steps", "energy", "energy_accumulated"]);
    for e in &report.entries {
        energy.push(vec![
            format_g17(e.epsilon),
            format_g17(e.dt),
            e.steps.to_string(),
            format_g17(e.energy),
            format_g17(e.energy_accumulated),
        ]);
    }
    Ok(Outcome {
        summary: json!({
            "energies": report.entries.iter().map(|e| e.energy).collect::<Vec<_>>(),
            "pairwise_l1": report.pairwise_l1,
        }),
        pass: report.cauchy_nonincreasing,
        artifacts: vec![
            Artifact::json("sweep_report.json", &report),
            Artifact::csv("sweep_series.csv", series),
            Artifact::csv("sweep_energy.csv", energy),
        ],
    })
}

fn sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn crocco_experiment(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let c = &cfg.crocco;
    type Curve = fn(f64) -> f64;
    let (profile, law): (Curve, Curve) = match c.profile {
        CroccoProfileKind::Tanh => (f64::tanh, |e| 1.0 - e * e),
        CroccoProfileKind::Exponential => (|y| -(-y).exp_m1(), |e| 1.0 - e),
    };
    let y: Vec<f64> = (0..c.points).map(|i| c.length * i as f64 / (c.points - 1) as f64).collect();
    let u: Vec<f64> = y.iter().map(|&y| profile(y)).collect();
    let transformed = crocco_transform(&y, &u, c.samples)?;
    let rebuilt = crocco_inverse(&transformed)?;
    let exact: Vec<f64> = transformed.eta.iter().map(|&e| law(e)).collect();
    let law_error = sup(&transformed.w, &exact);
    let round_trip_error = sup(&rebuilt, &u);
    let pass = law_error <= c.tolerance && round_trip_error <= c.tolerance;

    let mut w_table = CsvTable::new(["eta", "w", "w_exact"]);
    for ((e, w), x) in transformed.eta.iter().zip(&transformed.w).zip(&exact) {
        w_table.push_numbers(&[*e, *w, *x]);
    }
    let mut profile_table = CsvTable::new(["y", "u", "u_rebuilt"]);
    for ((y, u), r) in y.iter().zip(&u).zip(&rebuilt) {
        profile_table.push_numbers(&[*y, *u, *r]);
    }
    let report = json!({
        "profile": c.profile,
        "points": c.points,
        "samples": c.samples,
        "law_error": law_error,
        "round_trip_error": round_trip_error,
        "tolerance": c.tolerance,
        "pass": pass,
    });
    Ok(Outcome {
        summary: json!({"law_error": law_error, "round_trip_error": round_trip_error}),
        pass,
        artifacts: vec![
            Artifact::json("crocco_report.json", &report),
            Artifact::csv("crocco_law.csv", w_table),
            Artifact::csv("crocco_profile.csv", profile_table),
        ],
    })
}

/// Runs the pipeline of `cfg.kind` on a validated config.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    match cfg.kind()? {
        ExperimentKind::Solve => solve_experiment(cfg),
        ExperimentKind::Classify => classify_experiment(cfg),
        ExperimentKind::EntropyCheck => entropy_experiment(cfg),
        ExperimentKind::StabilityPair => stability_experiment(cfg),
        ExperimentKind::ViscositySweep => sweep_experiment(cfg),
        ExperimentKind::CroccoDemo => crocco_experiment(cfg),
    }
}

/// Content hash of the effective config, stable across reruns.
pub fn run_id(cfg: &ExperimentConfig) -> String {
    let digest = Sha256::digest(serde_json::to_vec(cfg).expect("config serializes"));
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Runs `cfg` and writes its reports and manifest into `out_dir`.
pub fn execute(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunRecord, CliError> {
    let start = Instant::now();
    let outcome = run_experiment(cfg)?;
    let elapsed = start.elapsed().as_secs_f64();
    let manifest = json!({
        "tool": "degenflow",
        "version": env!("CARGO_PKG_VERSION"),
        "core_version": degenflow_core::VERSION,
        "kind": cfg.kind()?.name(),
        "run_id": run_id(cfg),
        "seed": cfg.seed,
        "pass": outcome.pass,
        "summary": outcome.summary,
        "timings": {"run_seconds": elapsed},
        "config": cfg,
    });
    let files = emit_report(out_dir, &outcome.artifacts, manifest)?;
    Ok(RunRecord { pass: outcome.pass, files, summary: outcome.summary })
}
