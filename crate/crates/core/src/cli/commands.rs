use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{
    preset, read_config, ClassifyArgs, Command, FitRateArgs, GnCheckArgs, GroundStateArgs, ModelChoice,
    ProfileChoice, RescaleCheckArgs, RunConfig, SelfsimilarArgs, SimulateArgs,
};
use crate::analysis::{
    check_lower_bound, classify_initial_data, fit_rate, sobolev_ratio_monitor, Classification, FitModel,
    FitOptions, MassContext, NormKind, DEFAULT_EXPONENT_TOLERANCE,
};
use crate::dynamics::{run_with_options, Diagnostics, RunOptions, StopReason};
use crate::error::{MzkError, Result};
use crate::fields::{random_band_limited, read_checkpoint, write_checkpoint, Grid2D, SystemState, CHECKPOINT_MAGIC};
use crate::groundstate::{gn_check, reference_q, reference_q_mass, solve_q, GroundStateSummary};
use crate::output::{read_csv_file, to_json_string, write_csv_file, write_json_file};
use crate::rescale::{identity_rows, IdentityRow};
use crate::selfsimilar::{scaling_check, seeded_profile, solve_profile, ExplicitSolution, ScalingRow};

pub(super) fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::GroundState(a) => ground_state(a),
        Command::Simulate(a) => simulate(a),
        Command::Selfsimilar(a) => selfsimilar(a),
        Command::RescaleCheck(a) => rescale_check(a),
        Command::FitRate(a) => fit(a),
        Command::GnCheck(a) => gn(a),
        Command::Classify(a) => classify(a),
    }
}

fn emit<T: Serialize>(value: &T, output: Option<&Path>) -> Result<()> {
    let text = to_json_string(value)?;
    // A closed pipe (e.g. `| head`) is not an error for the run itself.
    if let Err(e) = writeln!(std::io::stdout().lock(), "{text}") {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            return Err(e.into());
        }
    }
    if let Some(p) = output {
        write_json_file(p, value)?;
    }
    Ok(())
}

fn ground_state(a: GroundStateArgs) -> Result<()> {
    let q = solve_q(a.rmax, a.points, a.tol)?;
    fs::create_dir_all(&a.output_dir)?;
    write_csv_file(
        &a.output_dir.join("ground_state.csv"),
        &["r", "Q", "dQ"],
        q.r.iter().zip(&q.values).zip(&q.slopes).map(|((r, v), s)| vec![*r, *v, *s]),
    )?;
    let summary = GroundStateSummary::of(&q);
    emit(&summary, Some(&a.output_dir.join("ground_state.json")))
}

/// What `simulate` records about one run besides the diagnostics table.
#[derive(Clone, Debug, Serialize)]
pub struct SimulationSummary {
    pub stop_reason: StopReason,
    pub steps: usize,
    pub t_final: f64,
    pub initial_lambda: f64,
    pub max_lambda: f64,
    pub max_mass_drift: f64,
    pub max_density_drift: f64,
    pub max_im_product_drift: f64,
    pub checkpoints: usize,
    pub classification: Classification,
    pub sobolev_ratio_final_quarter: Option<(f64, f64)>,
    /// Empirical consistency check, not a proof.
    pub note: String,
}

/// Run one configuration and write its artifacts into `out`.
pub fn simulate_config(cfg: &RunConfig, out: &Path) -> Result<SimulationSummary> {
    fs::create_dir_all(out)?;
    let initial = cfg.initial_state()?;
    let classification = classify_initial_data(&initial, cfg.eta, reference_q_mass(), cfg.radial)?;
    let options = RunOptions {
        checkpoint_interval: cfg.checkpoint_interval,
        keep_step_reports: true,
    };
    let traj = run_with_options(&initial, &cfg.stepper(), cfg.horizon, &options)?;
    write_csv_file(
        &out.join("diagnostics.csv"),
        &Diagnostics::CSV_HEADER,
        traj.diagnostics.iter().map(|d| d.as_row().to_vec()),
    )?;
    let mut outputs = vec!["diagnostics.csv".to_string(), "summary.json".to_string()];
    if !traj.checkpoints.is_empty() {
        let dir = out.join("checkpoints");
        fs::create_dir_all(&dir)?;
        for (i, st) in traj.checkpoints.iter().enumerate() {
            let name = format!("ckpt_{i:05}.mzkv1");
            write_checkpoint(BufWriter::new(File::create(dir.join(&name))?), st)?;
            outputs.push(format!("checkpoints/{name}"));
        }
    }
    let mass0 = traj.diagnostics[0].mass;
    let fold = |f: &dyn Fn(&crate::dynamics::StepReport) -> f64| traj.step_reports.iter().map(f).fold(0.0, f64::max);
    let summary = SimulationSummary {
        stop_reason: traj.stop_reason,
        steps: traj.diagnostics.len() - 1,
        t_final: traj.final_state.t,
        initial_lambda: traj.initial_lambda(),
        max_lambda: traj.max_lambda(),
        max_mass_drift: traj
            .diagnostics
            .iter()
            .map(|d| if mass0 > 0.0 { (d.mass - mass0).abs() / mass0 } else { 0.0 })
            .fold(0.0, f64::max),
        max_density_drift: fold(&|r| r.density_drift),
        max_im_product_drift: fold(&|r| r.im_product_drift),
        checkpoints: traj.checkpoints.len(),
        classification,
        sobolev_ratio_final_quarter: sobolev_ratio_monitor(&traj.diagnostics).final_quarter,
        note: "lambda growth and stop reason are empirical observations of one discretisation".into(),
    };
    write_json_file(&out.join("summary.json"), &summary)?;
    let manifest = json!({
        "tool": "mzk",
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "checkpoint_format": String::from_utf8_lossy(CHECKPOINT_MAGIC),
        "diagnostics_columns": Diagnostics::CSV_HEADER,
        "outputs": outputs,
    });
    write_json_file(&out.join("manifest.json"), &manifest)?;
    Ok(summary)
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let mut runs: Vec<(String, RunConfig)> = Vec::new();
    for path in &a.configs {
        runs.push((path.display().to_string(), read_config(path)?));
    }
    for name in &a.presets {
        let text = preset(name).ok_or_else(|| MzkError::Contract(format!("unknown preset '{name}'")))?;
        runs.push((format!("preset {name}"), super::parse_config(text)?));
    }
    if runs.is_empty() {
        return Err(MzkError::Contract("simulate needs at least one config file or --preset".into()));
    }
    let single = runs.len() == 1;
    let targets: Vec<PathBuf> = runs
        .iter()
        .map(|(_, cfg)| match &a.output_dir {
            Some(d) if single => d.clone(),
            Some(d) => d.join(cfg.output_dir.file_name().unwrap_or(cfg.output_dir.as_os_str())),
            None => cfg.output_dir.clone(),
        })
        .collect();
    for (i, t) in targets.iter().enumerate() {
        if targets[..i].contains(t) {
            return Err(MzkError::Contract(format!("two runs write to {}", t.display())));
        }
    }
    let results: Vec<Result<SimulationSummary>> = runs
        .par_iter()
        .zip(targets.par_iter())
        .map(|((_, cfg), out)| simulate_config(cfg, out))
        .collect();
    let mut report = Vec::new();
    for ((name, _), (out, r)) in runs.iter().zip(targets.iter().zip(results)) {
        let s = r.map_err(|e| MzkError::Contract(format!("{name}: {e}")))?;
        report.push(json!({ "run": name, "output_dir": out, "summary": s }));
    }
    emit(&report, None)
}

fn parse_grid(text: &str) -> Result<(usize, usize)> {
    let bad = || MzkError::Contract(format!("--grid expects N or NXxNY, got '{text}'"));
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    match text.split_once(['x', 'X']) {
        Some((a, b)) => Ok((parse(a)?, parse(b)?)),
        None => {
            let n = parse(text)?;
            Ok((n, n))
        }
    }
}

fn selfsimilar(a: SelfsimilarArgs) -> Result<()> {
    let (nx, ny) = parse_grid(&a.grid)?;
    let q = reference_q();
    let profile = match a.profile {
        ProfileChoice::Limit => seeded_profile(q, a.omega, a.eta)?,
        ProfileChoice::Solve => solve_profile(a.omega, a.eta, q, 1e-8)?,
    };
    let sol = ExplicitSolution::new(profile, a.t_blow, a.theta)?;
    let t_min = a.times.iter().copied().fold(f64::INFINITY, f64::min);
    let side = a.side.unwrap_or(24.0 * (a.t_blow - t_min) / a.omega);
    let grid = Grid2D::new(nx, ny, side)?;
    let report = scaling_check(&sol, &a.times, grid)?;
    fs::create_dir_all(&a.output_dir)?;
    write_csv_file(
        &a.output_dir.join("scaling.csv"),
        &ScalingRow::CSV_HEADER,
        report.rows.iter().map(|r| r.csv_values().to_vec()),
    )?;
    let series: Vec<(f64, f64)> = report.rows.iter().map(|r| (r.t, r.tau_n / (a.t_blow - r.t))).collect();
    let opts = FitOptions {
        tail_fraction: 1.0,
        ..FitOptions::default()
    };
    let fit = fit_rate(&series, FitModel::FreeExponent, &opts);
    let verdict = check_lower_bound(&fit, NormKind::NNorm, None, DEFAULT_EXPONENT_TOLERANCE);
    let body = json!({
        "omega": a.omega,
        "eta": a.eta,
        "T": a.t_blow,
        "theta": a.theta,
        "grid": [nx, ny],
        "L": side,
        "spreads": {
            "tau_grad_e1": report.spreads[0],
            "tau_grad_e2": report.spreads[1],
            "tau_n": report.spreads[2],
            "tau_v": report.spreads[3],
            "mass": report.mass_spread,
            "tau_lambda": report.lambda_spread,
            "tau2_hamiltonian": report.hamiltonian_spread,
            "sobolev_ratio": report.sobolev_ratio_spread,
        },
        "grad_ratio_defect": report.grad_ratio_defect,
        "n_norm_fit": fit.as_ref().ok(),
        "verdict": verdict,
        "warnings": report.warnings,
    });
    emit(&body, Some(&a.output_dir.join("selfsimilar.json")))
}

/// All MZKV1 files in `dir`, ordered by file name.
pub(crate) fn load_checkpoints(dir: &Path) -> Result<Vec<SystemState>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "mzkv1"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(MzkError::Contract(format!("no .mzkv1 checkpoints in {}", dir.display())));
    }
    paths
        .iter()
        .map(|p| read_checkpoint(BufReader::new(File::open(p)?)))
        .collect()
}

fn rescale_check(a: RescaleCheckArgs) -> Result<()> {
    let states = load_checkpoints(&a.dir)?;
    let rows = identity_rows(&states, a.eta)?;
    let out = a.output.unwrap_or_else(|| a.dir.join("rescale_check.csv"));
    write_csv_file(&out, &IdentityRow::CSV_HEADER, rows.iter().map(|r| r.csv_values().to_vec()))?;
    let max = |f: fn(&IdentityRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    emit(
        &json!({
            "checkpoints": rows.len(),
            "max_identity_2_5_defect": max(|r| r.identity_2_5_defect),
            "max_mass_defect": max(|r| r.mass_defect),
            "max_hamiltonian_scaling_defect": max(|r| r.hamiltonian_scaling_defect),
            "max_hamiltonian_drift": max(|r| r.hamiltonian_drift),
        }),
        None,
    )
}

fn fit(a: FitRateArgs) -> Result<()> {
    let table = read_csv_file(&a.csv)?;
    let t = table
        .column("t")
        .ok_or_else(|| MzkError::Format("diagnostics CSV has no 't' column".into()))?;
    let y = table
        .column(&a.column)
        .ok_or_else(|| MzkError::Format(format!("diagnostics CSV has no '{}' column", a.column)))?;
    let which = match a.column.as_str() {
        "grad_E" => NormKind::GradE,
        "lambda" => NormKind::FullNorm,
        _ => NormKind::NNorm,
    };
    let model = match a.model {
        ModelChoice::Fixed => FitModel::FixedExponentOne,
        ModelChoice::Free => FitModel::FreeExponent,
    };
    let opts = FitOptions {
        tail_fraction: a.tail_fraction,
        ..FitOptions::default()
    };
    let series: Vec<(f64, f64)> = t.into_iter().zip(y).collect();
    let result = fit_rate(&series, model, &opts);
    let mass = match (a.eta, table.column("mass").and_then(|m| m.first().copied())) {
        (Some(eta), Some(mass)) => Some(MassContext {
            mass,
            q_mass: reference_q_mass(),
            eta,
        }),
        _ => None,
    };
    let verdict = check_lower_bound(&result, which, mass, DEFAULT_EXPONENT_TOLERANCE);
    let body = match &result {
        Ok(f) => json!({
            "c": f.c,
            "T_est": f.t_est,
            "exponent": f.exponent,
            "rms_log_residual": f.rms_log_residual,
            "verdict": verdict.status.to_string(),
            "details": verdict,
        }),
        Err(_) => json!({
            "c": null,
            "T_est": null,
            "exponent": null,
            "rms_log_residual": null,
            "verdict": verdict.status.to_string(),
            "details": verdict,
        }),
    };
    emit(&body, a.output.as_deref())
}

fn gn(a: GnCheckArgs) -> Result<()> {
    let q_mass = reference_q_mass();
    let grid = Grid2D::new(a.grid, a.grid, a.side)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut worst_ratio: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..a.count {
        let u = random_band_limited(grid, a.max_mode, &mut rng);
        let c = gn_check(&u, q_mass)?;
        worst_ratio = worst_ratio.max(c.lhs / c.rhs);
        failures += usize::from(!c.holds);
    }
    let q_grid = Grid2D::new(256, 256, 40.0)?;
    let qc = gn_check(&reference_q().to_complex_field(q_grid, 1.0), q_mass)?;
    emit(
        &json!({
            "seed": a.seed,
            "random_fields": a.count,
            "violations": failures,
            "max_lhs_over_rhs": worst_ratio,
            "q_lhs": qc.lhs,
            "q_rhs": qc.rhs,
            "q_equality_defect": (qc.lhs / qc.rhs - 1.0).abs(),
        }),
        a.output.as_deref(),
    )
}

fn classify(a: ClassifyArgs) -> Result<()> {
    let cfg = match (&a.config, &a.preset) {
        (Some(p), None) => read_config(p)?,
        (None, Some(name)) => super::parse_config(
            preset(name).ok_or_else(|| MzkError::Contract(format!("unknown preset '{name}'")))?,
        )?,
        _ => return Err(MzkError::Contract("classify needs exactly one of CONFIG or --preset".into())),
    };
    let st = cfg.initial_state()?;
    let c = classify_initial_data(&st, cfg.eta, reference_q_mass(), cfg.radial)?;
    emit(&c, a.output.as_deref())
}
