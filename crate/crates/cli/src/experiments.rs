//! Experiment runners: construction → simulation → diagnostics → files.

use std::sync::Arc;
use std::time::Instant;

use heavytail::analysis::{moment_ladder, tv_bound_curve, LadderOptions, MomentLadder};
use heavytail::construct::{
    bibby_coefficients, key_identity_residual, mixing_exponent_r, speed_function,
    stationarity_residual, ProcessKind, ProcessSpec, SpeedFunction,
};
use heavytail::density::TargetDensity;
use heavytail::diagnostics::{
    hitting_stats, initial_condition_sweep, lln_check, rate_fit,
    tv_curve, FitModel, FitWindow, Seeding, SparseBinPolicy, TvCurve, TvOptions, X0Policy,
};
use heavytail::numerics::grid;
use heavytail::sde::{simulate_path, StepPolicy};

use crate::config::{g_function_from_name, ExperimentConfig, ExperimentKind};
use crate::output::{fmt_f, manifest, svg_line_plot, Csv, RunDir, Series};

/// Failure classification for exit codes.
pub enum RunError {
    /// Configuration or environment problem.
    Operational(String),
    /// A scientific invariant did not hold at its tolerance.
    Invariant(String),
}

fn map_core(e: heavytail::Error) -> RunError {
    match e {
        heavytail::Error::LadderBound { .. } | heavytail::Error::NegativeDiffusion { .. } => {
            RunError::Invariant(e.to_string())
        }
        other => RunError::Operational(other.to_string()),
    }
}

struct BuiltProcess {
    spec: ProcessSpec,
    policy: StepPolicy,
    speed: Option<Arc<SpeedFunction>>,
}

struct Workbench {
    density: Arc<TargetDensity>,
    processes: Vec<BuiltProcess>,
    seeding_base: Seeding,
    tv_options: TvOptions,
}

fn build(config: &ExperimentConfig) -> Result<Workbench, RunError> {
    let model = config.density_model().map_err(RunError::Operational)?;
    let density = Arc::new(model.build().map_err(map_core)?);
    let reflection = config.reflection().map_err(RunError::Operational)?;
    let method = config.normal_method().map_err(RunError::Operational)?;

    let mut processes = Vec::new();
    for sec in &config.processes {
        let policy = sec.step_policy(reflection).map_err(RunError::Operational)?;
        let (spec, speed) = match sec.process_kind() {
            ProcessKind::LangevinY => (ProcessSpec::langevin(Arc::clone(&density)), None),
            ProcessKind::AcceleratedX => {
                let sf =
                    Arc::new(speed_function(&density, sec.c1, sec.c2).map_err(map_core)?);
                (ProcessSpec::accelerated(Arc::clone(&sf)), Some(sf))
            }
            ProcessKind::BibbyZ => {
                let bc = Arc::new(bibby_coefficients(&density).map_err(map_core)?);
                (ProcessSpec::bibby(bc), None)
            }
        };
        processes.push(BuiltProcess { spec, policy, speed });
    }

    Ok(Workbench {
        density,
        processes,
        seeding_base: Seeding::new(config.run.master_seed).with_method(method),
        tv_options: TvOptions {
            interior_bins: config.run.bins,
            quantile_level: config.run.quantile_level,
            bootstrap: config.run.bootstrap,
            sparse: SparseBinPolicy::Coarsen,
        },
    })
}

/// Execute the configured experiment, writing CSVs (and SVGs if enabled)
/// into the output directory, plus a manifest.
pub fn run(config: &ExperimentConfig, out_dir: &std::path::Path) -> Result<(), RunError> {
    let started = Instant::now();
    let kind = config.experiment_kind().map_err(RunError::Operational)?;
    let bench = build(config)?;
    let mut dir = RunDir::create(out_dir).map_err(RunError::Operational)?;

    let result = match kind {
        ExperimentKind::Identities => run_identities(config, &bench, &mut dir),
        ExperimentKind::Tv => run_tv(config, &bench, &mut dir),
        ExperimentKind::Hitting => run_hitting(config, &bench, &mut dir),
        ExperimentKind::Lln => run_lln(config, &bench, &mut dir),
        ExperimentKind::Bvp => run_bvp(config, &bench, &mut dir),
        ExperimentKind::Sweep => run_sweep(config, &bench, &mut dir),
        ExperimentKind::Compare => run_compare(config, &bench, &mut dir),
    };
    result?;

    let entries = [
        ("config_hash", config.semantic_hash()),
        ("experiment", kind.name().to_string()),
        ("density_model", config.density.model.clone()),
        ("master_seed", config.run.master_seed.to_string()),
        ("tool_version", env!("CARGO_PKG_VERSION").to_string()),
        ("normal_method", config.run.normal_method.clone()),
        ("reflection", config.run.reflection.clone()),
        ("wall_clock_s", format!("{:.3}", started.elapsed().as_secs_f64())),
    ];
    dir.write("manifest.txt", &manifest(&entries.map(|(k, v)| (k, v))))
        .map_err(RunError::Operational)?;
    dir.commit();
    Ok(())
}

fn ladder_for(
    config: &ExperimentConfig,
    sf: &Arc<SpeedFunction>,
) -> Result<MomentLadder, RunError> {
    moment_ladder(
        sf,
        config.experiment.k_threshold,
        config.experiment.n_barrier,
        config.experiment.q_max,
        LadderOptions::default(),
    )
    .map_err(map_core)
}

fn run_identities(
    _config: &ExperimentConfig,
    bench: &Workbench,
    dir: &mut RunDir,
) -> Result<(), RunError> {
    let d = &bench.density;
    let mut csv = Csv::new(&["check", "value", "tolerance", "pass"]);
    let mut all_ok = true;
    let push = |csv: &mut Csv, name: &str, value: f64, tol: f64, ok: bool| {
        csv.row(&[name.to_string(), fmt_f(value), fmt_f(tol), ok.to_string()]);
    };

    // Density-level checks.
    let env_grid = grid::geometric(0.0, 1e3, 2000);
    let rep = heavytail::density::verify_envelope(d, &env_grid).map_err(map_core)?;
    all_ok &= rep.pass;
    push(&mut csv, "density_envelope", d.envelope_c(), 1.0, rep.pass);

    let probes = grid::geometric(0.0, 1e6, 200);
    let mix = mixing_exponent_r(d, &probes).map_err(map_core)?;
    let mix_ok = mix.r_estimate > 1.5;
    all_ok &= mix_ok;
    push(&mut csv, "mixing_exponent_r", mix.r_estimate, 1.5, mix_ok);

    let id_grid = grid::geometric(0.0, 100.0, 400);
    let res_grid = grid::geometric(0.1, 50.0, 300);
    for p in &bench.processes {
        if let Some(sf) = &p.speed {
            let r = key_identity_residual(d, sf, &id_grid).map_err(map_core)?;
            let ok = r <= 1e-6;
            all_ok &= ok;
            push(&mut csv, "key_identity_residual", r, 1e-6, ok);

            let m = d.tail_exponent();
            let a = sf.a_env();
            let scan = grid::geometric(0.0, 1e4, 1000);
            let env_ok = scan.iter().all(|&z| {
                let f2 = sf.f2(z);
                let pw = (1.0 + z).powf(m + 1.0);
                a * pw <= f2 && f2 <= pw / a
            });
            all_ok &= env_ok;
            push(&mut csv, "speed_envelope_a", a, 1.0, env_ok);
        }
        let r = stationarity_residual(&p.spec, &res_grid).map_err(map_core)?;
        let ok = r <= 1e-5;
        all_ok &= ok;
        push(&mut csv, &format!("stationarity_residual_{}", p.spec.kind().name()), r, 1e-5, ok);

        if let Some(bc) = p.spec.bibby_coefficients() {
            push(&mut csv, "bibby_mu", bc.mu(), f64::NAN, true);
            let v_min = grid::geometric(0.0, 1e3, 1500)
                .iter()
                .map(|&z| bc.v_unclamped(z))
                .fold(f64::INFINITY, f64::min);
            let ok = v_min >= -1e-12;
            all_ok &= ok;
            push(&mut csv, "bibby_v_min", v_min, -1e-12, ok);
        }
    }

    dir.write("identities.csv", &csv.finish()).map_err(RunError::Operational)?;
    if all_ok {
        Ok(())
    } else {
        Err(RunError::Invariant("one or more identity residuals above tolerance".into()))
    }
}

fn tv_csv(curves: &[(&str, &TvCurve)]) -> String {
    let mut csv = Csv::new(&["process", "t", "tv", "se"]);
    for (name, curve) in curves {
        for i in 0..curve.checkpoints.len() {
            csv.row(&[
                name.to_string(),
                fmt_f(curve.checkpoints[i]),
                fmt_f(curve.tv[i]),
                fmt_f(curve.se[i]),
            ]);
        }
    }
    csv.finish()
}

fn fits_csv(rows: &[(String, String, Result<heavytail::diagnostics::RateFit, String>)]) -> String {
    let mut csv = Csv::new(&[
        "process",
        "model",
        "rate",
        "rate_ci95",
        "amplitude",
        "r2",
        "window_lo",
        "window_hi",
        "n_points",
        "status",
    ]);
    for (process, model, fit) in rows {
        match fit {
            Ok(f) => csv.row(&[
                process.clone(),
                model.clone(),
                fmt_f(f.rate),
                fmt_f(f.rate_ci95),
                fmt_f(f.amplitude),
                fmt_f(f.r2),
                fmt_f(f.window.0),
                fmt_f(f.window.1),
                f.n_points.to_string(),
                "ok".into(),
            ]),
            Err(e) => csv.row(&[
                process.clone(),
                model.clone(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                "0".into(),
                format!("unusable: {}", e.replace(',', ";")),
            ]),
        }
    }
    csv.finish()
}

fn dump_paths(
    config: &ExperimentConfig,
    bench: &Workbench,
    p: &BuiltProcess,
    horizon: f64,
    dir: &mut RunDir,
) -> Result<(), RunError> {
    let n = config.experiment.ensemble.min(config.run.paths_dump_limit);
    let x0 = config.experiment.x0.unwrap_or(1.0);
    let mut csv = Csv::new(&["path_id", "t", "x", "local_time"]);
    for i in 0..n {
        let mut stream = bench.seeding_base.with_block(900).path_stream(i);
        let path = simulate_path(&p.spec, x0, horizon, &p.policy, &mut stream).map_err(map_core)?;
        for j in 0..path.len() {
            csv.row(&[
                i.to_string(),
                fmt_f(path.times[j]),
                fmt_f(path.states[j]),
                fmt_f(path.local_time[j]),
            ]);
        }
    }
    dir.write(&format!("paths_{}.csv", p.spec.kind().name()), &csv.finish())
        .map_err(RunError::Operational)?;
    Ok(())
}

fn run_tv(
    config: &ExperimentConfig,
    bench: &Workbench,
    dir: &mut RunDir,
) -> Result<(), RunError> {
    let e = &config.experiment;
    let checkpoints = e.checkpoints.clone().expect("validated");
    let x0 = e.x0.expect("validated");
    let mut curves: Vec<(String, TvCurve)> = Vec::new();
    let mut fits = Vec::new();
    let mut envelope_rows: Vec<(f64, f64)> = Vec::new();
    let mut envelope_violation = None;

    for (i, p) in bench.processes.iter().enumerate() {
        let seeding = bench.seeding_base.with_block(i as u32 * 16);
        let curve = tv_curve(
            &p.spec,
            X0Policy::Fixed(x0),
            &checkpoints,
            e.ensemble,
            &p.policy,
            seeding,
            &bench.tv_options,
        )
        .map_err(map_core)?;
        let name = p.spec.kind().name().to_string();
        for model in [FitModel::Exponential, FitModel::Polynomial] {
            let fit = rate_fit(&curve, model, FitWindow::Auto).map_err(|err| err.to_string());
            fits.push((name.clone(), model.name().to_string(), fit));
        }
        if let Some(sf) = &p.speed {
            let ladder = ladder_for(config, sf)?;
            let alpha = e.alpha_fractions[0] / ladder.c_bound;
            let bound = tv_bound_curve(&ladder, alpha, &checkpoints).map_err(map_core)?;
            let burn_in = curve
                .checkpoints
                .iter()
                .zip(curve.tv.iter())
                .find(|(_, &tv)| tv < 0.5)
                .map(|(&t, _)| t)
                .unwrap_or(f64::INFINITY);
            for ((&t, &tv), &(_, b)) in
                curve.checkpoints.iter().zip(curve.tv.iter()).zip(bound.iter())
            {
                if t >= burn_in && tv > b && envelope_violation.is_none() {
                    envelope_violation = Some(format!(
                        "tv({t}) = {tv:.4} above the theoretical envelope {b:.4} at alpha = \
                         {alpha:.4}"
                    ));
                }
            }
            envelope_rows = bound;
        }
        if config.run.emit_paths {
            let horizon = *checkpoints.last().expect("non-empty");
            dump_paths(config, bench, p, horizon, dir)?;
        }
        curves.push((name, curve));
    }

    let refs: Vec<(&str, &TvCurve)> = curves.iter().map(|(n, c)| (n.as_str(), c)).collect();
    dir.write("tv.csv", &tv_csv(&refs)).map_err(RunError::Operational)?;
    dir.write("fits.csv", &fits_csv(&fits)).map_err(RunError::Operational)?;
    if !envelope_rows.is_empty() {
        let mut csv = Csv::new(&["t", "bound"]);
        for (t, b) in &envelope_rows {
            csv.row(&[fmt_f(*t), fmt_f(*b)]);
        }
        dir.write("bound.csv", &csv.finish()).map_err(RunError::Operational)?;
    }
    if config.run.emit_svg {
        let mut series: Vec<Series> = curves
            .iter()
            .map(|(n, c)| Series {
                label: n.clone(),
                points: c.checkpoints.iter().cloned().zip(c.tv.iter().cloned()).collect(),
            })
            .collect();
        if !envelope_rows.is_empty() {
            series.push(Series { label: "envelope".into(), points: envelope_rows.clone() });
        }
        dir.write("tv.svg", &svg_line_plot("binned TV vs t", &series, true))
            .map_err(RunError::Operational)?;
    }

    match (config.experiment.check_envelope, envelope_violation) {
        (true, Some(v)) => Err(RunError::Invariant(v)),
        _ => Ok(()),
    }
}

fn run_hitting(
    config: &ExperimentConfig,
    bench: &Workbench,
    dir: &mut RunDir,
) -> Result<(), RunError> {
    let e = &config.experiment;
    let p = &bench.processes[0];
    let x0 = e.x0.expect("validated");
    let sf = p.speed.as_ref().ok_or_else(|| {
        RunError::Operational(
            "hitting experiment needs the accelerated process (ladder constants)".into(),
        )
    })?;
    let ladder = ladder_for(config, sf)?;
    let alphas: Vec<f64> =
        e.alpha_fractions.iter().map(|f| f / ladder.c_bound).collect();
    let horizon = e.horizon_factor * ladder.v_q(1, x0).max(0.05);
    let stats = hitting_stats(
        &p.spec,
        x0,
        e.k_threshold,
        &alphas,
        e.q_max,
        e.ensemble,
        horizon,
        &p.policy,
        bench.seeding_base,
    )
    .map_err(map_core)?;

    let mut csv = Csv::new(&["sample_idx", "gamma"]);
    for (i, g) in stats.samples.iter().enumerate() {
        csv.row(&[i.to_string(), fmt_f(*g)]);
    }
    dir.write("hitting_samples.csv", &csv.finish()).map_err(RunError::Operational)?;

    let mut csv = Csv::new(&["quantity", "order_or_alpha", "estimate", "se", "bound"]);
    for (q, m) in stats.moments.iter().enumerate() {
        csv.row(&[
            "moment".into(),
            (q + 1).to_string(),
            fmt_f(m.mean),
            fmt_f(m.se),
            fmt_f(ladder.ladder_bound(q + 1)),
        ]);
    }
    for (alpha, m) in &stats.exp_moments {
        csv.row(&[
            "exp_moment".into(),
            fmt_f(*alpha),
            fmt_f(m.mean),
            fmt_f(m.se),
            fmt_f(1.0 / (1.0 - alpha * ladder.c_bound)),
        ]);
    }
    csv.row(&["censored".into(), String::new(), stats.censored.to_string(), String::new(), String::new()]);
    csv.row(&["c_bound".into(), String::new(), fmt_f(ladder.c_bound), String::new(), String::new()]);
    dir.write("hitting_summary.csv", &csv.finish()).map_err(RunError::Operational)?;

    // Scientific gate: the ladder bound must dominate the estimates.
    for (q, m) in stats.moments.iter().enumerate() {
        let bound = ladder.ladder_bound(q + 1);
        if m.mean > bound + 3.0 * m.se {
            return Err(RunError::Invariant(format!(
                "moment estimate v{}_hat = {:.6e} above {bound:.6e} + 3 SE",
                q + 1,
                m.mean
            )));
        }
    }
    Ok(())
}

fn run_lln(
    config: &ExperimentConfig,
    bench: &Workbench,
    dir: &mut RunDir,
) -> Result<(), RunError> {
    let e = &config.experiment;
    let g = g_function_from_name(&e.g_function).expect("validated");
    let t_list = e.t_list.clone().expect("validated");
    let x0 = e.x0.unwrap_or(1.0);
    let h = bench
        .processes
        .first()
        .and_then(|p| if p.policy.is_adaptive() { None } else { Some(p.policy.h_max()) })
        .unwrap_or(1e-3);
    let table = lln_check(
        &bench.density,
        g,
        &t_list,
        e.ensemble,
        x0,
        e.epsilon_fraction,
        &StepPolicy::uniform(h).map_err(map_core)?,
        bench.seeding_base,
    )
    .map_err(map_core)?;

    let mut csv = Csv::new(&["t", "exceedance", "a_g", "epsilon"]);
    for (t, frac) in &table.rows {
        csv.row(&[fmt_f(*t), fmt_f(*frac), fmt_f(table.a_g), fmt_f(table.epsilon)]);
    }
    dir.write("lln.csv", &csv.finish()).map_err(RunError::Operational)?;
    Ok(())
}

fn run_bvp(
    config: &ExperimentConfig,
    bench: &Workbench,
    dir: &mut RunDir,
) -> Result<(), RunError> {
    let sf = bench
        .processes
        .iter()
        .find_map(|p| p.speed.clone())
        .map(Ok)
        .unwrap_or_else(|| {
            speed_function(&bench.density, 1.0, 1.0).map(Arc::new).map_err(map_core)
        })?;
    let ladder = ladder_for(config, &sf)?;

    let mut csv = Csv::new(&["q", "xi", "v_q"]);
    for q in 0..=ladder.q_max {
        for (i, &xi) in ladder.xi.iter().enumerate() {
            csv.row(&[q.to_string(), fmt_f(xi), fmt_f(ladder.v[q][i])]);
        }
    }
    dir.write("ladder.csv", &csv.finish()).map_err(RunError::Operational)?;

    let alpha = config.experiment.alpha_fractions[0] / ladder.c_bound;
    let times: Vec<f64> = (0..=100).map(|i| 0.2 * i as f64).collect();
    let bound = tv_bound_curve(&ladder, alpha, &times).map_err(map_core)?;
    let mut csv = Csv::new(&["t", "bound"]);
    for (t, b) in &bound {
        csv.row(&[fmt_f(*t), fmt_f(*b)]);
    }
    dir.write("bound.csv", &csv.finish()).map_err(RunError::Operational)?;

    let mut csv = Csv::new(&["constant", "value"]);
    for (k, v) in [
        ("a_env", ladder.a_env),
        ("a_m", ladder.a_m),
        ("c_bound", ladder.c_bound),
        ("alpha_max", ladder.alpha_max),
        ("alpha_used", alpha),
    ] {
        csv.row(&[k.to_string(), fmt_f(v)]);
    }
    dir.write("constants.csv", &csv.finish()).map_err(RunError::Operational)?;
    Ok(())
}

fn run_sweep(
    config: &ExperimentConfig,
    bench: &Workbench,
    dir: &mut RunDir,
) -> Result<(), RunError> {
    let e = &config.experiment;
    let x0_list = e.x0_list.clone().expect("validated");
    let checkpoints = e.checkpoints.clone().expect("validated");
    let p = &bench.processes[0];
    let report = initial_condition_sweep(
        &p.spec,
        &x0_list,
        &checkpoints,
        e.ensemble,
        &p.policy,
        bench.seeding_base,
        &bench.tv_options,
    )
    .map_err(map_core)?;

    let mut csv = Csv::new(&["x0", "t", "tv", "se"]);
    for (x0, curve) in report.x0_list.iter().zip(report.curves.iter()) {
        for i in 0..curve.checkpoints.len() {
            csv.row(&[
                fmt_f(*x0),
                fmt_f(curve.checkpoints[i]),
                fmt_f(curve.tv[i]),
                fmt_f(curve.se[i]),
            ]);
        }
    }
    dir.write("sweep.csv", &csv.finish()).map_err(RunError::Operational)?;

    let mut csv = Csv::new(&["metric", "value"]);
    csv.row(&["final_spread".into(), fmt_f(report.final_spread)]);
    csv.row(&["final_pooled_se".into(), fmt_f(report.final_pooled_se)]);
    csv.row(&["collapsed".into(), report.collapsed.to_string()]);
    for (i, &t) in checkpoints.iter().enumerate() {
        csv.row(&[format!("max_tv_at_{t}"), fmt_f(report.max_tv[i])]);
    }
    dir.write("uniformity.csv", &csv.finish()).map_err(RunError::Operational)?;

    if config.run.emit_svg {
        let series: Vec<Series> = report
            .x0_list
            .iter()
            .zip(report.curves.iter())
            .map(|(x0, c)| Series {
                label: format!("x0={x0}"),
                points: c.checkpoints.iter().cloned().zip(c.tv.iter().cloned()).collect(),
            })
            .collect();
        dir.write("sweep.svg", &svg_line_plot("binned TV per start", &series, true))
            .map_err(RunError::Operational)?;
    }
    Ok(())
}

fn run_compare(
    config: &ExperimentConfig,
    bench: &Workbench,
    dir: &mut RunDir,
) -> Result<(), RunError> {
    let e = &config.experiment;
    let checkpoints = e.checkpoints.clone().expect("validated");
    let x0 = e.x0.expect("validated");
    let mut curves: Vec<(String, TvCurve)> = Vec::new();
    for (i, p) in bench.processes.iter().enumerate() {
        let seeding = bench.seeding_base.with_block(i as u32 * 16);
        let curve = tv_curve(
            &p.spec,
            X0Policy::Fixed(x0),
            &checkpoints,
            e.ensemble,
            &p.policy,
            seeding,
            &bench.tv_options,
        )
        .map_err(map_core)?;
        curves.push((p.spec.kind().name().to_string(), curve));
    }
    let refs: Vec<(&str, &TvCurve)> = curves.iter().map(|(n, c)| (n.as_str(), c)).collect();
    dir.write("compare.csv", &tv_csv(&refs)).map_err(RunError::Operational)?;
    if config.run.emit_svg {
        let series: Vec<Series> = curves
            .iter()
            .map(|(n, c)| Series {
                label: n.clone(),
                points: c.checkpoints.iter().cloned().zip(c.tv.iter().cloned()).collect(),
            })
            .collect();
        dir.write("compare.svg", &svg_line_plot("binned TV vs t", &series, true))
            .map_err(RunError::Operational)?;
    }
    Ok(())
}
