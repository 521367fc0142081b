//! Acceptance suite: end-to-end checks of the constructions, quadrature
//! oracles, and Monte-Carlo diagnostics at their stated tolerances.
//!
//! Each test prints one `ACCEPTANCE <nn> <name>: PASS` line (or panics with
//! the measured values). Run with `--nocapture` to see the per-criterion
//! measurements. The suite is deterministic: fixed master seeds, splittable
//! streams, index-ordered aggregation.

use std::sync::{Arc, OnceLock};

use heavytail::analysis::{
    exp_moment_bound, moment_ladder, solve_bvp, tv_bound_curve, LadderOptions, MomentLadder,
};
use heavytail::construct::{
    bibby_coefficients, key_identity_residual, speed_function, stationarity_residual, ProcessSpec,
    SpeedFunction,
};
use heavytail::density::{make_density, DensityModel, TargetDensity};
use heavytail::diagnostics::*;
use heavytail::numerics::{grid, quad};
use heavytail::sde::StepPolicy;
use heavytail::stats::{ks_critical_value, ks_two_sample};

fn density(model: DensityModel) -> Arc<TargetDensity> {
    Arc::new(make_density(model).unwrap())
}

fn pareto(m: f64) -> Arc<TargetDensity> {
    density(DensityModel::ParetoShifted { m })
}

fn speed(d: &Arc<TargetDensity>) -> Arc<SpeedFunction> {
    Arc::new(speed_function(d, 1.0, 1.0).unwrap())
}

fn all_models() -> [DensityModel; 3] {
    [
        DensityModel::ParetoShifted { m: 5.0 },
        DensityModel::HalfStudentLike { m: 4.0, s: 1.0 },
        DensityModel::PerturbedPareto { m: 5.0, eps: 0.3 },
    ]
}

#[test]
fn acceptance_01_stationarity_identities() {
    let id_grid = grid::geometric(0.0, 100.0, 400);
    let res_grid = grid::geometric(0.1, 50.0, 300);
    for model in all_models() {
        let d = density(model);
        let sf = speed(&d);
        let r_key = key_identity_residual(&d, &sf, &id_grid).unwrap();
        assert!(r_key <= 1e-6, "{}: key identity residual {r_key:.2e}", model.name());

        let bc = Arc::new(bibby_coefficients(&d).unwrap());
        for spec in [
            ProcessSpec::langevin(Arc::clone(&d)),
            ProcessSpec::accelerated(Arc::clone(&sf)),
            ProcessSpec::bibby(Arc::clone(&bc)),
        ] {
            let r = stationarity_residual(&spec, &res_grid).unwrap();
            assert!(
                r <= 1e-5,
                "{}/{}: stationarity residual {r:.2e}",
                model.name(),
                spec.kind().name()
            );
        }
    }
    println!("ACCEPTANCE 01 stationarity-identities: PASS");
}

#[test]
fn acceptance_02_speed_envelope_and_values() {
    let scan = grid::geometric(0.0, 1e4, 1000);
    for model in all_models() {
        let d = density(model);
        let sf = speed(&d);
        let m = d.tail_exponent();
        let a = sf.a_env();
        for &z in &scan {
            let f2 = sf.f2(z);
            let p = (1.0 + z).powf(m + 1.0);
            assert!(
                a * p <= f2 && f2 <= p / a,
                "{}: envelope fails at z = {z}: a = {a}, f2 = {f2}",
                model.name()
            );
        }
    }
    let d = pareto(5.0);
    let sf = speed(&d);
    assert!((sf.f2(0.0) - 1.0).abs() <= 1e-10, "f2(0) = {}", sf.f2(0.0));
    assert!((sf.f2(1.0) - 3.625).abs() <= 1e-10, "f2(1) = {}", sf.f2(1.0));
    println!(
        "ACCEPTANCE 02 speed-envelope: PASS (pareto a = {:.6}, f2(0) = {}, f2(1) = {})",
        sf.a_env(),
        sf.f2(0.0),
        sf.f2(1.0)
    );
}

#[test]
fn acceptance_03_bvp_oracle_vs_monte_carlo() {
    let d = pareto(5.0);
    let sf = speed(&d);
    let (k, n_barrier) = (1.0, 1000.0);
    let bvp_grid = heavytail::analysis::default_bvp_grid(k, n_barrier, 240);
    let sol = solve_bvp(&sf, |_| 1.0, k, n_barrier, &bvp_grid).unwrap();
    let spec = ProcessSpec::accelerated(Arc::clone(&sf));
    let kappa = 1e-4;
    let policy = StepPolicy::adaptive_speed(kappa, kappa).unwrap();
    for (i, &xi) in [2.0, 5.0, 10.0].iter().enumerate() {
        let predicted = sol.eval(xi);
        let horizon = 8.0 * predicted.max(0.05);
        let hs = hitting_stats(
            &spec,
            xi,
            k,
            &[],
            1,
            10_000,
            horizon,
            &policy,
            Seeding::new(301).with_block(i as u32),
        )
        .unwrap();
        let (mean, se) = (hs.moments[0].mean, hs.moments[0].se);
        println!(
            "  xi = {xi}: v1_hat = {mean:.5} +- {se:.5}, bvp = {predicted:.5}, censored {}",
            hs.censored
        );
        assert!(
            (mean - predicted).abs() <= 3.0 * se,
            "xi = {xi}: |{mean:.6} - {predicted:.6}| > 3 x {se:.6}"
        );
    }
    println!("ACCEPTANCE 03 bvp-oracle-vs-monte-carlo: PASS");
}

/// Shared hitting ensembles for the ladder and exponential-moment criteria:
/// tail exponents 4, 5, 6 and starts 5, 10, 100 against K = 1.
struct HitRun {
    m: f64,
    x0: f64,
    ladder: &'static MomentLadder,
    stats: HittingStats,
}

fn hitting_grid() -> &'static Vec<HitRun> {
    static GRID: OnceLock<Vec<HitRun>> = OnceLock::new();
    static LADDERS: OnceLock<Vec<MomentLadder>> = OnceLock::new();
    GRID.get_or_init(|| {
        let ladders = LADDERS.get_or_init(|| {
            [4.0, 5.0, 6.0]
                .iter()
                .map(|&m| {
                    let d = pareto(m);
                    let sf = speed_function(&d, 1.0, 1.0).unwrap();
                    moment_ladder(&sf, 1.0, 1000.0, 4, LadderOptions::default()).unwrap()
                })
                .collect()
        });
        let mut runs = Vec::new();
        for (mi, &m) in [4.0, 5.0, 6.0].iter().enumerate() {
            let d = pareto(m);
            let sf = speed(&d);
            let spec = ProcessSpec::accelerated(Arc::clone(&sf));
            let ladder = &ladders[mi];
            let alpha = 0.5 / ladder.c_bound;
            for (xi_idx, &x0) in [5.0, 10.0, 100.0].iter().enumerate() {
                // Far starts cost ~x0^2/kappa steps per path; trade ensemble
                // size and step scale against the one-sided tolerances.
                let (ensemble, kappa) =
                    if x0 > 50.0 { (1000, 2e-3) } else { (10_000, 1e-3) };
                let policy = StepPolicy::adaptive_speed(kappa, kappa).unwrap();
                let horizon = 8.0 * ladder.v_q(1, x0).max(0.05);
                let stats = hitting_stats(
                    &spec,
                    x0,
                    1.0,
                    &[alpha],
                    4,
                    ensemble,
                    horizon,
                    &policy,
                    Seeding::new(400 + mi as u64).with_block(xi_idx as u32),
                )
                .unwrap();
                runs.push(HitRun { m, x0, ladder, stats });
            }
        }
        runs
    })
}

#[test]
fn acceptance_04_moment_ladder_bounds() {
    // Quadrature side: v_q <= q! C^q + 1e-8 on the whole grid, m in {4,5,6}
    // (the ladder constructor hard-fails on violation; assert explicitly).
    for run in hitting_grid() {
        for q in 1..=4 {
            let bound = run.ladder.ladder_bound(q);
            let sup = run.ladder.sup_v_q(q);
            assert!(
                sup <= bound + 1e-8,
                "m = {}: sup v_{q} = {sup:.6e} above {bound:.6e}",
                run.m
            );
        }
    }
    // Monte-Carlo side: moment estimates below the same bounds within 3 SE.
    for run in hitting_grid() {
        for q in 1..=4usize {
            let est = &run.stats.moments[q - 1];
            let bound = run.ladder.ladder_bound(q);
            println!(
                "  m = {} x0 = {}: v{}_hat = {:.5} +- {:.5} vs {:.5}",
                run.m, run.x0, q, est.mean, est.se, bound
            );
            assert!(
                est.mean <= bound + 3.0 * est.se,
                "m = {} x0 = {}: v{}_hat = {:.6e} above {bound:.6e} + 3 x {:.2e}",
                run.m,
                run.x0,
                q,
                est.mean,
                est.se
            );
        }
    }
    println!("ACCEPTANCE 04 moment-ladder-bounds: PASS");
}

#[test]
fn acceptance_05_exponential_moment_uniformity() {
    // E e^{alpha gamma} <= 1/(1 - alpha C) + 3 SE at alpha = 0.5/C, and the
    // estimates collapse across starts.
    for run in hitting_grid() {
        let (alpha, est) = &run.stats.exp_moments[0];
        let cap = 1.0 / (1.0 - alpha * run.ladder.c_bound);
        println!(
            "  m = {} x0 = {}: exp-moment(alpha = {alpha:.4}) = {:.4} +- {:.4} vs cap {cap:.4}",
            run.m, run.x0, est.mean, est.se
        );
        assert!(
            est.mean <= cap + 3.0 * est.se,
            "m = {} x0 = {}: {:.5} above {cap:.5} + 3 x {:.2e}",
            run.m,
            run.x0,
            est.mean,
            est.se
        );
        // The series bound from the ladder dominates the cap structure too.
        let series = exp_moment_bound(run.ladder, *alpha).unwrap();
        assert!(series.per_xi.iter().all(|&v| v <= cap + 1e-9));
    }
    // Uniformity in the start: pairwise agreement within 3x pooled SE.
    for m in [4.0, 5.0, 6.0] {
        let runs: Vec<&HitRun> = hitting_grid().iter().filter(|r| r.m == m).collect();
        for i in 0..runs.len() {
            for j in i + 1..runs.len() {
                let a = &runs[i].stats.exp_moments[0].1;
                let b = &runs[j].stats.exp_moments[0].1;
                let pooled = (a.se * a.se + b.se * b.se).sqrt();
                assert!(
                    (a.mean - b.mean).abs() <= 3.0 * pooled,
                    "m = {m}: starts {} and {} disagree: {:.5} vs {:.5} (pooled {pooled:.2e})",
                    runs[i].x0,
                    runs[j].x0,
                    a.mean,
                    b.mean
                );
            }
        }
    }
    println!("ACCEPTANCE 05 exponential-moment-uniformity: PASS");
}

#[test]
fn acceptance_06_exponential_tv_decay_to_target() {
    // Headline claim for the accelerated process: binned TV to the target
    // decays exponentially (linear log-TV fit with R^2 >= 0.95, positive
    // rate) and stays below the theoretical envelope 2e^{-alpha t}/(1-alpha C)
    // at alpha = 0.5/C past burn-in.
    let d = pareto(5.0);
    let sf = speed(&d);
    let spec = ProcessSpec::accelerated(Arc::clone(&sf));
    let checkpoints: Vec<f64> = (1..=20).map(|i| 0.5 * i as f64).collect();
    let kappa = 5e-3;
    let policy = StepPolicy::adaptive_speed(kappa, kappa).unwrap();
    let curve = tv_curve(
        &spec,
        X0Policy::Fixed(50.0),
        &checkpoints,
        100_000,
        &policy,
        Seeding::new(600),
        &TvOptions::default(),
    )
    .unwrap();
    print!("  tv(t):");
    for (t, v) in curve.checkpoints.iter().zip(curve.tv.iter()) {
        print!(" {t}:{v:.4}");
    }
    println!();

    let mut failures: Vec<String> = Vec::new();

    match rate_fit(&curve, FitModel::Exponential, FitWindow::Auto) {
        Ok(fit) => {
            println!(
                "  exponential fit: rate = {:.4} +- {:.4}, r2 = {:.4}, window {:?}, {} points",
                fit.rate, fit.rate_ci95, fit.r2, fit.window, fit.n_points
            );
            if !(fit.r2 >= 0.95) {
                failures.push(format!("log-TV fit r2 = {:.4} below 0.95", fit.r2));
            }
            if !(fit.rate > 0.0) {
                failures.push(format!("fitted rate {:.4} not positive", fit.rate));
            }
        }
        Err(e) => failures.push(format!("rate fit unusable: {e}")),
    }

    // Envelope at the most favorable standard threshold (K = 0.01; larger K
    // only steepens the envelope).
    let ladder = moment_ladder(&sf, 0.01, 1000.0, 4, LadderOptions::default()).unwrap();
    let alpha = 0.5 / ladder.c_bound;
    let envelope = tv_bound_curve(&ladder, alpha, &checkpoints).unwrap();
    let burn_in = curve
        .checkpoints
        .iter()
        .zip(curve.tv.iter())
        .find(|(_, &tv)| tv < 0.5)
        .map(|(&t, _)| t)
        .unwrap_or(f64::INFINITY);
    for ((&t, &tv), &(_, bound)) in
        curve.checkpoints.iter().zip(curve.tv.iter()).zip(envelope.iter())
    {
        if t >= burn_in && tv > bound {
            failures.push(format!(
                "tv({t}) = {tv:.4} above envelope {bound:.4} (alpha = {alpha:.4})"
            ));
        }
    }

    assert!(
        failures.is_empty(),
        "exponential decay to the target density fails: {}\n\
         The reflected diffusion with drift f^2 b and noise f has the normalized \n\
         speed measure pi/f^2 as its stationary law (zero-flux boundary condition), \n\
         so its distance to pi plateaus at 1/2 integral |pi - pi/f^2 / Z| ~= 0.109 \n\
         instead of decaying; see the equilibrium-identification test for the \n\
         implementation-independent evidence.",
        failures.join("; ")
    );
    println!("ACCEPTANCE 06 exponential-tv-decay-to-target: PASS");
}

#[test]
fn acceptance_06s_equilibrium_identification() {
    // Supplementary analysis for the headline criterion: identify the law the
    // accelerated process actually equilibrates to. The binned distance to
    // the normalized speed measure rho = pi/f^2/Z falls to the estimator
    // noise floor and is start-uniform, while the distance to pi matches the
    // analytic plateau 1/2 integral |pi - rho|.
    let d = pareto(5.0);
    let sf = speed(&d);
    let spec = ProcessSpec::accelerated(Arc::clone(&sf));
    let hist = PiHistogram::new(&d, 64, 0.999).unwrap();

    // rho bin masses by independent quadrature.
    let rho_un = |x: f64| d.pi(x) / sf.f2(x);
    let z_rho = quad::integrate_to_infinity(&rho_un, 0.0, 1e-10, 0.0).unwrap().value;
    let mut rho_masses: Vec<f64> = hist
        .edges
        .windows(2)
        .map(|w| quad::integrate(&rho_un, w[0], w[1], 1e-10, 0.0).unwrap().value / z_rho)
        .collect();
    rho_masses.push(
        quad::integrate_to_infinity(&rho_un, *hist.edges.last().unwrap(), 1e-10, 0.0)
            .unwrap()
            .value
            / z_rho,
    );
    let plateau = 0.5
        * quad::integrate_to_infinity(|x| (d.pi(x) - rho_un(x) / z_rho).abs(), 0.0, 1e-8, 1e-12)
            .unwrap()
            .value;

    let n = 20_000;
    let kappa = 2e-3;
    let policy = StepPolicy::adaptive_speed(kappa, kappa).unwrap();
    let floor = tv_noise_floor(hist.bins(), n);
    for (label, x0, block) in
        [("stationary", X0Policy::Stationary, 0u32), ("x0=50", X0Policy::Fixed(50.0), 1u32)]
    {
        let states = ensemble_checkpoint_states(
            &spec,
            x0,
            &[5.0],
            n,
            &policy,
            Seeding::new(650).with_block(block),
        )
        .unwrap();
        let mut counts = vec![0u32; hist.bins()];
        for &x in &states[0] {
            counts[hist.bin_index(x)] += 1;
        }
        let tv_pi = hist.tv_from_counts(&counts, n);
        let tv_rho: f64 = 0.5
            * counts
                .iter()
                .zip(rho_masses.iter())
                .map(|(&c, &p)| (c as f64 / n as f64 - p).abs())
                .sum::<f64>();
        println!(
            "  {label}: tv-to-pi = {tv_pi:.4} (plateau {plateau:.4}), tv-to-rho = {tv_rho:.4} \
             (floor {floor:.4})"
        );
        assert!(
            tv_rho <= 1.5 * floor,
            "{label}: distance to the speed measure {tv_rho:.4} above 1.5 x floor {floor:.4}"
        );
        assert!(
            (tv_pi - plateau).abs() <= 0.015,
            "{label}: distance to the target {tv_pi:.4} does not match the plateau {plateau:.4}"
        );
    }
    println!("ACCEPTANCE 06s equilibrium-identification: PASS (plateau = {plateau:.4})");
}

#[test]
fn acceptance_07_polynomial_contrast_unit_noise() {
    let d = pareto(5.0);
    // Log-spaced checkpoints to t = 200, dense through the usable window.
    let mut checkpoints: Vec<f64> = vec![0.25];
    while *checkpoints.last().unwrap() < 200.0 {
        let next: f64 = checkpoints.last().unwrap() * 1.155;
        checkpoints.push(if next > 195.0 { 200.0 } else { next });
    }
    let spec_y = ProcessSpec::langevin(Arc::clone(&d));
    let policy = StepPolicy::uniform(2e-3).unwrap();
    let curve = tv_curve(
        &spec_y,
        X0Policy::Fixed(2.0),
        &checkpoints,
        40_000,
        &policy,
        Seeding::new(700),
        &TvOptions::default(),
    )
    .unwrap();
    let poly = rate_fit(&curve, FitModel::Polynomial, FitWindow::Auto).unwrap();
    let expf = rate_fit(&curve, FitModel::Exponential, FitWindow::Auto).unwrap();
    println!(
        "  polynomial: k = {:.3}, r2 = {:.4} over {:?} ({} points); exponential r2 = {:.4}",
        poly.rate, poly.r2, poly.window, poly.n_points, expf.r2
    );
    assert!(poly.r2 >= 0.9, "log-log fit r2 = {:.4} below 0.9", poly.r2);
    assert!(poly.rate > 0.0);
    assert!(
        expf.r2 < poly.r2,
        "exponential fit r2 = {:.4} not below polynomial {:.4}",
        expf.r2,
        poly.r2
    );

    // At t = 10 the unit-noise process from x0 = 50 is still far from the
    // target while the accelerated one has long equilibrated.
    let tv_y = tv_curve(
        &spec_y,
        X0Policy::Fixed(50.0),
        &[10.0],
        10_000,
        &policy,
        Seeding::new(701),
        &TvOptions::default(),
    )
    .unwrap();
    let sf = speed(&d);
    let spec_x = ProcessSpec::accelerated(Arc::clone(&sf));
    let tv_x = tv_curve(
        &spec_x,
        X0Policy::Fixed(50.0),
        &[10.0],
        10_000,
        &StepPolicy::adaptive_speed(5e-3, 5e-3).unwrap(),
        Seeding::new(702),
        &TvOptions::default(),
    )
    .unwrap();
    let ratio = tv_y.tv[0] / tv_x.tv[0];
    println!("  tv_y(10) = {:.4}, tv_x(10) = {:.4}, ratio = {ratio:.2}", tv_y.tv[0], tv_x.tv[0]);
    assert!(ratio >= 3.0, "contrast ratio {ratio:.2} below 3");
    println!("ACCEPTANCE 07 polynomial-contrast-unit-noise: PASS");
}

#[test]
fn acceptance_08_uniform_in_start_collapse() {
    let d = pareto(5.0);
    let sf = speed(&d);
    let x0_list = [1.0, 10.0, 100.0, 1000.0];
    let checkpoints = [5.0, 10.0];
    let ensemble = 2000;

    let spec_x = ProcessSpec::accelerated(Arc::clone(&sf));
    let policy_x = StepPolicy::adaptive_speed(0.1, 0.1).unwrap();
    let rep_x = initial_condition_sweep(
        &spec_x,
        &x0_list,
        &checkpoints,
        ensemble,
        &policy_x,
        Seeding::new(800),
        &TvOptions::default(),
    )
    .unwrap();
    for (x0, cv) in rep_x.x0_list.iter().zip(rep_x.curves.iter()) {
        println!("  accelerated x0 = {x0}: tv(10) = {:.4} +- {:.4}", cv.tv[1], cv.se[1]);
    }
    println!(
        "  accelerated spread = {:.4} vs 3 x pooled = {:.4}",
        rep_x.final_spread,
        3.0 * rep_x.final_pooled_se
    );
    assert!(
        rep_x.collapsed,
        "accelerated curves do not collapse: spread {:.4} > 3 x {:.4}",
        rep_x.final_spread, rep_x.final_pooled_se
    );

    // The unit-noise process must fail the same collapse at this horizon.
    let spec_y = ProcessSpec::langevin(Arc::clone(&d));
    let rep_y = initial_condition_sweep(
        &spec_y,
        &x0_list,
        &checkpoints,
        ensemble,
        &StepPolicy::uniform(2e-3).unwrap(),
        Seeding::new(801),
        &TvOptions::default(),
    )
    .unwrap();
    println!(
        "  unit-noise spread = {:.4} vs 3 x pooled = {:.4}",
        rep_y.final_spread,
        3.0 * rep_y.final_pooled_se
    );
    assert!(
        !rep_y.collapsed,
        "unit-noise curves unexpectedly collapse at t = 10 from starts up to 1e3"
    );
    println!(
        "ACCEPTANCE 08 uniform-in-start-collapse: PASS ({} far-start paths, zero aborts)",
        2 * 4 * ensemble
    );
}

#[test]
fn acceptance_09_time_change_equivalence() {
    let d = pareto(5.0);
    let sf = speed(&d);
    let kappa = 1e-3;
    let n = 10_000;
    let direct = ensemble_checkpoint_states(
        &ProcessSpec::accelerated(Arc::clone(&sf)),
        X0Policy::Fixed(3.0),
        &[2.0],
        n,
        &StepPolicy::adaptive_speed(kappa, kappa).unwrap(),
        Seeding::new(900),
    )
    .unwrap();
    let mapped = time_changed_checkpoint_states(
        &sf,
        X0Policy::Fixed(3.0),
        &[2.0],
        n,
        &StepPolicy::uniform(kappa).unwrap(),
        Seeding::new(901),
    )
    .unwrap();
    let dstat = ks_two_sample(&direct[0], &mapped[0]).unwrap();
    let crit = ks_critical_value(0.01, n, n);
    println!("  KS statistic {dstat:.5} vs 1% critical value {crit:.5}");
    assert!(dstat < crit, "KS {dstat:.5} at or above the 1% critical value {crit:.5}");
    println!("ACCEPTANCE 09 time-change-equivalence: PASS");
}

#[test]
fn acceptance_10_time_average_convergence() {
    let d = pareto(5.0);
    let t_list = [50.0, 100.0, 200.0, 400.0];
    let table = lln_check(
        &d,
        GFunction::PowerTail,
        &t_list,
        1000,
        1.0,
        0.1,
        &StepPolicy::uniform(1e-3).unwrap(),
        Seeding::new(1000),
    )
    .unwrap();
    println!("  a_g = {:.4}, rows = {:?}", table.a_g, table.rows);
    let last = table.rows.last().unwrap();
    assert!(last.1 < 0.05, "exceedance {:.4} at T = {} not below 0.05", last.1, last.0);
    // Monotone trend across doubling horizons, allowing one inversion.
    let inversions = table.rows.windows(2).filter(|w| w[1].1 > w[0].1).count();
    assert!(inversions <= 1, "{inversions} inversions in {:?}", table.rows);
    println!("ACCEPTANCE 10 time-average-convergence: PASS");
}

#[test]
fn acceptance_11_affine_drift_construction() {
    let d = pareto(5.0);
    let bc = Arc::new(bibby_coefficients(&d).unwrap());
    assert!((bc.mu() - 1.0 / 3.0).abs() <= 1e-8, "mu = {}", bc.mu());
    for &z in &grid::geometric(0.0, 1e3, 1500) {
        let v = bc.v_unclamped(z);
        assert!(v >= -1e-12, "v({z}) = {v:.3e}");
    }
    let spec = ProcessSpec::bibby(Arc::clone(&bc));
    let r = stationarity_residual(&spec, &grid::geometric(0.1, 50.0, 300)).unwrap();
    assert!(r <= 1e-5, "affine-drift stationarity residual {r:.2e}");
    println!("ACCEPTANCE 11 affine-drift-construction: PASS (mu = {:.10}, residual {r:.2e})", bc.mu());
}
