// Scratch calibration runs used to pin ensemble sizes, step scales, and fit
// windows before freezing the acceptance suite. Not part of the test suite.

use std::sync::Arc;
use std::time::Instant;

use heavytail::analysis::{exp_moment_bound, moment_ladder, tv_bound_curve, LadderOptions};
use heavytail::construct::{speed_function, ProcessSpec};
use heavytail::density::{make_density, DensityModel};
use heavytail::diagnostics::*;
use heavytail::sde::StepPolicy;
use heavytail::stats::{ks_critical_value, ks_two_sample};

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "all".into());
    let d5 = Arc::new(make_density(DensityModel::ParetoShifted { m: 5.0 }).unwrap());
    let sf5 = Arc::new(speed_function(&d5, 1.0, 1.0).unwrap());

    if which == "all" || which == "ladder" {
        println!("== ladder bounds across models ==");
        for (name, model) in [
            ("hstudent m=4", DensityModel::HalfStudentLike { m: 4.0, s: 1.0 }),
            ("hstudent m=5", DensityModel::HalfStudentLike { m: 5.0, s: 1.0 }),
            ("hstudent m=6", DensityModel::HalfStudentLike { m: 6.0, s: 1.0 }),
            ("perturbed m=4", DensityModel::PerturbedPareto { m: 4.0, eps: 0.3 }),
            ("perturbed m=5", DensityModel::PerturbedPareto { m: 5.0, eps: 0.3 }),
            ("perturbed m=6", DensityModel::PerturbedPareto { m: 6.0, eps: 0.3 }),
        ] {
            let t0 = Instant::now();
            let d = Arc::new(make_density(model).unwrap());
            let sf = speed_function(&d, 1.0, 1.0).unwrap();
            match moment_ladder(&sf, 1.0, 1000.0, 4, LadderOptions::default()) {
                Ok(l) => {
                    print!("{name}: a={:.5} C={:.5}", l.a_env, l.c_bound);
                    for q in 1..=4 {
                        print!("  v{q}max/bound={:.4}", l.sup_v_q(q) / l.ladder_bound(q));
                    }
                    println!("  [{:?}]", t0.elapsed());
                }
                Err(e) => println!("{name}: FAILED {e}"),
            }
        }
    }

    if which == "all" || which == "tvx" {
        println!("== accelerated TV from x0=50 (scaled ensemble 10^4) ==");
        let checkpoints: Vec<f64> = (1..=20).map(|i| 0.5 * i as f64).collect();
        for kappa in [2e-3, 5e-3, 1e-2] {
            let t0 = Instant::now();
            let policy = StepPolicy::adaptive_speed(kappa, kappa).unwrap();
            let spec = ProcessSpec::accelerated(Arc::clone(&sf5));
            let curve = tv_curve(
                &spec,
                X0Policy::Fixed(50.0),
                &checkpoints,
                10_000,
                &policy,
                Seeding::new(11),
                &TvOptions::default(),
            )
            .unwrap();
            println!("kappa={kappa}: elapsed {:?}, floor={:.4}", t0.elapsed(), curve.noise_floor());
            print!("  tv:");
            for (t, v) in curve.checkpoints.iter().zip(curve.tv.iter()) {
                print!(" {t}:{v:.4}");
            }
            println!();
            match rate_fit(&curve, FitModel::Exponential, FitWindow::Auto) {
                Ok(f) => println!(
                    "  fit: lambda={:.3}+-{:.3} C={:.3} r2={:.4} window={:?} n={}",
                    f.rate, f.rate_ci95, f.amplitude, f.r2, f.window, f.n_points
                ),
                Err(e) => println!("  fit failed: {e}"),
            }
            for k_small in [0.01, 0.05, 1.0] {
                let ladder =
                    moment_ladder(&sf5, k_small, 1000.0, 4, LadderOptions::default()).unwrap();
                let alpha = 0.5 / ladder.c_bound;
                let env = tv_bound_curve(&ladder, alpha, &checkpoints).unwrap();
                let ok = curve
                    .checkpoints
                    .iter()
                    .zip(curve.tv.iter())
                    .zip(env.iter())
                    .filter(|&((_, &tv), _)| tv < 0.5)
                    .all(|((_, &tv), &(_, b))| tv <= b);
                println!(
                    "  K={k_small}: C={:.4} alpha={:.4} envelope(0.5)={:.4} envelope(10)={:.4} all-below={ok}",
                    ladder.c_bound, alpha, env[0].1, env[19].1
                );
            }
        }
    }

    if which == "all" || which == "tvy" {
        println!("== unit-noise TV from x0=2 (ensemble 10^4) ==");
        let mut checkpoints: Vec<f64> = vec![0.25];
        while *checkpoints.last().unwrap() < 200.0 {
            let next: f64 = checkpoints.last().unwrap() * 1.35;
            checkpoints.push(next.min(200.0));
        }
        let t0 = Instant::now();
        let policy = StepPolicy::uniform(2e-3).unwrap();
        let spec = ProcessSpec::langevin(Arc::clone(&d5));
        let curve = tv_curve(
            &spec,
            X0Policy::Fixed(2.0),
            &checkpoints,
            10_000,
            &policy,
            Seeding::new(12),
            &TvOptions::default(),
        )
        .unwrap();
        println!("elapsed {:?} floor {:.4}", t0.elapsed(), curve.noise_floor());
        print!("  tv:");
        for (t, v) in curve.checkpoints.iter().zip(curve.tv.iter()) {
            print!(" {t:.2}:{v:.4}");
        }
        println!();
        for model in [FitModel::Polynomial, FitModel::Exponential] {
            match rate_fit(&curve, model, FitWindow::Auto) {
                Ok(f) => println!(
                    "  {:?}: rate={:.3} r2={:.4} window={:?} n={}",
                    model, f.rate, f.r2, f.window, f.n_points
                ),
                Err(e) => println!("  {model:?} fit failed: {e}"),
            }
        }
    }

    if which == "all" || which == "lln" {
        println!("== LLN exceedance (ensemble 10^3) ==");
        let t0 = Instant::now();
        let policy = StepPolicy::uniform(1e-3).unwrap();
        for x0 in [0.5, 1.0] {
            let table = lln_check(
                &d5,
                GFunction::PowerTail,
                &[50.0, 100.0, 200.0, 400.0],
                1000,
                x0,
                0.1,
                &policy,
                Seeding::new(13),
            )
            .unwrap();
            println!("x0={x0} a_g={:.4} eps={:.4} rows={:?}", table.a_g, table.epsilon, table.rows);
        }
        println!("elapsed {:?}", t0.elapsed());
    }

    if which == "all" || which == "ks" {
        println!("== time-change cross-validation at t=2 (10^4 each) ==");
        let t0 = Instant::now();
        let kappa = 1e-3;
        let direct = ensemble_checkpoint_states(
            &ProcessSpec::accelerated(Arc::clone(&sf5)),
            X0Policy::Fixed(3.0),
            &[2.0],
            10_000,
            &StepPolicy::adaptive_speed(kappa, kappa).unwrap(),
            Seeding::new(14),
        )
        .unwrap();
        let mapped = time_changed_checkpoint_states(
            &sf5,
            X0Policy::Fixed(3.0),
            &[2.0],
            10_000,
            &StepPolicy::uniform(kappa).unwrap(),
            Seeding::new(15),
        )
        .unwrap();
        let dstat = ks_two_sample(&direct[0], &mapped[0]).unwrap();
        println!(
            "D = {dstat:.5} vs crit(1%) = {:.5}  [{:?}]",
            ks_critical_value(0.01, 10_000, 10_000),
            t0.elapsed()
        );
    }

    if which == "all" || which == "far" {
        println!("== far starts x0=1000 (200 paths, T=10, kappa=0.05) ==");
        let t0 = Instant::now();
        let policy = StepPolicy::adaptive_speed(0.05, 0.05).unwrap();
        let spec = ProcessSpec::accelerated(Arc::clone(&sf5));
        let states = ensemble_checkpoint_states(
            &spec,
            X0Policy::Fixed(1000.0),
            &[10.0],
            200,
            &policy,
            Seeding::new(16),
        );
        match states {
            Ok(s) => {
                let mean = s[0].iter().sum::<f64>() / s[0].len() as f64;
                println!("ok, mean state at t=10: {mean:.4} (target mean 1/3)  [{:?}]", t0.elapsed());
            }
            Err(e) => println!("FAILED: {e}"),
        }
    }
}
