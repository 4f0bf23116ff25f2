//! Release gate: one line per acceptance criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p launch-decision --test acceptance`.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use launch_decision::bootstrap::{bootstrap_sigma, BootstrapConfig};
use launch_decision::experiment::{Arm, ExperimentRecord, UnitOutcomes};
use launch_decision::linalg::min_eigenvalue;
use launch_decision::posterior::{posterior_update, summarize};
use launch_decision::prior::{build_prior, Prior, ShrinkageLevel};
use launch_decision::registry::Registry;
use launch_decision::risk::{
    expected_risks, g_transform, linear_loss_fn, LossSpec, Recommendation,
};
use launch_decision::sim::{flip_report, run_simulation, FlipDirection, Generator, SimConfig};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use common::*;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn g_paper_value() -> Outcome {
    let g = g_transform(&[1.0, 99.0]).map_err(|e| e.to_string())?;
    let err = (g[0] - 0.99).abs().max((g[1] - 0.01).abs());
    check(
        err <= 1e-12,
        format!("G([1, 99]) = [{}, {}], max err {err:.1e}", g[0], g[1]),
    )
}

fn flat_prior_identity() -> Outcome {
    let mut rng = rng(11);
    let mut exact = 0;
    for case in 0..100 {
        let n = 1 + case % 6;
        let history: Vec<ExperimentRecord> =
            (0..3).map(|i| random_record(&mut rng, i, n)).collect();
        let prior = build_prior(&history, ShrinkageLevel::INF).map_err(|e| e.to_string())?;
        if prior != Prior::Flat {
            return Err(format!("case {case}: k = inf produced a non-flat prior"));
        }
        let x = random_vec(&mut rng, n, 5.0);
        let sigma = random_spd(&mut rng, n, 0.1);
        let post = posterior_update(&prior, &x, &sigma).map_err(|e| e.to_string())?;
        let same_mean = post
            .mean
            .iter()
            .zip(x.iter())
            .all(|(a, b)| a.to_bits() == b.to_bits());
        let same_cov = post
            .cov
            .iter()
            .zip(sigma.iter())
            .all(|(a, b)| a.to_bits() == b.to_bits());
        exact += usize::from(same_mean && same_cov);
    }
    check(exact == 100, format!("{exact}/100 bit-identical"))
}

fn integration_oracle() -> Outcome {
    let mut rng = rng(21);
    let h = 0.02;
    let grid = grid(-40.0, 40.0, h);
    let ks = [0.0, 0.3, 1.0, 2.5, 0.1];
    let mut worst: f64 = 0.0;
    for case in 0..25 {
        let c = OneDimCase::random(&mut rng, ks[case % ks.len()]);
        let prior =
            build_prior(&c.records(), ShrinkageLevel::Finite(c.k)).map_err(|e| e.to_string())?;
        let post = posterior_update(
            &prior,
            &DVector::from_element(1, c.current.0),
            &DMatrix::from_element(1, 1, c.current.1),
        )
        .map_err(|e| e.to_string())?;
        let numeric = c.numeric_posterior(&grid, h);
        let (tau, delta) = (post.mean[0], post.cov[(0, 0)]);
        let err = grid
            .iter()
            .zip(&numeric)
            .map(|(&w, f)| (f - gaussian_pdf_1d(w, tau, delta)).abs())
            .fold(0.0, f64::max);
        worst = worst.max(err);
    }
    check(
        worst <= 1e-6,
        format!("25 cases, sup-norm density error {worst:.2e}"),
    )
}

fn pooling_oracle() -> Outcome {
    let mut rng = rng(31);
    let mut worst: f64 = 0.0;
    for case in 0..50 {
        let n = 1 + case % 5;
        let m = 1 + rng.random_range(0..8);
        let history: Vec<ExperimentRecord> =
            (0..m).map(|i| random_record(&mut rng, i, n)).collect();
        let prior = build_prior(&history, ShrinkageLevel::ZERO).map_err(|e| e.to_string())?;
        let g = prior.as_gaussian().ok_or("k = 0 gave a flat prior")?;
        let (mean, cov) = fixed_effect_pool(&history);
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
        let e = g
            .mean
            .iter()
            .zip(mean.iter())
            .map(|(a, b)| rel(*a, *b))
            .fold(0.0, f64::max);
        let v = g
            .cov
            .iter()
            .zip(cov.iter())
            .map(|(a, b)| rel(*a, *b))
            .fold(0.0, f64::max);
        worst = worst.max(e).max(v);
    }
    check(
        worst <= 1e-10,
        format!("50 histories, max relative error {worst:.2e}"),
    )
}

fn random_lambda(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let mag = 10f64.powf(rng.random_range(-2.0..2.0));
            if rng.random_bool(0.7) {
                mag
            } else {
                -mag
            }
        })
        .collect()
}

fn complementarity() -> Outcome {
    let mut rng = rng(41);
    let mut worst: f64 = 0.0;
    for case in 0..1000 {
        let n = 1 + case % 6;
        let g = launch_decision::Gaussian {
            mean: random_vec(&mut rng, n, 10.0),
            cov: random_spd(&mut rng, n, 0.1),
        };
        let post = summarize(&g, ShrinkageLevel::ONE);
        let (c0, c1) = (rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        let loss =
            LossSpec::linear(random_lambda(&mut rng, n), c0, c1).map_err(|e| e.to_string())?;
        let r = expected_risks(&post, &loss, 0, 0).map_err(|e| e.to_string())?;
        worst = worst.max((r.risk_launch + r.risk_rollback - (c0 + c1)).abs());
    }
    check(
        worst <= 1e-12,
        format!("1000 draws, max |R1 + R0 - c0 - c1| = {worst:.1e}"),
    )
}

fn monte_carlo_agreement() -> Outcome {
    let mut rng = rng(51);
    let mut within = 0;
    for trial in 0..100u64 {
        let n = 3;
        let g = launch_decision::Gaussian {
            mean: random_vec(&mut rng, n, 2.0),
            cov: random_spd(&mut rng, n, 0.2),
        };
        let post = summarize(&g, ShrinkageLevel::ONE);
        let lambda = random_lambda(&mut rng, n);
        let (c0, c1) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let closed = expected_risks(
            &post,
            &LossSpec::linear(lambda.clone(), c0, c1).unwrap(),
            0,
            0,
        )
        .map_err(|e| e.to_string())?;
        let weights = g_transform(&lambda).map_err(|e| e.to_string())?;
        let custom = LossSpec::custom(lambda, c0, c1, linear_loss_fn(weights, c0, c1)).unwrap();
        let mc =
            expected_risks(&post, &custom, 100_000, 9_000 + trial).map_err(|e| e.to_string())?;
        let detail = mc
            .monte_carlo
            .ok_or("custom loss reported no Monte Carlo detail")?;
        let ok_l = (mc.risk_launch - closed.risk_launch).abs() <= 3.0 * detail.se_launch;
        let ok_r = (mc.risk_rollback - closed.risk_rollback).abs() <= 3.0 * detail.se_rollback;
        within += usize::from(ok_l && ok_r);
    }
    check(within >= 99, format!("{within}/100 trials within 3 SE"))
}

fn contraction() -> Outcome {
    let mut rng = rng(61);
    let ks = [0.0, 0.5, 1.0, 2.0, 10.0];
    let mut worst = f64::INFINITY;
    for case in 0..500 {
        let n = 1 + case % 5;
        let m = 1 + rng.random_range(0..6);
        let history: Vec<ExperimentRecord> =
            (0..m).map(|i| random_record(&mut rng, i, n)).collect();
        let current = random_record(&mut rng, m, n);
        let prior = build_prior(&history, ShrinkageLevel::Finite(ks[case % ks.len()]))
            .map_err(|e| e.to_string())?;
        let post =
            posterior_update(&prior, &current.x, &current.sigma).map_err(|e| e.to_string())?;
        worst = worst.min(min_eigenvalue(&(&current.sigma - &post.cov)));
    }
    check(
        worst >= -1e-10,
        format!("500 instances, min eigenvalue of Sigma_t - Delta = {worst:.2e}"),
    )
}

fn mse_replication() -> Outcome {
    let mut wins = [0usize; 3];
    let (mut width1, mut width_inf) = ([0.0; 3], [0.0; 3]);
    for rep in 0..50 {
        let cfg = SimConfig {
            n_experiments: 20,
            n_metrics: 3,
            k_values: vec![ShrinkageLevel::ONE, ShrinkageLevel::INF],
            seed: 1000 + rep,
            generator: Generator::HierarchicalSynthetic,
            ..SimConfig::default()
        };
        let report = run_simulation(&cfg).map_err(|e| e.to_string())?;
        let (one, inf) = (&report.levels[0], &report.levels[1]);
        for j in 0..3 {
            wins[j] += usize::from(one.mse[j] < inf.mse[j]);
            width1[j] += one.interval_width[j] / 50.0;
            width_inf[j] += inf.interval_width[j] / 50.0;
        }
    }
    let ok = wins.iter().all(|&w| w >= 45) && (0..3).all(|j| width1[j] < width_inf[j]);
    check(
        ok,
        format!(
            "MSE(k=1) < MSE(k=inf) in {wins:?}/50 reps; mean width k=1 {:.3?} vs k=inf {:.3?}",
            width1, width_inf
        ),
    )
}

fn coverage_replication() -> Outcome {
    let null = SimConfig {
        n_experiments: 500,
        k_values: vec![ShrinkageLevel::INF],
        seed: 7,
        generator: Generator::GaussianNull,
        ..SimConfig::default()
    };
    let report = run_simulation(&null).map_err(|e| e.to_string())?;
    let se = (0.95f64 * 0.05 / 500.0).sqrt();
    let cov_inf = report.levels[0].coverage.clone();
    let null_ok = cov_inf.iter().all(|c| (c - 0.95).abs() <= 3.0 * se);

    let hier = SimConfig {
        n_experiments: 500,
        k_values: vec![ShrinkageLevel::ONE],
        seed: 8,
        generator: Generator::HierarchicalSynthetic,
        ..SimConfig::default()
    };
    let report = run_simulation(&hier).map_err(|e| e.to_string())?;
    let cov_one = report.levels[0].coverage.clone();
    let hier_ok = cov_one.iter().all(|&c| c >= 0.90);
    check(
        null_ok && hier_ok,
        format!(
            "k=inf null coverage {cov_inf:.3?} (0.95 +/- {:.3}); k=1 hierarchical coverage {cov_one:.3?} (>= 0.90)",
            3.0 * se
        ),
    )
}

fn one_dim(id: &str, ts: i64, x: f64, var: f64) -> ExperimentRecord {
    ExperimentRecord::new(
        id,
        ts,
        schema(1),
        DVector::from_element(1, x),
        DMatrix::from_element(1, 1, var),
    )
}

fn flip_patterns() -> Outcome {
    // tight prior away from zero, imprecise likelihood straddling zero
    let mut toward = Registry::new();
    for i in 0..5 {
        toward
            .insert(one_dim(&format!("h{i}"), i, -15.0, 10.0))
            .map_err(|e| e.to_string())?;
    }
    toward
        .insert(one_dim("current", 5, 0.01, 37.5))
        .map_err(|e| e.to_string())?;
    // outlying likelihood pulled toward a near-zero prior
    let mut away = Registry::new();
    for i in 0..5 {
        away.insert(one_dim(&format!("h{i}"), i, 3.0, 900.0))
            .map_err(|e| e.to_string())?;
    }
    away.insert(one_dim("current", 5, 145.0, 4900.0))
        .map_err(|e| e.to_string())?;

    let mut notes = Vec::new();
    let mut ok = true;
    for (reg, prior_mean, want) in [
        (&toward, -15.0, FlipDirection::InsignificantToSignificant),
        (&away, 3.0, FlipDirection::SignificantToInsignificant),
    ] {
        let rows = flip_report(reg, ShrinkageLevel::INF, ShrinkageLevel::ZERO, 0.95)
            .map_err(|e| e.to_string())?;
        let x_t = reg.get("current").unwrap().x[0];
        let hit = rows.len() == 1 && rows[0].experiment == "current" && rows[0].direction == want;
        let between = rows.first().is_some_and(|r| {
            let (lo, hi) = if prior_mean < x_t {
                (prior_mean, x_t)
            } else {
                (x_t, prior_mean)
            };
            lo < r.b.est && r.b.est < hi
        });
        ok &= hit && between;
        notes.push(format!(
            "{want:?}: {} row(s), est {:.3} between {prior_mean} and {x_t}: {between}",
            rows.len(),
            rows.first().map_or(f64::NAN, |r| r.b.est)
        ));
    }
    check(ok, notes.join("; "))
}

fn bootstrap_sanity() -> Outcome {
    let mut rng = rng(71);
    let treat = Normal::new(0.5, 2.0).unwrap();
    let control = Normal::new(0.0, 1.0).unwrap();
    let mut units = Vec::new();
    for i in 0..100 {
        units.push(UnitOutcomes::new(
            format!("t{i}"),
            Arm::Treatment,
            vec![treat.sample(&mut rng)],
        ));
        units.push(UnitOutcomes::new(
            format!("c{i}"),
            Arm::Control,
            vec![control.sample(&mut rng)],
        ));
    }
    let sample_var = |arm: Arm| {
        let ys: Vec<f64> = units
            .iter()
            .filter(|u| u.arm == arm)
            .map(|u| u.outcomes[0])
            .collect();
        let n = ys.len() as f64;
        let mean = ys.iter().sum::<f64>() / n;
        ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n - 1.0) / n
    };
    let analytic = sample_var(Arm::Treatment) + sample_var(Arm::Control);
    let sigma = bootstrap_sigma(
        &units,
        &BootstrapConfig {
            replicates: 5000,
            seed: 3,
        },
    )
    .map_err(|e| e.to_string())?;
    let rel = (sigma[(0, 0)] - analytic).abs() / analytic;
    check(
        rel <= 0.15,
        format!(
            "bootstrap {:.5} vs analytic {analytic:.5}, relative diff {:.1}%",
            sigma[(0, 0)],
            100.0 * rel
        ),
    )
}

fn scale_invariance() -> Outcome {
    let mut rng = rng(81);
    let (mut exact_pow2, mut max_ulps, mut same_rec) = (0, 0u64, 0);
    for case in 0..100 {
        let n = 2 + case % 5;
        let lambda = random_lambda(&mut rng, n);
        let base = g_transform(&lambda).map_err(|e| e.to_string())?;
        let pow2 = 2f64.powi(rng.random_range(-30..=30));
        let real = 10f64.powf(rng.random_range(-3.0..3.0));
        let scaled = |c: f64| g_transform(&lambda.iter().map(|l| c * l).collect::<Vec<_>>());
        let g2 = scaled(pow2).map_err(|e| e.to_string())?;
        let gr = scaled(real).map_err(|e| e.to_string())?;
        exact_pow2 += usize::from(
            g2.iter()
                .zip(base.iter())
                .all(|(a, b)| a.to_bits() == b.to_bits()),
        );
        for (a, b) in gr.iter().zip(base.iter()) {
            max_ulps = max_ulps.max((a.to_bits() as i64 - b.to_bits() as i64).unsigned_abs());
        }

        let g = launch_decision::Gaussian {
            mean: random_vec(&mut rng, n, 3.0),
            cov: DMatrix::identity(n, n),
        };
        let post = summarize(&g, ShrinkageLevel::ONE);
        let (c0, c1) = (rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
        let rec = |c: f64| -> Result<Recommendation, String> {
            let loss = LossSpec::linear(lambda.iter().map(|l| c * l).collect(), c0, c1)
                .map_err(|e| e.to_string())?;
            Ok(expected_risks(&post, &loss, 0, 0)
                .map_err(|e| e.to_string())?
                .recommendation)
        };
        same_rec += usize::from(rec(1.0)? == rec(pow2)? && rec(1.0)? == rec(real)?);
    }
    check(
        exact_pow2 == 100 && max_ulps <= 4 && same_rec == 100,
        format!(
            "power-of-two c bit-identical {exact_pow2}/100; arbitrary real c within {max_ulps} ulp; recommendation unchanged {same_rec}/100"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("g-transform worked example", g_paper_value),
        ("flat-prior identity", flat_prior_identity),
        ("1-D integration oracle", integration_oracle),
        ("k=0 pooling oracle", pooling_oracle),
        ("risk complementarity", complementarity),
        ("Monte Carlo vs closed form", monte_carlo_agreement),
        ("posterior contraction", contraction),
        ("MSE directional replication", mse_replication),
        ("coverage replication", coverage_replication),
        ("significance flip patterns", flip_patterns),
        ("bootstrap sanity", bootstrap_sanity),
        ("scale invariance", scale_invariance),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} AC{:02} {name} [{secs:.2}s]: {detail}", i + 1);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
