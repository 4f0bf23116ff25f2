mod common;

use common::*;
use launch_decision::experiment::ExperimentRecord;
use launch_decision::posterior::{posterior_update, summarize};
use launch_decision::prior::{build_prior, ShrinkageLevel};
use launch_decision::sim::{generate, Generator, SimConfig};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

const K_GRID: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 10.0];

fn prior_at(history: &[ExperimentRecord], k: f64) -> launch_decision::Gaussian {
    build_prior(history, ShrinkageLevel::Finite(k))
        .unwrap()
        .as_gaussian()
        .unwrap()
        .clone()
}

fn history_strategy() -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), 1usize..5, 1usize..7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn prior_weakens_as_k_grows((seed, n, m) in history_strategy()) {
        let mut rng = rng(seed);
        let history: Vec<_> = (0..m).map(|i| random_record(&mut rng, i, n)).collect();
        let priors: Vec<_> = K_GRID.iter().map(|&k| prior_at(&history, k)).collect();
        for pair in priors.windows(2) {
            let (a, b) = (&pair[0].cov, &pair[1].cov);
            prop_assert!(b.trace() >= a.trace() * (1.0 - 1e-12));
            for j in 0..n {
                prop_assert!(b[(j, j)] >= a[(j, j)] * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn prior_ignores_history_order((seed, n, m) in history_strategy(), k in 0.0f64..5.0) {
        let mut rng = rng(seed);
        let history: Vec<_> = (0..m).map(|i| random_record(&mut rng, i, n)).collect();
        let mut reversed = history.clone();
        reversed.reverse();
        reversed.rotate_left(m / 2);
        let (a, b) = (prior_at(&history, k), prior_at(&reversed, k));
        prop_assert!((&a.mean - &b.mean).amax() <= 1e-12 * a.mean.amax().max(1.0));
        prop_assert!((&a.cov - &b.cov).amax() <= 1e-12 * a.cov.amax().max(1.0));
    }

    #[test]
    fn posterior_precision_is_additive((seed, n, m) in history_strategy(), k in 0.0f64..5.0) {
        let mut rng = rng(seed);
        let history: Vec<_> = (0..m).map(|i| random_record(&mut rng, i, n)).collect();
        let current = random_record(&mut rng, m, n);
        let prior = prior_at(&history, k);
        let post = posterior_update(&build_prior(&history, ShrinkageLevel::Finite(k)).unwrap(), &current.x, &current.sigma).unwrap();
        let lhs = post.cov.clone().try_inverse().unwrap();
        let rhs = current.sigma.clone().try_inverse().unwrap() + prior.cov.clone().try_inverse().unwrap();
        prop_assert!((&lhs - &rhs).amax() <= 1e-8 * rhs.amax());
    }

    #[test]
    fn posterior_mean_is_a_matrix_convex_combination((seed, n, m) in history_strategy(), k in 0.0f64..5.0) {
        let mut rng = rng(seed);
        let history: Vec<_> = (0..m).map(|i| random_record(&mut rng, i, n)).collect();
        let current = random_record(&mut rng, m, n);
        let prior = prior_at(&history, k);
        let post = posterior_update(&build_prior(&history, ShrinkageLevel::Finite(k)).unwrap(), &current.x, &current.sigma).unwrap();
        let a = &post.cov * current.sigma.clone().try_inverse().unwrap();
        let rebuilt = &a * &current.x + (DMatrix::identity(n, n) - &a) * &prior.mean;
        let scale = current.x.amax().max(prior.mean.amax()).max(1.0);
        prop_assert!((&rebuilt - &post.mean).amax() <= 1e-8 * scale);
    }

    #[test]
    fn posterior_is_tighter_than_likelihood_and_prior((seed, n, m) in history_strategy(), k in 0.0f64..5.0) {
        let mut rng = rng(seed);
        let history: Vec<_> = (0..m).map(|i| random_record(&mut rng, i, n)).collect();
        let current = random_record(&mut rng, m, n);
        let prior = prior_at(&history, k);
        let post = posterior_update(&build_prior(&history, ShrinkageLevel::Finite(k)).unwrap(), &current.x, &current.sigma).unwrap();
        prop_assert!(launch_decision::linalg::min_eigenvalue(&(&current.sigma - &post.cov)) >= -1e-10);
        prop_assert!(launch_decision::linalg::min_eigenvalue(&(&prior.cov - &post.cov)) >= -1e-10);
    }

    /// With equal history variances the prior mean does not depend on `k`, so the `k = 1`
    /// estimate sits between the complete-pooling and no-pooling estimates.
    #[test]
    fn one_dim_estimates_and_widths_are_ordered_by_k(
        xs in prop::collection::vec(-5.0f64..5.0, 1..6),
        var in 0.2f64..4.0,
        xt in -10.0f64..10.0,
        vt in 0.2f64..4.0,
    ) {
        let history: Vec<_> = xs.iter().enumerate().map(|(i, &x)| {
            ExperimentRecord::new(format!("h{i}"), i as i64, schema(1), DVector::from_element(1, x), DMatrix::from_element(1, 1, var))
        }).collect();
        let x_t = DVector::from_element(1, xt);
        let s_t = DMatrix::from_element(1, 1, vt);
        let post: Vec<_> = [ShrinkageLevel::ZERO, ShrinkageLevel::ONE, ShrinkageLevel::INF]
            .iter()
            .map(|&k| summarize(&posterior_update(&build_prior(&history, k).unwrap(), &x_t, &s_t).unwrap(), k))
            .collect();
        let w: Vec<f64> = post.iter().map(|p| p.intervals[0].width()).collect();
        prop_assert!(w[0] <= w[1] * (1.0 + 1e-12) && w[1] <= w[2] * (1.0 + 1e-12));
        let est: Vec<f64> = post.iter().map(|p| p.gaussian.mean[0]).collect();
        let (lo, hi) = (est[0].min(est[2]), est[0].max(est[2]));
        prop_assert!(lo - 1e-12 <= est[1] && est[1] <= hi + 1e-12);
    }
}

#[test]
fn prior_sd_grows_with_k_on_synthetic_data() {
    let cfg = SimConfig {
        generator: Generator::HierarchicalSynthetic,
        seed: 4,
        ..SimConfig::default()
    };
    let history: Vec<_> = generate(&cfg)
        .unwrap()
        .into_iter()
        .map(|e| e.record)
        .collect();
    let ks = [0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0];
    let priors: Vec<_> = ks.iter().map(|&k| prior_at(&history, k)).collect();
    for pair in priors.windows(2) {
        let (a, b) = (pair[0].sd(), pair[1].sd());
        assert!(a.iter().zip(b.iter()).all(|(x, y)| y >= x));
    }
}

#[test]
fn empty_history_and_infinite_k_are_flat() {
    let mut rng = rng(1);
    let history: Vec<_> = (0..3).map(|i| random_record(&mut rng, i, 2)).collect();
    assert_eq!(
        build_prior(&[], ShrinkageLevel::ONE).unwrap(),
        launch_decision::Prior::Flat
    );
    assert_eq!(
        build_prior(&history, ShrinkageLevel::INF).unwrap(),
        launch_decision::Prior::Flat
    );
}
