//! Prior pooled from past experiments, swept across shrinkage levels `k`.
//!
//! Small `k` pools aggressively (k = 0 is complete pooling); `k = inf` ignores history.

use launch_decision::prior::{build_prior, empirical_theta, MomentReport, ShrinkageLevel};
use launch_decision::sim::{generate, Generator, SimConfig};

fn main() -> launch_decision::Result<()> {
    let cfg = SimConfig {
        generator: Generator::HierarchicalSynthetic,
        seed: 4,
        ..SimConfig::default()
    };
    let history: Vec<_> = generate(&cfg)?.into_iter().map(|e| e.record).collect();
    let names = history[0].schema.names.clone();
    println!("{} past experiments, metrics {names:?}", history.len());
    println!(
        "Theta_hat diagonal: {:?}\n",
        empirical_theta(&history)?.diagonal().as_slice()
    );

    println!("{:>6}  {:>30}  {:>30}", "k", "prior mean", "prior sd");
    for k in [0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0] {
        let prior = build_prior(&history, ShrinkageLevel::Finite(k))?;
        let g = prior.as_gaussian().expect("non-empty history");
        let r = MomentReport::new(&names, g);
        let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:>9.3}")).collect::<String>();
        println!("{k:>6}  {:>30}  {:>30}", fmt(&r.means), fmt(&r.sds));
    }
    println!("{:>6}  flat", "inf");
    Ok(())
}
