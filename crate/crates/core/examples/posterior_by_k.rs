//! One experiment's posterior intervals under no, partial and complete pooling.

use launch_decision::analysis::{compare_k, compare_rows, render_table, COMPARE_HEADERS};
use launch_decision::prior::ShrinkageLevel;
use launch_decision::registry::Registry;
use launch_decision::sim::{generate, Generator, SimConfig};

fn main() -> launch_decision::Result<()> {
    let cfg = SimConfig {
        generator: Generator::HierarchicalSynthetic,
        seed: 12,
        ..SimConfig::default()
    };
    let experiments = generate(&cfg)?;
    let last = experiments.last().unwrap();
    let registry = Registry::from_records(experiments.iter().map(|e| e.record.clone()))?;

    let levels = [
        ShrinkageLevel::ZERO,
        ShrinkageLevel::ONE,
        ShrinkageLevel::INF,
    ];
    let posts = compare_k(&registry, &last.record.id, &levels, 0.95)?;
    println!(
        "experiment {} (true effect {:?})\n",
        last.record.id,
        last.truth.as_slice()
    );
    let headers: Vec<String> = COMPARE_HEADERS.iter().map(|h| h.to_string()).collect();
    print!("{}", render_table(&headers, &compare_rows(&posts)));
    println!(
        "\nmean interval width: k=0 {:.3}, k=1 {:.3}, k=inf {:.3}",
        posts[0].mean_width(),
        posts[1].mean_width(),
        posts[2].mean_width()
    );
    Ok(())
}
