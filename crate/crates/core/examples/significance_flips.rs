//! Experiments whose significance changes once history is pooled in.

use launch_decision::experiment::{ExperimentRecord, MetricSchema};
use launch_decision::prior::ShrinkageLevel;
use launch_decision::registry::Registry;
use launch_decision::sim::{flip_report, flips_to_csv};
use nalgebra::{DMatrix, DVector};

fn record(id: &str, t: i64, x: [f64; 2], sd: [f64; 2]) -> ExperimentRecord {
    ExperimentRecord::new(
        id,
        t,
        MetricSchema::new(["M1", "M2"]),
        DVector::from_row_slice(&x),
        DMatrix::from_diagonal(&DVector::from_row_slice(&[sd[0] * sd[0], sd[1] * sd[1]])),
    )
}

fn main() -> launch_decision::Result<()> {
    let mut reg = Registry::new();
    // past experiments: M1 effects are consistently negative, M2 effects are small
    for (i, (m1, m2)) in [
        (-14.0, 2.0),
        (-16.0, 4.0),
        (-15.5, 3.0),
        (-13.0, 1.0),
        (-16.5, 5.0),
    ]
    .iter()
    .enumerate()
    {
        reg.insert(record(
            &format!("past-{i}"),
            i as i64,
            [*m1, *m2],
            [3.0, 30.0],
        ))?;
    }
    // the new experiment: M1 is imprecise around zero, M2 is a large outlier
    reg.insert(record("A1-B1", 10, [0.01, 145.0], [6.1, 70.0]).with_label("A1 vs B1"))?;

    let rows = flip_report(&reg, ShrinkageLevel::INF, ShrinkageLevel::ZERO, 0.95)?;
    for r in &rows {
        println!(
            "{} {}: {:?}  no pooling {:.2} [{:.2}, {:.2}]  ->  pooled {:.2} [{:.2}, {:.2}]",
            r.experiment,
            r.metric,
            r.direction,
            r.a.est,
            r.a.low,
            r.a.high,
            r.b.est,
            r.b.low,
            r.b.high
        );
    }
    println!("\n{}", flips_to_csv(&rows)?);
    Ok(())
}
