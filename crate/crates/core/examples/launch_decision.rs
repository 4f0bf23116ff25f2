//! Expected risks of launching and rolling back, with a custom loss checked by Monte Carlo.

use std::sync::Arc;

use launch_decision::posterior::{
    joint_success_probability, summarize, Direction, SuccessCondition,
};
use launch_decision::prior::ShrinkageLevel;
use launch_decision::risk::{expected_risks, g_transform, linear_loss_fn, Action, LossSpec};
use launch_decision::Gaussian;
use nalgebra::{DMatrix, DVector};

fn main() -> launch_decision::Result<()> {
    // posterior for (revenue, latency): revenue up, latency up a little
    let post = Gaussian::new(
        DVector::from_row_slice(&[10.0, 3.0]),
        DMatrix::from_row_slice(2, 2, &[16.0, 2.0, 2.0, 4.0]),
    )?;
    let summary = summarize(&post, ShrinkageLevel::ONE);

    // revenue is valued, latency is harmful: one unit of revenue is worth 4 ms
    let tradeoffs = vec![1.0, -4.0];
    for (c0, c1) in [(0.0, 0.0), (0.0, 2.0), (0.0, 16.0)] {
        let report = expected_risks(
            &summary,
            &LossSpec::linear(tradeoffs.clone(), c0, c1)?,
            0,
            0,
        )?;
        println!(
            "c0 = {c0}, c1 = {c1}: R(launch) = {:>6.3}, R(rollback) = {:>6.3} -> {:?}",
            report.risk_launch, report.risk_rollback, report.recommendation
        );
    }

    // the same linear loss written as a callback is estimated by Monte Carlo
    let f = linear_loss_fn(g_transform(&tradeoffs)?, 0.0, 2.0);
    let mc = expected_risks(
        &summary,
        &LossSpec::custom(tradeoffs.clone(), 0.0, 2.0, f)?,
        100_000,
        1,
    )?;
    let detail = mc.monte_carlo.unwrap();
    println!(
        "\nMonte Carlo: R(launch) = {:.3} +/- {:.3}",
        mc.risk_launch, detail.se_launch
    );

    // a nonlinear loss: launching is penalised quadratically when latency rises past 5
    let asymmetric = Arc::new(|action: Action, w: &[f64]| match action {
        Action::Launch => -0.8 * w[0] + 0.2 * (w[1] - 5.0).max(0.0).powi(2),
        Action::Rollback => 0.0,
    });
    let r = expected_risks(
        &summary,
        &LossSpec::custom(tradeoffs, 0.0, 0.0, asymmetric)?,
        100_000,
        2,
    )?;
    println!(
        "asymmetric loss: R(launch) = {:.3}, R(rollback) = {:.3} -> {:?}",
        r.risk_launch, r.risk_rollback, r.recommendation
    );

    let conditions = [
        SuccessCondition {
            metric: 0,
            direction: Direction::Greater,
            threshold: 0.0,
        },
        SuccessCondition {
            metric: 1,
            direction: Direction::Less,
            threshold: 5.0,
        },
    ];
    let p = joint_success_probability(&post, &conditions, 50_000, 3)?;
    println!(
        "P(revenue > 0 and latency < 5) = {:.3} +/- {:.3}",
        p.probability, p.std_error
    );
    Ok(())
}
