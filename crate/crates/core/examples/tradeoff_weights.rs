//! How trade-offs become decision weights, and how guardrails shift them.
//!
//! A trade-off `lambda_j` is "how much I would give up on metric j to gain one unit of the
//! reference value"; weights are proportional to `1 / lambda_j` and sum to 1 in absolute value.

use launch_decision::risk::{g_transform, guardrail, weight_share, LossSpec};

fn main() -> launch_decision::Result<()> {
    for lambda in [
        vec![1.0, 99.0],
        vec![1.0, 1.0],
        vec![-100.0, 1.0],
        vec![2.0, 0.0, 8.0],
    ] {
        let g = g_transform(&lambda)?;
        println!("lambda = {lambda:?}  ->  weights = {:?}", g.as_slice());
    }

    // rescaling every trade-off leaves the weights unchanged
    let base = g_transform(&[3.0, -7.0, 11.0])?;
    let scaled = g_transform(&[3.0 * 1024.0, -7.0 * 1024.0, 11.0 * 1024.0])?;
    println!(
        "\nscale invariance: {:?} == {:?}",
        base.as_slice(),
        scaled.as_slice()
    );

    // a guardrail inflates the valuation of one metric
    let loss = LossSpec::linear(vec![1.0, 1.0], 0.0, 0.0)?;
    for inflation in [1.0, 9.0, 99.0] {
        let guarded = guardrail(&loss, 1, inflation)?;
        println!(
            "guardrail x{inflation:<4} on metric 2: lambda = {:?}, weight share = {:.3}",
            guarded.tradeoffs,
            weight_share(&guarded, 1)?
        );
    }
    Ok(())
}
