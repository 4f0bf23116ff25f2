//! Launch/roll-back regions over a grid of trade-offs, printed as a character map.

use launch_decision::posterior::summarize;
use launch_decision::prior::ShrinkageLevel;
use launch_decision::risk::{decision_space, Axis, GridDecision, SpaceSpec};
use launch_decision::Gaussian;
use nalgebra::{DMatrix, DVector};

fn render(title: &str, tau: [f64; 2]) -> launch_decision::Result<()> {
    let post = Gaussian::new(
        DVector::from_row_slice(&tau),
        DMatrix::from_row_slice(2, 2, &[25.0, 5.0, 5.0, 100.0]),
    )?;
    let summary = summarize(&post, ShrinkageLevel::ONE);
    let values = |lo: f64, hi: f64, n: usize| {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect::<Vec<_>>()
    };
    let spec = SpaceSpec {
        axis1: Axis {
            metric: 0,
            values: values(0.1, 10.0, 12),
        },
        axis2: Axis {
            metric: 1,
            values: values(-10.0, 10.0, 41),
        },
        fixed: vec![0.0, 0.0],
        c0: 0.0,
        c1: 0.0,
    };
    let grid = decision_space(&summary, &spec)?;
    println!("{title}: tau = {tau:?}  (rows: lambda1, columns: lambda2 from -10 to 10; L launch, . rollback)");
    for r in 0..grid.rows {
        let row: String = (0..grid.cols)
            .map(|c| match grid.cells[r * grid.cols + c].decision {
                GridDecision::Launch => 'L',
                GridDecision::Rollback => '.',
                GridDecision::Skipped => '?',
            })
            .collect();
        println!("{:>6.2} {row}", grid.cells[r * grid.cols].lambda1);
    }
    println!();
    Ok(())
}

fn main() -> launch_decision::Result<()> {
    render(
        "harmful on the valued metric, rising on the other",
        [-31.0, 91.0],
    )?;
    render("mixed effects", [4.0, -6.0])?;
    Ok(())
}
