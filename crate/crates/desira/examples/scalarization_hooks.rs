//! Two ways to collapse a bi-objective problem into one score: a weighted
//! sum and a desirability aggregation, compared on a synthetic problem
//! whose objectives pull in opposite directions (accuracy-vs-cost style).
//!
//! ```bash
//! cargo run --example scalarization_hooks
//! ```

use desira::desirability::{Desirability, OverallDesirability};
use desira::surrogate::{
    aggregate_weighted, desirability_mo2so, non_dominated_indices, sbo_minimize, SboConfig,
};
use ndarray::{Array2, ArrayView2};

/// Synthetic stand-in for a tuning problem: objective 1 ("error") falls
/// toward x = (0.7, 0.2); objective 2 ("cost") grows with x[1].
fn objectives(x: &ArrayView2<f64>) -> Array2<f64> {
    let mut y = Array2::zeros((x.nrows(), 2));
    for (i, row) in x.rows().into_iter().enumerate() {
        let error = 40.0 * ((row[0] - 0.7).powi(2) + (row[1] - 0.2).powi(2)) + 2.0;
        let cost = 10.0 + 90.0 * row[1];
        y[[i, 0]] = error;
        y[[i, 1]] = cost;
    }
    y
}

fn main() -> desira::Result<()> {
    let bounds = vec![(0.0, 1.0), (0.0, 1.0)];

    // weighted sum: error counts double, cost one-tenth
    let weighted = SboConfig {
        n_initial: 10,
        max_iter: 40,
        seed: 42,
        ..SboConfig::new(bounds.clone())
    };
    let run_w = sbo_minimize(
        objectives,
        |y| aggregate_weighted(y, &[2.0, 0.1]),
        &weighted,
    )?;
    let y_w = run_w.multi_values.as_ref().expect("bi-objective trace");
    let best_w = run_w.best_index();
    println!("weighted sum (2.0, 0.1):");
    println!("  best score = {:.4}", run_w.best_value);
    println!(
        "  error = {:.3}, cost = {:.3} at x = [{:.3}, {:.3}]",
        y_w[[best_w, 0]],
        y_w[[best_w, 1]],
        run_w.best_x[0],
        run_w.best_x[1]
    );

    // desirability: error below 2 is ideal and above 60 unacceptable,
    // cost below 10 ideal and above 100 unacceptable
    let overall = OverallDesirability::new(vec![
        Desirability::min_with_scale(2.0, 60.0, 2.0)?,
        Desirability::min_with_scale(10.0, 100.0, 0.2)?,
    ])?;
    let desirable = SboConfig {
        n_initial: 10,
        max_iter: 40,
        seed: 42,
        ..SboConfig::new(bounds)
    };
    let run_d = sbo_minimize(objectives, |y| desirability_mo2so(y, &overall), &desirable)?;
    let y_d = run_d.multi_values.as_ref().expect("bi-objective trace");
    let best_d = run_d.best_index();
    println!("\ndesirability (min error, min cost):");
    println!(
        "  best 1-D = {:.4} (D = {:.4})",
        run_d.best_value,
        1.0 - run_d.best_value
    );
    println!(
        "  error = {:.3}, cost = {:.3} at x = [{:.3}, {:.3}]",
        y_d[[best_d, 0]],
        y_d[[best_d, 1]],
        run_d.best_x[0],
        run_d.best_x[1]
    );

    // the trade-off surface explored by the desirability run
    let front = non_dominated_indices(&y_d.view());
    println!("\nnon-dominated evaluations (error, cost):");
    for &i in &front {
        println!("  eval {i:>2}: ({:.3}, {:.3})", y_d[[i, 0]], y_d[[i, 1]]);
    }
    Ok(())
}
