//! Surrogate-based optimization of the chemical reaction: a Gaussian
//! process with a Matern 5/2 kernel models `1 - overall desirability`
//! and expected improvement picks each new evaluation.
//!
//! ```bash
//! cargo run --example surrogate_chemical
//! ```

use desira::desirability::{Desirability, OverallDesirability};
use desira::rsm::{activity_pred, chemical_objectives, conversion_pred};
use desira::surrogate::{desirability_mo2so, sbo_minimize, SboConfig};

fn main() -> desira::Result<()> {
    let overall = OverallDesirability::new(vec![
        Desirability::max(80.0, 97.0)?,
        Desirability::target(55.0, 57.5, 60.0)?,
    ])?;

    let config = SboConfig {
        n_initial: 15,
        max_iter: 50,
        seed: 126,
        max_surrogate_points: 30,
        ..SboConfig::new(vec![(-1.7, 1.7); 3])
    };
    let run = sbo_minimize(
        |x| chemical_objectives(x).expect("finite points"),
        |y| desirability_mo2so(y, &overall),
        &config,
    )?;

    println!(
        "Evaluations: {} (surrogate iterations: {})",
        run.num_evaluations, run.iterations
    );
    println!("Best 1 - desirability: {:.6}", run.best_value);
    println!("Best desirability:     {:.6}", 1.0 - run.best_value);
    let best = &run.best_x;
    println!(
        "Best parameters: [{:.6}, {:.6}, {:.6}]",
        best[0], best[1], best[2]
    );
    println!("Conversion(best) = {:.4}", conversion_pred(best)?);
    println!("Activity(best)   = {:.4}", activity_pred(best)?);

    // best-so-far curve, one line per improvement
    println!("\nprogress:");
    let mut best_so_far = f64::INFINITY;
    for (i, &y) in run.values.iter().enumerate() {
        if y < best_so_far {
            best_so_far = y;
            println!("  eval {i:>2}: best 1-D = {best_so_far:.6}");
        }
    }
    Ok(())
}
