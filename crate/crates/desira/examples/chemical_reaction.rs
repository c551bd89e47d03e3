//! The classic two-response chemical-reaction optimization: maximize
//! percent conversion while holding thermal activity near 57.5, by
//! maximizing the overall desirability with multistart Nelder-Mead over
//! a constrained design region.
//!
//! ```bash
//! cargo run --example chemical_reaction
//! ```

use desira::desirability::{Desirability, OverallDesirability};
use desira::optim::{
    grid_starts, multistart_maximize_desirability, rsm_opt, NmOptions, PredictionFn, Region,
};
use desira::rsm::{activity_pred, conversion_pred};
use ndarray::array;

fn main() -> desira::Result<()> {
    // conversion is larger-is-better on [80, 97]; activity targets 57.5
    let conversion_d = Desirability::max(80.0, 97.0)?;
    let activity_d = Desirability::target(55.0, 57.5, 60.0)?;
    let overall = OverallDesirability::new(vec![conversion_d, activity_d])?;

    // score the center of the experimental design first
    let center = [0.0, 0.0, 0.0];
    let outcomes = array![[conversion_pred(&center)?, activity_pred(&center)?]];
    let (d, individual) = overall.predict_all(&outcomes.view())?;
    println!("Center point [0, 0, 0]:");
    println!(
        "  conversion = {:.2} -> desirability {:.8}",
        outcomes[[0, 0]],
        individual[[0, 0]]
    );
    println!(
        "  activity   = {:.2} -> desirability {:.8}",
        outcomes[[0, 1]],
        individual[[0, 1]]
    );
    println!("  overall desirability = {:.8}", d[0]);
    println!();

    let preds: [PredictionFn<'_>; 2] = [
        &|x: &[f64]| conversion_pred(x).expect("finite point"),
        &|x: &[f64]| activity_pred(x).expect("finite point"),
    ];
    let starts = grid_starts(-1.5, 1.5, 5, 3)?;

    for region in [
        Region::Square { alpha: 1.682 },
        Region::Circular { alpha: 1.682 },
    ] {
        let run = multistart_maximize_desirability(
            &overall,
            &preds,
            &region,
            &starts.view(),
            &NmOptions::default(),
        )?;
        let best = &run.best_x;
        println!("{region:?}:");
        println!(
            "  best parameters  = [{:.6}, {:.6}, {:.6}]",
            best[0], best[1], best[2]
        );
        println!("  best desirability = {:.10}", -run.best_value);
        println!("  conversion(best) = {:.6}", conversion_pred(best)?);
        println!("  activity(best)   = {:.6}", activity_pred(best)?);

        // the optimizer sees only the penalized negative desirability
        let objective = rsm_opt(best, &overall, &preds, &region)?;
        println!("  objective at best = {objective:.10}");
        println!();
    }
    Ok(())
}
