//! Space-fillingness as an objective: starting from a deliberately poor
//! clustered design, the driver scores candidate points by both their
//! objective improvement and their coverage improvement (geometric-mean
//! desirability) for ten scalarization calls, then switches to chasing
//! the objective alone. The infill diagnostics locate the suggested best
//! point relative to the original design.
//!
//! ```bash
//! cargo run --example explore_exploit
//! ```

use desira::desirability::Desirability;
use desira::run::Phase;
use desira::spacefill::{
    ackley, clustered_design, estimate_improvement_ceiling, explore_exploit_run,
    infill_diagnostics, ExploreExploitConfig,
};
use ndarray::Array2;

fn ackley_point(x: &[f64]) -> f64 {
    let m = Array2::from_shape_vec((1, x.len()), x.to_vec()).expect("one row");
    ackley(&m.view())[0]
}

fn main() -> desira::Result<()> {
    let bounds = vec![(-2.0, 2.0), (-2.0, 2.0)];
    let x0 = clustered_design(10, &[1.0, 1.0], 0.1, &bounds, 21)?;

    let baseline = x0
        .points()
        .rows()
        .into_iter()
        .map(|r| ackley_point(r.as_slice().expect("contiguous row")))
        .fold(f64::INFINITY, f64::min);
    println!("baseline best f over the clustered design: {baseline:.4}");

    // calibrate the objective-improvement desirability from 1000 random
    // samples; coverage improvements beyond ~1 are fully desirable
    let ceiling = estimate_improvement_ceiling(ackley_point, &bounds, baseline, 1000, 34)?;
    println!("estimated improvement ceiling: {ceiling:.4}");
    let d_obj = Desirability::max(0.0, ceiling)?;
    let d_mm = Desirability::max_with_scale(-0.1, 1.1, 2.0)?;

    let config = ExploreExploitConfig {
        budget: 40,
        switch_after: 10,
        n_initial: 10,
        seed: 17,
        ..ExploreExploitConfig::new(bounds)
    };
    let result = explore_exploit_run(ackley_point, &x0, &d_obj, &d_mm, &config)?;

    println!(
        "best f(x) = {:.6} at [{:.5}, {:.5}]",
        result.best_f, result.best_x[0], result.best_x[1]
    );
    println!("desirability calls: {}", result.desirability_calls);

    let phases = result.run.phases.as_ref().expect("driver tags phases");
    println!("\nselections by phase:");
    for phase in [Phase::Initial, Phase::Explore, Phase::Exploit] {
        let indices: Vec<usize> = phases
            .iter()
            .enumerate()
            .filter(|(_, p)| **p == phase)
            .map(|(i, _)| i)
            .collect();
        println!("  {:<8} {} points", phase.label(), indices.len());
    }

    println!("\ninfill diagnostics (best point vs. original design):");
    println!("  dim      min   median      max     best  percentile");
    for d in infill_diagnostics(&x0, &result.best_x, 8)? {
        println!(
            "  {:>3} {:>8.3} {:>8.3} {:>8.3} {:>8.3} {:>10.1}",
            d.dimension + 1,
            d.summary.min,
            d.summary.median,
            d.summary.max,
            d.best_coordinate,
            d.percentile
        );
    }
    println!("\nthe best point sits far outside the clustered design, as the");
    println!("low percentile ranks show");
    Ok(())
}
