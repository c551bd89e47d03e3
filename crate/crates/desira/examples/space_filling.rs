//! Scoring sampling plans with the Morris-Mitchell criterion, its
//! size-invariant intensive form, and the incremental improvement of
//! adding one point.
//!
//! ```bash
//! cargo run --example space_filling
//! ```

use desira::spacefill::{
    clustered_design, distance_profile, mm_improvement, mmphi, mmphi_intensive, MmParams,
    SamplingPlan, DISTANCE_GROUPING_TOL,
};
use desira::surrogate::lhs_sample;
use ndarray::array;

fn main() -> desira::Result<()> {
    let params = MmParams::default();

    // a tiny plan shows the distance profile directly
    let plan = SamplingPlan::new(array![[0.0, 0.0], [0.5, 0.5], [1.0, 1.0]])?;
    let profile = distance_profile(&plan, params.p, DISTANCE_GROUPING_TOL)?;
    println!("3-point diagonal plan:");
    println!("  distinct distances: {:?}", profile.distances);
    println!("  multiplicities:     {:?}", profile.multiplicities);
    println!("  Phi_q           = {}", mmphi(&plan, &params)?);
    println!("  Phi_q intensive = {}", mmphi_intensive(&plan, &params)?.0);

    // the intensive criterion is comparable across design sizes; plain
    // Phi_q grows with the pair count even for equally good coverage
    println!("\nLatin hypercubes on [0,1]^2 (lower intensive = better spread):");
    println!("  {:>3} {:>12} {:>12}", "n", "Phi_q", "intensive");
    for n in [5usize, 10, 20, 40] {
        let lhs = SamplingPlan::new(lhs_sample(n, &[(0.0, 1.0), (0.0, 1.0)], 1)?)?;
        println!(
            "  {:>3} {:>12.4} {:>12.4}",
            n,
            mmphi(&lhs, &params)?,
            mmphi_intensive(&lhs, &params)?.0
        );
    }

    // a clustered design is poor; a far-away point improves it, another
    // point inside the cluster makes it worse
    let bounds = [(-2.0, 2.0), (-2.0, 2.0)];
    let clustered = clustered_design(10, &[1.0, 1.0], 0.1, &bounds, 21)?;
    let (phi, _) = mmphi_intensive(&clustered, &params)?;
    println!("\nclustered design around (1, 1): intensive = {phi:.4}");
    for candidate in [[-1.5, -1.5], [0.0, 0.0], [1.0, 1.02]] {
        let improvement = mm_improvement(&clustered, &candidate, &params)?;
        println!(
            "  adding ({:>4.1}, {:>5.2}): improvement = {improvement:>8.4}",
            candidate[0], candidate[1]
        );
    }
    Ok(())
}
