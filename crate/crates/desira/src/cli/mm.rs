//! Space-filling commands: criterion evaluation, improvement scoring, and
//! the explore/exploit driver.

use std::fs;
use std::io::Write;

use ndarray::Array2;

use crate::desirability::Desirability;
use crate::io::{fmt_full, fmt_short, parse_float_row};
use crate::spacefill::{
    ackley, estimate_improvement_ceiling, explore_exploit_run, infill_diagnostics, mm_improvement,
    mmphi, mmphi_intensive, ExploreExploitConfig, MmParams, SamplingPlan,
};

use super::{CliError, CliResult, MmEvalArgs, MmExploreArgs, MmImproveArgs};

fn load_plan(path: &std::path::Path) -> Result<SamplingPlan, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    SamplingPlan::from_csv(&text).map_err(CliError::from)
}

pub(super) fn eval(args: &MmEvalArgs, out: &mut dyn Write) -> CliResult {
    let plan = load_plan(&args.design)?;
    let params = MmParams {
        q: args.q,
        p: args.p,
    };
    let phi = mmphi(&plan, &params)?;
    let (intensive, profile) = mmphi_intensive(&plan, &params)?;
    writeln!(out, "Points: {} ({}-dimensional)", plan.len(), plan.dim())?;
    writeln!(out, "Phi_q: {phi}")?;
    writeln!(out, "Phi_q intensive: {intensive}")?;
    let ds: Vec<String> = profile.distances.iter().map(|d| d.to_string()).collect();
    let js: Vec<String> = profile
        .multiplicities
        .iter()
        .map(|j| j.to_string())
        .collect();
    writeln!(out, "Distinct distances: {}", ds.join(" "))?;
    writeln!(out, "Multiplicities: {}", js.join(" "))?;
    Ok(())
}

pub(super) fn improve(args: &MmImproveArgs, out: &mut dyn Write) -> CliResult {
    let plan = load_plan(&args.design)?;
    let point =
        parse_float_row(&args.point).map_err(|e| CliError::usage(format!("bad --point: {e}")))?;
    let params = MmParams {
        q: args.q,
        p: args.p,
    };
    let (before, _) = mmphi_intensive(&plan, &params)?;
    let improvement = mm_improvement(&plan, &point, &params)?;
    writeln!(out, "Phi_q intensive before: {before}")?;
    writeln!(out, "Phi_q intensive after: {}", before - improvement)?;
    writeln!(out, "Improvement: {improvement}")?;
    Ok(())
}

pub(super) fn explore(args: &MmExploreArgs, out: &mut dyn Write) -> CliResult {
    let plan = load_plan(&args.design)?;
    let bounds: Vec<(f64, f64)> = match &args.bounds {
        Some(raw) => {
            let mut out = Vec::new();
            for pair in raw.split_whitespace() {
                let (lo, hi) = pair
                    .split_once(':')
                    .ok_or_else(|| CliError::usage("bounds entries must be `low:high`"))?;
                let lo: f64 = lo
                    .parse()
                    .map_err(|_| CliError::usage("non-numeric bound"))?;
                let hi: f64 = hi
                    .parse()
                    .map_err(|_| CliError::usage("non-numeric bound"))?;
                out.push((lo, hi));
            }
            out
        }
        None => vec![(-2.0, 2.0); plan.dim()],
    };

    let ackley_point = |x: &[f64]| {
        let m = Array2::from_shape_vec((1, x.len()), x.to_vec()).expect("one row");
        ackley(&m.view())[0]
    };
    let baseline_best = plan
        .points()
        .rows()
        .into_iter()
        .map(|r| ackley_point(r.as_slice().expect("contiguous row")))
        .fold(f64::INFINITY, f64::min);
    let ceiling = estimate_improvement_ceiling(
        ackley_point,
        &bounds,
        baseline_best,
        1000,
        args.seed.wrapping_add(1),
    )?;
    writeln!(out, "Baseline best f: {}", fmt_short(baseline_best))?;
    writeln!(out, "Improvement ceiling: {}", fmt_short(ceiling))?;

    let d_obj = Desirability::max(0.0, ceiling.max(1e-6))?;
    let d_mm = Desirability::max_with_scale(-0.1, 1.1, 2.0)?;
    let config = ExploreExploitConfig {
        budget: args.budget,
        switch_after: args.switch_after,
        n_initial: args.n_initial,
        seed: args.seed,
        mm: MmParams {
            q: args.q,
            p: args.p,
        },
        ..ExploreExploitConfig::new(bounds)
    };
    let result = explore_exploit_run(ackley_point, &plan, &d_obj, &d_mm, &config)?;

    writeln!(out, "Best f: {}", fmt_short(result.best_f))?;
    let xs: Vec<String> = result.best_x.iter().map(|&v| fmt_short(v)).collect();
    writeln!(out, "Best x: [{}]", xs.join(", "))?;
    let phases = result.run.phases.as_ref().expect("driver tags phases");
    let explore_n = phases
        .iter()
        .filter(|p| **p == crate::run::Phase::Explore)
        .count();
    let exploit_n = phases
        .iter()
        .filter(|p| **p == crate::run::Phase::Exploit)
        .count();
    writeln!(
        out,
        "Selections: {} warmup, {explore_n} explore, {exploit_n} exploit",
        args.n_initial
    )?;

    let dir = super::resolve_out_dir(&args.out, None);
    fs::create_dir_all(&dir)?;
    let trace = dir.join("trace.csv");
    result.run.write_trace_csv(&mut fs::File::create(&trace)?)?;
    writeln!(out, "wrote {}", trace.display())?;
    let summary = dir.join("summary.json");
    result.run.write_summary(&mut fs::File::create(&summary)?)?;
    writeln!(out, "wrote {}", summary.display())?;

    let diagnostics = infill_diagnostics(&plan, &result.best_x, args.bins)?;
    let path = dir.join("diagnostics.csv");
    let mut file = fs::File::create(&path)?;
    writeln!(file, "dimension,bin_low,bin_high,count")?;
    for d in &diagnostics {
        for b in 0..d.counts.len() {
            writeln!(
                file,
                "{},{},{},{}",
                d.dimension + 1,
                fmt_full(d.bin_edges[b]),
                fmt_full(d.bin_edges[b + 1]),
                d.counts[b]
            )?;
        }
    }
    writeln!(out, "wrote {}", path.display())?;

    writeln!(
        out,
        "dim      min       q1   median       q3      max     best percentile"
    )?;
    for d in &diagnostics {
        writeln!(
            out,
            "{:>3} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>10}",
            d.dimension + 1,
            fmt_short(d.summary.min),
            fmt_short(d.summary.q1),
            fmt_short(d.summary.median),
            fmt_short(d.summary.q3),
            fmt_short(d.summary.max),
            fmt_short(d.best_coordinate),
            fmt_short(d.percentile)
        )?;
    }
    Ok(())
}
