//! Surrogate-based minimization of scalarized multi-objective functions.
//!
//! The loop evaluates the objective on an initial design, then repeatedly
//! scalarizes the full evaluation history through a pluggable
//! multi-objective-to-single-objective hook (weighted sum or
//! desirability), fits a Gaussian process to the best-scoring points, and
//! evaluates the objective where the infill criterion peaks, until the
//! evaluation budget is spent.

mod gp;

pub use gp::{ei_value, expected_improvement, gp_fit, GpModel, KernelConfig};

use ndarray::{Array2, ArrayView2, Axis};
use rand::Rng;
use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::desirability::OverallDesirability;
use crate::error::{Error, Result};
use crate::optim::{nelder_mead, NmOptions};
use crate::run::{Phase, RunResult, RunStatus};

/// Latin hypercube sample: `n` points, one per equal-width stratum in
/// every dimension, deterministic for a seed.
pub fn lhs_sample(n: usize, bounds: &[(f64, f64)], seed: u64) -> Result<Array2<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    lhs_sample_with_rng(n, bounds, &mut rng)
}

fn lhs_sample_with_rng(
    n: usize,
    bounds: &[(f64, f64)],
    rng: &mut ChaCha8Rng,
) -> Result<Array2<f64>> {
    if n < 1 {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    check_bounds(bounds)?;
    let k = bounds.len();
    let mut out = Array2::zeros((n, k));
    for (j, &(lo, hi)) in bounds.iter().enumerate() {
        let mut strata: Vec<usize> = (0..n).collect();
        // Fisher-Yates with the shared stream
        for i in (1..n).rev() {
            let pick = rng.random_range(0..=i);
            strata.swap(i, pick);
        }
        for (i, &s) in strata.iter().enumerate() {
            let u: f64 = rng.random();
            out[[i, j]] = lo + (hi - lo) * (s as f64 + u) / n as f64;
        }
    }
    Ok(out)
}

fn check_bounds(bounds: &[(f64, f64)]) -> Result<()> {
    if bounds.is_empty() {
        return Err(Error::invalid("need at least one dimension"));
    }
    for &(lo, hi) in bounds {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid("bounds must be finite with low < high"));
        }
    }
    Ok(())
}

/// Row-wise weighted sum of a multi-objective outcome matrix.
pub fn aggregate_weighted(y: &ArrayView2<f64>, weights: &[f64]) -> Result<Vec<f64>> {
    if y.ncols() != weights.len() {
        return Err(Error::shape(format!(
            "{} weights for {} objective columns",
            weights.len(),
            y.ncols()
        )));
    }
    Ok(y.rows()
        .into_iter()
        .map(|row| row.iter().zip(weights).map(|(v, w)| v * w).sum())
        .collect())
}

/// `1 - overall_desirability` per outcome row, so that minimizing the
/// scalar maximizes desirability.
pub fn desirability_mo2so(y: &ArrayView2<f64>, overall: &OverallDesirability) -> Result<Vec<f64>> {
    Ok(overall.predict(y)?.into_iter().map(|d| 1.0 - d).collect())
}

/// Indices of rows not dominated by any other row, with every column
/// minimized. Used for the Pareto export of multi-objective traces.
pub fn non_dominated_indices(y: &ArrayView2<f64>) -> Vec<usize> {
    let dominates = |a: ndarray::ArrayView1<f64>, b: ndarray::ArrayView1<f64>| {
        a.iter().zip(b.iter()).all(|(x, y)| x <= y) && a.iter().zip(b.iter()).any(|(x, y)| x < y)
    };
    (0..y.nrows())
        .filter(|&i| !(0..y.nrows()).any(|j| j != i && dominates(y.row(j), y.row(i))))
        .collect()
}

/// Infill criterion for picking the next evaluation point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfillCriterion {
    /// Maximize expected improvement over the incumbent.
    ExpectedImprovement,
    /// Greedily minimize the posterior mean.
    PosteriorMean,
}

/// What to do when the objective returns a non-finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailurePolicy {
    /// Keep going; failed rows scalarize to the worst finite value seen.
    RecordWorst,
    /// Abort the run with an error.
    Abort,
}

/// Where the initial design comes from.
#[derive(Debug, Clone)]
pub enum InitialDesign {
    /// A fresh Latin hypercube of `n_initial` points.
    LatinHypercube,
    /// Caller-provided points (row count overrides `n_initial`).
    Provided(Array2<f64>),
}

/// Configuration of a surrogate-based optimization run.
#[derive(Debug, Clone)]
pub struct SboConfig {
    pub bounds: Vec<(f64, f64)>,
    /// Size of the initial design (>= 2).
    pub n_initial: usize,
    /// Total evaluation budget, including the initial design.
    pub max_iter: usize,
    pub seed: u64,
    /// Cap on GP training points; the best-scoring points are kept, plus
    /// the most recent evaluation.
    pub max_surrogate_points: usize,
    pub infill: InfillCriterion,
    pub kernel: KernelConfig,
    /// Random restarts for each hyperparameter fit.
    pub gp_restarts: usize,
    pub on_failure: FailurePolicy,
    pub initial_design: InitialDesign,
}

impl SboConfig {
    pub fn new(bounds: Vec<(f64, f64)>) -> Self {
        SboConfig {
            bounds,
            n_initial: 10,
            max_iter: 50,
            seed: 0,
            max_surrogate_points: 30,
            infill: InfillCriterion::ExpectedImprovement,
            kernel: KernelConfig::default(),
            gp_restarts: 8,
            on_failure: FailurePolicy::RecordWorst,
            initial_design: InitialDesign::LatinHypercube,
        }
    }

    fn validate(&self) -> Result<usize> {
        check_bounds(&self.bounds)?;
        let n_initial = match &self.initial_design {
            InitialDesign::LatinHypercube => self.n_initial,
            InitialDesign::Provided(m) => {
                if m.ncols() != self.bounds.len() {
                    return Err(Error::shape(format!(
                        "provided design has {} columns for {} bounds",
                        m.ncols(),
                        self.bounds.len()
                    )));
                }
                m.nrows()
            }
        };
        if n_initial < 2 {
            return Err(Error::invalid("initial design needs at least 2 points"));
        }
        if self.max_iter < n_initial {
            return Err(Error::invalid(
                "evaluation budget must cover the initial design",
            ));
        }
        if self.max_surrogate_points < 2 {
            return Err(Error::invalid("max_surrogate_points must be at least 2"));
        }
        Ok(n_initial)
    }
}

/// Indices of the GP training subset: the `cap` best-scoring points, with
/// the most recent evaluation forced in.
fn select_training(values: &[f64], cap: usize) -> Vec<usize> {
    let n = values.len();
    if n <= cap {
        return (0..n).collect();
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut selected: Vec<usize> = order[..cap].to_vec();
    let latest = n - 1;
    if !selected.contains(&latest) {
        selected[cap - 1] = latest;
    }
    selected.sort_unstable();
    selected
}

/// Scalarize the full history through the hook. Failed rows (any
/// non-finite objective output) never reach the hook; their scalar value
/// is the worst finite value in the history.
fn scalarize(
    mo2so: &mut dyn FnMut(&ArrayView2<f64>) -> Result<Vec<f64>>,
    y_mo: &Array2<f64>,
    failed: &[bool],
) -> Result<Vec<f64>> {
    let n = y_mo.nrows();
    if failed.iter().any(|&f| f) {
        let ok_rows: Vec<usize> = (0..n).filter(|&i| !failed[i]).collect();
        if ok_rows.is_empty() {
            return Err(Error::invalid("every objective evaluation failed"));
        }
        let subset = y_mo.select(Axis(0), &ok_rows);
        let scored = mo2so(&subset.view())?;
        if scored.len() != ok_rows.len() {
            return Err(Error::shape(
                "mo2so returned the wrong number of scalars".to_string(),
            ));
        }
        let worst = scored.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut full = vec![worst; n];
        for (pos, &i) in ok_rows.iter().enumerate() {
            full[i] = scored[pos];
        }
        Ok(full)
    } else {
        let scored = mo2so(&y_mo.view())?;
        if scored.len() != n {
            return Err(Error::shape(
                "mo2so returned the wrong number of scalars".to_string(),
            ));
        }
        if let Some(bad) = scored.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "mo2so produced a non-finite scalar ({bad})"
            )));
        }
        Ok(scored)
    }
}

/// Maximize the infill criterion over the box: score 256 random
/// candidates, refine the best 4 with the simplex optimizer, clip to the
/// bounds, and return the overall winner.
fn propose_infill(
    model: &GpModel,
    bounds: &[(f64, f64)],
    best_y: f64,
    infill: InfillCriterion,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    const N_CANDIDATES: usize = 256;
    const N_REFINED: usize = 4;
    let clamp = |x: &[f64]| -> Vec<f64> {
        x.iter()
            .zip(bounds)
            .map(|(v, &(lo, hi))| v.clamp(lo, hi))
            .collect()
    };
    // lower is better for both criteria
    let score = |x: &[f64]| -> f64 {
        match infill {
            InfillCriterion::ExpectedImprovement => -expected_improvement(model, x, best_y),
            InfillCriterion::PosteriorMean => model.predict_point(x).0,
        }
    };

    let mut candidates: Vec<(Vec<f64>, f64)> = (0..N_CANDIDATES)
        .map(|_| {
            let x: Vec<f64> = bounds
                .iter()
                .map(|&(lo, hi)| rng.random_range(lo..hi))
                .collect();
            let s = score(&x);
            (x, s)
        })
        .collect();

    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| {
        candidates[a]
            .1
            .partial_cmp(&candidates[b].1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });

    let nm = NmOptions {
        max_iter: 120,
        ..NmOptions::default()
    };
    for &idx in order.iter().take(N_REFINED) {
        let start = candidates[idx].0.clone();
        if let Ok(run) = nelder_mead(|x| score(&clamp(x)), &start, &nm) {
            let x = clamp(&run.best_x);
            let s = score(&x);
            candidates.push((x, s));
        }
    }

    let mut best = 0;
    for (i, c) in candidates.iter().enumerate() {
        if c.1 < candidates[best].1 {
            best = i;
        }
    }
    candidates.swap_remove(best).0
}

/// Minimize a multi-output objective under a scalarization hook.
///
/// `objective` maps a batch of points (rows) to a matrix of objective
/// values (one row per point, one column per objective). `mo2so` maps the
/// full multi-objective history to one scalar per row and is invoked once
/// per surrogate iteration plus once to produce the reported trace.
pub fn sbo_minimize(
    mut objective: impl FnMut(&ArrayView2<f64>) -> Array2<f64>,
    mut mo2so: impl FnMut(&ArrayView2<f64>) -> Result<Vec<f64>>,
    config: &SboConfig,
) -> Result<RunResult> {
    let n_initial = config.validate()?;
    let k = config.bounds.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut x_all = match &config.initial_design {
        InitialDesign::LatinHypercube => lhs_sample_with_rng(n_initial, &config.bounds, &mut rng)?,
        InitialDesign::Provided(m) => m.clone(),
    };
    let mut y_mo = objective(&x_all.view());
    if y_mo.nrows() != n_initial || y_mo.ncols() == 0 {
        return Err(Error::shape(format!(
            "objective returned {}x{} for {} points",
            y_mo.nrows(),
            y_mo.ncols(),
            n_initial
        )));
    }
    let mut failed: Vec<bool> = y_mo
        .rows()
        .into_iter()
        .map(|r| r.iter().any(|v| !v.is_finite()))
        .collect();
    if config.on_failure == FailurePolicy::Abort && failed.iter().any(|&f| f) {
        return Err(Error::invalid("objective returned a non-finite value"));
    }

    let mut iterations = 0;
    while x_all.nrows() < config.max_iter {
        let values = scalarize(&mut mo2so, &y_mo, &failed)?;
        let subset = select_training(&values, config.max_surrogate_points);
        let x_train = x_all.select(Axis(0), &subset);
        let y_train: Vec<f64> = subset.iter().map(|&i| values[i]).collect();
        let fit_seed = rng.next_u64();
        let model = gp_fit(
            &x_train.view(),
            &y_train,
            &config.kernel,
            config.gp_restarts,
            fit_seed,
        )?;
        let best_y = values.iter().copied().fold(f64::INFINITY, f64::min);

        let x_new = propose_infill(&model, &config.bounds, best_y, config.infill, &mut rng);
        let x_row = Array2::from_shape_vec((1, k), x_new).expect("one proposal row");
        let y_new = objective(&x_row.view());
        if y_new.nrows() != 1 || y_new.ncols() != y_mo.ncols() {
            return Err(Error::shape(format!(
                "objective returned {}x{}, expected 1x{}",
                y_new.nrows(),
                y_new.ncols(),
                y_mo.ncols()
            )));
        }
        let row_failed = y_new.row(0).iter().any(|v| !v.is_finite());
        if config.on_failure == FailurePolicy::Abort && row_failed {
            return Err(Error::invalid("objective returned a non-finite value"));
        }
        failed.push(row_failed);
        x_all.push_row(x_row.row(0)).expect("same width");
        y_mo.push_row(y_new.row(0)).expect("same width");
        iterations += 1;
    }

    let values = scalarize(&mut mo2so, &y_mo, &failed)?;
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    let mut phases = vec![Phase::Initial; n_initial];
    phases.extend(std::iter::repeat_n(
        Phase::Infill,
        x_all.nrows() - n_initial,
    ));
    Ok(RunResult {
        best_x: x_all.row(best).to_vec(),
        best_value: values[best],
        num_evaluations: x_all.nrows(),
        evaluations: x_all,
        values,
        multi_values: Some(y_mo),
        phases: Some(phases),
        iterations,
        status: RunStatus::MaxIterReached,
    })
}
