//! Nelder-Mead simplex minimization with multistart, plus the
//! penalty-wrapped desirability objective over a constrained design region.

use ndarray::{Array2, ArrayView2};

use crate::desirability::OverallDesirability;
use crate::error::{Error, Result};
use crate::run::{RunResult, RunStatus};

/// Nelder-Mead options. Defaults: textbook coefficients, tight simplex
/// tolerances, 1000 iterations.
#[derive(Debug, Clone)]
pub struct NmOptions {
    pub max_iter: usize,
    /// Converged when the simplex spread in x (infinity norm to the best
    /// vertex) drops below this...
    pub x_tol: f64,
    /// ...and the spread in f does too.
    pub f_tol: f64,
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
}

impl Default for NmOptions {
    fn default() -> Self {
        NmOptions {
            max_iter: 1000,
            x_tol: 1e-8,
            f_tol: 1e-8,
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
        }
    }
}

impl NmOptions {
    fn validate(&self) -> Result<()> {
        if !(self.reflection > 0.0
            && self.expansion > 1.0
            && self.contraction > 0.0
            && self.contraction < 1.0
            && self.shrink > 0.0
            && self.shrink < 1.0)
        {
            return Err(Error::invalid(
                "need reflection > 0, expansion > 1, contraction and shrink in (0, 1)",
            ));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter must be positive"));
        }
        Ok(())
    }
}

/// The constrained design region for desirability maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    /// All coordinates within `[-alpha, alpha]`.
    Square { alpha: f64 },
    /// Euclidean norm within `alpha`.
    Circular { alpha: f64 },
}

impl Region {
    pub fn alpha(&self) -> f64 {
        match self {
            Region::Square { alpha } | Region::Circular { alpha } => *alpha,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::Square { alpha } => x.iter().all(|v| v.abs() <= *alpha),
            Region::Circular { alpha } => x.iter().map(|v| v * v).sum::<f64>().sqrt() <= *alpha,
        }
    }

    fn validate(&self) -> Result<()> {
        let a = self.alpha();
        if a.is_finite() && a > 0.0 {
            Ok(())
        } else {
            Err(Error::invalid("region alpha must be positive"))
        }
    }
}

/// A prediction function feeding one outcome column.
pub type PredictionFn<'a> = &'a (dyn Fn(&[f64]) -> f64 + Sync);

/// Penalized negative overall desirability: `0.0` outside the region,
/// `-D(predictions(x))` inside. Minimizing this maximizes desirability.
pub fn rsm_opt(
    x: &[f64],
    overall: &OverallDesirability,
    prediction_funcs: &[PredictionFn<'_>],
    region: &Region,
) -> Result<f64> {
    region.validate()?;
    if overall.len() != prediction_funcs.len() {
        return Err(Error::shape(format!(
            "{} desirability components for {} prediction functions",
            overall.len(),
            prediction_funcs.len()
        )));
    }
    Ok(rsm_opt_unchecked(x, overall, prediction_funcs, region))
}

fn rsm_opt_unchecked(
    x: &[f64],
    overall: &OverallDesirability,
    prediction_funcs: &[PredictionFn<'_>],
    region: &Region,
) -> f64 {
    if !region.contains(x) {
        return 0.0;
    }
    let predictions: Vec<f64> = prediction_funcs.iter().map(|f| f(x)).collect();
    let outcomes = Array2::from_shape_vec((1, predictions.len()), predictions)
        .expect("one row of predictions");
    match overall.predict(&outcomes.view()) {
        Ok(d) => -d[0],
        // non-finite predictions score as worthless rather than aborting a run
        Err(_) => 0.0,
    }
}

/// Minimize `f` from `x0` with the Nelder-Mead simplex. The initial
/// simplex perturbs each coordinate by 5% of its magnitude (0.00025 for
/// zero coordinates). Returns the best point over *all* evaluations.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    options: &NmOptions,
) -> Result<RunResult> {
    options.validate()?;
    let k = x0.len();
    if k == 0 {
        return Err(Error::invalid("x0 must have at least one coordinate"));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("x0 must be finite"));
    }

    let mut trace_x: Vec<f64> = Vec::new();
    let mut trace_f: Vec<f64> = Vec::new();
    let mut eval = |x: &[f64], tx: &mut Vec<f64>, tf: &mut Vec<f64>| -> f64 {
        let v = f(x);
        tx.extend_from_slice(x);
        tf.push(v);
        v
    };

    // initial simplex
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(k + 1);
    simplex.push(x0.to_vec());
    for i in 0..k {
        let mut p = x0.to_vec();
        p[i] += if p[i] != 0.0 {
            0.05 * p[i].abs()
        } else {
            0.00025
        };
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex
        .iter()
        .map(|p| eval(p, &mut trace_x, &mut trace_f))
        .collect();

    let spread = |vals: &[f64]| -> f64 {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &v in vals {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        hi - lo
    };

    let mut status = RunStatus::MaxIterReached;
    if spread(&values) == 0.0 {
        status = RunStatus::DegenerateStart;
    }

    let mut iterations = 0;
    if status != RunStatus::DegenerateStart {
        for _ in 0..options.max_iter {
            // order vertices: best first, worst last
            let mut order: Vec<usize> = (0..=k).collect();
            order.sort_by(|&a, &b| {
                values[a]
                    .partial_cmp(&values[b])
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            let best = order[0];
            let worst = order[k];
            let second_worst = order[k - 1];

            let x_spread = simplex
                .iter()
                .map(|p| {
                    p.iter()
                        .zip(&simplex[best])
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0f64, f64::max)
                })
                .fold(0.0f64, f64::max);
            if spread(&values) < options.f_tol && x_spread < options.x_tol {
                status = RunStatus::Converged;
                break;
            }
            iterations += 1;

            // centroid of all but worst
            let mut centroid = vec![0.0; k];
            for &idx in &order[..k] {
                for (c, v) in centroid.iter_mut().zip(&simplex[idx]) {
                    *c += v;
                }
            }
            for c in centroid.iter_mut() {
                *c /= k as f64;
            }

            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[worst])
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let reflected = along(options.reflection);
            let f_reflected = eval(&reflected, &mut trace_x, &mut trace_f);

            if f_reflected < values[best] {
                let expanded = along(options.reflection * options.expansion);
                let f_expanded = eval(&expanded, &mut trace_x, &mut trace_f);
                if f_expanded < f_reflected {
                    simplex[worst] = expanded;
                    values[worst] = f_expanded;
                } else {
                    simplex[worst] = reflected;
                    values[worst] = f_reflected;
                }
                continue;
            }
            if f_reflected < values[second_worst] {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
                continue;
            }

            // contraction: outside if the reflection helped at all, inside otherwise
            let contracted = if f_reflected < values[worst] {
                along(options.reflection * options.contraction)
            } else {
                along(-options.contraction)
            };
            let f_contracted = eval(&contracted, &mut trace_x, &mut trace_f);
            if f_contracted < values[worst].min(f_reflected) {
                simplex[worst] = contracted;
                values[worst] = f_contracted;
                continue;
            }

            // shrink toward the best vertex
            let best_point = simplex[best].clone();
            for &idx in &order[1..] {
                for (p, b) in simplex[idx].iter_mut().zip(&best_point) {
                    *p = b + options.shrink * (*p - b);
                }
                values[idx] = eval(&simplex[idx].clone(), &mut trace_x, &mut trace_f);
            }
        }
    }

    let nfev = trace_f.len();
    let mut best_idx = 0;
    for (i, &v) in trace_f.iter().enumerate() {
        if v < trace_f[best_idx] {
            best_idx = i;
        }
    }
    let best_x = trace_x[best_idx * k..(best_idx + 1) * k].to_vec();
    let best_value = trace_f[best_idx];
    Ok(RunResult {
        evaluations: Array2::from_shape_vec((nfev, k), trace_x).expect("trace shape"),
        values: trace_f,
        multi_values: None,
        phases: None,
        best_x,
        best_value,
        iterations,
        num_evaluations: nfev,
        status,
    })
}

/// Run Nelder-Mead on the penalized desirability objective from every row
/// of `starts` and keep the best run (first on ties, in row order).
/// Degenerate starts (entirely infeasible initial simplexes) are skipped.
pub fn multistart_maximize_desirability(
    overall: &OverallDesirability,
    prediction_funcs: &[PredictionFn<'_>],
    region: &Region,
    starts: &ArrayView2<f64>,
    options: &NmOptions,
) -> Result<RunResult> {
    region.validate()?;
    if overall.len() != prediction_funcs.len() {
        return Err(Error::shape(format!(
            "{} desirability components for {} prediction functions",
            overall.len(),
            prediction_funcs.len()
        )));
    }
    if starts.nrows() == 0 {
        return Err(Error::invalid("need at least one start"));
    }

    let mut best: Option<RunResult> = None;
    for start in starts.rows() {
        let x0 = start.to_vec();
        let run = nelder_mead(
            |x| rsm_opt_unchecked(x, overall, prediction_funcs, region),
            &x0,
            options,
        )?;
        if run.status == RunStatus::DegenerateStart {
            continue;
        }
        match &best {
            Some(b) if run.best_value >= b.best_value => {}
            _ => best = Some(run),
        }
    }
    best.ok_or_else(|| Error::invalid("every start was degenerate (no feasible simplex)"))
}

/// A full-factorial grid of restart points: `per_axis` evenly spaced
/// values on `[low, high]` per dimension, `per_axis^k` rows, last
/// dimension cycling fastest.
pub fn grid_starts(low: f64, high: f64, per_axis: usize, k: usize) -> Result<Array2<f64>> {
    if per_axis < 1 || k < 1 {
        return Err(Error::invalid("grid needs per_axis >= 1 and k >= 1"));
    }
    if !(low.is_finite() && high.is_finite() && low < high) {
        return Err(Error::invalid("grid range must be finite with low < high"));
    }
    let axis: Vec<f64> = if per_axis == 1 {
        vec![0.5 * (low + high)]
    } else {
        (0..per_axis)
            .map(|i| low + (high - low) * i as f64 / (per_axis - 1) as f64)
            .collect()
    };
    let n = per_axis.pow(k as u32);
    let mut out = Array2::zeros((n, k));
    for row in 0..n {
        let mut rem = row;
        for j in (0..k).rev() {
            out[[row, j]] = axis[rem % per_axis];
            rem /= per_axis;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::desirability::Desirability;
    use crate::rsm::{activity_pred, conversion_pred};
    use approx::assert_abs_diff_eq;

    fn chemical_overall() -> OverallDesirability {
        OverallDesirability::new(vec![
            Desirability::max(80.0, 97.0).unwrap(),
            Desirability::target(55.0, 57.5, 60.0).unwrap(),
        ])
        .unwrap()
    }

    fn chemical_preds() -> [PredictionFn<'static>; 2] {
        [&|x: &[f64]| conversion_pred(x).unwrap(), &|x: &[f64]| {
            activity_pred(x).unwrap()
        }]
    }

    #[test]
    fn rsm_opt_center_and_penalties() {
        let overall = chemical_overall();
        let preds = chemical_preds();
        let square = Region::Square { alpha: 1.682 };
        let v = rsm_opt(&[0.0, 0.0, 0.0], &overall, &preds, &square).unwrap();
        assert_abs_diff_eq!(v, -0.06202466, epsilon = 1e-8);
        assert_eq!(
            rsm_opt(&[2.0, 0.0, 0.0], &overall, &preds, &square).unwrap(),
            0.0
        );
        // ||(1.2, 1.2, 1.2)|| ~ 2.078 > 1.682
        let circ = Region::Circular { alpha: 1.682 };
        assert_eq!(
            rsm_opt(&[1.2, 1.2, 1.2], &overall, &preds, &circ).unwrap(),
            0.0
        );
        assert!(rsm_opt(&[0.0; 3], &overall, &preds[..1], &square).is_err());
    }

    #[test]
    fn rsm_opt_stays_in_unit_band() {
        let overall = chemical_overall();
        let preds = chemical_preds();
        let region = Region::Square { alpha: 1.682 };
        for &x in &[
            [0.0, 0.0, 0.0],
            [1.0, -1.0, 0.5],
            [-0.5, 1.68, -0.58],
            [5.0, 5.0, 5.0],
        ] {
            let v = rsm_opt(&x, &overall, &preds, &region).unwrap();
            assert!((-1.0..=0.0).contains(&v), "{v}");
        }
    }

    #[test]
    fn nelder_mead_minimizes_convex_quadratics() {
        let run = nelder_mead(
            |x| x.iter().map(|v| v * v).sum(),
            &[1.0, 1.0],
            &NmOptions::default(),
        )
        .unwrap();
        assert!(run.converged());
        assert!(
            run.best_x.iter().all(|v| v.abs() < 1e-4),
            "{:?}",
            run.best_x
        );
        assert!(run.best_value < 1e-8);

        let run1 = nelder_mead(|x| (x[0] - 3.0).powi(2), &[0.0], &NmOptions::default()).unwrap();
        assert_abs_diff_eq!(run1.best_x[0], 3.0, epsilon = 1e-4);
    }

    #[test]
    fn nelder_mead_handles_rosenbrock() {
        let rosenbrock = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let run = nelder_mead(rosenbrock, &[-1.2, 1.0], &NmOptions::default()).unwrap();
        assert!(run.iterations <= 1000);
        assert!(run.best_value < 1e-6, "f = {}", run.best_value);
    }

    #[test]
    fn nelder_mead_never_returns_worse_than_best_seen() {
        let run = nelder_mead(
            |x| (x[0].sin() * 3.0).cos() + x[0] * x[0] * 0.01,
            &[2.0],
            &NmOptions {
                max_iter: 17,
                ..NmOptions::default()
            },
        )
        .unwrap();
        let min_seen = run.values.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(run.best_value, min_seen);
        assert_eq!(run.num_evaluations, run.values.len());
    }

    #[test]
    fn degenerate_start_is_flagged() {
        let run = nelder_mead(|_| 0.0, &[5.0, 5.0], &NmOptions::default()).unwrap();
        assert_eq!(run.status, RunStatus::DegenerateStart);
        assert_eq!(run.iterations, 0);
    }

    #[test]
    fn multistart_square_region_reproduces_known_optimum() {
        let overall = chemical_overall();
        let preds = chemical_preds();
        let starts = grid_starts(-1.5, 1.5, 5, 3).unwrap();
        let run = multistart_maximize_desirability(
            &overall,
            &preds,
            &Region::Square { alpha: 1.682 },
            &starts.view(),
            &NmOptions::default(),
        )
        .unwrap();
        let desirability = -run.best_value;
        assert!(desirability >= 0.9425, "D = {desirability}");
        let expected = [-0.512, 1.682, -0.586];
        for (got, want) in run.best_x.iter().zip(expected) {
            assert!((got - want).abs() < 0.05, "{:?}", run.best_x);
        }
        assert_abs_diff_eq!(activity_pred(&run.best_x).unwrap(), 57.5, epsilon = 1e-4);
        assert!((conversion_pred(&run.best_x).unwrap() - 95.1).abs() < 0.1);
    }

    #[test]
    fn multistart_circular_region_reproduces_known_optimum() {
        let overall = chemical_overall();
        let preds = chemical_preds();
        let starts = grid_starts(-1.5, 1.5, 5, 3).unwrap();
        let run = multistart_maximize_desirability(
            &overall,
            &preds,
            &Region::Circular { alpha: 1.682 },
            &starts.view(),
            &NmOptions::default(),
        )
        .unwrap();
        let desirability = -run.best_value;
        assert!(desirability >= 0.858, "D = {desirability}");
        let norm = run.best_x.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm <= 1.682 + 1e-6, "norm = {norm}");
    }

    #[test]
    fn multistart_from_known_optimum_stays_there() {
        let overall = chemical_overall();
        let preds = chemical_preds();
        let start = ndarray::array![[-0.51207663, 1.68199987, -0.58609664]];
        let run = multistart_maximize_desirability(
            &overall,
            &preds,
            &Region::Square { alpha: 1.682 },
            &start.view(),
            &NmOptions::default(),
        )
        .unwrap();
        assert!(-run.best_value >= 0.9425);
    }

    #[test]
    fn multistart_is_invariant_under_start_permutation() {
        let overall = chemical_overall();
        let preds = chemical_preds();
        let starts = grid_starts(-1.5, 1.5, 3, 3).unwrap();
        let mut reversed = starts.clone();
        for (i, row) in starts.rows().into_iter().enumerate() {
            let target = starts.nrows() - 1 - i;
            for (j, &v) in row.iter().enumerate() {
                reversed[[target, j]] = v;
            }
        }
        let region = Region::Square { alpha: 1.682 };
        let a = multistart_maximize_desirability(
            &overall,
            &preds,
            &region,
            &starts.view(),
            &NmOptions::default(),
        )
        .unwrap();
        let b = multistart_maximize_desirability(
            &overall,
            &preds,
            &region,
            &reversed.view(),
            &NmOptions::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(a.best_value, b.best_value, epsilon = 1e-12);
    }

    #[test]
    fn grid_starts_shape() {
        let g = grid_starts(-1.5, 1.5, 5, 3).unwrap();
        assert_eq!(g.nrows(), 125);
        assert_eq!(g.row(0).to_vec(), vec![-1.5, -1.5, -1.5]);
        assert_eq!(g.row(1).to_vec(), vec![-1.5, -1.5, -0.75]);
        assert_eq!(g.row(124).to_vec(), vec![1.5, 1.5, 1.5]);
    }

    #[test]
    fn invalid_options_are_rejected() {
        let bad = NmOptions {
            expansion: 0.5,
            ..NmOptions::default()
        };
        assert!(nelder_mead(|x| x[0], &[0.0], &bad).is_err());
        assert!(nelder_mead(|x| x[0], &[], &NmOptions::default()).is_err());
        assert!(nelder_mead(|x| x[0], &[f64::NAN], &NmOptions::default()).is_err());
    }
}
