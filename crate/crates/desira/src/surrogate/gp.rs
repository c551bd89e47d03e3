//! Gaussian-process regression with an amplitude-scaled Matern 5/2 kernel.
//!
//! Hyperparameters (amplitude and length scale) are fitted by maximizing
//! the log marginal likelihood with the derivative-free simplex optimizer
//! over log-parameters, best of one default start plus a configurable
//! number of log-uniform random restarts. Targets are standardized
//! internally; the covariance is factorized by Cholesky with escalating
//! diagonal jitter.

use ndarray::{Array2, ArrayView2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::optim::{nelder_mead, NmOptions};

/// Kernel hyperparameters and their fit bounds. The covariance is
/// `constant_value * matern52(r / length_scale)` with smoothness fixed at
/// 5/2.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelConfig {
    pub constant_value: f64,
    pub constant_bounds: (f64, f64),
    pub length_scale: f64,
    pub length_scale_bounds: (f64, f64),
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            constant_value: 1.0,
            constant_bounds: (1e-2, 1e12),
            length_scale: 1.0,
            length_scale_bounds: (1e-4, 1e2),
        }
    }
}

impl KernelConfig {
    fn validate(&self) -> Result<()> {
        for (value, (lo, hi), name) in [
            (self.constant_value, self.constant_bounds, "constant"),
            (self.length_scale, self.length_scale_bounds, "length scale"),
        ] {
            if !(lo > 0.0 && lo < hi && hi.is_finite()) {
                return Err(Error::invalid(format!(
                    "{name} bounds must be positive with low < high"
                )));
            }
            if !(value >= lo && value <= hi) {
                return Err(Error::invalid(format!("{name} value outside its bounds")));
            }
        }
        Ok(())
    }
}

fn matern52(r: f64, length_scale: f64) -> f64 {
    let t = 5f64.sqrt() * r / length_scale;
    (1.0 + t + t * t / 3.0) * (-t).exp()
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Lower-triangular Cholesky factor, or `None` if the matrix is not
/// numerically positive definite.
fn cholesky(a: &Array2<f64>) -> Option<Array2<f64>> {
    let n = a.nrows();
    let mut l = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[[i, j]];
            for k in 0..j {
                sum -= l[[i, k]] * l[[j, k]];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return None;
                }
                l[[i, j]] = sum.sqrt();
            } else {
                l[[i, j]] = sum / l[[j, j]];
            }
        }
    }
    Some(l)
}

fn solve_lower(l: &Array2<f64>, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut x = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            x[i] -= l[[i, k]] * x[k];
        }
        x[i] /= l[[i, i]];
    }
    x
}

fn solve_upper_t(l: &Array2<f64>, b: &[f64]) -> Vec<f64> {
    // solves L^T x = b
    let n = b.len();
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            x[i] -= l[[k, i]] * x[k];
        }
        x[i] /= l[[i, i]];
    }
    x
}

const JITTER_START: f64 = 1e-10;
const JITTER_MAX: f64 = 1e-4;

/// Kernel matrix factorized with the smallest jitter (starting at 1e-10,
/// escalating tenfold up to 1e-4) that makes Cholesky succeed.
fn factorize(x: &ArrayView2<f64>, amplitude: f64, length_scale: f64) -> Option<(Array2<f64>, f64)> {
    let n = x.nrows();
    let mut k = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let r = euclidean(
                x.row(i).as_slice().expect("contiguous row"),
                x.row(j).as_slice().expect("contiguous row"),
            );
            let v = amplitude * matern52(r, length_scale);
            k[[i, j]] = v;
            k[[j, i]] = v;
        }
    }
    let mut jitter = JITTER_START;
    while jitter <= JITTER_MAX {
        let mut kj = k.clone();
        for i in 0..n {
            kj[[i, i]] += jitter;
        }
        if let Some(l) = cholesky(&kj) {
            return Some((l, jitter));
        }
        jitter *= 10.0;
    }
    None
}

fn log_marginal_likelihood(l: &Array2<f64>, alpha: &[f64], y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let fit: f64 = y.iter().zip(alpha).map(|(a, b)| a * b).sum();
    let log_det: f64 = (0..l.nrows()).map(|i| l[[i, i]].ln()).sum();
    -0.5 * fit - log_det - 0.5 * n * (2.0 * std::f64::consts::PI).ln()
}

/// A trained Gaussian-process surrogate.
#[derive(Debug, Clone)]
pub struct GpModel {
    x_train: Array2<f64>,
    y_mean: f64,
    y_scale: f64,
    kernel: KernelConfig,
    jitter: f64,
    chol: Array2<f64>,
    alpha: Vec<f64>,
    lml: f64,
}

impl GpModel {
    pub fn kernel(&self) -> &KernelConfig {
        &self.kernel
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Log marginal likelihood of the standardized training targets at the
    /// fitted hyperparameters.
    pub fn log_marginal_likelihood(&self) -> f64 {
        self.lml
    }

    pub fn train_len(&self) -> usize {
        self.x_train.nrows()
    }

    /// Posterior mean and standard deviation per query row.
    pub fn predict(&self, queries: &ArrayView2<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
        if queries.ncols() != self.x_train.ncols() {
            return Err(Error::shape(format!(
                "query has {} columns, model was trained on {}",
                queries.ncols(),
                self.x_train.ncols()
            )));
        }
        let mut means = Vec::with_capacity(queries.nrows());
        let mut stds = Vec::with_capacity(queries.nrows());
        for row in queries.rows() {
            let (m, s) = self.predict_point(row.as_slice().expect("contiguous row"));
            means.push(m);
            stds.push(s);
        }
        Ok((means, stds))
    }

    /// Posterior mean and standard deviation at one point.
    pub fn predict_point(&self, x: &[f64]) -> (f64, f64) {
        let n = self.x_train.nrows();
        let amplitude = self.kernel.constant_value;
        let ls = self.kernel.length_scale;
        let mut k_star = Vec::with_capacity(n);
        for i in 0..n {
            let r = euclidean(self.x_train.row(i).as_slice().expect("contiguous row"), x);
            k_star.push(amplitude * matern52(r, ls));
        }
        let mean_std: f64 = k_star.iter().zip(&self.alpha).map(|(a, b)| a * b).sum();
        let v = solve_lower(&self.chol, &k_star);
        let var = (amplitude - v.iter().map(|w| w * w).sum::<f64>()).max(0.0);
        (
            self.y_mean + self.y_scale * mean_std,
            self.y_scale * var.sqrt(),
        )
    }
}

/// Fit a GP to `(x, y)`: standardize the targets, then maximize the log
/// marginal likelihood over the kernel bounds, best of the configured
/// default plus `n_restarts` log-uniform random starts.
///
/// Duplicate rows in `x` are tolerated; the covariance then factorizes at
/// a larger jitter (up to 1e-4) or the fit fails.
pub fn gp_fit(
    x: &ArrayView2<f64>,
    y: &[f64],
    kernel: &KernelConfig,
    n_restarts: usize,
    seed: u64,
) -> Result<GpModel> {
    kernel.validate()?;
    let n = x.nrows();
    if n < 2 {
        return Err(Error::invalid("gp fit needs at least two points"));
    }
    if y.len() != n {
        return Err(Error::shape(format!(
            "{} targets for {} training rows",
            y.len(),
            n
        )));
    }
    if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("training data must be finite"));
    }

    let y_mean = y.iter().sum::<f64>() / n as f64;
    let var = y.iter().map(|v| (v - y_mean).powi(2)).sum::<f64>() / n as f64;
    let y_scale = if var.sqrt() > 1e-12 { var.sqrt() } else { 1.0 };
    let y_std: Vec<f64> = y.iter().map(|v| (v - y_mean) / y_scale).collect();

    let log_bounds = [
        (kernel.constant_bounds.0.ln(), kernel.constant_bounds.1.ln()),
        (
            kernel.length_scale_bounds.0.ln(),
            kernel.length_scale_bounds.1.ln(),
        ),
    ];
    let clamp = |z: &[f64]| -> [f64; 2] {
        [
            z[0].clamp(log_bounds[0].0, log_bounds[0].1),
            z[1].clamp(log_bounds[1].0, log_bounds[1].1),
        ]
    };
    let x_owned = x.to_owned();
    let neg_lml = |z: &[f64]| -> f64 {
        let zc = clamp(z);
        let penalty: f64 = z
            .iter()
            .zip(zc)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            * 1e4;
        match factorize(&x_owned.view(), zc[0].exp(), zc[1].exp()) {
            Some((l, _)) => {
                let alpha = solve_upper_t(&l, &solve_lower(&l, &y_std));
                -log_marginal_likelihood(&l, &alpha, &y_std) + penalty
            }
            None => 1e12 + penalty,
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts = Vec::with_capacity(1 + n_restarts);
    starts.push([
        kernel
            .constant_value
            .ln()
            .clamp(log_bounds[0].0, log_bounds[0].1),
        kernel
            .length_scale
            .ln()
            .clamp(log_bounds[1].0, log_bounds[1].1),
    ]);
    for _ in 0..n_restarts {
        starts.push([
            rng.random_range(log_bounds[0].0..log_bounds[0].1),
            rng.random_range(log_bounds[1].0..log_bounds[1].1),
        ]);
    }

    let nm = NmOptions {
        max_iter: 200,
        x_tol: 1e-6,
        f_tol: 1e-9,
        ..NmOptions::default()
    };
    let mut best: Option<(f64, [f64; 2])> = None;
    for start in &starts {
        let run = nelder_mead(&neg_lml, start, &nm)?;
        let candidate = clamp(&run.best_x);
        let value = neg_lml(&candidate);
        match best {
            Some((bv, _)) if value >= bv => {}
            _ => best = Some((value, candidate)),
        }
    }
    let (_, z) = best.expect("at least the default start ran");
    let amplitude = z[0].exp();
    let length_scale = z[1].exp();

    let (chol, jitter) = factorize(&x_owned.view(), amplitude, length_scale).ok_or_else(|| {
        Error::GpFit(format!(
            "covariance not positive definite up to jitter {JITTER_MAX:e}"
        ))
    })?;
    let alpha = solve_upper_t(&chol, &solve_lower(&chol, &y_std));
    let lml = log_marginal_likelihood(&chol, &alpha, &y_std);
    Ok(GpModel {
        x_train: x_owned,
        y_mean,
        y_scale,
        kernel: KernelConfig {
            constant_value: amplitude,
            length_scale,
            ..kernel.clone()
        },
        jitter,
        chol,
        alpha,
        lml,
    })
}

/// Closed-form expected improvement for minimization:
/// `(best - mu) * Phi(z) + sigma * phi(z)` with `z = (best - mu) / sigma`;
/// the deterministic limit `max(best - mu, 0)` when `sigma` is zero.
pub fn ei_value(mean: f64, std: f64, best_y: f64) -> f64 {
    if std <= 0.0 {
        return (best_y - mean).max(0.0);
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let z = (best_y - mean) / std;
    ((best_y - mean) * normal.cdf(z) + std * normal.pdf(z)).max(0.0)
}

/// Expected improvement of the model at `x` against the incumbent `best_y`.
pub fn expected_improvement(model: &GpModel, x: &[f64], best_y: f64) -> f64 {
    let (mean, std) = model.predict_point(x);
    ei_value(mean, std, best_y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::{array, Array2};

    fn sin_data(n: usize) -> (Array2<f64>, Vec<f64>) {
        let xs: Vec<f64> = (0..n)
            .map(|i| 2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64)
            .collect();
        let y: Vec<f64> = xs.iter().map(|v| v.sin()).collect();
        let x = Array2::from_shape_vec((n, 1), xs).unwrap();
        (x, y)
    }

    #[test]
    fn constant_targets_predict_the_constant() {
        let x = array![[0.0], [1.0], [2.0], [3.0]];
        let y = vec![4.25; 4];
        let model = gp_fit(&x.view(), &y, &KernelConfig::default(), 2, 1).unwrap();
        let (means, stds) = model.predict(&array![[0.5], [2.0], [10.0]].view()).unwrap();
        for m in means {
            assert_abs_diff_eq!(m, 4.25, epsilon = 1e-6);
        }
        // predictive std at a training point collapses to jitter scale
        let (_, s_train) = model.predict_point(&[2.0]);
        assert!(s_train < 1e-3, "{s_train}");
        assert!(stds.iter().all(|s| *s >= 0.0));
    }

    #[test]
    fn smooth_function_is_reconstructed() {
        let (x, y) = sin_data(12);
        let model = gp_fit(&x.view(), &y, &KernelConfig::default(), 8, 7).unwrap();
        let held_out: Vec<f64> = (0..50)
            .map(|i| 0.05 + 2.0 * std::f64::consts::PI * i as f64 / 50.0)
            .collect();
        let q = Array2::from_shape_vec((50, 1), held_out.clone()).unwrap();
        let (means, _) = model.predict(&q.view()).unwrap();
        let rmse = (held_out
            .iter()
            .zip(&means)
            .map(|(x, m)| (x.sin() - m).powi(2))
            .sum::<f64>()
            / 50.0)
            .sqrt();
        assert!(rmse < 0.05, "rmse = {rmse}");
    }

    #[test]
    fn posterior_mean_interpolates_training_targets() {
        let (x, y) = sin_data(10);
        let model = gp_fit(&x.view(), &y, &KernelConfig::default(), 8, 3).unwrap();
        let tolerance = (10.0 * model.jitter()).max(1e-6);
        for (row, target) in x.rows().into_iter().zip(&y) {
            let (m, _) = model.predict_point(row.as_slice().unwrap());
            assert!(
                (m - target).abs() < tolerance,
                "pred {m} vs {target}, tolerance {tolerance}"
            );
        }
    }

    #[test]
    fn far_queries_revert_to_the_prior() {
        let (x, y) = sin_data(10);
        let model = gp_fit(&x.view(), &y, &KernelConfig::default(), 8, 3).unwrap();
        let y_mean = y.iter().sum::<f64>() / y.len() as f64;
        let (m, s) = model.predict_point(&[1.0e6]);
        assert_abs_diff_eq!(m, y_mean, epsilon = 1e-6);
        let prior_std = model.y_scale * model.kernel.constant_value.sqrt();
        assert_abs_diff_eq!(s, prior_std, epsilon = 1e-6 * (1.0 + prior_std));
    }

    #[test]
    fn batch_prediction_matches_single_queries() {
        let (x, y) = sin_data(9);
        let model = gp_fit(&x.view(), &y, &KernelConfig::default(), 4, 11).unwrap();
        let queries = array![[0.3], [1.7], [4.4]];
        let (means, stds) = model.predict(&queries.view()).unwrap();
        for (i, row) in queries.rows().into_iter().enumerate() {
            let (m, s) = model.predict_point(row.as_slice().unwrap());
            assert_eq!(means[i], m);
            assert_eq!(stds[i], s);
        }
    }

    #[test]
    fn duplicate_rows_are_jitter_resolved() {
        let x = array![[0.0], [0.0], [1.0], [2.0]];
        let y = vec![0.0, 0.0, 1.0, 4.0];
        let model = gp_fit(&x.view(), &y, &KernelConfig::default(), 2, 5).unwrap();
        let (m, _) = model.predict_point(&[1.0]);
        assert!(m.is_finite());
    }

    #[test]
    fn fit_rejects_bad_inputs() {
        let x = array![[0.0]];
        assert!(gp_fit(&x.view(), &[1.0], &KernelConfig::default(), 0, 0).is_err());
        let x2 = array![[0.0], [1.0]];
        assert!(gp_fit(&x2.view(), &[1.0], &KernelConfig::default(), 0, 0).is_err());
        assert!(gp_fit(&x2.view(), &[1.0, f64::NAN], &KernelConfig::default(), 0, 0).is_err());
        let bad_kernel = KernelConfig {
            constant_bounds: (1.0, 0.5),
            ..KernelConfig::default()
        };
        assert!(gp_fit(&x2.view(), &[1.0, 2.0], &bad_kernel, 0, 0).is_err());
    }

    #[test]
    fn fit_is_deterministic_for_a_seed() {
        let (x, y) = sin_data(10);
        let a = gp_fit(&x.view(), &y, &KernelConfig::default(), 5, 42).unwrap();
        let b = gp_fit(&x.view(), &y, &KernelConfig::default(), 5, 42).unwrap();
        assert_eq!(a.kernel().constant_value, b.kernel().constant_value);
        assert_eq!(a.kernel().length_scale, b.kernel().length_scale);
    }

    #[test]
    fn ei_closed_form_limits() {
        assert_eq!(ei_value(1.0, 0.0, 3.0), 2.0);
        assert_eq!(ei_value(3.0, 0.0, 3.0), 0.0);
        assert_eq!(ei_value(5.0, 0.0, 3.0), 0.0);
        // z = 0: EI = sigma * phi(0) = 1/sqrt(2*pi)
        assert_abs_diff_eq!(
            ei_value(3.0, 1.0, 3.0),
            1.0 / (2.0 * std::f64::consts::PI).sqrt(),
            epsilon = 1e-12
        );
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn ei_is_nonnegative(mean in -10.0..10.0f64, std in 0.0..5.0f64, best in -10.0..10.0f64) {
                prop_assert!(ei_value(mean, std, best) >= 0.0);
            }

            #[test]
            fn ei_grows_with_uncertainty(mean in -3.0..3.0f64, best in -3.0..3.0f64, s in 0.1..2.0f64) {
                prop_assert!(ei_value(mean, s + 0.5, best) + 1e-12 >= ei_value(mean, s, best));
            }
        }
    }
}
