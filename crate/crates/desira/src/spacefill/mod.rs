//! Space-filling criteria and the explore/exploit bi-objective driver.
//!
//! A sampling plan's coverage is scored by the Morris-Mitchell criterion
//! over its distinct pairwise distances, and by the intensive variant
//! that normalizes by the pair count so designs of different sizes become
//! comparable (lower is better for both). Adding a candidate point to a
//! plan is scored incrementally by [`mm_improvement`] from just the new
//! point's distances. The [`explore_exploit_run`] driver feeds both the
//! objective improvement and the coverage improvement through
//! desirabilities for an initial exploration phase, then switches to the
//! objective alone.

mod driver;

pub use driver::{
    estimate_improvement_ceiling, explore_exploit_run, ExploreExploitConfig, ExploreExploitResult,
};

use std::sync::Mutex;

use ndarray::{Array2, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// Distances closer than this collapse into one distinct value (and a
/// pair at or under it counts as a duplicate point).
pub const DISTANCE_GROUPING_TOL: f64 = 1e-9;

/// Smallest allowed spread for clustered designs.
pub const MIN_SPREAD: f64 = 1e-9;

/// Morris-Mitchell parameters: the exponent `q` (any positive real) and
/// the distance norm order `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmParams {
    pub q: f64,
    pub p: f64,
}

impl Default for MmParams {
    fn default() -> Self {
        MmParams { q: 2.0, p: 2.0 }
    }
}

impl MmParams {
    fn validate(&self) -> Result<()> {
        if !(self.q.is_finite() && self.q > 0.0) {
            return Err(Error::invalid("q must be a positive real"));
        }
        if !(self.p.is_finite() && self.p >= 1.0) {
            return Err(Error::invalid("p must be a norm order >= 1"));
        }
        Ok(())
    }
}

/// Distinct pairwise distances (strictly increasing) with their
/// multiplicities; the multiplicities sum to `n(n-1)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceProfile {
    pub distances: Vec<f64>,
    pub multiplicities: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct PairSumCache {
    q: f64,
    p: f64,
    /// sum over all pairs of d^(-q)
    inv_sum: f64,
}

/// An n-by-k design whose rows are evaluation points.
#[derive(Debug)]
pub struct SamplingPlan {
    points: Array2<f64>,
    pair_cache: Mutex<Option<PairSumCache>>,
}

impl Clone for SamplingPlan {
    fn clone(&self) -> Self {
        SamplingPlan {
            points: self.points.clone(),
            pair_cache: Mutex::new(*self.pair_cache.lock().expect("cache lock")),
        }
    }
}

impl SamplingPlan {
    pub fn new(points: Array2<f64>) -> Result<Self> {
        if points.nrows() == 0 || points.ncols() == 0 {
            return Err(Error::invalid("sampling plan must be non-empty"));
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("sampling plan points must be finite"));
        }
        Ok(SamplingPlan {
            points,
            pair_cache: Mutex::new(None),
        })
    }

    pub fn points(&self) -> &Array2<f64> {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    /// Append a point, invalidating the cached pair sum.
    pub fn push(&mut self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::shape(format!(
                "point has {} coordinates, plan is {}-dimensional",
                x.len(),
                self.dim()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("point coordinates must be finite"));
        }
        self.points
            .push_row(ndarray::ArrayView1::from(x))
            .expect("matching width");
        *self.pair_cache.lock().expect("cache lock") = None;
        Ok(())
    }

    /// Parse a headerless CSV of one point per row.
    pub fn from_csv(text: &str) -> Result<Self> {
        SamplingPlan::new(crate::io::parse_matrix(text)?)
    }

    pub fn write_csv(&self, w: &mut impl std::io::Write) -> std::io::Result<()> {
        crate::io::write_matrix(w, &self.points)
    }

    fn pair_inverse_sum(&self, params: &MmParams) -> Result<f64> {
        let mut cache = self.pair_cache.lock().expect("cache lock");
        if let Some(c) = *cache {
            if c.q == params.q && c.p == params.p {
                return Ok(c.inv_sum);
            }
        }
        let mut inv_sum = 0.0;
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                let d = row_distance(&self.points, i, j, params.p);
                if d <= DISTANCE_GROUPING_TOL {
                    return Err(Error::ZeroDistance(format!("rows {i} and {j} coincide")));
                }
                inv_sum += d.powf(-params.q);
            }
        }
        *cache = Some(PairSumCache {
            q: params.q,
            p: params.p,
            inv_sum,
        });
        Ok(inv_sum)
    }
}

fn row_distance(points: &Array2<f64>, i: usize, j: usize, p: f64) -> f64 {
    let a = points.row(i);
    let b = points.row(j);
    if p == 2.0 {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    } else {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }
}

/// All pairwise p-norm distances grouped into distinct values with
/// multiplicities. Distances within `tolerance` of the group's smallest
/// member collapse together; any distance at or below the tolerance is a
/// duplicate-point error.
pub fn distance_profile(plan: &SamplingPlan, p: f64, tolerance: f64) -> Result<DistanceProfile> {
    MmParams { q: 1.0, p }.validate()?;
    let n = plan.len();
    if n < 2 {
        return Err(Error::invalid("need at least two points"));
    }
    let mut all = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = row_distance(&plan.points, i, j, p);
            if d <= tolerance {
                return Err(Error::ZeroDistance(format!("rows {i} and {j} coincide")));
            }
            all.push(d);
        }
    }
    all.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));

    let mut distances = Vec::new();
    let mut multiplicities = Vec::new();
    let mut group_start = all[0];
    let mut count = 0usize;
    for &d in &all {
        if d - group_start > tolerance {
            distances.push(group_start);
            multiplicities.push(count);
            group_start = d;
            count = 1;
        } else {
            count += 1;
        }
    }
    distances.push(group_start);
    multiplicities.push(count);
    Ok(DistanceProfile {
        distances,
        multiplicities,
    })
}

/// The Morris-Mitchell criterion `(sum_i J_i d_i^(-q))^(1/q)`.
/// Lower means better spread.
pub fn mmphi(plan: &SamplingPlan, params: &MmParams) -> Result<f64> {
    params.validate()?;
    if plan.len() < 2 {
        return Err(Error::invalid("need at least two points"));
    }
    let inv_sum = plan.pair_inverse_sum(params)?;
    Ok(inv_sum.powf(1.0 / params.q))
}

/// The intensive Morris-Mitchell criterion, normalized by the pair count
/// `M = n(n-1)/2` so designs of different sizes compare fairly. Returns
/// the criterion value together with the distance profile.
pub fn mmphi_intensive(plan: &SamplingPlan, params: &MmParams) -> Result<(f64, DistanceProfile)> {
    params.validate()?;
    if plan.len() < 2 {
        return Err(Error::invalid("need at least two points"));
    }
    let profile = distance_profile(plan, params.p, DISTANCE_GROUPING_TOL)?;
    let m = plan.len() * (plan.len() - 1) / 2;
    let inv_sum = plan.pair_inverse_sum(params)?;
    Ok(((inv_sum / m as f64).powf(1.0 / params.q), profile))
}

/// Intensive-criterion improvement from augmenting the plan with `x_new`:
/// `phi(plan) - phi(plan + x_new)`. Positive means the augmented design
/// covers the space better. Only the `n` distances from `x_new` to the
/// existing points are computed; the plan's own pair sum is cached.
pub fn mm_improvement(plan: &SamplingPlan, x_new: &[f64], params: &MmParams) -> Result<f64> {
    params.validate()?;
    let n = plan.len();
    if n < 2 {
        return Err(Error::invalid("need at least two points"));
    }
    if x_new.len() != plan.dim() {
        return Err(Error::shape(format!(
            "candidate has {} coordinates, plan is {}-dimensional",
            x_new.len(),
            plan.dim()
        )));
    }
    if x_new.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("candidate coordinates must be finite"));
    }

    let base_sum = plan.pair_inverse_sum(params)?;
    let mut new_sum = 0.0;
    for i in 0..n {
        let d = if params.p == 2.0 {
            plan.points
                .row(i)
                .iter()
                .zip(x_new)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        } else {
            plan.points
                .row(i)
                .iter()
                .zip(x_new)
                .map(|(a, b)| (a - b).abs().powf(params.p))
                .sum::<f64>()
                .powf(1.0 / params.p)
        };
        if d <= DISTANCE_GROUPING_TOL {
            return Err(Error::ZeroDistance(format!(
                "candidate coincides with row {i}"
            )));
        }
        new_sum += d.powf(-params.q);
    }

    let m_old = (n * (n - 1) / 2) as f64;
    let m_new = m_old + n as f64;
    let phi_old = (base_sum / m_old).powf(1.0 / params.q);
    let phi_new = ((base_sum + new_sum) / m_new).powf(1.0 / params.q);
    Ok(phi_old - phi_new)
}

/// The Ackley test function, row-wise:
/// `-a exp(-b sqrt(mean(x^2))) - exp(mean(cos(c x))) + a + e`.
/// Global minimum 0 at the origin.
pub fn ackley(x: &ArrayView2<f64>) -> Vec<f64> {
    ackley_with_params(x, 20.0, 0.2, 2.0 * std::f64::consts::PI)
}

pub fn ackley_with_params(x: &ArrayView2<f64>, a: f64, b: f64, c: f64) -> Vec<f64> {
    x.rows()
        .into_iter()
        .map(|row| {
            let k = row.len() as f64;
            let sq = row.iter().map(|v| v * v).sum::<f64>() / k;
            let cs = row.iter().map(|v| (c * v).cos()).sum::<f64>() / k;
            -a * (-b * sq.sqrt()).exp() - cs.exp() + a + std::f64::consts::E
        })
        .collect()
}

/// A deliberately clustered design: `n` Gaussian draws around `center`
/// with standard deviation `spread`, clipped to `bounds`.
pub fn clustered_design(
    n: usize,
    center: &[f64],
    spread: f64,
    bounds: &[(f64, f64)],
    seed: u64,
) -> Result<SamplingPlan> {
    if n < 2 {
        return Err(Error::invalid("need at least two points"));
    }
    if !(spread.is_finite() && spread >= MIN_SPREAD) {
        return Err(Error::invalid(format!(
            "spread must be at least {MIN_SPREAD:e} (duplicate hazard)"
        )));
    }
    let k = center.len();
    if k == 0 || bounds.len() != k {
        return Err(Error::shape(format!(
            "center has {k} coordinates for {} bounds",
            bounds.len()
        )));
    }
    for (c, &(lo, hi)) in center.iter().zip(bounds) {
        if !(lo.is_finite() && hi.is_finite() && lo < hi && *c >= lo && *c <= hi) {
            return Err(Error::invalid("center must lie inside finite bounds"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, spread).expect("positive spread");
    let mut points = Array2::zeros((n, k));
    for i in 0..n {
        for j in 0..k {
            let v: f64 = center[j] + normal.sample(&mut rng);
            points[[i, j]] = v.clamp(bounds[j].0, bounds[j].1);
        }
    }
    SamplingPlan::new(points)
}

/// Five-number summary of one dimension of a design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiveNumberSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Per-dimension infill diagnostics: where a suggested point sits
/// relative to the existing design.
#[derive(Debug, Clone)]
pub struct DimensionDiagnostics {
    pub dimension: usize,
    /// `bins + 1` edges spanning the observed range.
    pub bin_edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub summary: FiveNumberSummary,
    pub best_coordinate: f64,
    /// Mid-rank percentile of the coordinate within the design (0..100).
    pub percentile: f64,
}

/// Histogram, five-number summary, and percentile rank of `x_best` per
/// dimension of the design.
pub fn infill_diagnostics(
    plan: &SamplingPlan,
    x_best: &[f64],
    bins: usize,
) -> Result<Vec<DimensionDiagnostics>> {
    if x_best.len() != plan.dim() {
        return Err(Error::shape(format!(
            "point has {} coordinates, design is {}-dimensional",
            x_best.len(),
            plan.dim()
        )));
    }
    if bins == 0 {
        return Err(Error::invalid("need at least one histogram bin"));
    }
    let n = plan.len();
    let mut out = Vec::with_capacity(plan.dim());
    for (j, &v) in x_best.iter().enumerate() {
        let mut column: Vec<f64> = plan.points.column(j).to_vec();
        column.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
        let (lo, hi) = (column[0], column[n - 1]);

        let width = if hi > lo {
            (hi - lo) / bins as f64
        } else {
            1.0
        };
        let bin_edges: Vec<f64> = (0..=bins)
            .map(|b| {
                if b == bins && hi > lo {
                    hi
                } else {
                    lo + width * b as f64
                }
            })
            .collect();
        let mut counts = vec![0usize; bins];
        for &v in &column {
            let mut b = if hi > lo {
                ((v - lo) / width) as usize
            } else {
                0
            };
            if b >= bins {
                b = bins - 1; // the maximum belongs to the last bin
            }
            counts[b] += 1;
        }

        let summary = FiveNumberSummary {
            min: lo,
            q1: quantile_sorted(&column, 0.25),
            median: quantile_sorted(&column, 0.5),
            q3: quantile_sorted(&column, 0.75),
            max: hi,
        };

        let less = column.partition_point(|&c| c < v);
        let less_eq = column.partition_point(|&c| c <= v);
        let equal = less_eq - less;
        let percentile = 100.0 * (less as f64 + 0.5 * equal as f64) / n as f64;

        out.push(DimensionDiagnostics {
            dimension: j,
            bin_edges,
            counts,
            summary,
            best_coordinate: v,
            percentile,
        });
    }
    Ok(out)
}

/// Linear-interpolation quantile of a sorted slice.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    }
}
