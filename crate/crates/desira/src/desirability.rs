//! Desirability transforms and their geometric-mean combination.
//!
//! A desirability maps an objective value onto `[0, 1]`, where 1 is ideal
//! and 0 is unacceptable. Three goal-directed forms cover the common cases
//! (larger-is-better, smaller-is-better, target-is-best); arbitrary
//! piecewise-linear curves, box constraints, and categorical lookups cover
//! the rest. Several transforms combine into an overall score through the
//! geometric mean, which drops to zero as soon as any component does.
//!
//! Missing inputs are encoded as `NaN` and are substituted by the
//! transform's non-informative value (the mean desirability over its
//! informative range) unless the transform is configured to propagate
//! missing values instead.

use std::collections::BTreeMap;

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};

/// Grid size used to estimate the non-informative (missing) value as the
/// mean desirability over the informative range, endpoints included.
pub const NON_INFORMATIVE_GRID: usize = 100;

/// The functional form of a desirability transform.
#[derive(Debug, Clone, PartialEq)]
pub enum Transform {
    /// Larger-is-better: 0 below `low`, 1 above `high`, a power ramp between.
    Max { low: f64, high: f64, scale: f64 },
    /// Smaller-is-better: 1 below `low`, 0 above `high`.
    Min { low: f64, high: f64, scale: f64 },
    /// Target-is-best: 1 at `target`, 0 outside `[low, high]`.
    Target {
        low: f64,
        target: f64,
        high: f64,
        low_scale: f64,
        high_scale: f64,
    },
    /// Piecewise-linear interpolation through `(x[i], d[i])`, clamped to the
    /// end values outside the grid.
    Arb { x: Vec<f64>, d: Vec<f64> },
    /// Box constraint: 1 inside `[low, high]` (boundaries included), 0 outside.
    Box { low: f64, high: f64 },
    /// Lookup of a desirability per category label.
    Categorical(BTreeMap<String, f64>),
}

/// What to substitute for a missing (`NaN`) input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MissingPolicy {
    /// Replace missing inputs by this value.
    Substitute(f64),
    /// Return a missing output (`NaN`) for missing inputs.
    Propagate,
}

/// A desirability transform plus its zero-tolerance and missing-value
/// behaviour.
#[derive(Debug, Clone, PartialEq)]
pub struct Desirability {
    transform: Transform,
    tol: Option<f64>,
    missing: MissingPolicy,
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::invalid(msg.to_string()))
    }
}

fn require_finite(v: f64, name: &str) -> Result<()> {
    require(v.is_finite(), &format!("{name} must be finite"))
}

impl Desirability {
    fn from_transform(transform: Transform) -> Result<Self> {
        validate(&transform)?;
        let missing = MissingPolicy::Substitute(non_informative_of(&transform));
        Ok(Desirability {
            transform,
            tol: None,
            missing,
        })
    }

    /// Larger-is-better with unit scale.
    pub fn max(low: f64, high: f64) -> Result<Self> {
        Self::max_with_scale(low, high, 1.0)
    }

    /// Larger-is-better with an explicit scale exponent.
    pub fn max_with_scale(low: f64, high: f64, scale: f64) -> Result<Self> {
        Self::from_transform(Transform::Max { low, high, scale })
    }

    /// Smaller-is-better with unit scale.
    pub fn min(low: f64, high: f64) -> Result<Self> {
        Self::min_with_scale(low, high, 1.0)
    }

    /// Smaller-is-better with an explicit scale exponent.
    pub fn min_with_scale(low: f64, high: f64, scale: f64) -> Result<Self> {
        Self::from_transform(Transform::Min { low, high, scale })
    }

    /// Target-is-best with unit scales on both sides.
    pub fn target(low: f64, target: f64, high: f64) -> Result<Self> {
        Self::target_with_scales(low, target, high, 1.0, 1.0)
    }

    /// Target-is-best with explicit scale exponents per side.
    pub fn target_with_scales(
        low: f64,
        target: f64,
        high: f64,
        low_scale: f64,
        high_scale: f64,
    ) -> Result<Self> {
        Self::from_transform(Transform::Target {
            low,
            target,
            high,
            low_scale,
            high_scale,
        })
    }

    /// Arbitrary curve through `(x[i], d[i])`; `x` strictly increasing,
    /// every `d` in `[0, 1]`, at least two points.
    pub fn arbitrary(x: Vec<f64>, d: Vec<f64>) -> Result<Self> {
        Self::from_transform(Transform::Arb { x, d })
    }

    /// Box constraint on `[low, high]`.
    pub fn box_constraint(low: f64, high: f64) -> Result<Self> {
        Self::from_transform(Transform::Box { low, high })
    }

    /// Categorical lookup from label to desirability.
    pub fn categorical<I, S>(values: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let map: BTreeMap<String, f64> = values.into_iter().map(|(k, v)| (k.into(), v)).collect();
        Self::from_transform(Transform::Categorical(map))
    }

    /// Replace zero desirability by `tol` (must lie in `(0, 1]`).
    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        require(tol > 0.0 && tol <= 1.0, "tol must lie in (0, 1]")?;
        self.tol = Some(tol);
        Ok(self)
    }

    /// Override the value substituted for missing inputs.
    pub fn with_missing(mut self, value: f64) -> Result<Self> {
        require(
            value.is_finite() && (0.0..=1.0).contains(&value),
            "missing value must lie in [0, 1]",
        )?;
        self.missing = MissingPolicy::Substitute(value);
        Ok(self)
    }

    /// Let missing inputs produce missing (`NaN`) outputs.
    pub fn with_missing_propagated(mut self) -> Self {
        self.missing = MissingPolicy::Propagate;
        self
    }

    pub fn transform(&self) -> &Transform {
        &self.transform
    }

    pub fn tol(&self) -> Option<f64> {
        self.tol
    }

    pub fn missing_policy(&self) -> MissingPolicy {
        self.missing
    }

    /// The value substituted for missing inputs, unless propagation is on.
    pub fn missing_value(&self) -> Option<f64> {
        match self.missing {
            MissingPolicy::Substitute(v) => Some(v),
            MissingPolicy::Propagate => None,
        }
    }

    /// Mean desirability over the informative range on an evenly spaced
    /// grid of [`NON_INFORMATIVE_GRID`] points (categorical: mean of the
    /// mapped values). This is the default substitute for missing inputs.
    pub fn non_informative(&self) -> f64 {
        non_informative_of(&self.transform)
    }

    /// The input range outside of which the transform is flat
    /// (categorical transforms have no numeric range).
    pub fn informative_range(&self) -> Option<(f64, f64)> {
        match &self.transform {
            Transform::Max { low, high, .. }
            | Transform::Min { low, high, .. }
            | Transform::Box { low, high } => Some((*low, *high)),
            Transform::Target { low, high, .. } => Some((*low, *high)),
            Transform::Arb { x, .. } => Some((x[0], x[x.len() - 1])),
            Transform::Categorical(_) => None,
        }
    }

    /// Evaluate the transform at a numeric input.
    ///
    /// The input must be finite; missing values are handled by [`predict`]
    /// only. Categorical transforms require [`evaluate_label`].
    ///
    /// [`predict`]: Desirability::predict
    /// [`evaluate_label`]: Desirability::evaluate_label
    pub fn evaluate(&self, f: f64) -> Result<f64> {
        require_finite(f, "input")?;
        let raw = match &self.transform {
            Transform::Max { low, high, scale } => {
                if f < *low {
                    0.0
                } else if f <= *high {
                    ramp((f - low) / (high - low), *scale)
                } else {
                    1.0
                }
            }
            Transform::Min { low, high, scale } => {
                if f > *high {
                    0.0
                } else if f >= *low {
                    ramp((f - high) / (low - high), *scale)
                } else {
                    1.0
                }
            }
            Transform::Target {
                low,
                target,
                high,
                low_scale,
                high_scale,
            } => {
                if f >= *low && f <= *target {
                    ramp((f - low) / (target - low), *low_scale)
                } else if f > *target && f <= *high {
                    ramp((f - high) / (target - high), *high_scale)
                } else {
                    0.0
                }
            }
            Transform::Arb { x, d } => interpolate(x, d, f),
            Transform::Box { low, high } => {
                if f >= *low && f <= *high {
                    1.0
                } else {
                    0.0
                }
            }
            Transform::Categorical(_) => {
                return Err(Error::invalid(
                    "categorical desirability requires a label, not a number",
                ))
            }
        };
        Ok(self.apply_tol(raw))
    }

    /// Evaluate a categorical transform at a label.
    pub fn evaluate_label(&self, label: &str) -> Result<f64> {
        match &self.transform {
            Transform::Categorical(map) => map
                .get(label)
                .copied()
                .map(|raw| self.apply_tol(raw))
                .ok_or_else(|| Error::UnknownCategory(label.to_string())),
            _ => Err(Error::invalid(
                "label evaluation requires a categorical desirability",
            )),
        }
    }

    /// Element-wise evaluation of a numeric vector. `NaN` entries are
    /// treated as missing and substituted (or propagated) per the missing
    /// policy; infinities are rejected.
    pub fn predict(&self, values: &[f64]) -> Result<Vec<f64>> {
        values
            .iter()
            .map(|&f| {
                if f.is_nan() {
                    Ok(match self.missing {
                        MissingPolicy::Substitute(v) => v,
                        MissingPolicy::Propagate => f64::NAN,
                    })
                } else {
                    self.evaluate(f)
                }
            })
            .collect()
    }

    /// Element-wise evaluation of category labels.
    pub fn predict_labels(&self, labels: &[&str]) -> Result<Vec<f64>> {
        labels.iter().map(|l| self.evaluate_label(l)).collect()
    }

    fn apply_tol(&self, raw: f64) -> f64 {
        match self.tol {
            Some(tol) if raw == 0.0 => tol,
            _ => raw,
        }
    }
}

fn validate(t: &Transform) -> Result<()> {
    match t {
        Transform::Max { low, high, scale } | Transform::Min { low, high, scale } => {
            require_finite(*low, "low")?;
            require_finite(*high, "high")?;
            require_finite(*scale, "scale")?;
            require(low < high, "low must be strictly below high")?;
            require(*scale > 0.0, "scale must be strictly positive")
        }
        Transform::Target {
            low,
            target,
            high,
            low_scale,
            high_scale,
        } => {
            require_finite(*low, "low")?;
            require_finite(*target, "target")?;
            require_finite(*high, "high")?;
            require_finite(*low_scale, "low_scale")?;
            require_finite(*high_scale, "high_scale")?;
            require(low < target && target < high, "need low < target < high")?;
            require(
                *low_scale > 0.0 && *high_scale > 0.0,
                "scales must be strictly positive",
            )
        }
        Transform::Arb { x, d } => {
            require(x.len() >= 2, "need at least two curve points")?;
            require(x.len() == d.len(), "x and d must have the same length")?;
            for w in x.windows(2) {
                require_finite(w[0], "x")?;
                require(w[0] < w[1], "x must be strictly increasing")?;
            }
            require_finite(x[x.len() - 1], "x")?;
            for &v in d {
                require(
                    v.is_finite() && (0.0..=1.0).contains(&v),
                    "every d must lie in [0, 1]",
                )?;
            }
            Ok(())
        }
        Transform::Box { low, high } => {
            require_finite(*low, "low")?;
            require_finite(*high, "high")?;
            require(low < high, "low must be strictly below high")
        }
        Transform::Categorical(map) => {
            require(!map.is_empty(), "categorical map must be nonempty")?;
            for v in map.values() {
                require(
                    v.is_finite() && (0.0..=1.0).contains(v),
                    "every category desirability must lie in [0, 1]",
                )?;
            }
            Ok(())
        }
    }
}

fn ramp(base: f64, scale: f64) -> f64 {
    if scale == 1.0 {
        base
    } else {
        base.powf(scale)
    }
}

fn interpolate(x: &[f64], d: &[f64], f: f64) -> f64 {
    if f <= x[0] {
        return d[0];
    }
    let last = x.len() - 1;
    if f >= x[last] {
        return d[last];
    }
    // partition_point returns the first index with x[i] > f; f is interior here.
    let hi = x.partition_point(|&xi| xi <= f);
    let lo = hi - 1;
    let t = (f - x[lo]) / (x[hi] - x[lo]);
    d[lo] + t * (d[hi] - d[lo])
}

fn non_informative_of(t: &Transform) -> f64 {
    match t {
        Transform::Categorical(map) => map.values().sum::<f64>() / map.len() as f64,
        _ => {
            let (lo, hi) = match t {
                Transform::Max { low, high, .. }
                | Transform::Min { low, high, .. }
                | Transform::Box { low, high } => (*low, *high),
                Transform::Target { low, high, .. } => (*low, *high),
                Transform::Arb { x, .. } => (x[0], x[x.len() - 1]),
                Transform::Categorical(_) => unreachable!(),
            };
            let n = NON_INFORMATIVE_GRID;
            let probe = Desirability {
                transform: t.clone(),
                tol: None,
                missing: MissingPolicy::Propagate,
            };
            let step = (hi - lo) / (n - 1) as f64;
            let grid: Vec<f64> = (0..n)
                .map(|i| {
                    let xi = if i == n - 1 { hi } else { lo + step * i as f64 };
                    probe.evaluate(xi).expect("grid points are finite")
                })
                .collect();
            pairwise_sum(&grid) / n as f64
        }
    }
}

// Pairwise summation keeps the grid mean accurate enough that symmetric
// ramps land exactly on 0.5.
fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// An ordered list of desirability transforms combined by the geometric
/// mean. Component order matches the column order of outcome matrices.
#[derive(Debug, Clone)]
pub struct OverallDesirability {
    components: Vec<Desirability>,
}

impl OverallDesirability {
    /// Combine numeric transforms; at least one component is required and
    /// categorical components are rejected (outcome matrices are numeric).
    pub fn new(components: Vec<Desirability>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("overall desirability needs >= 1 component"));
        }
        if components
            .iter()
            .any(|c| matches!(c.transform(), Transform::Categorical(_)))
        {
            return Err(Error::invalid(
                "categorical components cannot score numeric outcome columns",
            ));
        }
        Ok(OverallDesirability { components })
    }

    pub fn components(&self) -> &[Desirability] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    fn check_shape(&self, outcomes: &ArrayView2<f64>) -> Result<()> {
        if outcomes.ncols() != self.components.len() {
            return Err(Error::shape(format!(
                "outcome matrix has {} columns, expected {}",
                outcomes.ncols(),
                self.components.len()
            )));
        }
        Ok(())
    }

    /// Overall desirability per outcome row: the geometric mean of the
    /// component desirabilities.
    pub fn predict(&self, outcomes: &ArrayView2<f64>) -> Result<Vec<f64>> {
        Ok(self.predict_all(outcomes)?.0)
    }

    /// Overall desirability per row plus the per-component matrix.
    pub fn predict_all(&self, outcomes: &ArrayView2<f64>) -> Result<(Vec<f64>, Array2<f64>)> {
        self.check_shape(outcomes)?;
        let n = outcomes.nrows();
        let r = self.components.len();
        let mut individual = Array2::zeros((n, r));
        for (j, component) in self.components.iter().enumerate() {
            let column: Vec<f64> = outcomes.column(j).to_vec();
            let scored = component.predict(&column)?;
            for (i, v) in scored.into_iter().enumerate() {
                individual[[i, j]] = v;
            }
        }
        let overall = individual
            .rows()
            .into_iter()
            .map(|row| row.iter().product::<f64>().powf(1.0 / r as f64))
            .collect();
        Ok((overall, individual))
    }
}
