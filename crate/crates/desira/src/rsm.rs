//! Response-surface models, central composite designs, and contour grids.
//!
//! The worked chemical-reaction example ships as two fitted quadratic
//! models over three coded factors (reaction time, temperature, percent
//! catalyst): percent conversion, to be maximized, and thermal activity,
//! to be held near a target.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::io::fmt_full;

/// A full quadratic polynomial in `k` variables: intercept, linear terms,
/// pure quadratic terms, and one interaction coefficient per pair `i < j`
/// in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticModel {
    pub intercept: f64,
    pub linear: Vec<f64>,
    pub quadratic: Vec<f64>,
    pub interactions: Vec<f64>,
}

impl QuadraticModel {
    pub fn new(
        intercept: f64,
        linear: Vec<f64>,
        quadratic: Vec<f64>,
        interactions: Vec<f64>,
    ) -> Result<Self> {
        let k = linear.len();
        if k == 0 {
            return Err(Error::invalid("quadratic model needs at least one factor"));
        }
        if quadratic.len() != k {
            return Err(Error::shape(format!(
                "expected {k} quadratic coefficients, found {}",
                quadratic.len()
            )));
        }
        if interactions.len() != k * (k - 1) / 2 {
            return Err(Error::shape(format!(
                "expected {} interaction coefficients, found {}",
                k * (k - 1) / 2,
                interactions.len()
            )));
        }
        Ok(QuadraticModel {
            intercept,
            linear,
            quadratic,
            interactions,
        })
    }

    /// Number of factors.
    pub fn k(&self) -> usize {
        self.linear.len()
    }

    /// Evaluate the polynomial at a point.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        let k = self.k();
        if x.len() != k {
            return Err(Error::shape(format!(
                "point has {} coordinates, model has {k} factors",
                x.len()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("point coordinates must be finite"));
        }
        let mut y = self.intercept;
        for ((xi, li), qi) in x.iter().zip(&self.linear).zip(&self.quadratic) {
            y += li * xi + qi * xi * xi;
        }
        let mut idx = 0;
        for i in 0..k {
            for j in (i + 1)..k {
                y += self.interactions[idx] * x[i] * x[j];
                idx += 1;
            }
        }
        Ok(y)
    }

    /// Load coefficients from a `term,label,value` CSV document. Terms are
    /// `intercept`, `linear`, `quadratic` (label `x<i>`, 1-based), and
    /// `interaction` (label `x<i>:x<j>`, `i < j`). Every coefficient of the
    /// model implied by the largest index must be present exactly once.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut intercept: Option<f64> = None;
        let mut linear: Vec<(usize, f64)> = Vec::new();
        let mut quadratic: Vec<(usize, f64)> = Vec::new();
        let mut interactions: Vec<(usize, usize, f64)> = Vec::new();

        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if lineno == 0 && line.eq_ignore_ascii_case("term,label,value") {
                continue;
            }
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(Error::invalid(format!(
                    "coefficient line {}: expected `term,label,value`",
                    lineno + 1
                )));
            }
            let value: f64 = parts[2].parse().map_err(|_| {
                Error::invalid(format!("coefficient line {}: bad value", lineno + 1))
            })?;
            match parts[0] {
                "intercept" => {
                    if intercept.replace(value).is_some() {
                        return Err(Error::invalid("duplicate intercept"));
                    }
                }
                "linear" => linear.push((parse_var(parts[1])?, value)),
                "quadratic" => quadratic.push((parse_var(parts[1])?, value)),
                "interaction" => {
                    let (i, j) = parse_pair(parts[1])?;
                    interactions.push((i, j, value));
                }
                other => {
                    return Err(Error::invalid(format!("unknown term `{other}`")));
                }
            }
        }

        let k = linear.len();
        let mut lin = vec![f64::NAN; k];
        for (i, v) in linear {
            if i >= k || !lin[i].is_nan() {
                return Err(Error::invalid("linear labels must be x1..xk, each once"));
            }
            lin[i] = v;
        }
        let mut quad = vec![f64::NAN; k];
        for (i, v) in quadratic {
            if i >= k || !quad[i].is_nan() {
                return Err(Error::invalid("quadratic labels must be x1..xk, each once"));
            }
            quad[i] = v;
        }
        let mut inter = vec![f64::NAN; k * (k - 1) / 2];
        for (i, j, v) in interactions {
            if i >= j || j >= k {
                return Err(Error::invalid(
                    "interaction labels must be xi:xj with i < j <= k",
                ));
            }
            let idx = pair_index(i, j, k);
            if !inter[idx].is_nan() {
                return Err(Error::invalid("duplicate interaction coefficient"));
            }
            inter[idx] = v;
        }
        if quad.iter().chain(inter.iter()).any(|v| v.is_nan()) {
            return Err(Error::invalid("incomplete coefficient set"));
        }
        QuadraticModel::new(
            intercept.ok_or_else(|| Error::invalid("missing intercept"))?,
            lin,
            quad,
            inter,
        )
    }

    /// Write coefficients in the `term,label,value` CSV format.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("term,label,value\n");
        out.push_str(&format!("intercept,,{}\n", fmt_full(self.intercept)));
        for (i, v) in self.linear.iter().enumerate() {
            out.push_str(&format!("linear,x{},{}\n", i + 1, fmt_full(*v)));
        }
        for (i, v) in self.quadratic.iter().enumerate() {
            out.push_str(&format!("quadratic,x{},{}\n", i + 1, fmt_full(*v)));
        }
        let k = self.k();
        let mut idx = 0;
        for i in 0..k {
            for j in (i + 1)..k {
                out.push_str(&format!(
                    "interaction,x{}:x{},{}\n",
                    i + 1,
                    j + 1,
                    fmt_full(self.interactions[idx])
                ));
                idx += 1;
            }
        }
        out
    }
}

fn parse_var(label: &str) -> Result<usize> {
    label
        .strip_prefix('x')
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&i| i >= 1)
        .map(|i| i - 1)
        .ok_or_else(|| Error::invalid(format!("bad variable label `{label}`")))
}

fn parse_pair(label: &str) -> Result<(usize, usize)> {
    let (a, b) = label
        .split_once(':')
        .ok_or_else(|| Error::invalid(format!("bad interaction label `{label}`")))?;
    Ok((parse_var(a)?, parse_var(b)?))
}

fn pair_index(i: usize, j: usize, k: usize) -> usize {
    // lexicographic position of (i, j), i < j, among all pairs
    i * k - i * (i + 1) / 2 + (j - i - 1)
}

/// Predicted percent conversion of the chemical reaction at a coded point.
///
/// Hand-coded polynomial, kept independent of [`QuadraticModel`] evaluation
/// so the two routes can cross-check each other.
pub fn conversion_pred(x: &[f64]) -> Result<f64> {
    check_point3(x)?;
    let (x1, x2, x3) = (x[0], x[1], x[2]);
    Ok(
        81.09 + 1.0284 * x1 + 4.043 * x2 + 6.2037 * x3 - 1.8366 * x1 * x1 + 2.9382 * x2 * x2
            - 5.1915 * x3 * x3
            + 2.2150 * x1 * x2
            + 11.375 * x1 * x3
            - 3.875 * x2 * x3,
    )
}

/// Predicted thermal activity of the chemical reaction at a coded point.
pub fn activity_pred(x: &[f64]) -> Result<f64> {
    check_point3(x)?;
    let (x1, x2, x3) = (x[0], x[1], x[2]);
    Ok(59.85
        + 3.583 * x1
        + 0.2546 * x2
        + 2.2298 * x3
        + 0.83479 * x1 * x1
        + 0.07484 * x2 * x2
        + 0.05716 * x3 * x3
        - 0.3875 * x1 * x2
        - 0.375 * x1 * x3
        + 0.3125 * x2 * x3)
}

fn check_point3(x: &[f64]) -> Result<()> {
    if x.len() != 3 {
        return Err(Error::shape(format!(
            "chemical-reaction models take 3 factors, got {}",
            x.len()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("point coordinates must be finite"));
    }
    Ok(())
}

/// The conversion model as coefficient data.
pub fn conversion_model() -> QuadraticModel {
    QuadraticModel::new(
        81.09,
        vec![1.0284, 4.043, 6.2037],
        vec![-1.8366, 2.9382, -5.1915],
        vec![2.2150, 11.375, -3.875],
    )
    .expect("static coefficients")
}

/// The activity model as coefficient data.
pub fn activity_model() -> QuadraticModel {
    QuadraticModel::new(
        59.85,
        vec![3.583, 0.2546, 2.2298],
        vec![0.83479, 0.07484, 0.05716],
        vec![-0.3875, -0.375, 0.3125],
    )
    .expect("static coefficients")
}

/// Row-wise evaluation of both chemical-reaction objectives: column 0 is
/// percent conversion, column 1 is thermal activity.
pub fn chemical_objectives(x: &ArrayView2<f64>) -> Result<Array2<f64>> {
    if x.ncols() != 3 {
        return Err(Error::shape(format!(
            "expected 3 columns, found {}",
            x.ncols()
        )));
    }
    let mut out = Array2::zeros((x.nrows(), 2));
    for (i, row) in x.rows().into_iter().enumerate() {
        let p = row.to_vec();
        out[[i, 0]] = conversion_pred(&p)?;
        out[[i, 1]] = activity_pred(&p)?;
    }
    Ok(out)
}

/// A central composite design in coded units: `2^k` factorial corners,
/// `2k` axial points at distance `alpha`, and one or more center points.
#[derive(Debug, Clone)]
pub struct CcDesign {
    pub k: usize,
    pub alpha: f64,
    pub points: Array2<f64>,
}

/// Build a CCD with one center point. `alpha` defaults to the rotatable
/// choice `(2^k)^(1/4)`.
pub fn generate_ccd(k: usize, alpha: Option<f64>) -> Result<CcDesign> {
    generate_ccd_with_centers(k, alpha, 1)
}

/// Build a CCD with a configurable number of replicated center points.
pub fn generate_ccd_with_centers(
    k: usize,
    alpha: Option<f64>,
    center_points: usize,
) -> Result<CcDesign> {
    if k < 1 {
        return Err(Error::invalid("need at least one factor"));
    }
    if center_points < 1 {
        return Err(Error::invalid("need at least one center point"));
    }
    let n_factorial = 1usize << k;
    let alpha = alpha.unwrap_or_else(|| (n_factorial as f64).powf(0.25));
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::invalid("alpha must be positive"));
    }

    let n = n_factorial + 2 * k + center_points;
    let mut points = Array2::zeros((n, k));
    // factorial corners, last factor cycling fastest
    for row in 0..n_factorial {
        for j in 0..k {
            let bit = (row >> (k - 1 - j)) & 1;
            points[[row, j]] = if bit == 0 { -1.0 } else { 1.0 };
        }
    }
    // axial pairs per axis
    for j in 0..k {
        points[[n_factorial + 2 * j, j]] = -alpha;
        points[[n_factorial + 2 * j + 1, j]] = alpha;
    }
    // remaining rows are already zero (center points)
    Ok(CcDesign { k, alpha, points })
}

/// One grid variable: either swept over a range at a resolution, or held
/// at an explicit list of facet levels.
#[derive(Debug, Clone)]
pub enum GridVariable {
    Range {
        name: String,
        low: f64,
        high: f64,
        resolution: usize,
    },
    Levels {
        name: String,
        levels: Vec<f64>,
    },
}

impl GridVariable {
    pub fn name(&self) -> &str {
        match self {
            GridVariable::Range { name, .. } | GridVariable::Levels { name, .. } => name,
        }
    }

    fn values(&self) -> Result<Vec<f64>> {
        match self {
            GridVariable::Range {
                low,
                high,
                resolution,
                ..
            } => {
                if *resolution < 2 {
                    return Err(Error::invalid("grid resolution must be >= 2"));
                }
                if !(low.is_finite() && high.is_finite() && low < high) {
                    return Err(Error::invalid("grid range must be finite with low < high"));
                }
                let step = (high - low) / (*resolution - 1) as f64;
                Ok((0..*resolution)
                    .map(|i| {
                        if i == resolution - 1 {
                            *high
                        } else {
                            low + step * i as f64
                        }
                    })
                    .collect())
            }
            GridVariable::Levels { levels, .. } => {
                if levels.is_empty() {
                    return Err(Error::invalid("facet variable needs at least one level"));
                }
                Ok(levels.clone())
            }
        }
    }
}

/// Evaluator signature for grid functions.
pub type GridEval<'a> = Box<dyn Fn(&[f64]) -> f64 + 'a>;

/// A named function evaluated on each grid row. `inputs` names the grid
/// variables it consumes, in the order its evaluator expects them.
pub struct GridFunction<'a> {
    pub name: String,
    pub inputs: Vec<String>,
    pub eval: GridEval<'a>,
}

/// A dense tabulation: one column per variable, one per function, rows in
/// Cartesian-product order with the last variable cycling fastest.
#[derive(Debug, Clone)]
pub struct PlotGrid {
    pub columns: Vec<String>,
    pub data: Array2<f64>,
}

impl PlotGrid {
    pub fn write_csv(&self, w: &mut impl std::io::Write) -> std::io::Result<()> {
        writeln!(w, "{}", self.columns.join(","))?;
        crate::io::write_matrix(w, &self.data)
    }
}

/// Tabulate `functions` over the Cartesian product of `variables`.
pub fn generate_plot_grid(
    variables: &[GridVariable],
    functions: &[GridFunction<'_>],
) -> Result<PlotGrid> {
    if variables.is_empty() {
        return Err(Error::invalid("grid needs at least one variable"));
    }
    let values: Vec<Vec<f64>> = variables
        .iter()
        .map(|v| v.values())
        .collect::<Result<_>>()?;
    let var_names: Vec<&str> = variables.iter().map(|v| v.name()).collect();

    // resolve each function's inputs to variable indices up front
    let mut input_indices: Vec<Vec<usize>> = Vec::with_capacity(functions.len());
    for f in functions {
        let mut indices = Vec::with_capacity(f.inputs.len());
        for input in &f.inputs {
            let idx = var_names.iter().position(|n| n == input).ok_or_else(|| {
                Error::config(
                    0,
                    format!(
                        "function `{}` references unknown variable `{input}`",
                        f.name
                    ),
                )
            })?;
            indices.push(idx);
        }
        input_indices.push(indices);
    }

    let n_rows: usize = values.iter().map(Vec::len).product();
    let n_vars = variables.len();
    let n_cols = n_vars + functions.len();
    let mut data = Array2::zeros((n_rows, n_cols));
    let mut point = vec![0.0; n_vars];
    let mut args = Vec::new();
    for row in 0..n_rows {
        // decode row into per-variable indices, last variable fastest
        let mut rem = row;
        for j in (0..n_vars).rev() {
            let len = values[j].len();
            point[j] = values[j][rem % len];
            rem /= len;
        }
        for (j, &v) in point.iter().enumerate() {
            data[[row, j]] = v;
        }
        for (fi, f) in functions.iter().enumerate() {
            args.clear();
            args.extend(input_indices[fi].iter().map(|&i| point[i]));
            data[[row, n_vars + fi]] = (f.eval)(&args);
        }
    }

    let mut columns: Vec<String> = var_names.iter().map(|s| s.to_string()).collect();
    columns.extend(functions.iter().map(|f| f.name.clone()));
    Ok(PlotGrid { columns, data })
}
