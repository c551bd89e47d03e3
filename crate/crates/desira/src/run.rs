//! Optimization traces and their exports.

use std::io::{self, Write};

use ndarray::Array2;

use crate::io::{fmt_full, fmt_short};

/// How a run terminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// The convergence test fired.
    Converged,
    /// The iteration budget was exhausted first.
    MaxIterReached,
    /// Every vertex of the initial simplex had the same objective value,
    /// so the simplex had no descent signal (typically an all-infeasible
    /// start on a penalty plateau).
    DegenerateStart,
}

/// Which phase of a run selected an evaluation point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Part of the initial design.
    Initial,
    /// Chosen by the surrogate infill criterion.
    Infill,
    /// Chosen while the combined objective/coverage desirability was active.
    Explore,
    /// Chosen while only the objective desirability was active.
    Exploit,
}

impl Phase {
    pub fn label(&self) -> &'static str {
        match self {
            Phase::Initial => "initial",
            Phase::Infill => "infill",
            Phase::Explore => "explore",
            Phase::Exploit => "exploit",
        }
    }
}

/// Full trace of an optimization run: every evaluated point, its scalar
/// value, optional raw multi-objective values, and the best point found.
#[derive(Debug, Clone)]
pub struct RunResult {
    /// Evaluated points, one row per objective evaluation.
    pub evaluations: Array2<f64>,
    /// Scalar objective value per evaluation.
    pub values: Vec<f64>,
    /// Raw multi-objective values per evaluation, when the run had them.
    pub multi_values: Option<Array2<f64>>,
    /// Phase tag per evaluation, when the run distinguishes phases.
    pub phases: Option<Vec<Phase>>,
    /// Best point found (smallest scalar value; first on ties).
    pub best_x: Vec<f64>,
    /// Objective value at `best_x`.
    pub best_value: f64,
    /// Iterations performed by the driving algorithm.
    pub iterations: usize,
    /// Number of objective evaluations (rows of the trace).
    pub num_evaluations: usize,
    /// Termination status.
    pub status: RunStatus,
}

impl RunResult {
    pub fn converged(&self) -> bool {
        self.status == RunStatus::Converged
    }

    /// Index of the best row (first minimum).
    pub fn best_index(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v < self.values[best] {
                best = i;
            }
        }
        best
    }

    /// Write the trace as CSV: `eval,x1..xk[,m1..mj],y,is_best[,phase]`.
    pub fn write_trace_csv(&self, w: &mut impl Write) -> io::Result<()> {
        let k = self.evaluations.ncols();
        let mut header: Vec<String> = vec!["eval".to_string()];
        header.extend((1..=k).map(|i| format!("x{i}")));
        if let Some(mo) = &self.multi_values {
            header.extend((1..=mo.ncols()).map(|i| format!("m{i}")));
        }
        header.push("y".to_string());
        header.push("is_best".to_string());
        if self.phases.is_some() {
            header.push("phase".to_string());
        }
        writeln!(w, "{}", header.join(","))?;

        let best = self.best_index();
        for i in 0..self.values.len() {
            let mut cells: Vec<String> = vec![format!("{i}")];
            cells.extend(self.evaluations.row(i).iter().map(|&v| fmt_full(v)));
            if let Some(mo) = &self.multi_values {
                cells.extend(mo.row(i).iter().map(|&v| fmt_full(v)));
            }
            cells.push(fmt_full(self.values[i]));
            cells.push(if i == best { "1" } else { "0" }.to_string());
            if let Some(phases) = &self.phases {
                cells.push(phases[i].label().to_string());
            }
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    /// Write the best-so-far curve as CSV: `eval,best_y`.
    pub fn write_progress_csv(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "eval,best_y")?;
        let mut best = f64::INFINITY;
        for (i, &v) in self.values.iter().enumerate() {
            if v < best {
                best = v;
            }
            writeln!(w, "{i},{}", fmt_full(best))?;
        }
        Ok(())
    }

    /// Write a small JSON summary (best point, best value, counters).
    pub fn write_summary(&self, w: &mut impl Write) -> io::Result<()> {
        let xs: Vec<String> = self.best_x.iter().map(|&v| fmt_full(v)).collect();
        writeln!(
            w,
            "{{\"best_x\": [{}], \"best_f\": {}, \"nit\": {}, \"nfev\": {}, \"converged\": {}}}",
            xs.join(", "),
            fmt_full(self.best_value),
            self.iterations,
            self.num_evaluations,
            self.converged()
        )
    }

    /// One-line human-readable summary.
    pub fn summary_line(&self) -> String {
        let xs: Vec<String> = self.best_x.iter().map(|&v| fmt_short(v)).collect();
        format!(
            "best f = {} at x = [{}] ({} iterations, {} evaluations, {})",
            fmt_short(self.best_value),
            xs.join(", "),
            self.iterations,
            self.num_evaluations,
            match self.status {
                RunStatus::Converged => "converged",
                RunStatus::MaxIterReached => "budget exhausted",
                RunStatus::DegenerateStart => "degenerate start",
            }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn sample() -> RunResult {
        RunResult {
            evaluations: array![[0.0, 0.0], [1.0, 0.5], [0.25, 0.25]],
            values: vec![3.0, 1.0, 2.0],
            multi_values: None,
            phases: None,
            best_x: vec![1.0, 0.5],
            best_value: 1.0,
            iterations: 2,
            num_evaluations: 3,
            status: RunStatus::Converged,
        }
    }

    #[test]
    fn best_index_finds_first_minimum() {
        let mut r = sample();
        r.values = vec![2.0, 1.0, 1.0];
        assert_eq!(r.best_index(), 1);
    }

    #[test]
    fn trace_csv_has_header_and_one_line_per_eval() {
        let mut buf = Vec::new();
        sample().write_trace_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "eval,x1,x2,y,is_best");
        assert!(lines[2].ends_with(",1"));
    }

    #[test]
    fn progress_curve_is_monotone() {
        let mut buf = Vec::new();
        sample().write_progress_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let bests: Vec<f64> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert_eq!(bests, vec![3.0, 1.0, 1.0]);
    }
}
