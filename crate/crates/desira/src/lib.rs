//! Multi-objective optimization through desirability functions.
//!
//! Competing objectives rarely share a scale. Desirability transforms map
//! each objective onto `[0, 1]` (1 = ideal, 0 = unacceptable) and the
//! geometric mean combines the pieces into a single overall score that any
//! single-objective optimizer can chase. This crate provides:
//!
//! - the desirability calculus: larger/smaller/target-is-best transforms,
//!   arbitrary piecewise-linear curves, box constraints, categorical
//!   lookups, missing-value and zero-tolerance semantics
//!   ([`desirability`]);
//! - the classic chemical-reaction response-surface models, central
//!   composite designs, and contour-grid tabulation ([`rsm`]);
//! - a Nelder-Mead simplex optimizer with multistart and a penalty-wrapped
//!   desirability objective over square or circular regions ([`optim`]);
//! - Gaussian-process surrogate optimization with pluggable
//!   multi-objective scalarization (weighted sum or desirability) and
//!   expected-improvement infill ([`surrogate`]);
//! - the intensive Morris-Mitchell space-filling criterion, incremental
//!   improvement scoring, and an explore/exploit driver that trades
//!   objective improvement against design coverage ([`spacefill`]).
//!
//! The `examples/` directory shows one runnable program per capability;
//! the `desira` binary exposes the same flows as commands that emit CSV
//! and SVG artifacts.
//!
//! ```
//! use desira::desirability::{Desirability, OverallDesirability};
//! use ndarray::array;
//!
//! let overall = OverallDesirability::new(vec![
//!     Desirability::max(80.0, 97.0)?,
//!     Desirability::target(55.0, 57.5, 60.0)?,
//! ])?;
//! let scores = overall.predict(&array![[81.09, 59.85]].view())?;
//! assert!((scores[0] - 0.06202466).abs() < 1e-8);
//! # Ok::<(), desira::Error>(())
//! ```

pub mod cli;
pub mod config;
pub mod desirability;
mod error;
pub mod io;
pub mod optim;
pub mod rsm;
pub mod run;
pub mod spacefill;
pub mod surrogate;
pub mod svg;

pub use error::{Error, Result};
pub use run::{Phase, RunResult, RunStatus};
