//! Tour of the desirability transforms: the three goal-directed forms,
//! arbitrary curves, box constraints, categorical lookups, and the
//! missing-value / zero-tolerance semantics. Writes one CSV + SVG curve
//! per transform.
//!
//! ```bash
//! cargo run --example desirability_curves [out_dir]
//! ```

use std::fs::{self, File};
use std::io::Write as _;
use std::path::PathBuf;

use desira::desirability::{Desirability, Transform};
use desira::svg::{BarPlot, CurvePlot};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out_dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "out/desirability_curves".to_string()),
    );
    fs::create_dir_all(&out_dir)?;

    let logistic_x: Vec<f64> = (0..20).map(|i| -5.0 + 10.0 * i as f64 / 19.0).collect();
    let logistic_d: Vec<f64> = logistic_x
        .iter()
        .map(|&u| 1.0 / (1.0 + (-u).exp()))
        .collect();

    let specs = [
        ("maximize", Desirability::max(80.0, 97.0)?),
        (
            "maximize_hard",
            Desirability::max_with_scale(80.0, 97.0, 4.0)?,
        ),
        ("minimize", Desirability::min_with_scale(6.0, 6000.0, 2.0)?),
        ("target", Desirability::target(55.0, 57.5, 60.0)?),
        ("logistic", Desirability::arbitrary(logistic_x, logistic_d)?),
        ("box", Desirability::box_constraint(-1.682, 1.682)?),
    ];

    for (name, spec) in &specs {
        let (lo, hi) = spec.informative_range().expect("numeric transforms");
        let margin = 0.1 * (hi - lo);
        println!(
            "{name}: informative range [{lo}, {hi}], non-informative {:.6}",
            spec.non_informative()
        );

        let mut points = Vec::new();
        let csv_path = out_dir.join(format!("{name}.csv"));
        let mut csv = File::create(&csv_path)?;
        writeln!(csv, "input,desirability")?;
        for i in 0..=200 {
            let x = lo - margin + (hi - lo + 2.0 * margin) * i as f64 / 200.0;
            let d = spec.evaluate(x)?;
            writeln!(csv, "{x},{d}")?;
            points.push((x, d));
        }
        let plot = CurvePlot::new("input", "desirability")
            .with_title(*name)
            .line(points)
            .dashed_hline(spec.non_informative());
        plot.render(&mut File::create(out_dir.join(format!("{name}.svg")))?)?;
    }

    // categorical transforms plot as bars
    let grouped = Desirability::categorical([("value1", 0.1), ("value2", 0.9), ("value3", 0.2)])?;
    println!(
        "categorical: non-informative {:.6}",
        grouped.non_informative()
    );
    println!("  value2 -> {}", grouped.evaluate_label("value2")?);
    if let Transform::Categorical(map) = grouped.transform() {
        let mut bars = BarPlot::new("desirability").with_title("categorical");
        for (label, value) in map {
            bars = bars.bar(label.clone(), *value);
        }
        bars.render(&mut File::create(out_dir.join("categorical.svg"))?)?;
    }

    // missing inputs (NaN) take the non-informative value by default,
    // propagate when asked, and zero tolerance floors hopeless scores
    let activity = Desirability::target(55.0, 57.5, 60.0)?;
    println!();
    println!(
        "activity.predict([59.85, NaN]) = {:?}",
        activity.predict(&[59.85, f64::NAN])?
    );
    let propagating = activity.clone().with_missing_propagated();
    println!(
        "with propagation             = {:?}",
        propagating.predict(&[59.85, f64::NAN])?
    );
    let floored = activity.with_tol(0.05)?;
    println!(
        "with tol 0.05, f = 54        = {:?}",
        floored.evaluate(54.0)?
    );

    println!("\ncurves written to {}", out_dir.display());
    Ok(())
}
