//! Desirability curve/bar exports.

use std::fs;
use std::io::Write;

use crate::config::ConfigDoc;
use crate::desirability::{Desirability, Transform};
use crate::io::fmt_full;
use crate::svg::{BarPlot, CurvePlot};

use super::{CliError, CliResult, PlotArgs};

fn builtin(name: &str) -> Option<Desirability> {
    match name {
        "conversion" => Some(Desirability::max(80.0, 97.0).expect("static spec")),
        "activity" => Some(Desirability::target(55.0, 57.5, 60.0).expect("static spec")),
        "logistic" => {
            let x: Vec<f64> = (0..20).map(|i| -5.0 + 10.0 * i as f64 / 19.0).collect();
            let d: Vec<f64> = x.iter().map(|&u| 1.0 / (1.0 + (-u).exp())).collect();
            Some(Desirability::arbitrary(x, d).expect("static spec"))
        }
        "box" => Some(Desirability::box_constraint(-1.682, 1.682).expect("static spec")),
        "categorical" => Some(
            Desirability::categorical([("value1", 0.1), ("value2", 0.9), ("value3", 0.2)])
                .expect("static spec"),
        ),
        _ => None,
    }
}

pub(super) fn run(args: &PlotArgs, out: &mut dyn Write) -> CliResult {
    let spec = if let Some(path) = &args.config {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        let doc = ConfigDoc::parse(&text).map_err(CliError::from)?;
        match doc.desirability(&args.spec) {
            Ok(spec) => spec,
            Err(_) => builtin(&args.spec).ok_or_else(|| {
                CliError::usage(format!("no desirability spec named `{}`", args.spec))
            })?,
        }
    } else {
        builtin(&args.spec).ok_or_else(|| {
            CliError::usage(format!(
                "unknown spec `{}` (built-ins: conversion, activity, logistic, box, categorical)",
                args.spec
            ))
        })?
    };

    let dir = super::resolve_out_dir(&args.out, None);
    fs::create_dir_all(&dir)?;
    let csv_path = dir.join(format!("{}_curve.csv", args.spec));
    let svg_path = dir.join(format!("{}_curve.svg", args.spec));

    if let Transform::Categorical(map) = spec.transform() {
        let mut csv = fs::File::create(&csv_path)?;
        writeln!(csv, "category,desirability")?;
        let mut plot =
            BarPlot::new("desirability").with_title(format!("{} desirability", args.spec));
        for (label, value) in map {
            writeln!(csv, "{label},{}", fmt_full(*value))?;
            plot = plot.bar(label.clone(), *value);
        }
        plot.render(&mut fs::File::create(&svg_path)?)?;
    } else {
        let (lo, hi) = spec.informative_range().expect("numeric spec");
        let margin = 0.1 * (hi - lo);
        let n = 201;
        let mut points = Vec::with_capacity(n);
        let mut csv = fs::File::create(&csv_path)?;
        writeln!(csv, "input,desirability")?;
        for i in 0..n {
            let x = lo - margin + (hi - lo + 2.0 * margin) * i as f64 / (n - 1) as f64;
            let d = spec.evaluate(x).map_err(CliError::from)?;
            writeln!(csv, "{},{}", fmt_full(x), fmt_full(d))?;
            points.push((x, d));
        }
        let mut plot = CurvePlot::new("input", "desirability")
            .with_title(format!("{} desirability", args.spec))
            .line(points);
        if let Some(missing) = spec.missing_value() {
            // the non-informative level is drawn as a broken line
            plot = plot.dashed_hline(missing);
        }
        plot.render(&mut fs::File::create(&svg_path)?)?;
    }

    writeln!(out, "wrote {}", csv_path.display())?;
    writeln!(out, "wrote {}", svg_path.display())?;
    Ok(())
}
