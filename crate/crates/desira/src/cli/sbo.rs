//! The configured surrogate-optimization command.

use std::fs;
use std::io::Write;

use ndarray::Axis;

use crate::config::ConfigDoc;
use crate::desirability::OverallDesirability;
use crate::error::Error;
use crate::io::{fmt_full, fmt_short};
use crate::rsm::chemical_objectives;
use crate::surrogate::{
    aggregate_weighted, desirability_mo2so, non_dominated_indices, sbo_minimize, InfillCriterion,
    SboConfig,
};

use super::{CliError, CliResult, SboArgs};

enum Scalarization {
    Desirability(OverallDesirability),
    Weighted(Vec<f64>),
}

pub(super) fn run(args: &SboArgs, out: &mut dyn Write) -> CliResult {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", args.config.display())))?;
    let doc = ConfigDoc::parse(&text).map_err(CliError::from)?;
    let section = doc.require_section("sbo").map_err(CliError::from)?;

    let objective_name = section.require("objective").map_err(CliError::from)?;
    if objective_name != "chemical" {
        return Err(CliError::from(Error::config(
            section.line_of("objective"),
            format!("unknown objective `{objective_name}` (available: chemical)"),
        )));
    }
    let bounds = section
        .get_bounds("bounds")
        .map_err(CliError::from)?
        .unwrap_or_else(|| vec![(-1.7, 1.7); 3]);
    if bounds.len() != 3 {
        return Err(CliError::from(Error::config(
            section.line_of("bounds"),
            "the chemical objective takes exactly 3 factors".to_string(),
        )));
    }

    let seed = section
        .get_u64("seed")
        .map_err(CliError::from)?
        .ok_or_else(|| {
            CliError::from(Error::config(
                section.line,
                "an explicit `seed` is required".to_string(),
            ))
        })?;

    let mut config = SboConfig::new(bounds);
    config.seed = seed;
    if let Some(v) = section.get_usize("n_initial").map_err(CliError::from)? {
        config.n_initial = v;
    }
    if let Some(v) = section.get_usize("max_iter").map_err(CliError::from)? {
        config.max_iter = v;
    }
    if let Some(v) = section
        .get_usize("max_surrogate_points")
        .map_err(CliError::from)?
    {
        config.max_surrogate_points = v;
    }
    if let Some(v) = section.get_usize("gp_restarts").map_err(CliError::from)? {
        config.gp_restarts = v;
    }
    if let Some(v) = section.get("infill") {
        config.infill = match v {
            "expected_improvement" => InfillCriterion::ExpectedImprovement,
            "posterior_mean" => InfillCriterion::PosteriorMean,
            other => {
                return Err(CliError::from(Error::config(
                    section.line_of("infill"),
                    format!("unknown infill criterion `{other}`"),
                )))
            }
        };
    }

    let scalarization = match section.get("mo2so").unwrap_or("desirability") {
        "desirability" => {
            let names = section.require("components").map_err(CliError::from)?;
            let mut specs = Vec::new();
            for name in names.split_whitespace() {
                specs.push(doc.desirability(name).map_err(CliError::from)?);
            }
            Scalarization::Desirability(OverallDesirability::new(specs).map_err(|e| {
                CliError::from(Error::config(section.line_of("components"), e.to_string()))
            })?)
        }
        "weighted" => {
            let weights = section
                .get_f64_list("weights")
                .map_err(CliError::from)?
                .ok_or_else(|| {
                    CliError::from(Error::config(
                        section.line,
                        "mo2so = weighted requires `weights`".to_string(),
                    ))
                })?;
            Scalarization::Weighted(weights)
        }
        other => {
            return Err(CliError::from(Error::config(
                section.line_of("mo2so"),
                format!("unknown mo2so `{other}` (desirability, weighted)"),
            )))
        }
    };

    let run = sbo_minimize(
        |x| chemical_objectives(x).expect("finite points"),
        |y| match &scalarization {
            Scalarization::Desirability(overall) => desirability_mo2so(y, overall),
            Scalarization::Weighted(weights) => aggregate_weighted(y, weights),
        },
        &config,
    )?;

    let xs: Vec<String> = run.best_x.iter().map(|&v| fmt_short(v)).collect();
    writeln!(out, "Best parameters: [{}]", xs.join(", "))?;
    writeln!(out, "Best objective: {}", fmt_short(run.best_value))?;
    if matches!(scalarization, Scalarization::Desirability(_)) {
        writeln!(
            out,
            "Best desirability: {}",
            fmt_short(1.0 - run.best_value)
        )?;
    }
    writeln!(
        out,
        "Evaluations: {} (surrogate iterations: {})",
        run.num_evaluations, run.iterations
    )?;

    let dir = super::resolve_out_dir(&args.out, section.get("out_dir"));
    fs::create_dir_all(&dir)?;
    let trace = dir.join("trace.csv");
    run.write_trace_csv(&mut fs::File::create(&trace)?)?;
    writeln!(out, "wrote {}", trace.display())?;
    let progress = dir.join("progress.csv");
    run.write_progress_csv(&mut fs::File::create(&progress)?)?;
    writeln!(out, "wrote {}", progress.display())?;
    let summary = dir.join("summary.json");
    run.write_summary(&mut fs::File::create(&summary)?)?;
    writeln!(out, "wrote {}", summary.display())?;

    if section
        .get_bool("pareto")
        .map_err(CliError::from)?
        .unwrap_or(false)
    {
        // non-dominated filter treats every objective column as minimized
        let y_mo = run
            .multi_values
            .as_ref()
            .expect("sbo traces are multi-objective");
        let front = non_dominated_indices(&y_mo.view());
        let path = dir.join("pareto.csv");
        let mut file = fs::File::create(&path)?;
        let header: Vec<String> = std::iter::once("eval".to_string())
            .chain((1..=y_mo.ncols()).map(|i| format!("m{i}")))
            .collect();
        writeln!(file, "{}", header.join(","))?;
        for &i in &front {
            let cells: Vec<String> = std::iter::once(i.to_string())
                .chain(y_mo.index_axis(Axis(0), i).iter().map(|&v| fmt_full(v)))
                .collect();
            writeln!(file, "{}", cells.join(","))?;
        }
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(())
}
