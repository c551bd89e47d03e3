//! The chemical-reaction multistart demo.

use std::fs;
use std::io::Write;

use crate::desirability::{Desirability, OverallDesirability};
use crate::io::fmt_short;
use crate::optim::{
    grid_starts, multistart_maximize_desirability, NmOptions, PredictionFn, Region,
};
use crate::rsm::{activity_pred, conversion_pred, generate_plot_grid, GridFunction, GridVariable};

use super::{ChemicalArgs, CliError, CliResult, SpaceArg};

pub(super) fn chemical(args: &ChemicalArgs, out: &mut dyn Write) -> CliResult {
    let overall = OverallDesirability::new(vec![
        Desirability::max(80.0, 97.0).map_err(CliError::from)?,
        Desirability::target(55.0, 57.5, 60.0).map_err(CliError::from)?,
    ])
    .map_err(CliError::from)?;
    let preds: [PredictionFn<'_>; 2] = [
        &|x: &[f64]| conversion_pred(x).expect("finite point"),
        &|x: &[f64]| activity_pred(x).expect("finite point"),
    ];
    let region = match args.space {
        SpaceArg::Square => Region::Square { alpha: args.alpha },
        SpaceArg::Circular => Region::Circular { alpha: args.alpha },
    };
    let starts = grid_starts(-1.5, 1.5, 5, 3)?;
    let run = multistart_maximize_desirability(
        &overall,
        &preds,
        &region,
        &starts.view(),
        &NmOptions::default(),
    )?;

    let best = &run.best_x;
    let xs: Vec<String> = best.iter().map(|&v| fmt_short(v)).collect();
    writeln!(out, "Best parameters: [{}]", xs.join(", "))?;
    writeln!(out, "Best desirability: {}", fmt_short(-run.best_value))?;
    writeln!(
        out,
        "Conversion prediction: {}",
        fmt_short(conversion_pred(best)?)
    )?;
    writeln!(
        out,
        "Activity prediction: {}",
        fmt_short(activity_pred(best)?)
    )?;

    let dir = super::resolve_out_dir(&args.out, None);
    fs::create_dir_all(&dir)?;
    let best_temperature = best[1];
    for (name, f) in [
        (
            "conversion",
            &conversion_pred as &dyn Fn(&[f64]) -> crate::Result<f64>,
        ),
        ("activity", &activity_pred),
    ] {
        let variables = [
            GridVariable::Range {
                name: "time".into(),
                low: -args.alpha,
                high: args.alpha,
                resolution: 25,
            },
            GridVariable::Range {
                name: "catalyst".into(),
                low: -args.alpha,
                high: args.alpha,
                resolution: 25,
            },
        ];
        let functions = [GridFunction {
            name: format!("{name}_pred"),
            inputs: vec!["time".into(), "catalyst".into()],
            eval: Box::new(move |v: &[f64]| {
                f(&[v[0], best_temperature, v[1]]).expect("finite grid point")
            }),
        }];
        let grid = generate_plot_grid(&variables, &functions)?;
        let path = dir.join(format!("contour_{name}.csv"));
        let mut file = fs::File::create(&path)?;
        grid.write_csv(&mut file)?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(())
}
