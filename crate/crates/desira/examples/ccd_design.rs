//! Central composite designs and contour-grid tabulation for the
//! chemical-reaction response surfaces.
//!
//! ```bash
//! cargo run --example ccd_design
//! ```

use desira::rsm::{
    activity_pred, conversion_pred, generate_ccd, generate_plot_grid, GridFunction, GridVariable,
};

fn main() -> desira::Result<()> {
    // rotatable three-factor CCD: 8 corners, 6 axial points, 1 center
    let design = generate_ccd(3, None)?;
    println!(
        "rotatable CCD, k = 3: {} points, alpha = {:.5}",
        design.points.nrows(),
        design.alpha
    );
    for row in design.points.rows() {
        println!("  [{:>8.4}, {:>8.4}, {:>8.4}]", row[0], row[1], row[2]);
    }

    // tabulate both response surfaces over time x catalyst with the
    // temperature held at four levels, as a contour plot would
    let variables = [
        GridVariable::Range {
            name: "time".into(),
            low: -design.alpha,
            high: design.alpha,
            resolution: 5,
        },
        GridVariable::Levels {
            name: "temperature".into(),
            levels: vec![-1.5, -0.5, 0.5, 1.5],
        },
        GridVariable::Range {
            name: "catalyst".into(),
            low: -design.alpha,
            high: design.alpha,
            resolution: 5,
        },
    ];
    let functions = [
        GridFunction {
            name: "conversion_pred".into(),
            inputs: vec!["time".into(), "temperature".into(), "catalyst".into()],
            eval: Box::new(|x: &[f64]| conversion_pred(x).expect("finite grid point")),
        },
        GridFunction {
            name: "activity_pred".into(),
            inputs: vec!["time".into(), "temperature".into(), "catalyst".into()],
            eval: Box::new(|x: &[f64]| activity_pred(x).expect("finite grid point")),
        },
    ];
    let grid = generate_plot_grid(&variables, &functions)?;
    println!(
        "\ncontour grid: {} rows x {} columns ({})",
        grid.data.nrows(),
        grid.columns.len(),
        grid.columns.join(", ")
    );
    // print the first facet's corner rows
    for i in [0usize, 4, 20, 24] {
        let row = grid.data.row(i);
        println!(
            "  time {:>7.3} temp {:>5.2} catalyst {:>7.3} -> conversion {:>7.3}, activity {:>6.3}",
            row[0], row[1], row[2], row[3], row[4]
        );
    }
    Ok(())
}
