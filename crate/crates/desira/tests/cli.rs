//! End-to-end checks of the command-line surface: exit codes, printed
//! values, emitted files, and deterministic reruns.

use std::fs;

use desira::cli;

fn run(args: &[&str]) -> (i32, String) {
    let mut full = vec!["desira"];
    full.extend_from_slice(args);
    let mut out = Vec::new();
    let code = cli::run(full, &mut out);
    (code, String::from_utf8(out).expect("utf-8 output"))
}

fn grab_value(output: &str, prefix: &str) -> f64 {
    output
        .lines()
        .find_map(|l| l.strip_prefix(prefix))
        .unwrap_or_else(|| panic!("no `{prefix}` line in:\n{output}"))
        .trim()
        .parse()
        .expect("numeric value")
}

const SBO_CONFIG: &str = "\
[desirability.conversion]
kind = max
low = 80
high = 97

[desirability.activity]
kind = target
low = 55
target = 57.5
high = 60

[sbo]
objective = chemical
bounds = -1.7:1.7 -1.7:1.7 -1.7:1.7
n_initial = 15
max_iter = 50
seed = 126
max_surrogate_points = 30
mo2so = desirability
components = conversion activity
pareto = true
";

#[test]
fn demo_chemical_square_reports_high_desirability() {
    let dir = tempfile::tempdir().unwrap();
    let (code, output) = run(&[
        "demo",
        "chemical",
        "--space",
        "square",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{output}");
    assert!(grab_value(&output, "Best desirability:") >= 0.94);
    assert!(dir.path().join("contour_conversion.csv").exists());
    assert!(dir.path().join("contour_activity.csv").exists());

    // grid CSVs round-trip through the matrix reader
    let text = fs::read_to_string(dir.path().join("contour_conversion.csv")).unwrap();
    let body: String = text.lines().skip(1).collect::<Vec<_>>().join("\n");
    let matrix = desira::io::parse_matrix(&body).unwrap();
    assert_eq!(matrix.nrows(), 25 * 25);
    assert_eq!(matrix.ncols(), 3);
}

#[test]
fn demo_chemical_circular_reports_high_desirability() {
    let dir = tempfile::tempdir().unwrap();
    let (code, output) = run(&[
        "demo",
        "chemical",
        "--space",
        "circular",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{output}");
    assert!(grab_value(&output, "Best desirability:") >= 0.85);
}

#[test]
fn unknown_space_is_a_usage_error() {
    let (code, _) = run(&["demo", "chemical", "--space", "hexagonal"]);
    assert_eq!(code, 2);
}

#[test]
fn sbo_runs_the_chemical_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("chem.cfg");
    fs::write(&config, SBO_CONFIG).unwrap();
    let (code, output) = run(&[
        "sbo",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{output}");
    assert!(grab_value(&output, "Best objective:") <= 0.12);

    // trace row count equals the evaluation budget exactly
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 51); // header + 50 evaluations
    assert!(trace
        .lines()
        .next()
        .unwrap()
        .starts_with("eval,x1,x2,x3,m1,m2,y,is_best"));
    assert!(dir.path().join("progress.csv").exists());
    assert!(dir.path().join("pareto.csv").exists());
    let summary = fs::read_to_string(dir.path().join("summary.json")).unwrap();
    assert!(summary.contains("\"nfev\": 50"));
}

#[test]
fn sbo_reruns_are_byte_identical() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let config = dir_a.path().join("chem.cfg");
    // a smaller budget keeps this quick
    fs::write(
        &config,
        SBO_CONFIG.replace("max_iter = 50", "max_iter = 24"),
    )
    .unwrap();
    for dir in [&dir_a, &dir_b] {
        let (code, output) = run(&[
            "sbo",
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{output}");
    }
    let a = fs::read(dir_a.path().join("trace.csv")).unwrap();
    let b = fs::read(dir_b.path().join("trace.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn sbo_config_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("broken.cfg");
    fs::write(
        &config,
        "[sbo]\nobjective = chemical\nbounds = oops\nseed = 1\n",
    )
    .unwrap();
    let (code, output) = run(&["sbo", "--config", config.to_str().unwrap()]);
    assert_eq!(code, 2, "{output}");
    assert!(output.contains("line 3"), "{output}");

    let (code, _) = run(&["sbo", "--config", "/nonexistent/path.cfg"]);
    assert_eq!(code, 2);

    // a seed is mandatory
    let no_seed = dir.path().join("no_seed.cfg");
    fs::write(&no_seed, "[sbo]\nobjective = chemical\n").unwrap();
    let (code, output) = run(&["sbo", "--config", no_seed.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(output.contains("seed"), "{output}");
}

#[test]
fn plot_desirability_builtin_curve() {
    let dir = tempfile::tempdir().unwrap();
    let (code, output) = run(&[
        "plot-desirability",
        "--spec",
        "conversion",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{output}");
    let csv = fs::read_to_string(dir.path().join("conversion_curve.csv")).unwrap();
    assert_eq!(csv.lines().count(), 202); // header + 201 samples
    let svg = fs::read_to_string(dir.path().join("conversion_curve.svg")).unwrap();
    // the non-informative level (0.5) appears as a dashed marker
    assert!(svg.contains("stroke-dasharray"), "{svg}");
    assert!(svg.contains("polyline"));

    // curve CSV data rows round-trip through the matrix reader
    let body: String = csv.lines().skip(1).collect::<Vec<_>>().join("\n");
    let matrix = desira::io::parse_matrix(&body).unwrap();
    assert_eq!(matrix.ncols(), 2);
}

#[test]
fn plot_desirability_categorical_bars() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(&[
        "plot-desirability",
        "--spec",
        "categorical",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let svg = fs::read_to_string(dir.path().join("categorical_curve.svg")).unwrap();
    assert_eq!(svg.matches("<rect").count(), 4); // background + three bars
    for label in ["value1", "value2", "value3"] {
        assert!(svg.contains(label));
    }
}

#[test]
fn plot_desirability_from_config_section() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("specs.cfg");
    fs::write(
        &config,
        "[desirability.loss]\nkind = min\nlow = 6\nhigh = 6000\nscale = 2\n",
    )
    .unwrap();
    let (code, _) = run(&[
        "plot-desirability",
        "--spec",
        "loss",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(dir.path().join("loss_curve.csv").exists());
}

#[test]
fn plot_desirability_unknown_spec_is_usage_error() {
    let (code, output) = run(&["plot-desirability", "--spec", "nope", "--out", "/tmp"]);
    assert_eq!(code, 2, "{output}");
}

#[test]
fn mm_eval_prints_the_reference_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let design = dir.path().join("three.csv");
    fs::write(&design, "0.0,0.0\n0.5,0.5\n1.0,1.0\n").unwrap();
    let (code, output) = run(&["mm", "eval", "--design", design.to_str().unwrap()]);
    assert_eq!(code, 0, "{output}");
    assert!(output.contains("1.224744871391589"), "{output}");
    assert!(output.contains("Multiplicities: 2 1"), "{output}");
}

#[test]
fn mm_improve_duplicate_point_fails_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let design = dir.path().join("three.csv");
    fs::write(&design, "0.0,0.0\n0.5,0.5\n1.0,1.0\n").unwrap();
    let (code, output) = run(&[
        "mm",
        "improve",
        "--design",
        design.to_str().unwrap(),
        "--point",
        "0.5,0.5",
    ]);
    assert_eq!(code, 1, "{output}");
    assert!(output.contains("zero distance"), "{output}");

    let (code, output) = run(&[
        "mm",
        "improve",
        "--design",
        design.to_str().unwrap(),
        "--point",
        "0.1,0.9",
    ]);
    assert_eq!(code, 0);
    assert!(output.contains("Improvement:"), "{output}");
}

#[test]
fn mm_explore_tags_the_configured_phase_counts() {
    let dir = tempfile::tempdir().unwrap();
    let design = dir.path().join("clustered.csv");
    let mut csv = Vec::new();
    desira::spacefill::clustered_design(10, &[1.0, 1.0], 0.1, &[(-2.0, 2.0); 2], 21)
        .unwrap()
        .write_csv(&mut csv)
        .unwrap();
    fs::write(&design, csv).unwrap();

    let (code, output) = run(&[
        "mm",
        "explore",
        "--design",
        design.to_str().unwrap(),
        "--seed",
        "17",
        "--budget",
        "16",
        "--switch-after",
        "3",
        "--n-initial",
        "8",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{output}");

    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 17); // header + 16 evaluations
    let explore_rows = trace.lines().filter(|l| l.ends_with(",explore")).count();
    let exploit_rows = trace.lines().filter(|l| l.ends_with(",exploit")).count();
    let initial_rows = trace.lines().filter(|l| l.ends_with(",initial")).count();
    assert_eq!(
        (initial_rows, explore_rows, exploit_rows),
        (8, 3, 5),
        "{trace}"
    );
    assert!(dir.path().join("diagnostics.csv").exists());
    assert!(dir.path().join("summary.json").exists());
}

#[test]
fn mm_eval_duplicate_design_fails_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let design = dir.path().join("dup.csv");
    fs::write(&design, "0.5,0.5\n0.5,0.5\n1.0,1.0\n").unwrap();
    let (code, output) = run(&["mm", "eval", "--design", design.to_str().unwrap()]);
    assert_eq!(code, 1, "{output}");
    assert!(output.contains("zero distance"), "{output}");
}

#[test]
fn out_dir_env_var_is_the_default_sink() {
    let dir = tempfile::tempdir().unwrap();
    std::env::set_var(cli::OUT_DIR_ENV, dir.path());
    let (code, _) = run(&["plot-desirability", "--spec", "box"]);
    std::env::remove_var(cli::OUT_DIR_ENV);
    assert_eq!(code, 0);
    assert!(dir.path().join("box_curve.csv").exists());
}

#[test]
fn help_exits_cleanly() {
    let (code, output) = run(&["--help"]);
    assert_eq!(code, 0);
    for command in ["demo", "sbo", "plot-desirability", "mm"] {
        assert!(output.contains(command), "{output}");
    }
    let (code, _) = run(&["mm"]);
    assert_eq!(code, 2); // missing subcommand
}
