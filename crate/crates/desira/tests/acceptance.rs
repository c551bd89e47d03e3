//! Acceptance suite: end-to-end checks of the published reference values
//! and the library's core guarantees, one test per criterion. Each test
//! prints a `PASS`/`FAIL` line (visible with `--nocapture`).

use std::panic::{catch_unwind, resume_unwind, UnwindSafe};

use approx::assert_abs_diff_eq;
use ndarray::{array, Array2};

use desira::desirability::{Desirability, OverallDesirability};
use desira::optim::{
    grid_starts, multistart_maximize_desirability, NmOptions, PredictionFn, Region,
};
use desira::rsm::{activity_pred, chemical_objectives, conversion_pred};
use desira::spacefill::{
    ackley, clustered_design, estimate_improvement_ceiling, explore_exploit_run, mm_improvement,
    mmphi_intensive, ExploreExploitConfig, MmParams, SamplingPlan, DISTANCE_GROUPING_TOL,
};
use desira::surrogate::{
    desirability_mo2so, ei_value, gp_fit, sbo_minimize, KernelConfig, SboConfig,
};
use desira::Phase;

fn criterion(name: &str, f: impl FnOnce() + UnwindSafe) {
    match catch_unwind(f) {
        Ok(()) => println!("{name}: PASS"),
        Err(e) => {
            println!("{name}: FAIL");
            resume_unwind(e);
        }
    }
}

fn conversion_spec() -> Desirability {
    Desirability::max(80.0, 97.0).unwrap()
}

fn activity_spec() -> Desirability {
    Desirability::target(55.0, 57.5, 60.0).unwrap()
}

fn chemical_overall() -> OverallDesirability {
    OverallDesirability::new(vec![conversion_spec(), activity_spec()]).unwrap()
}

fn logistic_spec() -> Desirability {
    let x: Vec<f64> = (0..20).map(|i| -5.0 + 10.0 * i as f64 / 19.0).collect();
    let d: Vec<f64> = x.iter().map(|&u| 1.0 / (1.0 + (-u).exp())).collect();
    Desirability::arbitrary(x, d).unwrap()
}

#[test]
fn criterion_01_center_point_reproduction() {
    criterion("criterion 1 (center-point reproduction)", || {
        let overall = chemical_overall();
        let outcomes = array![[81.09, 59.85]];
        let (d, individual) = overall.predict_all(&outcomes.view()).unwrap();
        assert_abs_diff_eq!(individual[[0, 0]], 0.06411765, epsilon = 1e-8);
        assert_abs_diff_eq!(individual[[0, 1]], 0.06, epsilon = 1e-8);
        assert_abs_diff_eq!(d[0], 0.06202466, epsilon = 1e-8);
    });
}

#[test]
fn criterion_02_non_informative_values() {
    criterion("criterion 2 (non-informative values)", || {
        assert_eq!(conversion_spec().non_informative(), 0.5);
        assert_abs_diff_eq!(
            activity_spec().non_informative(),
            49.0 / 99.0,
            epsilon = 1e-12
        );
    });
}

#[test]
fn criterion_03_logistic_curve_reproduction() {
    criterion("criterion 3 (arbitrary logistic curve)", || {
        let spec = logistic_spec();
        let printed = [
            0.00669285, 0.01127661, 0.0189398, 0.03164396, 0.05241435, 0.08561266, 0.1368025,
            0.21151967, 0.31228169, 0.43458759, 0.56541241, 0.68771831, 0.78848033, 0.8631975,
            0.91438734, 0.94758565, 0.96835604, 0.9810602, 0.98872339, 0.99330715,
        ];
        for (i, want) in printed.iter().enumerate() {
            let x = -5.0 + 10.0 * i as f64 / 19.0;
            assert_abs_diff_eq!(spec.evaluate(x).unwrap(), *want, epsilon = 1e-8);
        }
        // out-of-range inputs clamp to the end values
        assert_abs_diff_eq!(spec.evaluate(10.0).unwrap(), 0.99330715, epsilon = 1e-8);
        assert_abs_diff_eq!(spec.evaluate(-10.0).unwrap(), 0.00669285, epsilon = 1e-8);
    });
}

fn chemical_preds() -> [PredictionFn<'static>; 2] {
    [
        &|x: &[f64]| conversion_pred(x).expect("finite point"),
        &|x: &[f64]| activity_pred(x).expect("finite point"),
    ]
}

#[test]
fn criterion_04_multistart_square_region() {
    criterion("criterion 4 (multistart NM, square region)", || {
        let starts = grid_starts(-1.5, 1.5, 5, 3).unwrap();
        let run = multistart_maximize_desirability(
            &chemical_overall(),
            &chemical_preds(),
            &Region::Square { alpha: 1.682 },
            &starts.view(),
            &NmOptions::default(),
        )
        .unwrap();
        let desirability = -run.best_value;
        assert!(desirability >= 0.94, "D = {desirability}");
        for (got, want) in run.best_x.iter().zip([-0.512, 1.682, -0.586]) {
            assert!((got - want).abs() <= 0.05, "best x = {:?}", run.best_x);
        }
        assert_abs_diff_eq!(activity_pred(&run.best_x).unwrap(), 57.5, epsilon = 1e-3);
    });
}

#[test]
fn criterion_05_multistart_circular_region() {
    criterion("criterion 5 (multistart NM, circular region)", || {
        let starts = grid_starts(-1.5, 1.5, 5, 3).unwrap();
        let run = multistart_maximize_desirability(
            &chemical_overall(),
            &chemical_preds(),
            &Region::Circular { alpha: 1.682 },
            &starts.view(),
            &NmOptions::default(),
        )
        .unwrap();
        let desirability = -run.best_value;
        assert!(desirability >= 0.85, "D = {desirability}");
        let norm = run.best_x.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm <= 1.682 + 1e-6, "norm = {norm}");
    });
}

#[test]
#[allow(clippy::approx_constant)] // the distances are printed reference values
fn criterion_06_intensive_criterion_exactness() {
    criterion("criterion 6 (intensive criterion exactness)", || {
        let plan = SamplingPlan::new(array![[0.0, 0.0], [0.5, 0.5], [1.0, 1.0]]).unwrap();
        let (quality, profile) = mmphi_intensive(&plan, &MmParams::default()).unwrap();
        assert_abs_diff_eq!(quality, 1.224744871391589, epsilon = 1e-12);
        assert_eq!(profile.multiplicities, vec![2, 1]);
        assert_abs_diff_eq!(profile.distances[0], 0.70710678, epsilon = 1e-8);
        assert_abs_diff_eq!(profile.distances[1], 1.41421356, epsilon = 1e-8);
    });
}

#[test]
fn criterion_07_improvement_oracle_equivalence() {
    criterion("criterion 7 (improvement oracle equivalence)", || {
        use rand::Rng;
        use rand::SeedableRng;
        let params = MmParams::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20240901);
        let mut checked = 0;
        while checked < 100 {
            let n = rng.random_range(2..=20);
            let k = rng.random_range(1..=5);
            let points = Array2::from_shape_fn((n, k), |_| rng.random_range(-1.0..1.0));
            let candidate: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
            let plan = SamplingPlan::new(points).unwrap();

            let incremental = match mm_improvement(&plan, &candidate, &params) {
                Ok(v) => v,
                Err(_) => continue, // a random duplicate; draw again
            };
            let mut augmented = plan.clone();
            augmented.push(&candidate).unwrap();
            let from_scratch = mmphi_intensive(&plan, &params).unwrap().0
                - mmphi_intensive(&augmented, &params).unwrap().0;
            assert_abs_diff_eq!(incremental, from_scratch, epsilon = 1e-9);
            checked += 1;
        }
    });
}

#[test]
fn criterion_08_surrogate_chemical_reaction() {
    criterion("criterion 8 (surrogate optimization, 5 seeds)", || {
        let overall = chemical_overall();
        let mut best_values = Vec::new();
        for seed in [126u64, 127, 128, 129, 130] {
            let config = SboConfig {
                n_initial: 15,
                max_iter: 50,
                seed,
                max_surrogate_points: 30,
                ..SboConfig::new(vec![(-1.7, 1.7); 3])
            };
            let run = sbo_minimize(
                |x| chemical_objectives(x).expect("finite points"),
                |y| desirability_mo2so(y, &overall),
                &config,
            )
            .unwrap();
            assert_eq!(run.num_evaluations, 50);
            best_values.push(run.best_value);
        }
        best_values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = best_values[2];
        assert!(median <= 0.12, "median 1-D = {median} ({best_values:?})");
    });
}

#[test]
fn criterion_09_desirability_scalarization() {
    criterion("criterion 9 (desirability scalarization)", || {
        let overall = chemical_overall();
        let x = array![[0.0, 0.0, 0.0], [-0.51207663, 1.68199987, -0.58609664]];
        let y = chemical_objectives(&x.view()).unwrap();
        let scores = desirability_mo2so(&y.view(), &overall).unwrap();
        assert_abs_diff_eq!(scores[0], 0.93797534, epsilon = 1e-6);
        assert_abs_diff_eq!(scores[1], 0.05749073, epsilon = 1e-6);
    });
}

#[test]
fn criterion_10_property_suites() {
    criterion("criterion 10 (property suites)", || {
        // desirability range, monotonicity, scale law, zero propagation
        let ramp = Desirability::max(-10.0, 10.0).unwrap();
        let powered = Desirability::max_with_scale(-10.0, 10.0, 2.5).unwrap();
        let mut previous = -1.0;
        for i in 0..=400 {
            let f = -20.0 + 40.0 * i as f64 / 400.0;
            let v = ramp.evaluate(f).unwrap();
            assert!((0.0..=1.0).contains(&v));
            assert!(v >= previous - 1e-12, "not monotone at {f}");
            previous = v;
            assert_abs_diff_eq!(powered.evaluate(f).unwrap(), v.powf(2.5), epsilon = 1e-12);
        }
        let overall = chemical_overall();
        let zeroed = overall.predict(&array![[70.0, 57.5]].view()).unwrap();
        assert_eq!(zeroed[0], 0.0);

        // GP interpolation and the EI closed form
        let xs: Vec<f64> = (0..10).map(|i| i as f64 / 9.0 * 6.0).collect();
        let ys: Vec<f64> = xs.iter().map(|v| v.sin()).collect();
        let x_train = Array2::from_shape_vec((10, 1), xs).unwrap();
        let model = gp_fit(&x_train.view(), &ys, &KernelConfig::default(), 6, 9).unwrap();
        for (row, want) in x_train.rows().into_iter().zip(&ys) {
            let (mean, _) = model.predict_point(row.as_slice().unwrap());
            assert!(
                (mean - want).abs() < (10.0 * model.jitter()).max(1e-6),
                "interpolation off: {mean} vs {want}"
            );
        }
        assert_abs_diff_eq!(
            ei_value(3.0, 1.0, 3.0),
            1.0 / (2.0 * std::f64::consts::PI).sqrt(),
            epsilon = 1e-12
        );
        assert_eq!(ei_value(5.0, 0.0, 3.0), 0.0);

        // criterion homogeneity, permutation invariance, pair-count sum
        let params = MmParams::default();
        let plan =
            SamplingPlan::new(array![[0.0, 0.1], [0.4, 0.9], [1.0, 0.3], [0.7, 0.6]]).unwrap();
        let (phi, profile) = mmphi_intensive(&plan, &params).unwrap();
        assert_eq!(profile.multiplicities.iter().sum::<usize>(), 4 * 3 / 2);
        let scaled = SamplingPlan::new(plan.points() * 2.0).unwrap();
        assert_abs_diff_eq!(
            mmphi_intensive(&scaled, &params).unwrap().0,
            phi / 2.0,
            epsilon = 1e-12
        );
        let permuted =
            SamplingPlan::new(array![[0.7, 0.6], [1.0, 0.3], [0.0, 0.1], [0.4, 0.9]]).unwrap();
        assert_abs_diff_eq!(
            mmphi_intensive(&permuted, &params).unwrap().0,
            phi,
            epsilon = 1e-12
        );

        // deterministic reruns export byte-identical traces
        let overall2 = chemical_overall();
        let config = SboConfig {
            n_initial: 8,
            max_iter: 14,
            seed: 99,
            gp_restarts: 3,
            ..SboConfig::new(vec![(-1.7, 1.7); 3])
        };
        let mut traces = Vec::new();
        for _ in 0..2 {
            let run = sbo_minimize(
                |x| chemical_objectives(x).expect("finite points"),
                |y| desirability_mo2so(y, &overall2),
                &config,
            )
            .unwrap();
            let mut buf = Vec::new();
            run.write_trace_csv(&mut buf).unwrap();
            traces.push(buf);
        }
        assert_eq!(traces[0], traces[1], "reruns must be byte-identical");
    });
}

#[test]
fn criterion_11_explore_exploit_demo() {
    criterion("criterion 11 (explore/exploit demo)", || {
        let bounds = vec![(-2.0, 2.0), (-2.0, 2.0)];
        let x0 = clustered_design(10, &[1.0, 1.0], 0.1, &bounds, 21).unwrap();
        let ackley_point = |x: &[f64]| {
            let m = Array2::from_shape_vec((1, x.len()), x.to_vec()).unwrap();
            ackley(&m.view())[0]
        };
        let baseline = x0
            .points()
            .rows()
            .into_iter()
            .map(|r| ackley_point(r.as_slice().unwrap()))
            .fold(f64::INFINITY, f64::min);
        let ceiling =
            estimate_improvement_ceiling(ackley_point, &bounds, baseline, 1000, 34).unwrap();
        let d_obj = Desirability::max(0.0, ceiling).unwrap();
        let d_mm = Desirability::max_with_scale(-0.1, 1.1, 2.0).unwrap();
        let config = ExploreExploitConfig {
            budget: 40,
            switch_after: 10,
            n_initial: 10,
            seed: 17,
            ..ExploreExploitConfig::new(bounds)
        };
        let result = explore_exploit_run(ackley_point, &x0, &d_obj, &d_mm, &config).unwrap();
        assert!(result.best_f < 0.5, "best f = {}", result.best_f);

        // exact phase accounting
        let phases = result.run.phases.as_ref().unwrap();
        assert_eq!(phases.len(), 40);
        assert_eq!(phases.iter().filter(|p| **p == Phase::Initial).count(), 10);
        assert_eq!(phases.iter().filter(|p| **p == Phase::Explore).count(), 10);
        assert_eq!(phases.iter().filter(|p| **p == Phase::Exploit).count(), 20);
        assert_eq!(result.run.num_evaluations, 40);
        assert_eq!(result.objective_values.len(), 40);
    });
}

#[test]
fn distance_profile_duplicate_rejection_is_stable() {
    // duplicates stay hard errors regardless of grouping tolerance details
    let plan =
        SamplingPlan::new(array![[0.2, 0.2], [0.2, 0.2 + DISTANCE_GROUPING_TOL / 2.0]]).unwrap();
    assert!(mmphi_intensive(&plan, &MmParams::default()).is_err());
}
