//! Cross-checks the hand-coded chemical-reaction polynomials against a
//! generic quadratic evaluator fed from coefficient files. The two routes
//! share nothing but the published numbers, so a transcription slip in
//! either one shows up here.

use approx::assert_abs_diff_eq;
use rand::Rng;
use rand::SeedableRng;

use desira::rsm::{activity_pred, conversion_pred, QuadraticModel};

const CONVERSION_CSV: &str = include_str!("data/conversion_coefficients.csv");
const ACTIVITY_CSV: &str = include_str!("data/activity_coefficients.csv");

#[test]
fn file_loaded_models_match_hand_coded_predictions() {
    let conversion = QuadraticModel::from_csv(CONVERSION_CSV).unwrap();
    let activity = QuadraticModel::from_csv(ACTIVITY_CSV).unwrap();
    assert_eq!(conversion.k(), 3);
    assert_eq!(activity.k(), 3);

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2718);
    for _ in 0..1000 {
        let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.7..1.7)).collect();
        assert_abs_diff_eq!(
            conversion.evaluate(&x).unwrap(),
            conversion_pred(&x).unwrap(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            activity.evaluate(&x).unwrap(),
            activity_pred(&x).unwrap(),
            epsilon = 1e-12
        );
    }
}

#[test]
fn coefficient_files_round_trip_through_the_writer() {
    for text in [CONVERSION_CSV, ACTIVITY_CSV] {
        let model = QuadraticModel::from_csv(text).unwrap();
        let rewritten = model.to_csv();
        assert_eq!(QuadraticModel::from_csv(&rewritten).unwrap(), model);
    }
}
