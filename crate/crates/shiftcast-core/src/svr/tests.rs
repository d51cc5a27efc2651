use super::*;
use crate::oracle::qp_reference_solve;
use approx::{assert_abs_diff_eq, assert_relative_eq};
use proptest::prelude::*;

fn linear_config(c: f64, epsilon: f64) -> TrainConfig {
    TrainConfig::new(c, epsilon, KernelSpec::Linear)
}

#[test]
fn kernel_eval_linear_dot_product() {
    let k = kernel_eval(&KernelSpec::Linear, &[1.0, 2.0], &[3.0, 4.0]).unwrap();
    assert_eq!(k, 11.0);
}

#[test]
fn kernel_eval_rbf_zero_distance() {
    for gamma in [0.01, 1.0, 25.0] {
        let k = kernel_eval(&KernelSpec::Rbf { gamma }, &[0.4, -1.0], &[0.4, -1.0]).unwrap();
        assert_eq!(k, 1.0);
    }
}

#[test]
fn kernel_eval_rbf_closed_form() {
    let k = kernel_eval(&KernelSpec::Rbf { gamma: 0.5 }, &[0.0, 0.0], &[1.0, 1.0]).unwrap();
    assert_relative_eq!(k, (-1.0f64).exp(), max_relative = 1e-12);
    assert_relative_eq!(k, 0.367879441, max_relative = 1e-8);
}

#[test]
fn kernel_eval_rejects_dimension_mismatch() {
    assert!(matches!(
        kernel_eval(&KernelSpec::Linear, &[1.0], &[1.0, 2.0]),
        Err(SvrError::DimensionMismatch {
            expected: 1,
            found: 2
        })
    ));
}

#[test]
fn config_validation() {
    assert!(linear_config(0.0, 0.1).validate().is_err());
    assert!(linear_config(-1.0, 0.1).validate().is_err());
    assert!(linear_config(1.0, -0.1).validate().is_err());
    assert!(linear_config(1.0, 0.0).validate().is_ok());
    assert!(TrainConfig::new(1.0, 0.1, KernelSpec::Rbf { gamma: 0.0 })
        .validate()
        .is_err());
    assert!(linear_config(1.0, 0.1).with_kkt_tolerance(0.0).validate().is_err());
    assert!(linear_config(1.0, 0.1).with_max_epochs(0).validate().is_err());
}

#[test]
fn train_single_point_fits_with_bias_only() {
    // One point: the equality constraint pins beta to 0, so the flattest
    // function is the constant b = y.
    let (model, stats) = train(&linear_config(1.0, 0.1), &[vec![0.0]], &[5.0]).unwrap();
    assert!(stats.converged());
    assert!(model.support_vectors.is_empty());
    let p = predict(&model, &[0.0]).unwrap();
    assert_abs_diff_eq!(p, 5.0, epsilon = 1e-9);
}

#[test]
fn train_zero_targets_predicts_zero() {
    let xs = vec![vec![0.3, -0.4], vec![0.9, 0.1], vec![-0.2, 0.7]];
    let ys = vec![0.0; 3];
    for kernel in [KernelSpec::Linear, KernelSpec::Rbf { gamma: 1.0 }] {
        let config = TrainConfig::new(1.0, 0.05, kernel);
        let (model, stats) = train(&config, &xs, &ys).unwrap();
        assert!(stats.converged());
        for x in &xs {
            let p = predict(&model, x).unwrap();
            assert!(p.abs() <= config.epsilon + 1e-9, "prediction {p}");
        }
    }
}

// Reference values for xs = {(0),(1),(2),(3)}, ys = {0,1,2,3}, C = 10,
// eps = 0.05, linear kernel. The reduced dual in t = beta_3 = -beta_0 is
// -4.5 t^2 + 2.9 t, so t = 29/90, objective 8.41/18, slope 29/30, bias 0.05;
// the projected-gradient reference solver reproduces all four.
const FOUR_POINT_OBJECTIVE: f64 = 8.41 / 18.0;
const FOUR_POINT_BETA: f64 = 29.0 / 90.0;

fn four_point_instance() -> (TrainConfig, Vec<Vec<f64>>, Vec<f64>) {
    let xs = vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]];
    let ys = vec![0.0, 1.0, 2.0, 3.0];
    let config = linear_config(10.0, 0.05).with_kkt_tolerance(1e-10);
    (config, xs, ys)
}

#[test]
fn train_four_point_matches_reference() {
    let (config, xs, ys) = four_point_instance();
    let (model, stats) = train(&config, &xs, &ys).unwrap();
    assert!(stats.converged());

    assert_relative_eq!(stats.dual_objective, FOUR_POINT_OBJECTIVE, max_relative = 1e-6);
    let oracle = qp_reference_solve(&config, &xs, &ys).unwrap();
    assert_relative_eq!(stats.dual_objective, oracle.dual_objective, max_relative = 1e-6);
    assert_relative_eq!(oracle.dual_objective, FOUR_POINT_OBJECTIVE, max_relative = 1e-9);

    let p = predict(&model, &[1.5]).unwrap();
    assert_abs_diff_eq!(p, 1.5, epsilon = 1e-4);
    assert_abs_diff_eq!(model.bias, 0.05, epsilon = 1e-6);

    let mut betas = model.betas.clone();
    betas.sort_by(f64::total_cmp);
    assert_eq!(betas.len(), 2);
    assert_abs_diff_eq!(betas[0], -FOUR_POINT_BETA, epsilon = 1e-6);
    assert_abs_diff_eq!(betas[1], FOUR_POINT_BETA, epsilon = 1e-6);
}

// Reference objective for a fixed 6-point RBF instance at the published RBF
// hyperparameters C = 0.13, gamma = 1.0, eps = 0.00097, frozen from the
// projected-gradient reference solver.
const SIX_POINT_RBF_OBJECTIVE: f64 = 1.74952676066454e-1;

fn six_point_instance() -> (TrainConfig, Vec<Vec<f64>>, Vec<f64>) {
    let xs = vec![
        vec![0.10, -0.30],
        vec![0.80, 0.50],
        vec![-0.40, 0.90],
        vec![0.30, 0.20],
        vec![-0.90, -0.70],
        vec![0.60, -0.80],
    ];
    let ys = vec![0.25, -0.40, 0.10, 0.60, -0.15, 0.35];
    let config =
        TrainConfig::new(0.13, 0.00097, KernelSpec::Rbf { gamma: 1.0 }).with_kkt_tolerance(1e-10);
    (config, xs, ys)
}

#[test]
fn train_six_point_rbf_matches_reference() {
    let (config, xs, ys) = six_point_instance();
    let (_, stats) = train(&config, &xs, &ys).unwrap();
    assert!(stats.converged());
    assert_relative_eq!(stats.dual_objective, SIX_POINT_RBF_OBJECTIVE, max_relative = 1e-6);
    let oracle = qp_reference_solve(&config, &xs, &ys).unwrap();
    assert_relative_eq!(stats.dual_objective, oracle.dual_objective, max_relative = 1e-6);
}

#[test]
fn returned_models_are_dual_feasible() {
    let (config, xs, ys) = six_point_instance();
    let (model, _) = train(&config, &xs, &ys).unwrap();
    let sum: f64 = model.betas.iter().sum();
    assert!(sum.abs() <= config.kkt_tolerance.max(1e-9), "sum {sum}");
    for b in &model.betas {
        assert!(b.abs() <= config.c + config.kkt_tolerance);
        assert!(b.abs() > 1e-10 * config.c.max(1.0), "stored SVs are above dust");
    }
}

#[test]
fn epsilon_tube_complementary_slackness() {
    let (config, xs, ys) = four_point_instance();
    let config = config.with_kkt_tolerance(1e-8);
    let (model, stats) = train(&config, &xs, &ys).unwrap();
    assert!(stats.converged());
    let tol = 10.0 * config.kkt_tolerance;
    for (x, y) in xs.iter().zip(&ys) {
        let residual = (predict(&model, x).unwrap() - y).abs();
        // Unbounded support vectors sit exactly on the tube; the rest inside.
        assert!(residual <= config.epsilon + tol, "residual {residual}");
    }
    for (sv, b) in model.support_vectors.iter().zip(&model.betas) {
        if b.abs() < config.c - config.kkt_tolerance {
            let i = xs.iter().position(|x| x == sv).unwrap();
            let residual = (predict(&model, sv).unwrap() - ys[i]).abs();
            assert_abs_diff_eq!(residual, config.epsilon, epsilon = tol);
        }
    }
}

#[test]
fn target_translation_shifts_only_the_bias() {
    let (config, xs, ys) = six_point_instance();
    let kappa = 3.75;
    let shifted: Vec<f64> = ys.iter().map(|y| y + kappa).collect();
    let (base, _) = train(&config, &xs, &ys).unwrap();
    let (moved, _) = train(&config, &xs, &shifted).unwrap();
    assert_eq!(base.betas.len(), moved.betas.len());
    for (a, b) in base.betas.iter().zip(&moved.betas) {
        assert_abs_diff_eq!(a, b, epsilon = 1e-9);
    }
    for x in &xs {
        let pa = predict(&base, x).unwrap();
        let pb = predict(&moved, x).unwrap();
        assert_abs_diff_eq!(pb - pa, kappa, epsilon = 1e-6);
    }
}

#[test]
fn dual_objective_zero_betas() {
    let (config, xs, ys) = four_point_instance();
    let value = dual_objective(&config, &xs, &ys, &[0.0; 4]).unwrap();
    assert_eq!(value, 0.0);
}

#[test]
fn dual_objective_closed_form_pair() {
    // Two orthonormal points, betas (t, -t) with t = 0.1:
    //   -t^2 (K11 + K22)/2 - 2 eps t + t (y1 - y2)
    //   = -0.01 - 0.01 + 0.04 = 0.02
    let xs = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
    let ys = vec![0.3, -0.1];
    let config = linear_config(1.0, 0.05);
    let value = dual_objective(&config, &xs, &ys, &[0.1, -0.1]).unwrap();
    assert_relative_eq!(value, 0.02, max_relative = 1e-12);
}

#[test]
fn dual_objective_rejects_infeasible_points() {
    let (config, xs, ys) = four_point_instance();
    assert!(matches!(
        dual_objective(&config, &xs, &ys, &[0.5, 0.0, 0.0, 0.0]),
        Err(SvrError::InfeasiblePoint { .. })
    ));
    assert!(matches!(
        dual_objective(&config, &xs, &ys, &[11.0, 0.0, 0.0, -11.0]),
        Err(SvrError::InfeasiblePoint { .. })
    ));
}

#[test]
fn epoch_objectives_are_monotone_and_final_is_max() {
    let (config, xs, ys) = six_point_instance();
    let (_, stats) = train(&config, &xs, &ys).unwrap();
    assert_eq!(stats.epochs_run, stats.epoch_objectives.len());
    for pair in stats.epoch_objectives.windows(2) {
        assert!(
            pair[1] >= pair[0] - 1e-12 * (1.0 + pair[0].abs()),
            "objective decreased: {} -> {}",
            pair[0],
            pair[1]
        );
    }
    for &w in &stats.epoch_objectives {
        assert!(stats.dual_objective >= w - 1e-12 * (1.0 + w.abs()));
    }
}

#[test]
fn predict_constant_model() {
    let model = SvrModel {
        kernel: KernelSpec::Linear,
        c: 1.0,
        epsilon: 0.1,
        kkt_tolerance: 1e-3,
        dimension: 2,
        bias: 5.0,
        support_vectors: vec![],
        betas: vec![],
        feature_names: vec!["f1".into(), "f2".into()],
        target_name: "y".into(),
        converged: true,
    };
    assert_eq!(predict(&model, &[17.0, -4.0]).unwrap(), 5.0);
}

#[test]
fn predict_hand_built_linear_model() {
    let model = SvrModel {
        kernel: KernelSpec::Linear,
        c: 2.0,
        epsilon: 0.1,
        kkt_tolerance: 1e-3,
        dimension: 2,
        bias: 0.0,
        support_vectors: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        betas: vec![1.0, -1.0],
        feature_names: vec!["f1".into(), "f2".into()],
        target_name: "y".into(),
        converged: true,
    };
    assert_eq!(predict(&model, &[2.0, 3.0]).unwrap(), -1.0);
    assert!(matches!(
        predict(&model, &[2.0]),
        Err(SvrError::DimensionMismatch { .. })
    ));
}

#[test]
fn train_input_validation() {
    let config = linear_config(1.0, 0.1);
    assert!(matches!(
        train(&config, &[], &[]),
        Err(SvrError::EmptyTrainingSet)
    ));
    assert!(matches!(
        train(&config, &[vec![1.0], vec![f64::INFINITY]], &[0.0, 1.0]),
        Err(SvrError::NonFiniteInput { .. })
    ));
    assert!(matches!(
        train(&config, &[vec![1.0], vec![1.0, 2.0]], &[0.0, 1.0]),
        Err(SvrError::DimensionMismatch { .. })
    ));
    assert!(matches!(
        train(&config, &[vec![1.0]], &[f64::NAN]),
        Err(SvrError::NonFiniteInput { .. })
    ));
}

#[test]
fn exhausted_epoch_budget_reports_violations() {
    // A deliberately hard budget: one epoch on a non-trivial instance with a
    // tolerance the first sweep cannot reach.
    let xs: Vec<Vec<f64>> = (0..40)
        .map(|i| vec![(i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()])
        .collect();
    let ys: Vec<f64> = (0..40).map(|i| (i as f64 * 0.9).sin()).collect();
    let config = TrainConfig::new(10.0, 0.0, KernelSpec::Rbf { gamma: 5.0 })
        .with_kkt_tolerance(1e-12)
        .with_max_epochs(1);
    let (model, stats) = train(&config, &xs, &ys).unwrap();
    assert_eq!(stats.epochs_run, 1);
    assert!(!stats.converged());
    assert!(stats.kkt_violations_remaining > 0);
    assert!(!model.converged);
    // The partial model is still usable.
    assert!(predict(&model, &xs[0]).unwrap().is_finite());
}

#[test]
fn cached_and_on_demand_kernels_agree() {
    let (config, xs, ys) = six_point_instance();
    let cached = smo::solve_with_cache_limit(&config, &xs, &ys, smo::KERNEL_CACHE_LIMIT);
    let on_demand = smo::solve_with_cache_limit(&config, &xs, &ys, 0);
    assert_eq!(cached.betas, on_demand.betas);
    assert_eq!(cached.bias.to_bits(), on_demand.bias.to_bits());
}

#[test]
fn model_save_load_is_bit_stable() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    let (config, xs, ys) = six_point_instance();
    let (mut model, _) = train(&config, &xs, &ys).unwrap();
    model.set_names(&["a", "b"], "shift").unwrap();
    save_model(&path, &model).unwrap();
    let loaded = load_model(&path).unwrap();
    assert_eq!(model, loaded);
    let probes = [vec![0.05, -0.22], vec![0.71, 0.44], vec![-0.9, 0.9]];
    for probe in &probes {
        let a = predict(&model, probe).unwrap();
        let b = predict(&loaded, probe).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn model_load_rejects_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"not\": \"a model\"}").unwrap();
    assert!(matches!(
        load_model(&bad),
        Err(SvrError::ModelFormat { .. })
    ));

    let versioned = dir.path().join("versioned.json");
    let (config, xs, ys) = six_point_instance();
    let (model, _) = train(&config, &xs, &ys).unwrap();
    save_model(&versioned, &model).unwrap();
    let text = std::fs::read_to_string(&versioned)
        .unwrap()
        .replace("\"format_version\": 1", "\"format_version\": 99");
    std::fs::write(&versioned, text).unwrap();
    let err = load_model(&versioned).unwrap_err();
    assert!(err.to_string().contains("format_version"), "{err}");
}

#[test]
fn set_names_checks_arity() {
    let (config, xs, ys) = six_point_instance();
    let (mut model, _) = train(&config, &xs, &ys).unwrap();
    assert!(model.set_names(&["only_one"], "y").is_err());
    assert!(model.set_names(&["a", "b"], "y").is_ok());
    assert_eq!(model.feature_names, vec!["a", "b"]);
}

proptest! {
    #[test]
    fn kernel_symmetry_and_rbf_range(
        // Domain kept small enough that exp(-gamma d^2) cannot underflow.
        u in proptest::collection::vec(-2.0f64..2.0, 3),
        v in proptest::collection::vec(-2.0f64..2.0, 3),
        gamma in 0.01f64..10.0,
    ) {
        let linear = KernelSpec::Linear;
        prop_assert_eq!(
            kernel_eval(&linear, &u, &v).unwrap().to_bits(),
            kernel_eval(&linear, &v, &u).unwrap().to_bits()
        );
        let rbf = KernelSpec::Rbf { gamma };
        let kuv = kernel_eval(&rbf, &u, &v).unwrap();
        prop_assert_eq!(kuv.to_bits(), kernel_eval(&rbf, &v, &u).unwrap().to_bits());
        prop_assert!(kuv > 0.0 && kuv <= 1.0);
    }
}
