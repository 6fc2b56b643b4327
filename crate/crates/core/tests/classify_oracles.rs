use rand::Rng;
use sensegan::classify::io::{classifier_to_bytes, read_classifier};
use sensegan::classify::{
    accuracy, label_accuracy, train, train_random_forest, train_svm_rbf, train_svm_rbf_detailed, Classifier,
    ClassifierKind, ClassifierParams, ForestParams, SvmParams,
};
use sensegan::matrix::Matrix;
use sensegan::rng::{rng_from_seed, standard_normal};

fn random_set(n: usize, d: usize, seed: u64) -> (Matrix, Vec<u8>) {
    let mut rng = rng_from_seed(seed);
    let x = Matrix::from_vec(n, d, (0..n * d).map(|_| standard_normal(&mut rng)).collect()).unwrap();
    let mut y: Vec<u8> = x
        .iter_rows()
        .map(|r| u8::from(r[0] * r[0] + r[1] + 0.5 * standard_normal(&mut rng) > 1.0))
        .collect();
    y[0] = 0;
    y[1] = 1;
    (x, y)
}

#[test]
fn xor_is_learned_exactly() {
    let x = Matrix::from_vec(4, 2, vec![0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0, 0.0]).unwrap();
    let y = [0, 0, 1, 1];
    let p = SvmParams { c: 10.0, gamma: Some(1.0), standardize: false, ..SvmParams::default() };
    let m = train_svm_rbf(&x, &y, &p, 3).unwrap();
    let f = m.decision_function(&x).unwrap();
    assert!(f[0] < 0.0 && f[1] < 0.0 && f[2] > 0.0 && f[3] > 0.0, "{f:?}");
    assert_eq!(accuracy(&Classifier::Svm(m), &x, &y).unwrap(), 1.0);
}

#[test]
fn two_points_have_unit_margin() {
    let x = Matrix::from_vec(2, 3, vec![0.5, -1.0, 2.0, -0.5, 1.0, 0.0]).unwrap();
    let p = SvmParams { c: 1000.0, gamma: Some(0.5), standardize: false, ..SvmParams::default() };
    let m = train_svm_rbf(&x, &[1, 0], &p, 0).unwrap();
    let f = m.decision_function(&x).unwrap();
    assert!(f[0] >= 1.0 - 1e-6 && -f[1] >= 1.0 - 1e-6, "{f:?}");
}

#[test]
fn kkt_conditions_hold_on_twenty_datasets() {
    let tol = 1e-2;
    for seed in 0..20 {
        let (x, y) = random_set(60, 4, 100 + seed);
        let c = [0.5, 1.0, 10.0][seed as usize % 3];
        let p = SvmParams { c, ..SvmParams::default() };
        let (model, report) = train_svm_rbf_detailed(&x, &y, &p, seed).unwrap();
        let f = model.decision_function(&x).unwrap();
        let mut balance = 0.0;
        for i in 0..y.len() {
            let a = report.alphas[i];
            let yi = if y[i] == 1 { 1.0 } else { -1.0 };
            let m = yi * f[i];
            assert!((0.0..=c).contains(&a), "seed {seed}: alpha {a}");
            if a == 0.0 {
                assert!(m >= 1.0 - tol, "seed {seed} row {i}: alpha 0, margin {m}");
            } else if a < c {
                assert!((m - 1.0).abs() <= tol, "seed {seed} row {i}: free alpha, margin {m}");
            } else {
                assert!(m <= 1.0 + tol, "seed {seed} row {i}: alpha at C, margin {m}");
            }
            balance += a * yi;
        }
        assert!(balance.abs() < 1e-6, "seed {seed}: sum alpha y = {balance}");
    }
}

#[test]
fn support_vector_decisions_match_solver_cache() {
    for seed in 0..5 {
        let (x, y) = random_set(50, 3, 200 + seed);
        let (model, report) = train_svm_rbf_detailed(&x, &y, &SvmParams::default(), seed).unwrap();
        assert_eq!(model.support_vectors.rows(), report.support_index.len());
        let f = model.decision_function(&x).unwrap();
        for &i in &report.support_index {
            assert!((f[i] - report.cached_decision[i]).abs() < 1e-8);
        }
        let sum: f64 = model.dual_coef.iter().sum();
        assert!(sum.abs() < 1e-6);
    }
}

#[test]
fn single_tree_memorizes_distinct_rows() {
    for seed in 0..5 {
        let (x, y) = random_set(80, 5, 300 + seed);
        let p = ForestParams { n_trees: 1, max_depth: None, bootstrap: false, ..ForestParams::default() };
        let m = train_random_forest(&x, &y, &p, seed).unwrap();
        assert_eq!(m.predict(&x).unwrap(), y);
    }
}

#[test]
fn forest_separates_threshold_data() {
    let n = 40;
    let x = Matrix::from_vec(n, 1, (0..n).map(|i| i as f64 / 10.0).collect()).unwrap();
    let y: Vec<u8> = (0..n).map(|i| u8::from(i >= 17)).collect();
    let m = train_random_forest(&x, &y, &ForestParams::default(), 1).unwrap();
    assert_eq!(m.predict(&x).unwrap(), y);
}

#[test]
fn constant_labels_give_constant_forest() {
    let (x, _) = random_set(20, 3, 5);
    let m = train_random_forest(&x, &[1; 20], &ForestParams::default(), 0).unwrap();
    let (probe, _) = random_set(15, 3, 6);
    assert!(m.predict(&probe).unwrap().iter().all(|&l| l == 1));
}

#[test]
fn training_is_deterministic_and_serializable() {
    let (x, y) = random_set(60, 4, 7);
    let (probe, _) = random_set(30, 4, 8);
    let params = ClassifierParams::default();
    for kind in [ClassifierKind::RandomForest, ClassifierKind::SvmRbf] {
        let a = train(kind, &x, &y, &params, 11).unwrap();
        let b = train(kind, &x, &y, &params, 11).unwrap();
        assert_eq!(a.predict(&probe).unwrap(), b.predict(&probe).unwrap());
        let bytes = classifier_to_bytes(&a);
        assert_eq!(bytes, classifier_to_bytes(&b));
        let back = read_classifier(bytes.as_slice()).unwrap();
        assert_eq!(back.kind(), kind);
        assert_eq!(back.predict(&probe).unwrap(), a.predict(&probe).unwrap());
    }
}

#[test]
fn batched_prediction_equals_row_wise() {
    let (x, y) = random_set(40, 3, 9);
    let (probe, _) = random_set(12, 3, 10);
    for kind in [ClassifierKind::RandomForest, ClassifierKind::SvmRbf] {
        let m = train(kind, &x, &y, &ClassifierParams::default(), 2).unwrap();
        let all = m.predict(&probe).unwrap();
        for r in 0..probe.rows() {
            assert_eq!(m.predict(&probe.select_rows(&[r])).unwrap(), vec![all[r]]);
        }
        assert!(m.predict(&Matrix::zeros(0, 3)).unwrap().is_empty());
    }
}

#[test]
fn accuracy_arithmetic() {
    assert_eq!(label_accuracy(&[1, 0, 1, 1], &[1, 0, 0, 1]), 0.75);
    assert_eq!(label_accuracy(&[0, 0, 0, 0], &[0, 1, 0, 1]), 0.5);
    let (x, y) = random_set(10, 2, 12);
    let m = train(ClassifierKind::RandomForest, &x, &y, &ClassifierParams::default(), 0).unwrap();
    assert!(accuracy(&m, &x, &y[..5]).is_err());
}

#[test]
fn svm_margins_survive_row_permutation() {
    let (x, y) = random_set(50, 3, 13);
    let p = SvmParams::default();
    let a = train_svm_rbf(&x, &y, &p, 0).unwrap();
    let mut order: Vec<usize> = (0..50).collect();
    let mut rng = rng_from_seed(14);
    for i in (1..order.len()).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let yp: Vec<u8> = order.iter().map(|&i| y[i]).collect();
    let b = train_svm_rbf(&x.select_rows(&order), &yp, &p, 0).unwrap();
    let (probe, _) = random_set(40, 3, 15);
    let fa = a.decision_function(&probe).unwrap();
    let fb = b.decision_function(&probe).unwrap();
    for (u, v) in fa.iter().zip(&fb) {
        assert!((u - v).abs() < 0.05, "{u} vs {v}");
    }
}
