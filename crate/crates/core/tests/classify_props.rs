mod common;

use flowsel::classify::bayes::{predict_naive_bayes, train_naive_bayes};
use flowsel::classify::forest::{predict_forest, train_forest};
use flowsel::classify::logistic::{predict_logistic, train_logistic};
use flowsel::classify::svm::{predict_svm, train_svm};
use flowsel::classify::tree::{predict_tree, train_tree};
use flowsel::classify::{
    predict, train, Algorithm, BayesParams, Criterion, Dataset, ForestParams, Hyperparams,
    LogisticParams, ModelParameters, Node, SvmParams, TrainedModel, TreeParams,
};
use flowsel::tabular::{Column, Table};
use proptest::prelude::*;

fn training_accuracy(m: &TrainedModel, t: &Table) -> f64 {
    let y = t.binary_labels().unwrap();
    let p = predict(m, t).unwrap();
    p.iter().zip(&y).filter(|(p, y)| p.class == **y).count() as f64 / y.len() as f64
}

#[test]
fn dispatch_matches_direct_predictors() {
    let t = common::blobs(120, 4);
    let d = Dataset::from_table(&t).unwrap();
    for alg in Algorithm::ALL {
        let hp = Hyperparams::default_for(alg).with_seed(3);
        let m = train(&t, &hp).unwrap();
        let via = predict(&m, &t).unwrap();
        for (r, p) in d.rows.iter().zip(&via) {
            let direct = match (&m.parameters, &hp) {
                (ModelParameters::Logistic(x), _) => predict_logistic(x, r),
                (ModelParameters::NaiveBayes(x), _) => predict_naive_bayes(x, r),
                (ModelParameters::Svm(x), _) => predict_svm(x, r),
                (ModelParameters::Tree(x), _) => predict_tree(x, r),
                (ModelParameters::Forest(x), _) => predict_forest(x, r),
            }
            .unwrap();
            assert_eq!(&direct, p, "{alg}");
        }
        // and the direct trainers produce the same parameters
        let direct = match &hp {
            Hyperparams::Logistic(p) => ModelParameters::Logistic(train_logistic(&d, p).unwrap()),
            Hyperparams::NaiveBayes(p) => {
                ModelParameters::NaiveBayes(train_naive_bayes(&d, p).unwrap())
            }
            Hyperparams::Svm(p) => ModelParameters::Svm(train_svm(&d, p).unwrap()),
            Hyperparams::Tree(p) => ModelParameters::Tree(train_tree(&d, p).unwrap()),
            Hyperparams::Forest(p) => ModelParameters::Forest(train_forest(&d, p).unwrap()),
        };
        assert_eq!(direct, m.parameters, "{alg}");
    }
}

#[test]
fn naive_bayes_log_domain_matches_direct_product() {
    let t = common::planted(300, 3, 11);
    let d = Dataset::from_table(&t).unwrap();
    let m = train_naive_bayes(&d, &BayesParams::default()).unwrap();
    let density = |x: f64, mu: f64, s: f64| {
        (-(x - mu).powi(2) / (2.0 * s * s)).exp() / (s * (2.0 * std::f64::consts::PI).sqrt())
    };
    for row in d.rows.iter().take(50) {
        let lj = m.log_joint(row);
        for (c, &got) in lj.iter().enumerate() {
            let direct: f64 = m.priors[c]
                * row
                    .iter()
                    .enumerate()
                    .map(|(j, &x)| density(x, m.means[c][j], m.std_devs[c][j]))
                    .product::<f64>();
            assert!(
                (got - direct.ln()).abs() < 1e-9,
                "{} vs {}",
                got,
                direct.ln()
            );
        }
    }
}

#[test]
fn tree_splits_on_a_clean_cut_with_either_criterion() {
    let t = common::planted(400, 4, 2);
    let d = Dataset::from_table(&t).unwrap();
    let root = |criterion| match train_tree(
        &d,
        &TreeParams {
            criterion,
            ..Default::default()
        },
    )
    .unwrap()
    .nodes[0]
    {
        Node::Split {
            feature, threshold, ..
        } => (feature, threshold),
        Node::Leaf { .. } => panic!("root is a leaf"),
    };
    let (fg, tg) = root(Criterion::Gini);
    let (fe, te) = root(Criterion::InformationGain);
    assert_eq!((fg, fe), (0, 0));
    assert_eq!(tg, te);
}

#[test]
fn forest_parallel_training_is_reproducible() {
    let t = common::planted(300, 6, 5);
    let d = Dataset::from_table(&t).unwrap();
    let p = ForestParams {
        tree_count: 16,
        seed: 21,
        ..Default::default()
    };
    let a = train_forest(&d, &p).unwrap();
    let b = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| train_forest(&d, &p).unwrap());
    assert_eq!(a, b);
}

#[test]
fn logistic_ignores_row_order() {
    let t = common::blobs(80, 9);
    let d = Dataset::from_table(&t).unwrap();
    let mut rev = d.clone();
    rev.rows.reverse();
    rev.labels.reverse();
    let p = LogisticParams::default();
    assert_eq!(
        train_logistic(&d, &p).unwrap(),
        train_logistic(&rev, &p).unwrap()
    );
}

#[test]
fn svm_runs_are_seeded() {
    let t = common::blobs(80, 9);
    let d = Dataset::from_table(&t).unwrap();
    let p = SvmParams {
        seed: 4,
        ..Default::default()
    };
    assert_eq!(train_svm(&d, &p).unwrap(), train_svm(&d, &p).unwrap());
}

#[test]
fn saved_models_predict_identically() {
    let t = common::planted(200, 4, 8);
    let dir = tempfile::tempdir().unwrap();
    for alg in Algorithm::ALL {
        let m = train(&t, &Hyperparams::default_for(alg)).unwrap();
        let path = dir.path().join(format!("{alg}.json"));
        m.save(&path).unwrap();
        let back = TrainedModel::load(&path).unwrap();
        assert_eq!(back, m);
        assert_eq!(predict(&back, &t).unwrap(), predict(&m, &t).unwrap());
    }
}

#[test]
fn renamed_column_is_rejected() {
    let t = common::blobs(40, 1);
    let m = train(&t, &Hyperparams::default_for(Algorithm::Tree)).unwrap();
    let mut cols = t.columns().to_vec();
    cols[0].name = "x2".into();
    let renamed = Table::new(cols).unwrap();
    assert!(predict(&m, &renamed).is_err());
}

fn distinct_rows() -> impl Strategy<Value = Table> {
    (4usize..40, 1usize..4, any::<u64>()).prop_map(|(n, w, seed)| {
        let t = common::random_table(n, w, 7, seed);
        // keep the first occurrence of every feature vector
        let rows = t.feature_rows();
        let mut seen = std::collections::BTreeSet::new();
        let keep: Vec<usize> = (0..n)
            .filter(|&r| seen.insert(rows[r].iter().map(|v| v.to_bits()).collect::<Vec<_>>()))
            .collect();
        t.select_rows(&keep)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unrestricted_tree_fits_distinct_rows(t in distinct_rows()) {
        let m = train(&t, &Hyperparams::default_for(Algorithm::Tree)).unwrap();
        prop_assert_eq!(training_accuracy(&m, &t), 1.0);
    }

    #[test]
    fn scores_are_probabilities(seed in any::<u64>()) {
        let t = common::planted(60, 3, seed);
        for alg in Algorithm::ALL {
            let m = train(&t, &Hyperparams::default_for(alg)).unwrap();
            for p in predict(&m, &t).unwrap() {
                prop_assert!((0.0..=1.0).contains(&p.score));
                prop_assert!(p.class <= 1);
            }
        }
    }
}

#[test]
fn one_class_training_fails_for_linear_models() {
    let t = Table::new(vec![
        Column::numeric("a", vec![0.0, 0.5, 1.0]),
        Column::label("Label", vec![1.0, 1.0, 1.0]),
    ])
    .unwrap();
    for alg in [Algorithm::Logistic, Algorithm::Svm, Algorithm::NaiveBayes] {
        assert!(train(&t, &Hyperparams::default_for(alg)).is_err(), "{alg}");
    }
}
