use flowsel::eval::{metrics_csv, ConfusionMatrix, MetricsReport, Split};
use proptest::prelude::*;

proptest! {
    #[test]
    fn swapping_positive_class_swaps_precision_and_npv(
        tp in 0u64..500, fp in 0u64..500, fn_ in 0u64..500, tn in 0u64..500,
    ) {
        let cm = ConfusionMatrix::new(tp, fp, fn_, tn);
        prop_assume!(cm.total() > 0);
        let m = cm.metrics().unwrap();
        let s = cm.swapped().metrics().unwrap();
        prop_assert_eq!(m.accuracy, s.accuracy);
        prop_assert_eq!(cm.swapped().swapped(), cm);
        let npv = if tn + fn_ == 0 { 0.0 } else { tn as f64 / (tn + fn_) as f64 };
        let specificity = if tn + fp == 0 { 0.0 } else { tn as f64 / (tn + fp) as f64 };
        prop_assert_eq!(s.precision, npv);
        prop_assert_eq!(s.recall, specificity);
        for v in [m.accuracy, m.precision, m.recall, m.f1] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        prop_assert!(m.f1 <= m.precision.max(m.recall) + 1e-15);
        prop_assert!(m.f1 + 1e-15 >= m.precision.min(m.recall));
    }

    #[test]
    fn tallies_sum_to_row_count(pairs in proptest::collection::vec((0u8..2, 0u8..2), 1..300)) {
        let (p, t): (Vec<u8>, Vec<u8>) = pairs.into_iter().unzip();
        let cm = ConfusionMatrix::from_classes(&p, &t).unwrap();
        prop_assert_eq!(cm.total() as usize, p.len());
        prop_assert_eq!((cm.tp + cm.fn_) as usize, t.iter().filter(|&&y| y == 1).count());
    }
}

#[test]
fn all_correct_prints_ones() {
    let cm = ConfusionMatrix::new(5, 0, 0, 7);
    let m = cm.metrics().unwrap();
    let r = MetricsReport {
        split: Split::Train,
        attack: "ssh".into(),
        classifier: "tree".into(),
        threshold: 0.4,
        n_features: 2,
        accuracy: m.accuracy,
        precision: m.precision,
        recall: m.recall,
        f1: m.f1,
        confusion: cm,
    };
    assert_eq!(
        metrics_csv(&[r]).lines().nth(1).unwrap(),
        "ssh,0.40,2,tree,train,1.00000,1.00000,1.00000,1.00000"
    );
}
