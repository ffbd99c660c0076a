mod common;

use fairsfs_core::eval::*;
use fairsfs_core::metrics::{predictive_equality, spd, FairnessReport};
use fairsfs_core::oracle::{fair_feature_set, markov_blanket};
use fairsfs_core::*;
use proptest::prelude::*;

struct Always(u8);

impl Predict for Always {
    fn predict(&self, _row: &[u32]) -> u8 {
        self.0
    }
}

/// Predicts the majority training label everywhere.
struct Majority;

impl Learner for Majority {
    fn fit(&self, _x: &FeatureMatrix, y: &[u8]) -> fairsfs_core::Result<Box<dyn Predict + Send + Sync>> {
        let ones = y.iter().filter(|&&v| v == 1).count();
        Ok(Box::new(Always((2 * ones > y.len()) as u8)))
    }
}

fn fixture_table(n: usize, seed: u64) -> (fairsfs_core::oracle::BayesNet, DataTable) {
    let net = common::load_fixture("mediated.net.json");
    let s = net.index_of("S").unwrap();
    let t = net.index_of("T").unwrap();
    let table = net.sample_table(n, seed, s, t).unwrap();
    (net, table)
}

#[test]
fn constant_predictor_has_majority_accuracy_and_no_disparity() {
    let (_, table) = fixture_table(3000, 1);
    let labels = table.target_labels();
    let ones = labels.iter().filter(|&&v| v == 1).count() as f64 / labels.len() as f64;
    let report = cross_validate(&table, &FeatureSource::Fixed(vec![1, 2]), &Majority, 10, 0, 1).unwrap();
    assert!((report.mean.acc - ones.max(1.0 - ones)).abs() < 0.01);
    assert_eq!(report.mean.spd, 0.0);
    assert!(report.folds.iter().all(|f| f.report.spd == 0.0));
}

#[test]
fn same_seed_same_report() {
    let (_, table) = fixture_table(2000, 2);
    for kind in [ClassifierKind::Nb, ClassifierKind::Lr, ClassifierKind::Knn] {
        let spec = ClassifierSpec::default_for(kind);
        let a = cross_validate(&table, &FeatureSource::Fixed(vec![1, 2, 4]), &spec, 5, 9, 1).unwrap();
        let b = cross_validate(&table, &FeatureSource::Fixed(vec![1, 2, 4]), &spec, 5, 9, 1).unwrap();
        assert_eq!(a.to_jsonl(), b.to_jsonl());
        assert_eq!(CvReport::from_jsonl(&a.to_jsonl()).unwrap(), a);
    }
}

#[test]
fn fair_set_has_lower_parity_gap_than_the_full_blanket() {
    let (net, table) = fixture_table(10_000, 3);
    let s = net.index_of("S").unwrap();
    let t = net.index_of("T").unwrap();
    let fair: Vec<usize> = fair_feature_set(&net, t, s, 3).unwrap().into_iter().map(|m| m.node).collect();
    let full = markov_blanket(&net, t);
    let nb = ClassifierSpec::default_for(ClassifierKind::Nb);
    let fair_cv = cross_validate(&table, &FeatureSource::Fixed(fair), &nb, 10, 0, 1).unwrap();
    let full_cv = cross_validate(&table, &FeatureSource::Fixed(full), &nb, 10, 0, 1).unwrap();
    assert!(fair_cv.mean.spd < full_cv.mean.spd, "{} vs {}", fair_cv.mean.spd, full_cv.mean.spd);
}

#[test]
fn per_fold_selection_records_each_folds_features() {
    let (_, table) = fixture_table(4000, 4);
    let source = FeatureSource::PerFold {
        cfg: SelectorConfig::default(),
        order: StreamOrder::FileOrder,
    };
    let nb = ClassifierSpec::default_for(ClassifierKind::Nb);
    let report = cross_validate(&table, &source, &nb, 5, 0, 1).unwrap();
    assert_eq!(report.folds.len(), 5);
    let c = table.column_index("C").unwrap();
    assert!(report.folds.iter().all(|f| !f.features.contains(&c)));
}

#[test]
fn single_class_training_split_is_rejected() {
    let metas = vec![
        ColumnMeta::numbered("s", 2),
        ColumnMeta::numbered("x", 2),
        ColumnMeta::numbered("t", 2),
    ];
    // one positive row: every fold but the one holding it trains on zeros only
    let n = 20;
    let s: Vec<u32> = (0..n).map(|i| (i % 2) as u32).collect();
    let x: Vec<u32> = (0..n).map(|i| (i / 2 % 2) as u32).collect();
    let mut t = vec![0u32; n];
    t[3] = 1;
    let table = DataTable::new(vec![s, x, t], metas, 0, 2).unwrap();
    let nb = ClassifierSpec::default_for(ClassifierKind::Nb);
    let err = cross_validate(&table, &FeatureSource::Fixed(vec![1]), &nb, 5, 0, 1).unwrap_err();
    assert!(matches!(err, Error::DegenerateFold { .. }), "{err}");
}

#[test]
fn nb_tables_are_normalized() {
    let (_, table) = fixture_table(500, 5);
    let rows: Vec<usize> = (0..table.n_rows()).collect();
    let features = vec![1, 2, 3, 4];
    let x = FeatureMatrix::from_table(&table, &features, &rows);
    let model = NaiveBayesModel::fit(&x, &table.target_labels(), 1.0).unwrap();
    for f in 0..features.len() {
        for class in 0..2 {
            let total: f64 = model.likelihoods(f, class).iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }
}

proptest! {
    #[test]
    fn folds_partition_the_rows(labels in prop::collection::vec(0u8..2, 10..200), k in 2usize..10, seed in any::<u64>()) {
        prop_assume!(k <= labels.len());
        let plan = FoldPlan::stratified(&labels, k, seed).unwrap();
        let mut seen = vec![0; labels.len()];
        for f in 0..k {
            for r in plan.test_rows(f) {
                seen[r] += 1;
            }
            prop_assert_eq!(plan.test_rows(f).len() + plan.train_rows(f).len(), labels.len());
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn parity_ignores_row_order_and_group_names(
        rows in prop::collection::vec((0u8..2, 0u8..2, 0u32..3), 6..120),
        rotate in 0usize..120,
    ) {
        let pred: Vec<u8> = rows.iter().map(|r| r.0).collect();
        let truth: Vec<u8> = rows.iter().map(|r| r.1).collect();
        let groups: Vec<u32> = rows.iter().map(|r| r.2).collect();
        let present = groups.iter().collect::<std::collections::BTreeSet<_>>().len();
        prop_assume!(present >= 2);
        let base = spd(&pred, &groups).unwrap();
        prop_assert!((0.0..=1.0).contains(&base));

        let r = rotate % rows.len();
        let mut p2 = pred.clone();
        let mut g2 = groups.clone();
        p2.rotate_left(r);
        g2.rotate_left(r);
        prop_assert!((spd(&p2, &g2).unwrap() - base).abs() < 1e-12);

        let renamed: Vec<u32> = groups.iter().map(|g| 10 + (g + 1) % 3).collect();
        prop_assert!((spd(&pred, &renamed).unwrap() - base).abs() < 1e-12);

        let report = FairnessReport::compute(&pred, &truth, &groups, 1).unwrap();
        let sized: usize = report.group_stats.iter().map(|g| g.size).sum();
        prop_assert_eq!(sized, rows.len());
        if let Some(pe) = predictive_equality(&pred, &truth, &groups, 1).unwrap() {
            prop_assert!((0.0..=1.0).contains(&pe));
        }
    }
}
