mod common;

use fairsfs_core::citest::{dep_search, SubsetSearch};
use fairsfs_core::oracle::{d_separated, BayesNet};
use fairsfs_core::*;
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn table_from(columns: Vec<Vec<u32>>, cards: &[usize]) -> DataTable {
    let metas = cards
        .iter()
        .enumerate()
        .map(|(i, &c)| ColumnMeta::numbered(format!("c{i}"), c))
        .collect();
    let last = columns.len() - 1;
    DataTable::new(columns, metas, 0, last).unwrap()
}

/// Four columns: three with cardinality 2 or 3 and a binary last column.
fn small_table() -> impl Strategy<Value = DataTable> {
    (prop::collection::vec(2usize..=3, 3), 40usize..160).prop_flat_map(|(mut cards, n)| {
        cards.push(2);
        let cols: Vec<_> = cards.iter().map(|&c| prop::collection::vec(0..c as u32, n)).collect();
        (Just(cards), cols).prop_map(|(cards, cols)| table_from(cols, &cards))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn swapping_x_and_y_changes_nothing(table in small_table()) {
        for cond in [vec![], vec![2], vec![0, 2]] {
            let (x, y) = (1, 3);
            let a = ci_test(&table, x, y, &cond, 0.05).unwrap();
            let b = ci_test(&table, y, x, &cond, 0.05).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn relabeling_codes_keeps_g2_and_dof(table in small_table(), shift in 1u32..3) {
        let mut cols: Vec<Vec<u32>> = (0..4).map(|i| table.column(i).to_vec()).collect();
        let cards: Vec<usize> = (0..4).map(|i| table.cardinality(i)).collect();
        for col in [1usize, 2] {
            let c = cards[col] as u32;
            for v in cols[col].iter_mut() {
                *v = (*v + shift) % c;
            }
        }
        let relabeled = table_from(cols, &cards);
        let a = ci_test(&table, 1, 3, &[2], 0.05).unwrap();
        let b = ci_test(&relabeled, 1, 3, &[2], 0.05).unwrap();
        prop_assert!((a.g2 - b.g2).abs() < 1e-9);
        prop_assert_eq!(a.dof, b.dof);
    }

    #[test]
    fn stratified_g2_is_the_sum_of_per_stratum_tests(table in small_table()) {
        let full = ci_test(&table, 1, 3, &[2], 0.05).unwrap();
        let mut summed = 0.0;
        for code in 0..table.cardinality(2) as u32 {
            let rows: Vec<usize> = (0..table.n_rows()).filter(|&r| table.column(2)[r] == code).collect();
            if rows.is_empty() {
                continue;
            }
            let sub = table.select_rows(&rows);
            summed += ci_test(&sub, 1, 3, &[], 0.05).unwrap().g2;
        }
        prop_assert!((full.g2 - summed).abs() < 1e-9, "{} vs {}", full.g2, summed);
    }

    #[test]
    fn larger_subset_budget_only_removes_dependence(table in small_table()) {
        let pool = [0usize, 2];
        let mut previous = true;
        for k in 0..=2 {
            let dep = is_dep(&table, 1, 3, &pool, SubsetSearch::UpTo(k), 0.05).unwrap();
            prop_assert!(previous || !dep, "false at k-1 but true at k = {}", k);
            previous = dep;
        }
        let outcome = dep_search(&table, 1, 3, &pool, SubsetSearch::UpTo(0), 0.05).unwrap();
        prop_assert!(outcome.tests.iter().all(|t| t.z.is_empty()));
    }

    #[test]
    fn counts_are_conserved(table in small_table()) {
        let counts = contingency(&table, 0, 3, &[1, 2]).unwrap();
        prop_assert_eq!(counts.total(), table.n_rows() as u64);
    }
}

#[test]
fn chi2_tail_agrees_with_statrs() {
    let mut worst: f64 = 0.0;
    for dof in (1..=200).step_by(3).chain([2, 199, 200]) {
        let reference = ChiSquared::new(dof as f64).unwrap();
        for i in 0..=400 {
            let x = i as f64 * 2.5;
            let ours = chi2_sf(x, dof).unwrap();
            worst = worst.max((ours - reference.sf(x)).abs());
        }
    }
    assert!(worst <= 1e-8, "max abs error {worst:e}");
}

#[test]
fn chi2_tail_agrees_with_quadrature() {
    for x in [0.01, 0.5, 2.0, 3.841, 6.635, 15.0] {
        let q1 = common::chi2_sf_dof1_by_quadrature(x);
        assert!((chi2_sf(x, 1).unwrap() - q1).abs() < 1e-9, "dof 1 at {x}");
        let q2 = common::chi2_sf_dof2_by_quadrature(x);
        assert!((chi2_sf(x, 2).unwrap() - q2).abs() < 1e-9, "dof 2 at {x}");
    }
}

#[test]
fn chain_is_separated_by_its_middle() {
    let net = BayesNet::from_json(
        r#"{"nodes": [
            {"name": "x", "states": 2, "parents": [], "cpt": [[0.5, 0.5]]},
            {"name": "z", "states": 2, "parents": ["x"], "cpt": [[0.8, 0.2], [0.2, 0.8]]},
            {"name": "y", "states": 2, "parents": ["z"], "cpt": [[0.75, 0.25], [0.25, 0.75]]}
        ]}"#,
    )
    .unwrap();
    assert!(d_separated(&net, 0, 2, &[1]));
    assert!(!d_separated(&net, 0, 2, &[]));
    let table = net.sample_table(10_000, 3, 0, 2).unwrap();
    assert!(is_dep(&table, 0, 2, &[], SubsetSearch::UpTo(1), 0.01).unwrap());
    let outcome = dep_search(&table, 0, 2, &[1], SubsetSearch::UpTo(1), 0.01).unwrap();
    assert!(!outcome.dependent);
    assert_eq!(outcome.separator, Some(vec![1]));
}

#[test]
fn deterministic_function_stays_dependent() {
    let n = 600;
    let x: Vec<u32> = (0..n).map(|i| (i * 7 % 3) as u32).collect();
    let noise: Vec<u32> = (0..n).map(|i| ((i * 13 + i / 5) % 2) as u32).collect();
    let y: Vec<u32> = x.iter().map(|&v| (v == 2) as u32).collect();
    let table = table_from(vec![noise, x, y], &[2, 3, 2]);
    assert!(is_dep(&table, 1, 2, &[0], SubsetSearch::UpTo(1), 0.01).unwrap());
    assert!(is_dep(&table, 1, 2, &[0], SubsetSearch::FullSetOnly, 0.01).unwrap());
}
