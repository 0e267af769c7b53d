use driftbag::stats::{friedman_ranks, friedman_statistic, rank_row};
use proptest::prelude::*;

/// Scores drawn from a small set so ties are frequent.
fn matrix() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2usize..=8).prop_flat_map(|k| {
        prop::collection::vec(
            prop::collection::vec((0u8..6).prop_map(|v| v as f64 / 5.0), k),
            1..20,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn row_ranks_sum_to_triangle_number(rows in matrix()) {
        let k = rows[0].len() as f64;
        for row in &rows {
            let s: f64 = rank_row(row).iter().sum();
            prop_assert!((s - k * (k + 1.0) / 2.0).abs() < 1e-12);
        }
        let avg = friedman_ranks(&rows).unwrap();
        prop_assert!(friedman_statistic(&avg, rows.len()) >= 0.0);
    }

    #[test]
    fn monotone_transform_keeps_ranks(rows in matrix()) {
        let moved: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|v| (3.0 * v).exp() - 7.0).collect()).collect();
        prop_assert_eq!(friedman_ranks(&rows).unwrap(), friedman_ranks(&moved).unwrap());
    }

    #[test]
    fn column_permutation_permutes_ranks(rows in matrix(), shift in 0usize..8) {
        let k = rows[0].len();
        let perm: Vec<usize> = (0..k).map(|j| (j + shift) % k).collect();
        let permuted: Vec<Vec<f64>> = rows.iter().map(|r| perm.iter().map(|&j| r[j]).collect()).collect();
        let a = friedman_ranks(&rows).unwrap();
        let b = friedman_ranks(&permuted).unwrap();
        for (i, &j) in perm.iter().enumerate() {
            prop_assert!((b[i] - a[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn duplicated_rows_keep_ranks(rows in matrix()) {
        let doubled: Vec<Vec<f64>> = rows.iter().chain(rows.iter()).cloned().collect();
        let a = friedman_ranks(&rows).unwrap();
        let b = friedman_ranks(&doubled).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }
}
