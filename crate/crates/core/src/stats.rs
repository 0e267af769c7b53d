//! Friedman average ranks, the Friedman chi-square statistic and the Nemenyi
//! critical difference for comparing classifiers over many streams.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::StatsError;

/// Two-tailed Nemenyi `q_0.05` for k = 2..=10 classifiers.
const Q_ALPHA_005: [f64; 9] = [1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164];

/// Rows are datasets, columns classifiers; higher scores are better.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    pub classifiers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ScoreMatrix {
    pub fn new(classifiers: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self, StatsError> {
        let m = ScoreMatrix { classifiers, rows };
        m.check()?;
        Ok(m)
    }

    fn check(&self) -> Result<(), StatsError> {
        check_rows(&self.rows)?;
        if self.rows[0].len() != self.classifiers.len() {
            return Err(StatsError::NotRectangular {
                row: 0,
                expected: self.classifiers.len(),
                found: self.rows[0].len(),
            });
        }
        Ok(())
    }
}

fn check_rows(rows: &[Vec<f64>]) -> Result<usize, StatsError> {
    let first = rows.first().ok_or(StatsError::TooSmall("one dataset"))?;
    let k = first.len();
    if k < 2 {
        return Err(StatsError::TooSmall("two classifiers"));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != k {
            return Err(StatsError::NotRectangular {
                row: i,
                expected: k,
                found: row.len(),
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite);
        }
    }
    Ok(k)
}

/// Ranks one row by descending score; tied scores share their mean position.
pub fn rank_row(row: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..row.len()).collect();
    order.sort_by(|&a, &b| row[b].total_cmp(&row[a]));
    let mut ranks = vec![0.0; row.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && row[order[j + 1]] == row[order[i]] {
            j += 1;
        }
        // positions i..=j hold rank values i+1..=j+1
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &col in &order[i..=j] {
            ranks[col] = shared;
        }
        i = j + 1;
    }
    ranks
}

/// Column means of within-row ranks (1 = best).
pub fn friedman_ranks(rows: &[Vec<f64>]) -> Result<Vec<f64>, StatsError> {
    let k = check_rows(rows)?;
    let mut sums = vec![0.0; k];
    for row in rows {
        for (s, r) in sums.iter_mut().zip(rank_row(row)) {
            *s += r;
        }
    }
    let n = rows.len() as f64;
    Ok(sums.into_iter().map(|s| s / n).collect())
}

/// `12N / (k(k+1)) * (sum_j R_j^2 - k(k+1)^2 / 4)` from average ranks.
pub fn friedman_statistic(average_ranks: &[f64], n: usize) -> f64 {
    let k = average_ranks.len() as f64;
    let sum_sq: f64 = average_ranks.iter().map(|r| r * r).sum();
    let stat = 12.0 * n as f64 / (k * (k + 1.0)) * (sum_sq - k * (k + 1.0).powi(2) / 4.0);
    // Rounding can push the null case a hair below zero.
    stat.max(0.0)
}

/// `q_0.05(k) * sqrt(k(k+1) / 6N)`.
pub fn nemenyi_cd(k: usize, n: usize) -> Result<f64, StatsError> {
    if !(2..=10).contains(&k) {
        return Err(StatsError::UnsupportedK(k));
    }
    if n < 2 {
        return Err(StatsError::TooSmall("two datasets"));
    }
    let q = Q_ALPHA_005[k - 2];
    let k = k as f64;
    Ok(q * (k * (k + 1.0) / (6.0 * n as f64)).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub metric: String,
    pub factors: String,
    pub ranks: BTreeMap<String, f64>,
    pub statistic: f64,
    /// Absent when fewer than two datasets back the comparison.
    pub cd: Option<f64>,
    pub n: usize,
    /// Classifiers within one critical difference of the best average rank.
    pub winner_flags: BTreeMap<String, bool>,
}

pub fn rank_report(metric: &str, factors: &str, matrix: &ScoreMatrix) -> Result<RankReport, StatsError> {
    matrix.check()?;
    let avg = friedman_ranks(&matrix.rows)?;
    let n = matrix.rows.len();
    let k = matrix.classifiers.len();
    let cd = nemenyi_cd(k, n).ok();
    let best = avg.iter().copied().fold(f64::INFINITY, f64::min);
    let winner_flags = matrix
        .classifiers
        .iter()
        .zip(&avg)
        .map(|(c, &r)| (c.clone(), r == best || cd.is_some_and(|cd| r - best <= cd)))
        .collect();
    Ok(RankReport {
        metric: metric.to_string(),
        factors: factors.to_string(),
        ranks: matrix.classifiers.iter().cloned().zip(avg.iter().copied()).collect(),
        statistic: if n >= 2 { friedman_statistic(&avg, n) } else { 0.0 },
        cd,
        n,
        winner_flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_dominance() {
        let r = friedman_ranks(&[vec![0.9, 0.8], vec![0.7, 0.6]]).unwrap();
        assert_eq!(r, vec![1.0, 2.0]);
    }

    #[test]
    fn ties_share_positions() {
        assert_eq!(friedman_ranks(&[vec![0.5, 0.5, 0.2]]).unwrap(), vec![1.5, 1.5, 3.0]);
        assert_eq!(rank_row(&[1.0, 1.0, 1.0]), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn five_classifier_row_sums() {
        let r = rank_row(&[0.3, 0.9, 0.1, 0.9, 0.5]);
        assert_eq!(r.iter().sum::<f64>(), 15.0);
    }

    #[test]
    fn ragged_input_is_rejected() {
        assert!(matches!(
            friedman_ranks(&[vec![0.1, 0.2], vec![0.3]]),
            Err(StatsError::NotRectangular { row: 1, .. })
        ));
        assert!(friedman_ranks(&[]).is_err());
        assert!(friedman_ranks(&[vec![0.1]]).is_err());
    }

    #[test]
    fn statistic_examples() {
        assert_eq!(friedman_statistic(&[3.0; 5], 10), 0.0);
        assert!((friedman_statistic(&[1.0, 2.0], 10) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn cd_examples() {
        let cd = nemenyi_cd(5, 60).unwrap();
        assert!((cd - 2.728 * (30.0f64 / 360.0).sqrt()).abs() < 1e-12);
        assert!((cd - 0.787_5).abs() < 1e-4);
        assert!((nemenyi_cd(5, 240).unwrap() - cd / 2.0).abs() < 1e-12);
        let five_by_nine = nemenyi_cd(5, 9).unwrap();
        assert!((five_by_nine - 2.01).abs() < 0.05, "{five_by_nine}");
        assert!(matches!(nemenyi_cd(11, 10), Err(StatsError::UnsupportedK(11))));
        assert!(nemenyi_cd(1, 10).is_err());
    }

    #[test]
    fn report_flags_classifiers_within_cd() {
        let names = ["a", "b", "c"].map(String::from).to_vec();
        let rows = vec![vec![0.9, 0.8, 0.1]; 4];
        let m = ScoreMatrix::new(names, rows).unwrap();
        let rep = rank_report("gmean", "All", &m).unwrap();
        assert_eq!(rep.ranks["a"], 1.0);
        let cd = rep.cd.unwrap();
        assert_eq!(rep.winner_flags["b"], 1.0 <= cd);
        assert!(!rep.winner_flags["c"]);
        assert!(rep.statistic > 0.0);
    }
}
