use serde::{Deserialize, Serialize};

use crate::error::LabelerError;
use crate::stream::{squared_distance, ClassLabel, Example};

pub const LABELER_K: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExampleType {
    Safe,
    Borderline,
    Rare,
    Outlier,
}

impl ExampleType {
    /// Type from the number of same-class examples among `k` neighbours.
    /// For k = 5: 5-4 safe, 3-2 borderline, 1 rare, 0 outlier.
    pub fn from_same_class(same: usize, k: usize) -> ExampleType {
        if same * 5 >= 4 * k {
            ExampleType::Safe
        } else if same * 5 >= 2 * k {
            ExampleType::Borderline
        } else if same >= 1 {
            ExampleType::Rare
        } else {
            ExampleType::Outlier
        }
    }
}

/// Labels of the `k` nearest examples of `query` in `sample`, skipping the
/// entry at position `skip`.
fn nearest_labels(query: &[f64], sample: &[Example], k: usize, skip: Option<usize>) -> Vec<ClassLabel> {
    let mut best: Vec<(f64, ClassLabel)> = Vec::with_capacity(k + 1);
    for (i, ex) in sample.iter().enumerate() {
        if Some(i) == skip {
            continue;
        }
        let d = squared_distance(query, &ex.features);
        if best.len() == k && d >= best[k - 1].0 {
            continue;
        }
        let at = best.partition_point(|&(bd, _)| bd <= d);
        best.insert(at, (d, ex.label));
        best.truncate(k);
    }
    best.into_iter().map(|(_, l)| l).collect()
}

/// Classifies `x` by the class mix of its `k` nearest examples in `sample`
/// (which must not contain `x`).
pub fn label_example_type(x: &Example, sample: &[Example], k: usize) -> Result<ExampleType, LabelerError> {
    if sample.len() < k || k == 0 {
        return Err(LabelerError::SampleTooSmall { k, found: sample.len() });
    }
    let same = nearest_labels(&x.features, sample, k, None)
        .into_iter()
        .filter(|&l| l == x.label)
        .count();
    Ok(ExampleType::from_same_class(same, k))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeHistogram {
    pub safe: usize,
    pub borderline: usize,
    pub rare: usize,
    pub outlier: usize,
}

impl TypeHistogram {
    pub fn total(&self) -> usize {
        self.safe + self.borderline + self.rare + self.outlier
    }

    pub fn add(&mut self, t: ExampleType) {
        match t {
            ExampleType::Safe => self.safe += 1,
            ExampleType::Borderline => self.borderline += 1,
            ExampleType::Rare => self.rare += 1,
            ExampleType::Outlier => self.outlier += 1,
        }
    }

    /// Shares `(safe, borderline, rare + outlier)`.
    pub fn shares(&self) -> (f64, f64, f64) {
        let n = self.total().max(1) as f64;
        (
            self.safe as f64 / n,
            self.borderline as f64 / n,
            (self.rare + self.outlier) as f64 / n,
        )
    }
}

/// Types of every `class` example in `sample`, each labeled against the rest.
pub fn type_histogram(sample: &[Example], class: ClassLabel, k: usize) -> Result<TypeHistogram, LabelerError> {
    if sample.len() <= k || k == 0 {
        return Err(LabelerError::SampleTooSmall {
            k,
            found: sample.len().saturating_sub(1),
        });
    }
    let mut h = TypeHistogram::default();
    for (i, x) in sample.iter().enumerate().filter(|(_, x)| x.label == class) {
        let same = nearest_labels(&x.features, sample, k, Some(i))
            .into_iter()
            .filter(|&l| l == class)
            .count();
        h.add(ExampleType::from_same_class(same, k));
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ClassLabel::{Majority as MAJ, Minority as MIN};

    /// Five neighbours at increasing distance with the given labels, plus a far
    /// filler so the sample is larger than k.
    fn ring(labels: [ClassLabel; 5]) -> Vec<Example> {
        let mut v: Vec<Example> = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| Example::new(vec![0.5 + 0.01 * (i + 1) as f64, 0.5], l, i as u64 + 1))
            .collect();
        v.push(Example::new(vec![0.0, 0.0], MIN, 99));
        v
    }

    fn query() -> Example {
        Example::new(vec![0.5, 0.5], MIN, 0)
    }

    #[test]
    fn homogeneous_neighbourhood_is_safe() {
        assert_eq!(label_example_type(&query(), &ring([MIN; 5]), 5).unwrap(), ExampleType::Safe);
    }

    #[test]
    fn two_of_five_is_borderline() {
        let s = ring([MIN, MAJ, MIN, MAJ, MAJ]);
        assert_eq!(label_example_type(&query(), &s, 5).unwrap(), ExampleType::Borderline);
    }

    #[test]
    fn one_of_five_is_rare_and_none_is_outlier() {
        assert_eq!(
            label_example_type(&query(), &ring([MIN, MAJ, MAJ, MAJ, MAJ]), 5).unwrap(),
            ExampleType::Rare
        );
        assert_eq!(label_example_type(&query(), &ring([MAJ; 5]), 5).unwrap(), ExampleType::Outlier);
    }

    #[test]
    fn band_edges() {
        let t: Vec<ExampleType> = (0..=5).map(|m| ExampleType::from_same_class(m, 5)).collect();
        use ExampleType::*;
        assert_eq!(t, vec![Outlier, Rare, Borderline, Borderline, Safe, Safe]);
    }

    #[test]
    fn small_sample_is_an_error() {
        let s = ring([MIN; 5]);
        assert!(matches!(
            label_example_type(&query(), &s[..3], 5),
            Err(LabelerError::SampleTooSmall { k: 5, found: 3 })
        ));
    }

    #[test]
    fn histogram_excludes_self() {
        let mut s = ring([MIN; 5]);
        s.push(query());
        let h = type_histogram(&s, MIN, 5).unwrap();
        assert_eq!(h.total(), 7);
    }
}
