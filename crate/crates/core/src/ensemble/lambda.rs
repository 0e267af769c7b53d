//! Poisson rate rules of the online bagging variants.
//!
//! Class ratios whose denominator is zero are taken as 1 so rates stay finite
//! at the start of a stream.

use crate::stream::{ClassLabel, DecayedClassSizes};

fn ratio(numerator: f64, denominator: f64) -> f64 {
    if denominator == 0.0 {
        1.0
    } else {
        numerator / denominator
    }
}

/// Oversampling: largest class size over the size of the example's class.
pub fn lambda_oob(sizes: &DecayedClassSizes, label: ClassLabel) -> f64 {
    let own = sizes.size(label);
    if own == 0.0 {
        return 1.0;
    }
    sizes.size_majority.max(sizes.size_minority) / own
}

/// Undersampling: smallest class size over the size of the example's class.
pub fn lambda_uob(sizes: &DecayedClassSizes, label: ClassLabel) -> f64 {
    let own = sizes.size(label);
    if own == 0.0 {
        return 1.0;
    }
    sizes.size_majority.min(sizes.size_minority) / own
}

/// `(N'_maj)^psi / k` for a minority example.
pub fn unsafeness_level_min(majority_neighbours: usize, k: usize, psi: f64) -> f64 {
    if k == 0 || majority_neighbours == 0 {
        return 0.0;
    }
    (majority_neighbours as f64).powf(psi) / k as f64
}

/// `N'_maj / k` for a majority example; an empty neighbourhood counts as safe.
pub fn safeness_level_maj(majority_neighbours: usize, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    majority_neighbours as f64 / k as f64
}

/// `(N_maj / N_min) * (L_min + 1)` for minority examples, 1 otherwise.
pub fn lambda_noob(window_counts: (usize, usize), unsafeness: f64, label: ClassLabel) -> f64 {
    match label {
        ClassLabel::Majority => 1.0,
        ClassLabel::Minority => {
            let (maj, min) = window_counts;
            ratio(maj as f64, min as f64) * (unsafeness + 1.0)
        }
    }
}

/// `(N_min / N_maj) * L_maj^psi` for majority examples, 1 otherwise.
pub fn lambda_nuob(
    window_counts: (usize, usize),
    safeness: f64,
    psi: f64,
    label: ClassLabel,
) -> f64 {
    match label {
        ClassLabel::Minority => 1.0,
        ClassLabel::Majority => {
            let (maj, min) = window_counts;
            ratio(min as f64, maj as f64) * safeness.powf(psi)
        }
    }
}
