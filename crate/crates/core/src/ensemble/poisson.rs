use crate::error::PoissonError;
use crate::stream::RandomSource;

/// Rates at or above this use transformed rejection instead of inversion.
const INVERSION_LIMIT: f64 = 30.0;

/// Draws `l ~ Poisson(lambda)`.
///
/// Inversion by sequential search below [`INVERSION_LIMIT`], Hörmann's PTRS
/// (transformed rejection with squeeze) above it.
pub fn poisson_draw(lambda: f64, rng: &mut RandomSource) -> Result<u32, PoissonError> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(PoissonError::InvalidRate(lambda));
    }
    if lambda == 0.0 {
        return Ok(0);
    }
    Ok(if lambda < INVERSION_LIMIT {
        by_inversion(lambda, rng)
    } else {
        by_ptrs(lambda, rng)
    })
}

fn by_inversion(lambda: f64, rng: &mut RandomSource) -> u32 {
    let u = rng.uniform();
    let mut p = (-lambda).exp();
    let mut cdf = p;
    let mut k = 0u32;
    // The cap only matters when rounding leaves the cdf a hair below u.
    while u > cdf && k < 1_000 {
        k += 1;
        p *= lambda / k as f64;
        cdf += p;
    }
    k
}

fn by_ptrs(lambda: f64, rng: &mut RandomSource) -> u32 {
    let slam = lambda.sqrt();
    let loglam = lambda.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.uniform() - 0.5;
        let v = rng.uniform();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + lambda + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u32;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln();
        let rhs = -lambda + k * loglam - libm::lgamma(k + 1.0);
        if lhs <= rhs {
            return k as u32;
        }
    }
}
