//! Closed forms for fully scrambled stabilizer states.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};

/// Default number of factors kept from the infinite product.
pub const DEFAULT_PRODUCT_CUTOFF: usize = 64;

/// Average Renyi-2 entropy (nats) of `a` sites in a random `n`-qubit
/// stabilizer state, `(a − 2^{2a−N}) ln 2`. Sizes above `N/2` use the
/// complement.
pub fn expected_scrambled_entropy(n: usize, a: usize) -> Result<f64> {
    if a > n {
        return Err(Error::InvalidRegionSize { size: a, n });
    }
    let a = a.min(n - a);
    if a == 0 {
        return Ok(0.0);
    }
    let deficit = 2f64.powi(2 * a as i32 - n as i32);
    Ok((a as f64 - deficit) * LN_2)
}

/// Approximate probability that a random `N × 2a` binary matrix has rank
/// `2a − ε`, with the infinite product cut off after
/// [`DEFAULT_PRODUCT_CUTOFF`] factors.
pub fn rank_deficiency_probability(n: usize, a: usize, epsilon: usize) -> Result<f64> {
    rank_deficiency_probability_with_cutoff(n, a, epsilon, DEFAULT_PRODUCT_CUTOFF)
}

pub fn rank_deficiency_probability_with_cutoff(
    n: usize,
    a: usize,
    epsilon: usize,
    cutoff: usize,
) -> Result<f64> {
    if 2 * a > n {
        return Err(Error::Invalid(format!("2a = {} exceeds N = {n}", 2 * a)));
    }
    if epsilon > 2 * a {
        return Ok(0.0);
    }
    let excess = n - 2 * a + epsilon;
    let mut p = 2f64.powf(-((epsilon * excess) as f64));
    for i in epsilon + 1..=epsilon + cutoff {
        p *= 1.0 - 2f64.powi(-(i as i32));
    }
    for i in 1..=excess {
        p /= 1.0 - 2f64.powi(-(i as i32));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expected_entropy_examples() {
        assert_eq!(expected_scrambled_entropy(16, 0).unwrap(), 0.0);
        assert!((expected_scrambled_entropy(16, 8).unwrap() - 7.0 * LN_2).abs() < 1e-12);
        let v = expected_scrambled_entropy(16, 4).unwrap();
        assert!((v - (4.0 - 2f64.powi(-8)) * LN_2).abs() < 1e-15);
        assert_eq!(expected_scrambled_entropy(16, 12).unwrap(), v);
        assert!(expected_scrambled_entropy(16, 17).is_err());
    }

    #[test]
    fn deficiency_probabilities_sum_to_one() {
        for &(n, a) in &[(32usize, 8usize), (16, 8), (64, 20)] {
            let total: f64 = (0..=2 * a).map(|e| rank_deficiency_probability(n, a, e).unwrap()).sum();
            assert!((total - 1.0).abs() < 1e-6, "n={n} a={a} total={total}");
        }
    }

    #[test]
    fn deficiency_probability_decreases_with_epsilon() {
        let ps: Vec<f64> = (0..8).map(|e| rank_deficiency_probability(32, 8, e).unwrap()).collect();
        assert!(ps.windows(2).all(|w| w[1] < w[0]));
        assert!(ps[7] < 1e-40);
        assert!(rank_deficiency_probability(8, 5, 0).is_err());
    }
}
