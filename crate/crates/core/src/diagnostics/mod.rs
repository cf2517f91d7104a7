//! Entropy-based observables and their post-processing.

mod fit;
mod information;
mod scrambling;
mod series;

pub use fit::{fit_scaling, FitModel, FitResult};
pub use information::{
    entropy_scan, entropy_scan_bits, mutual_information, mutual_information_bits, quarter_regions,
    tripartite_mutual_information, tripartite_mutual_information_bits,
};
pub use scrambling::{
    expected_scrambled_entropy, rank_deficiency_probability, rank_deficiency_probability_with_cutoff,
    DEFAULT_PRODUCT_CUTOFF,
};
pub use series::{
    bootstrap_indices, curve_crossing, first_threshold_time, mean_and_sem, median, percentile,
    ObservableSeries,
};

/// Fraction of the half-system scrambled entropy that counts as volume law.
pub const VOLUME_LAW_FRACTION: f64 = 0.95;

/// Threshold used for `t_vol`: `0.95 ⟨S_{N/2}⟩` of a random state, in nats.
pub fn volume_law_threshold(n: usize) -> crate::Result<f64> {
    Ok(VOLUME_LAW_FRACTION * expected_scrambled_entropy(n, n / 2)?)
}
