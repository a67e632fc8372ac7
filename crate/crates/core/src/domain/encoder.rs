//! Incremental encoder model: angles are observed as integer counts.

use crate::scalar::Real;

/// Counts for `angle`, truncated toward zero.
pub fn quantize_encoder<T: Real>(angle: T, counts_per_rev: u32) -> i64 {
    let per_rad = T::lit(counts_per_rev as f64) / (T::PI() + T::PI());
    // to_i64 only fails for non-finite or huge inputs, which the plant never produces
    (angle * per_rad).trunc().to_i64().unwrap_or(0)
}

/// Angle for a count value; exact inverse of [`quantize_encoder`] up to one count.
pub fn decode_encoder<T: Real>(counts: i64, counts_per_rev: u32) -> T {
    T::lit(counts as f64) * (T::PI() + T::PI()) / T::lit(counts_per_rev as f64)
}

/// Angular size of one count.
pub fn count_resolution<T: Real>(counts_per_rev: u32) -> T {
    (T::PI() + T::PI()) / T::lit(counts_per_rev as f64)
}
