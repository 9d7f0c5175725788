//! Fixtures shared by the benchmarks.

/// Deterministic paired observations with distinct nonzero differences.
pub fn paired_sample(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| (10.0 + i as f64 * 1.37, 9.0 + (i as f64 * 0.71).sin()))
        .collect()
}
