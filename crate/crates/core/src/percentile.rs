//! Nearest-rank percentiles (no interpolation).

/// Zero-based index of the nearest-rank `percent`-th order statistic in a
/// sorted sample of size `n`: the `ceil(percent / 100 * n)`-th value, at
/// least the first. `n` must be positive.
pub fn nearest_rank_index(n: usize, percent: u32) -> usize {
    debug_assert!(n > 0);
    let rank = (percent as usize * n).div_ceil(100);
    rank.clamp(1, n) - 1
}

/// Nearest-rank percentile of an already sorted, non-empty slice.
pub fn nearest_rank<T: Copy>(sorted: &[T], percent: u32) -> T {
    sorted[nearest_rank_index(sorted.len(), percent)]
}
