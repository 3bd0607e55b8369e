//! Small deterministic statistics used by evaluation reports: quantiles,
//! Spearman rank correlation, and fixed-bin histograms.

/// Linearly interpolated quantile of `values` (q in [0, 1]).
///
/// Sorts a copy; on an empty slice returns 0. Matches the common "R-7"
/// definition: index h = q * (n - 1), interpolated between neighbors.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    assert!((0.0..=1.0).contains(&q), "quantile order {q} outside [0, 1]");
    if values.is_empty() {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-NaN values"));
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let frac = h - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Average ranks (1-based) with ties sharing their mean rank.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("non-NaN values"));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let mean_rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = mean_rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation of two equal-length series.
///
/// Returns `None` when either series is constant (correlation undefined)
/// or when fewer than two pairs exist.
pub fn spearman(a: &[f64], b: &[f64]) -> Option<f64> {
    assert_eq!(a.len(), b.len(), "correlation needs paired samples");
    if a.len() < 2 {
        return None;
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for i in 0..a.len() {
        let (da, db) = (ra[i] - mean, rb[i] - mean);
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    if va <= 0.0 || vb <= 0.0 {
        return None;
    }
    Some(cov / (va * vb).sqrt())
}

/// Uniform-bin histogram over a fixed `[lo, hi]` range.
///
/// Values are clamped into the end bins, so every sample is counted; the
/// caller picks `lo`/`hi` (pooled extremes) to make controllers comparable.
pub fn histogram_counts(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<u64> {
    assert!(bins > 0, "histogram needs at least one bin");
    assert!(hi >= lo, "histogram range inverted: [{lo}, {hi}]");
    let mut counts = vec![0u64; bins];
    let width = hi - lo;
    for &v in values {
        let bin = if width <= 0.0 {
            0
        } else {
            (((v - lo) / width * bins as f64).floor() as isize).clamp(0, bins as isize - 1) as usize
        };
        counts[bin] += 1;
    }
    counts
}

/// Bin edges for [`histogram_counts`]: `bins + 1` evenly spaced values.
pub fn histogram_edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    assert!(bins > 0, "histogram needs at least one bin");
    (0..=bins).map(|k| lo + (hi - lo) * k as f64 / bins as f64).collect()
}
