//! Similarity of per-window count series.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Commits,
    Files,
    Entities,
    Developers,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::Commits,
        Metric::Files,
        Metric::Entities,
        Metric::Developers,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Commits => "commits",
            Metric::Files => "files",
            Metric::Entities => "entities",
            Metric::Developers => "developers",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountSeries {
    pub metric: Metric,
    pub values: Vec<u64>,
}

/// Fixed-width big-endian `u64` values, so concatenation needs no separator.
pub fn serialize_series(values: &[u64]) -> Vec<u8> {
    values.iter().flat_map(|v| v.to_be_bytes()).collect()
}

/// Size of the xz stream (LZMA2, preset 9) of `bytes`.
pub fn compressed_len(bytes: &[u8]) -> usize {
    let mut enc = xz2::write::XzEncoder::new(Vec::new(), 9);
    enc.write_all(bytes).expect("in-memory write");
    enc.finish().expect("in-memory write").len()
}

/// Normalised compression distance of two equal-length series.
pub fn ncd(x: &[u64], y: &[u64]) -> Result<f64, SimError> {
    if x.is_empty() || y.is_empty() {
        return Err(SimError::EmptySeries);
    }
    if x.len() != y.len() {
        return Err(SimError::LengthMismatch(x.len(), y.len()));
    }
    let sx = serialize_series(x);
    let sy = serialize_series(y);
    let cx = compressed_len(&sx);
    let cy = compressed_len(&sy);
    let cxy = compressed_len(&[sx, sy].concat());
    let (lo, hi) = (cx.min(cy) as f64, cx.max(cy) as f64);
    Ok((cxy as f64 - lo) / hi)
}

/// Rescales to `[0, 1]`; a constant series maps to zeros.
pub fn min_max_normalize(x: &[f64]) -> Vec<f64> {
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    if range.is_nan() || range <= 0.0 {
        return vec![0.0; x.len()];
    }
    x.iter().map(|v| (v - lo) / range).collect()
}

/// Minimal accumulated `|x_i - y_j|` over monotone warping paths, unit step weights.
pub fn dtw_cost(x: &[f64], y: &[f64]) -> f64 {
    let m = y.len();
    let mut prev = vec![f64::INFINITY; m];
    let mut cur = vec![f64::INFINITY; m];
    for (i, xi) in x.iter().enumerate() {
        for (j, yj) in y.iter().enumerate() {
            let best = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => cur[j - 1],
                (_, 0) => prev[0],
                _ => prev[j].min(prev[j - 1]).min(cur[j - 1]),
            };
            cur[j] = (xi - yj).abs() + best;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m - 1]
}

/// DTW distance on min-max normalized series, divided by `len(x) + len(y)`.
pub fn dtw(x: &[f64], y: &[f64]) -> Result<f64, SimError> {
    if x.is_empty() || y.is_empty() {
        return Err(SimError::EmptySeries);
    }
    let nx = min_max_normalize(x);
    let ny = min_max_normalize(y);
    Ok(dtw_cost(&nx, &ny) / (x.len() + y.len()) as f64)
}

/// 1-based ranks with ties sharing their average rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            ranks[idx[k]] = avg;
        }
        i = j + 1;
    }
    ranks
}

pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rank correlation (Pearson on average ranks).
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, SimError> {
    if x.len() != y.len() {
        return Err(SimError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(SimError::TooShort(x.len()));
    }
    pearson(&average_ranks(x), &average_ranks(y)).ok_or(SimError::ConstantSeries)
}

pub fn to_f64(values: &[u64]) -> Vec<f64> {
    values.iter().map(|&v| v as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dtw_examples() {
        assert_eq!(dtw(&[1.0, 5.0, 2.0], &[1.0, 5.0, 2.0]).unwrap(), 0.0);
        assert!((dtw(&[0.0, 1.0], &[1.0, 0.0]).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(dtw(&[], &[1.0]), Err(SimError::EmptySeries));
    }

    #[test]
    fn dtw_shape_not_scale() {
        assert_eq!(dtw(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap(), 0.0);
    }

    #[test]
    fn spearman_examples() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[4.0, 8.0, 9.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-12);
        assert!(
            (spearman(&[1.0, 2.0, 2.0, 4.0], &[2.0, 3.0, 3.0, 5.0]).unwrap() - 1.0).abs() < 1e-12
        );
        assert_eq!(
            spearman(&[1.0, 1.0], &[1.0, 2.0]),
            Err(SimError::ConstantSeries)
        );
        assert_eq!(spearman(&[1.0], &[1.0]), Err(SimError::TooShort(1)));
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(
            average_ranks(&[10.0, 20.0, 20.0, 5.0]),
            vec![2.0, 3.5, 3.5, 1.0]
        );
    }

    #[test]
    fn ncd_errors() {
        assert_eq!(ncd(&[], &[]), Err(SimError::EmptySeries));
        assert_eq!(ncd(&[1], &[1, 2]), Err(SimError::LengthMismatch(1, 2)));
    }

    #[test]
    fn ncd_self_is_small() {
        let x: Vec<u64> = (0..200).map(|i| (i * 37 % 101) as u64).collect();
        assert!(ncd(&x, &x).unwrap() <= 0.15);
    }

    #[test]
    fn compression_is_deterministic() {
        let a = compressed_len(&serialize_series(&[1, 2, 3, 4]));
        let b = compressed_len(&serialize_series(&[1, 2, 3, 4]));
        assert_eq!(a, b);
    }

    #[test]
    fn ncd_self_is_small_on_short_series() {
        for x in [
            vec![4, 3, 3, 2],
            vec![0, 1],
            vec![256],
            vec![7, 0, 12, 3, 3, 9],
        ] {
            let d = ncd(&x, &x).unwrap();
            assert!(d <= 0.15, "{x:?}: {d}");
        }
    }

    #[test]
    fn ncd_separates_unrelated_series() {
        let x: Vec<u64> = (0..24).map(|i| i * 3).collect();
        let y: Vec<u64> = (0..24).map(|i| (i * 7919 + 13) % 1000).collect();
        assert!(ncd(&x, &y).unwrap() > ncd(&x, &x).unwrap());
    }
}
