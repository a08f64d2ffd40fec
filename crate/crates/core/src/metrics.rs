//! Scoring helpers shared by the derivative-free and backprop trainers.

use std::ops::AddAssign;

use crate::error::{Error, Result};

/// Arithmetic operation tally. The derivative-free update counts complex
/// operations; the backprop baseline counts real ones in the same fields.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct OpsCounter {
    pub complex_mults: u64,
    pub complex_adds: u64,
    pub svd_calls: u64,
}

impl OpsCounter {
    pub fn mults(&mut self, n: usize) {
        self.complex_mults += n as u64;
    }

    pub fn adds(&mut self, n: usize) {
        self.complex_adds += n as u64;
    }

    pub fn svd(&mut self) {
        self.svd_calls += 1;
    }

    /// Multiplications plus additions.
    pub fn total(&self) -> u64 {
        self.complex_mults + self.complex_adds
    }
}

impl AddAssign for OpsCounter {
    fn add_assign(&mut self, o: Self) {
        self.complex_mults += o.complex_mults;
        self.complex_adds += o.complex_adds;
        self.svd_calls += o.svd_calls;
    }
}

/// True when every score lies strictly on its target's side of `cutoff`.
/// A score exactly at the cutoff counts as wrong for either class.
pub fn thresholded_correct(scores: &[f64], targets: &[u8], cutoff: f64) -> bool {
    scores.iter().zip(targets).all(|(&s, &t)| if t == 1 { s > cutoff } else { s < cutoff })
}

/// Mean absolute deviation between scores and binary targets.
pub fn mean_l1(scores: &[f64], targets: &[u8]) -> f64 {
    let sum: f64 = scores.iter().zip(targets).map(|(&s, &t)| (s - f64::from(t)).abs()).sum();
    sum / scores.len() as f64
}

/// `(accuracy, avg_l1)` over a set of scored examples.
pub fn score_set(scored: &[(Vec<f64>, Vec<u8>)], cutoff: f64) -> Result<(f64, f64)> {
    if scored.is_empty() {
        return Err(Error::EmptyInput("evaluation set"));
    }
    let n = scored.len() as f64;
    let correct = scored.iter().filter(|(s, t)| thresholded_correct(s, t, cutoff)).count();
    let loss: f64 = scored.iter().map(|(s, t)| mean_l1(s, t)).sum();
    Ok((correct as f64 / n, loss / n))
}

/// 1-based iteration at which `accuracy` first equals 1.
pub fn first_perfect(accuracy: &[f64]) -> Option<usize> {
    accuracy.iter().position(|&a| a >= 1.0).map(|i| i + 1)
}

/// 1-based iteration at which the loss change first stays below `eps` for
/// `window` consecutive iterations; the reported index is the last of those.
pub fn plateau_onset(loss: &[f64], eps: f64, window: usize) -> Option<usize> {
    let mut run = 0;
    for (i, w) in loss.windows(2).enumerate() {
        if (w[1] - w[0]).abs() < eps {
            run += 1;
            if run >= window {
                return Some(i + 2);
            }
        } else {
            run = 0;
        }
    }
    None
}

/// Median of a non-empty sample; the mean of the middle pair for even sizes.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_examples() {
        let perfect: Vec<_> = [(0.0, 0), (1.0, 1), (1.0, 1), (0.0, 0)]
            .iter()
            .map(|&(s, t)| (vec![s], vec![t]))
            .collect();
        assert_eq!(score_set(&perfect, 0.5).unwrap(), (1.0, 0.0));
        let half: Vec<_> = [0u8, 1, 1, 0].iter().map(|&t| (vec![0.5], vec![t])).collect();
        assert_eq!(score_set(&half, 0.5).unwrap(), (0.0, 0.5));
        let near: Vec<_> = [(0.4, 0), (0.6, 1)].iter().map(|&(s, t)| (vec![s], vec![t])).collect();
        let (acc, l1) = score_set(&near, 0.5).unwrap();
        assert_eq!(acc, 1.0);
        assert!((l1 - 0.4).abs() < 1e-15);
        assert!(score_set(&[], 0.5).is_err());
    }

    #[test]
    fn plateau_detection() {
        assert_eq!(plateau_onset(&[1.0, 0.5, 0.5, 0.5, 0.5], 1e-3, 3), Some(5));
        assert_eq!(plateau_onset(&[1.0, 1.0, 1.0, 0.0, 0.0], 1e-3, 3), None);
        assert_eq!(plateau_onset(&[], 1e-3, 3), None);
        assert_eq!(first_perfect(&[0.0, 0.5, 1.0, 0.0]), Some(3));
        assert_eq!(first_perfect(&[0.0]), None);
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }
}
