//! Every-Nth point extraction and index-proportional pairing of two
//! sequences of unequal length.

use std::fmt;
use std::num::NonZeroUsize;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Keep one point out of every `n`; `1` keeps everything.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct ExtractionFactor(NonZeroUsize);

impl ExtractionFactor {
    pub const NONE: ExtractionFactor = ExtractionFactor(NonZeroUsize::MIN);

    pub fn new(n: usize) -> Result<Self> {
        NonZeroUsize::new(n)
            .map(ExtractionFactor)
            .ok_or_else(|| Error::Domain("extraction factor must be >= 1".into()))
    }

    pub fn get(self) -> usize {
        self.0.get()
    }
}

impl Default for ExtractionFactor {
    fn default() -> Self {
        Self::NONE
    }
}

impl TryFrom<usize> for ExtractionFactor {
    type Error = Error;

    fn try_from(n: usize) -> Result<Self> {
        Self::new(n)
    }
}

impl From<ExtractionFactor> for usize {
    fn from(f: ExtractionFactor) -> usize {
        f.get()
    }
}

impl fmt::Display for ExtractionFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Indices kept by [`extract`] for a sequence of `len` items.
pub fn extract_indices(len: usize, n: ExtractionFactor) -> Vec<usize> {
    if len == 0 {
        return Vec::new();
    }
    let mut kept: Vec<usize> = (0..len).step_by(n.get()).collect();
    if kept.last() != Some(&(len - 1)) {
        kept.push(len - 1);
    }
    kept
}

/// Keeps indices `0, n, 2n, ...` plus the final index.
pub fn extract<T: Clone>(points: &[T], n: ExtractionFactor) -> Result<Vec<T>> {
    if points.is_empty() {
        return Err(Error::Domain(
            "cannot extract from an empty sequence".into(),
        ));
    }
    if n.get() == 1 {
        return Ok(points.to_vec());
    }
    Ok(extract_indices(points.len(), n)
        .into_iter()
        .map(|i| points[i].clone())
        .collect())
}

/// Index pairs for sequences of length `len_a` and `len_b`.
///
/// With `k = min(len_a, len_b)`, pair `i` is
/// `(floor(i * len_a / k), floor(i * len_b / k))`. Each side depends only on
/// its own length and `k`, so swapping the inputs swaps the pairs.
pub fn pair_indices(len_a: usize, len_b: usize) -> Vec<(usize, usize)> {
    let k = len_a.min(len_b);
    (0..k).map(|i| (i * len_a / k, i * len_b / k)).collect()
}

/// Aligned pairs drawn from two sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSequence<T> {
    pub pairs: Vec<(T, T)>,
}

impl<T> PairedSequence<T> {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

pub fn pair_tracks<T: Copy>(a: &[T], b: &[T]) -> Result<PairedSequence<T>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Domain("cannot pair an empty sequence".into()));
    }
    Ok(PairedSequence {
        pairs: pair_indices(a.len(), b.len())
            .into_iter()
            .map(|(i, j)| (a[i], b[j]))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn n(v: usize) -> ExtractionFactor {
        ExtractionFactor::new(v).unwrap()
    }

    #[test]
    fn factor_must_be_positive() {
        assert!(ExtractionFactor::new(0).is_err());
        assert!(serde_json::from_str::<ExtractionFactor>("0").is_err());
        assert_eq!(
            serde_json::from_str::<ExtractionFactor>("4").unwrap().get(),
            4
        );
    }

    #[test]
    fn extraction_examples() {
        let ten: Vec<usize> = (0..10).collect();
        assert_eq!(extract(&ten, n(1)).unwrap(), ten);
        assert_eq!(extract(&ten, n(4)).unwrap(), vec![0, 4, 8, 9]);
        assert_eq!(extract(&[0, 1, 2], n(16)).unwrap(), vec![0, 2]);
        assert_eq!(extract(&[7], n(3)).unwrap(), vec![7]);
        assert!(extract::<u8>(&[], n(2)).is_err());
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(
            pair_indices(5, 5),
            (0..5).map(|j| (j, j)).collect::<Vec<_>>()
        );
        assert_eq!(pair_indices(6, 3), vec![(0, 0), (2, 1), (4, 2)]);
        let a = [1, 2, 3];
        let p = pair_tracks(&a, &a).unwrap();
        assert!(p.pairs.iter().all(|(x, y)| x == y));
        assert!(pair_tracks::<u8>(&[], &[1]).is_err());
    }

    proptest! {
        #[test]
        fn extract_length_bounds(len in 1usize..500, step in 1usize..40) {
            let kept = extract_indices(len, n(step));
            let base = len.div_ceil(step);
            prop_assert!(kept.len() == base || kept.len() == base + 1);
            prop_assert!(kept.len() <= len);
            prop_assert!(kept.windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(kept[0], 0);
            prop_assert_eq!(*kept.last().unwrap(), len - 1);
        }

        #[test]
        fn pairing_is_monotone_and_covers_shorter(len_a in 1usize..200, len_b in 1usize..200) {
            let pairs = pair_indices(len_a, len_b);
            let k = len_a.min(len_b);
            prop_assert_eq!(pairs.len(), k);
            prop_assert!(pairs.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 <= w[1].1));
            prop_assert!(pairs.iter().all(|&(i, j)| i < len_a && j < len_b));
            let shorter: Vec<usize> = pairs
                .iter()
                .map(|&(i, j)| if len_a <= len_b { i } else { j })
                .collect();
            prop_assert_eq!(shorter.first().copied(), Some(0));
            prop_assert_eq!(shorter.last().copied(), Some(k - 1));
        }

        #[test]
        fn pairing_is_swap_consistent(len_a in 1usize..200, len_b in 1usize..200) {
            let ab = pair_indices(len_a, len_b);
            let ba: Vec<_> = pair_indices(len_b, len_a).into_iter().map(|(x, y)| (y, x)).collect();
            prop_assert_eq!(ab, ba);
        }
    }
}
