//! Silhouette values and automatic selection of the dendrogram cut.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hcluster::{cut_k, ClusterSource, Clustering, Dendrogram};
use crate::metrics::DistanceMatrix;

/// Per-sample silhouette values (matrix order) and their mean.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SilhouetteReport {
    pub values: Vec<f64>,
    pub score: f64,
    pub k: usize,
}

/// Silhouette of each sample: `(b - a) / max(a, b)` with `a` the mean
/// distance to the rest of its own cluster and `b` the smallest mean distance
/// to another cluster. Samples alone in their cluster get 0.
pub fn silhouette(m: &DistanceMatrix, c: &Clustering) -> Result<SilhouetteReport> {
    let n = m.len();
    if c.len() != n {
        return Err(Error::Domain(format!(
            "clustering labels {} samples, matrix has {n}",
            c.len()
        )));
    }
    let k = c.k();
    if k < 2 || k >= n {
        return Err(Error::UndefinedSilhouette { k, n });
    }
    let labels = c.labels();
    let mut sizes = vec![0usize; k];
    for &l in labels {
        sizes[l] += 1;
    }

    let values: Vec<f64> = (0..n)
        .map(|i| {
            let own = labels[i];
            if sizes[own] == 1 {
                return 0.0;
            }
            let mut sums = vec![0.0; k];
            for (j, &d) in m.row(i).iter().enumerate() {
                sums[labels[j]] += d;
            }
            let a = sums[own] / (sizes[own] - 1) as f64;
            let b = (0..k)
                .filter(|&c| c != own)
                .map(|c| sums[c] / sizes[c] as f64)
                .fold(f64::INFINITY, f64::min);
            let denom = a.max(b);
            if denom == 0.0 {
                0.0
            } else {
                (b - a) / denom
            }
        })
        .collect();
    let score = values.iter().sum::<f64>() / n as f64;
    Ok(SilhouetteReport { values, score, k })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AutoCutOptions {
    /// Upper bound on the cluster counts tried; `None` tries every valid k.
    pub max_k: Option<usize>,
}

/// Cuts the dendrogram at the cluster count with the best silhouette score.
/// Ties go to the smaller k.
pub fn auto_cut(m: &DistanceMatrix, d: &Dendrogram) -> Result<(Clustering, SilhouetteReport)> {
    auto_cut_with(m, d, AutoCutOptions::default())
}

pub fn auto_cut_with(
    m: &DistanceMatrix,
    d: &Dendrogram,
    options: AutoCutOptions,
) -> Result<(Clustering, SilhouetteReport)> {
    let n = d.n_leaves();
    if n < 3 {
        return Err(Error::TooFewFlights(n));
    }
    if m.len() != n {
        return Err(Error::Domain(format!(
            "dendrogram has {n} leaves, matrix has {}",
            m.len()
        )));
    }
    let top = options.max_k.map_or(n - 1, |cap| cap.clamp(2, n - 1));
    let candidates = (2..=top)
        .into_par_iter()
        .map(|k| {
            let c = cut_k(d, k)?;
            let report = silhouette(m, &c)?;
            Ok((c, report))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best: Option<(Clustering, SilhouetteReport)> = None;
    for (c, report) in candidates {
        if best.as_ref().is_none_or(|(_, b)| report.score > b.score) {
            best = Some((c, report));
        }
    }
    let (c, report) = best.expect("at least one candidate k");
    Ok((c.with_source(ClusterSource::Auto), report))
}
