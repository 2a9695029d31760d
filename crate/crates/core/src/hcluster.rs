//! Agglomerative hierarchical clustering over a [`DistanceMatrix`].
//!
//! The full dendrogram is always built; clusterings are produced afterwards
//! by cutting it either at a distance threshold or at a cluster count, so an
//! interactive caller can re-cut without recomputing anything.
//!
//! The merge loop is the straightforward O(n³) scan with Lance-Williams
//! updates of the working matrix. Ties on distance are broken by the
//! lexicographically smallest `(min node id, max node id)` pair, which makes
//! the result fully deterministic.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::metrics::DistanceMatrix;

/// Cluster-to-cluster distance used after each merge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    /// Unweighted mean of all cross-cluster distances (UPGMA).
    #[default]
    Average,
    Complete,
    Single,
}

impl Linkage {
    pub const ALL: [Linkage; 3] = [Linkage::Average, Linkage::Complete, Linkage::Single];

    /// Lance-Williams update: distance from `k` to the union of `i` and `j`.
    fn combine(self, d_ki: f64, d_kj: f64, size_i: usize, size_j: usize) -> f64 {
        match self {
            Linkage::Single => d_ki.min(d_kj),
            Linkage::Complete => d_ki.max(d_kj),
            Linkage::Average => {
                let (si, sj) = (size_i as f64, size_j as f64);
                let mean = (si * d_ki + sj * d_kj) / (si + sj);
                // a convex combination; keep rounding from leaving the interval
                mean.clamp(d_ki.min(d_kj), d_ki.max(d_kj))
            }
        }
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Linkage::Average => "average",
            Linkage::Complete => "complete",
            Linkage::Single => "single",
        })
    }
}

impl FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "average" => Ok(Linkage::Average),
            "complete" => Ok(Linkage::Complete),
            "single" => Ok(Linkage::Single),
            other => Err(Error::Domain(format!("unknown linkage {other:?}"))),
        }
    }
}

/// One merge step. Leaves are nodes `0..n`, the merge at step `s` creates
/// node `n + s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub id: usize,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    n_leaves: usize,
    merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn n_leaves(&self) -> usize {
        self.n_leaves
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn root_height(&self) -> Option<f64> {
        self.merges.last().map(|m| m.height)
    }

    /// Rebuilds a dendrogram from `(left, right, height)` triples,
    /// validating the node-id structure.
    pub fn from_triples(n_leaves: usize, triples: &[(usize, usize, f64)]) -> Result<Self> {
        if n_leaves == 0 {
            return Err(Error::Domain("dendrogram needs at least one leaf".into()));
        }
        if triples.len() != n_leaves - 1 {
            return Err(Error::Domain(format!(
                "{n_leaves} leaves need {} merges, got {}",
                n_leaves - 1,
                triples.len()
            )));
        }
        let mut sizes = vec![1usize; n_leaves];
        let mut used = vec![false; 2 * n_leaves - 1];
        let mut merges = Vec::with_capacity(triples.len());
        for (step, &(left, right, height)) in triples.iter().enumerate() {
            let id = n_leaves + step;
            for child in [left, right] {
                if child >= id || used[child] {
                    return Err(Error::Domain(format!(
                        "invalid child {child} in merge {step}"
                    )));
                }
                used[child] = true;
            }
            if left == right || !height.is_finite() || height < 0.0 {
                return Err(Error::Domain(format!("invalid merge {step}")));
            }
            let size = sizes[left] + sizes[right];
            sizes.push(size);
            merges.push(Merge {
                left,
                right,
                height,
                id,
                size,
            });
        }
        Ok(Dendrogram { n_leaves, merges })
    }

    /// Leaf assignment after applying the first `count` merges.
    fn partition_after(&self, count: usize) -> Vec<usize> {
        let n = self.n_leaves;
        let mut parent: Vec<usize> = (0..n).collect();
        let mut rep: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for m in &self.merges[..count] {
            let (a, b) = (
                find(&mut parent, rep[m.left]),
                find(&mut parent, rep[m.right]),
            );
            let root = a.min(b);
            parent[a.max(b)] = root;
            rep.push(root);
        }
        (0..n).map(|leaf| find(&mut parent, leaf)).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct DendrogramWire {
    n_leaves: usize,
    merges: Vec<(usize, usize, f64)>,
}

impl Serialize for Dendrogram {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DendrogramWire {
            n_leaves: self.n_leaves,
            merges: self
                .merges
                .iter()
                .map(|m| (m.left, m.right, m.height))
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Dendrogram {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = DendrogramWire::deserialize(deserializer)?;
        Dendrogram::from_triples(wire.n_leaves, &wire.merges).map_err(D::Error::custom)
    }
}

/// How a clustering was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ClusterSource {
    /// Best silhouette over all cut levels.
    Auto,
    Threshold {
        t: f64,
    },
    K {
        k: usize,
    },
}

/// Assignment of each leaf (matrix row) to a cluster index.
///
/// Indices are contiguous from 0 and numbered in order of first appearance
/// over the leaves, so equal partitions always compare equal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Clustering {
    labels: Vec<usize>,
    k: usize,
    source: ClusterSource,
}

impl Clustering {
    /// Renumbers an arbitrary assignment by first appearance.
    pub fn from_assignment(raw: &[usize], source: ClusterSource) -> Self {
        let mut mapping = std::collections::HashMap::new();
        let labels: Vec<usize> = raw
            .iter()
            .map(|r| {
                let next = mapping.len();
                *mapping.entry(*r).or_insert(next)
            })
            .collect();
        Clustering {
            k: mapping.len(),
            labels,
            source,
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn source(&self) -> ClusterSource {
        self.source
    }

    pub(crate) fn with_source(mut self, source: ClusterSource) -> Self {
        self.source = source;
        self
    }

    /// Leaf indices per cluster, each list ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.k];
        for (leaf, &c) in self.labels.iter().enumerate() {
            groups[c].push(leaf);
        }
        groups
    }

    /// Same partition, ignoring source and numbering.
    pub fn same_partition(&self, other: &Clustering) -> bool {
        self.labels == other.labels
    }

    /// True when every cluster of `self` lies inside one cluster of `coarser`.
    pub fn refines(&self, coarser: &Clustering) -> bool {
        if self.labels.len() != coarser.labels.len() {
            return false;
        }
        let mut image = vec![None; self.k];
        self.labels
            .iter()
            .zip(&coarser.labels)
            .all(|(&fine, &coarse)| *image[fine].get_or_insert(coarse) == coarse)
    }
}

/// Builds the full merge tree for `m`.
pub fn build_dendrogram(m: &DistanceMatrix, linkage: Linkage) -> Dendrogram {
    let n = m.len();
    let mut dist: Vec<f64> = (0..n).flat_map(|i| m.row(i).to_vec()).collect();
    let mut node: Vec<usize> = (0..n).collect();
    let mut size = vec![1usize; n];
    let mut active: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    while active.len() > 1 {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for (ai, &a) in active.iter().enumerate() {
            for &b in &active[ai + 1..] {
                let d = dist[a * n + b];
                let (lo, hi) = (node[a].min(node[b]), node[a].max(node[b]));
                let better = match best {
                    None => true,
                    Some((bd, blo, bhi, _, _)) => d < bd || (d == bd && (lo, hi) < (blo, bhi)),
                };
                if better {
                    best = Some((d, lo, hi, a, b));
                }
            }
        }
        let (height, left, right, a, b) = best.expect("at least two active clusters");

        for &k in &active {
            if k == a || k == b {
                continue;
            }
            let updated = linkage.combine(dist[k * n + a], dist[k * n + b], size[a], size[b]);
            dist[k * n + a] = updated;
            dist[a * n + k] = updated;
        }
        let id = n + merges.len();
        size[a] += size[b];
        node[a] = id;
        active.retain(|&s| s != b);
        merges.push(Merge {
            left,
            right,
            height,
            id,
            size: size[a],
        });
    }

    Dendrogram {
        n_leaves: n,
        merges,
    }
}

/// Applies every merge with height strictly below `t`.
///
/// A merge at exactly `t` stays unapplied, so lowering the threshold to a
/// merge height splits that merge.
pub fn cut_threshold(d: &Dendrogram, t: f64) -> Clustering {
    let count = d.merges.iter().take_while(|m| m.height < t).count();
    Clustering::from_assignment(&d.partition_after(count), ClusterSource::Threshold { t })
}

/// Undoes the last `k - 1` merges, giving exactly `k` clusters.
pub fn cut_k(d: &Dendrogram, k: usize) -> Result<Clustering> {
    if k == 0 || k > d.n_leaves {
        return Err(Error::Domain(format!("k = {k} outside 1..={}", d.n_leaves)));
    }
    Ok(Clustering::from_assignment(
        &d.partition_after(d.n_leaves - k),
        ClusterSource::K { k },
    ))
}
