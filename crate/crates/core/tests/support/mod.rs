//! Independent reference implementations used by the integration suites.
//!
//! Nothing here calls into the library's algorithms beyond plain data
//! access. The one exception is the leg length used by the statistics
//! oracle, which is checked against haversine separately.

#![allow(dead_code)]

use flightclust::geo::{great_circle_nm, EARTH_RADIUS_NM};
use flightclust::hcluster::Linkage;
use flightclust::track::FlightTrack;
use rand::Rng;

/// Haversine distance in nautical miles.
pub fn haversine_nm(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let (p1, p2) = (lat1.to_radians(), lat2.to_radians());
    let dphi = p2 - p1;
    let dlam = (lon2 - lon1).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dlam / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_NM * h.sqrt().min(1.0).asin()
}

/// Symmetric matrix with zero diagonal and entries drawn from `lo..hi`.
pub fn random_matrix<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.random_range(lo..hi);
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    rows
}

/// Random labels over `k` groups, every group non-empty. Needs `n >= k`.
pub fn random_labels<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    let mut labels: Vec<usize> = (0..n)
        .map(|i| if i < k { i } else { rng.random_range(0..k) })
        .collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        labels.swap(i, j);
    }
    labels
}

fn cluster_distance(rows: &[Vec<f64>], a: &[usize], b: &[usize], linkage: Linkage) -> f64 {
    let pairs = a.iter().flat_map(|&i| b.iter().map(move |&j| rows[i][j]));
    match linkage {
        Linkage::Single => pairs.fold(f64::INFINITY, f64::min),
        Linkage::Complete => pairs.fold(f64::NEG_INFINITY, f64::max),
        Linkage::Average => pairs.sum::<f64>() / (a.len() * b.len()) as f64,
    }
}

/// Naive agglomeration that recomputes every cluster distance from the member
/// lists at each step. Returns `partitions[k]` as a label vector for each
/// `k` in `1..=n` (index 0 unused).
pub fn brute_force_partitions(rows: &[Vec<f64>], linkage: Linkage) -> Vec<Vec<usize>> {
    let n = rows.len();
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut out = vec![Vec::new(); n + 1];
    out[n] = labels_of(&clusters, n);
    while clusters.len() > 1 {
        let mut best = (f64::INFINITY, 0, 0);
        for x in 0..clusters.len() {
            for y in x + 1..clusters.len() {
                let d = cluster_distance(rows, &clusters[x], &clusters[y], linkage);
                if d < best.0 {
                    best = (d, x, y);
                }
            }
        }
        let (_, x, y) = best;
        let merged = clusters.remove(y);
        clusters[x].extend(merged);
        clusters[x].sort_unstable();
        out[clusters.len()] = labels_of(&clusters, n);
    }
    out
}

/// Smallest gap between the chosen merge distance and the runner-up over the
/// whole brute-force run. Near-zero gaps mean the merge order is decided by
/// rounding, not by the data.
pub fn min_merge_gap(rows: &[Vec<f64>], linkage: Linkage) -> f64 {
    let n = rows.len();
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut gap = f64::INFINITY;
    while clusters.len() > 2 {
        let mut ds = Vec::new();
        for x in 0..clusters.len() {
            for y in x + 1..clusters.len() {
                ds.push((
                    cluster_distance(rows, &clusters[x], &clusters[y], linkage),
                    x,
                    y,
                ));
            }
        }
        ds.sort_by(|p, q| p.0.total_cmp(&q.0));
        gap = gap.min(ds[1].0 - ds[0].0);
        let (_, x, y) = ds[0];
        let merged = clusters.remove(y);
        clusters[x].extend(merged);
    }
    gap
}

fn labels_of(clusters: &[Vec<usize>], n: usize) -> Vec<usize> {
    let mut raw = vec![0; n];
    for (c, members) in clusters.iter().enumerate() {
        for &i in members {
            raw[i] = c;
        }
    }
    canonical(&raw)
}

/// Relabels by first appearance so equal partitions compare equal.
pub fn canonical(raw: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    raw.iter()
        .map(|r| {
            let next = map.len();
            *map.entry(*r).or_insert(next)
        })
        .collect()
}

/// Silhouette straight from the definition. Returns per-sample values and
/// their mean.
pub fn silhouette_oracle(rows: &[Vec<f64>], labels: &[usize]) -> (Vec<f64>, f64) {
    let n = rows.len();
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let own = labels[i];
        let mates: Vec<usize> = (0..n).filter(|&j| j != i && labels[j] == own).collect();
        if mates.is_empty() {
            values.push(0.0);
            continue;
        }
        let a = mates.iter().map(|&j| rows[i][j]).sum::<f64>() / mates.len() as f64;
        let mut b = f64::INFINITY;
        for other in (0..k).filter(|&c| c != own) {
            let members: Vec<usize> = (0..n).filter(|&j| labels[j] == other).collect();
            let mean = members.iter().map(|&j| rows[i][j]).sum::<f64>() / members.len() as f64;
            b = b.min(mean);
        }
        let denom = a.max(b);
        values.push(if denom == 0.0 { 0.0 } else { (b - a) / denom });
    }
    let score = values.iter().sum::<f64>() / n as f64;
    (values, score)
}

/// Welford running mean and population standard deviation.
pub fn welford(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let (mut count, mut mean, mut m2) = (0.0, 0.0, 0.0);
    for x in values {
        count += 1.0;
        let delta = x - mean;
        mean += delta / count;
        m2 += delta * (x - mean);
    }
    (mean, (m2 / count).sqrt())
}

/// Sum of leg lengths along a flight's raw fixes.
pub fn leg_sum_nm(track: &FlightTrack) -> f64 {
    track
        .points()
        .windows(2)
        .map(|w| great_circle_nm(w[0].position, w[1].position))
        .sum()
}

pub struct StatsOracle {
    pub n_flights: usize,
    pub n_points: usize,
    pub speed: (f64, f64),
    pub altitude: (f64, f64),
    pub distance: (f64, f64),
    pub deviation_pct: f64,
}

/// Per-cluster statistics recomputed from scratch.
pub fn stats_oracle(flights: &[FlightTrack], labels: &[usize], gcd_nm: f64) -> Vec<StatsOracle> {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    (0..k)
        .map(|c| {
            let members: Vec<&FlightTrack> = flights
                .iter()
                .zip(labels)
                .filter(|(_, &l)| l == c)
                .map(|(f, _)| f)
                .collect();
            let pts = || members.iter().flat_map(|f| f.points().iter());
            let distance = welford(members.iter().map(|f| leg_sum_nm(f)));
            StatsOracle {
                n_flights: members.len(),
                n_points: pts().count(),
                speed: welford(pts().map(|p| p.speed_kt)),
                altitude: welford(pts().map(|p| p.altitude_ff)),
                deviation_pct: (distance.0 / gcd_nm - 1.0) * 100.0,
                distance,
            }
        })
        .collect()
}

/// `|a - b| <= rel * max(|a|, |b|)`, with `abs` as a floor for values near 0.
pub fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    (a - b).abs() <= (rel * a.abs().max(b.abs())).max(abs)
}
