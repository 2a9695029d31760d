//! Flight-to-flight distances and the pairwise distance matrix.
//!
//! Two models are supported:
//!
//! * **Geographic**: the mean great-circle distance, in nautical miles,
//!   over paired positions of the two (extracted) tracks.
//! * **Cosine**: one minus the mean cosine similarity of paired direction
//!   vectors, where a direction vector is the raw `(Δlat, Δlon)` difference
//!   between consecutive extracted points. Unitless, in `[0, 2]`.
//!
//! Pairing of unequal-length sequences is done by
//! [`pair_indices`](crate::sampling::pair_indices). Both metrics are exactly
//! symmetric because the pairing is swap-consistent and every per-pair term
//! is computed with commutative operations.

use std::borrow::Borrow;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::{GeoPoint, TrigPoint};
use crate::sampling::{extract, pair_indices, ExtractionFactor};
use crate::track::FlightTrack;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MetricKind {
    #[serde(rename = "geo", alias = "geographic")]
    Geographic,
    #[serde(rename = "cosine")]
    Cosine,
}

impl MetricKind {
    /// Largest distance the metric can produce.
    pub fn max_distance(self) -> f64 {
        match self {
            MetricKind::Geographic => std::f64::consts::PI * crate::geo::EARTH_RADIUS_NM,
            MetricKind::Cosine => 2.0,
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            MetricKind::Geographic => "nm",
            MetricKind::Cosine => "unitless",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::Geographic => "geo",
            MetricKind::Cosine => "cosine",
        })
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "geo" | "geographic" => Ok(MetricKind::Geographic),
            "cosine" | "cos" => Ok(MetricKind::Cosine),
            other => Err(Error::Domain(format!("unknown metric {other:?}"))),
        }
    }
}

/// Difference between consecutive fixes, in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionVector {
    pub dlat: f64,
    pub dlon: f64,
}

impl DirectionVector {
    fn dot(&self, other: &DirectionVector) -> f64 {
        self.dlat * other.dlat + self.dlon * other.dlon
    }

    fn norm_sq(&self) -> f64 {
        self.dot(self)
    }
}

pub fn direction_vectors(points: &[GeoPoint]) -> Vec<DirectionVector> {
    points
        .windows(2)
        .map(|w| DirectionVector {
            dlat: w[1].lat - w[0].lat,
            dlon: w[1].lon - w[0].lon,
        })
        .collect()
}

/// Cosine similarity of a vector pair; `None` when exactly one is zero.
fn pair_similarity(a: &DirectionVector, b: &DirectionVector) -> Option<f64> {
    let (na, nb) = (a.norm_sq(), b.norm_sq());
    match (na == 0.0, nb == 0.0) {
        (true, true) => Some(1.0),
        (true, false) | (false, true) => None,
        // sqrt(x * x) == x in IEEE arithmetic, so identical vectors give exactly 1
        (false, false) => Some(a.dot(b) / (na * nb).sqrt()),
    }
}

fn mean_gcd(a: &[TrigPoint], b: &[TrigPoint]) -> f64 {
    let pairs = pair_indices(a.len(), b.len());
    let total: f64 = pairs.iter().map(|&(i, j)| a[i].distance_nm(&b[j])).sum();
    total / pairs.len() as f64
}

fn mean_cosine_distance(a: &[DirectionVector], b: &[DirectionVector]) -> Option<f64> {
    let (sum, count) = pair_indices(a.len(), b.len())
        .into_iter()
        .filter_map(|(i, j)| pair_similarity(&a[i], &b[j]))
        .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        return None;
    }
    Some((1.0 - sum / count as f64).clamp(0.0, 2.0))
}

/// Mean great-circle distance (nm) between paired positions after extraction.
pub fn geo_distance(a: &FlightTrack, b: &FlightTrack, n: ExtractionFactor) -> Result<f64> {
    let prep = |t: &FlightTrack| -> Result<Vec<TrigPoint>> {
        Ok(extract(&t.positions(), n)?
            .into_iter()
            .map(TrigPoint::new)
            .collect())
    };
    Ok(mean_gcd(&prep(a)?, &prep(b)?))
}

/// One minus the mean cosine similarity of paired direction vectors.
///
/// A pair where both vectors are zero counts as similarity 1; a pair where
/// only one is zero is left out of the mean.
pub fn cosine_distance(a: &FlightTrack, b: &FlightTrack, n: ExtractionFactor) -> Result<f64> {
    let va = cosine_vectors(a, n)?;
    let vb = cosine_vectors(b, n)?;
    mean_cosine_distance(&va, &vb).ok_or_else(|| Error::DegenerateTrack {
        a: a.flight_id().to_string(),
        b: b.flight_id().to_string(),
    })
}

fn cosine_vectors(track: &FlightTrack, n: ExtractionFactor) -> Result<Vec<DirectionVector>> {
    let points = extract(&track.positions(), n)?;
    if points.len() < 2 {
        return Err(Error::InsufficientPoints {
            flight_id: track.flight_id().to_string(),
            points: points.len(),
        });
    }
    Ok(direction_vectors(&points))
}

pub fn distance(
    a: &FlightTrack,
    b: &FlightTrack,
    metric: MetricKind,
    n: ExtractionFactor,
) -> Result<f64> {
    match metric {
        MetricKind::Geographic => geo_distance(a, b, n),
        MetricKind::Cosine => cosine_distance(a, b, n),
    }
}

/// Symmetric matrix of pairwise distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    values: Vec<f64>,
    metric: Option<MetricKind>,
    extraction: ExtractionFactor,
}

impl DistanceMatrix {
    /// Builds a matrix from explicit rows, checking symmetry, a zero
    /// diagonal and finite non-negative entries.
    pub fn from_rows(labels: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let n = labels.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Domain(format!("matrix must be {n}x{n}")));
        }
        for i in 0..n {
            if rows[i][i] != 0.0 {
                return Err(Error::Domain(format!("diagonal entry {i} is not zero")));
            }
            for j in 0..n {
                let v = rows[i][j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Domain(format!("entry ({i}, {j}) = {v} is invalid")));
                }
                if v != rows[j][i] {
                    return Err(Error::Domain(format!("entry ({i}, {j}) is not symmetric")));
                }
            }
        }
        Ok(DistanceMatrix {
            labels,
            values: rows.concat(),
            metric: None,
            extraction: ExtractionFactor::NONE,
        })
    }

    /// Convenience for unlabeled matrices: labels become `"0"`, `"1"`, ...
    pub fn from_unlabeled(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_rows((0..rows.len()).map(|i| i.to_string()).collect(), rows)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn metric(&self) -> Option<MetricKind> {
        self.metric
    }

    pub fn extraction(&self) -> ExtractionFactor {
        self.extraction
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.labels.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.labels.len();
        &self.values[i * n..(i + 1) * n]
    }

    /// Copy with every entry multiplied by `factor` (> 0).
    pub fn scaled(&self, factor: f64) -> Self {
        DistanceMatrix {
            values: self.values.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }
}

enum Prepared {
    Geo(Vec<TrigPoint>),
    Cosine(Vec<DirectionVector>),
}

fn prepare(track: &FlightTrack, metric: MetricKind, n: ExtractionFactor) -> Result<Prepared> {
    Ok(match metric {
        MetricKind::Geographic => Prepared::Geo(
            extract(&track.positions(), n)?
                .into_iter()
                .map(TrigPoint::new)
                .collect(),
        ),
        MetricKind::Cosine => Prepared::Cosine(cosine_vectors(track, n)?),
    })
}

/// Builds the pairwise distance matrix on the global rayon pool.
///
/// Each entry is a pure function of its two tracks, so the result does not
/// depend on how the pairs are scheduled.
pub fn build_matrix<F>(
    flights: &[F],
    metric: MetricKind,
    n: ExtractionFactor,
) -> Result<DistanceMatrix>
where
    F: Borrow<FlightTrack> + Sync,
{
    if flights.is_empty() {
        return Err(Error::Domain(
            "distance matrix needs at least one flight".into(),
        ));
    }
    let prepared = flights
        .par_iter()
        .map(|f| prepare(f.borrow(), metric, n))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let count = flights.len();
    let upper: Vec<Vec<Option<f64>>> = (0..count)
        .into_par_iter()
        .map(|i| {
            ((i + 1)..count)
                .map(|j| match (&prepared[i], &prepared[j]) {
                    (Prepared::Geo(a), Prepared::Geo(b)) => Some(mean_gcd(a, b)),
                    (Prepared::Cosine(a), Prepared::Cosine(b)) => mean_cosine_distance(a, b),
                    _ => unreachable!("flights prepared for one metric"),
                })
                .collect()
        })
        .collect();

    let mut values = vec![0.0; count * count];
    for (i, row) in upper.into_iter().enumerate() {
        for (offset, entry) in row.into_iter().enumerate() {
            let j = i + 1 + offset;
            let d = entry.ok_or_else(|| Error::DegenerateTrack {
                a: flights[i].borrow().flight_id().to_string(),
                b: flights[j].borrow().flight_id().to_string(),
            })?;
            values[i * count + j] = d;
            values[j * count + i] = d;
        }
    }

    Ok(DistanceMatrix {
        labels: flights
            .iter()
            .map(|f| f.borrow().flight_id().to_string())
            .collect(),
        values,
        metric: Some(metric),
        extraction: n,
    })
}

/// [`build_matrix`] on a dedicated pool with `workers` threads.
pub fn build_matrix_with_workers<F>(
    flights: &[F],
    metric: MetricKind,
    n: ExtractionFactor,
    workers: usize,
) -> Result<DistanceMatrix>
where
    F: Borrow<FlightTrack> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))?;
    pool.install(|| build_matrix(flights, metric, n))
}
