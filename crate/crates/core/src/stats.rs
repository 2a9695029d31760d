//! Per-cluster descriptive statistics.
//!
//! Statistics always use the raw fixes of each flight, regardless of the
//! extraction factor used for clustering. Standard deviations are population
//! standard deviations. The deviation from the airport-pair great circle is
//! the percent excess of the cluster's mean flown path length over that
//! distance: `100 * (mean_path - gcd) / gcd`.

use std::borrow::Borrow;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geo::path_length_nm;
use crate::hcluster::Clustering;
use crate::track::FlightTrack;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

impl MeanSd {
    /// Two-pass mean and population standard deviation. `None` when empty.
    pub fn of(values: &[f64]) -> Option<MeanSd> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Some(MeanSd {
            mean,
            sd: var.sqrt(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterStats {
    pub cluster: usize,
    #[serde(rename = "number_of_flights")]
    pub n_flights: usize,
    #[serde(rename = "number_of_points")]
    pub n_points: usize,
    #[serde(rename = "speed_knots")]
    pub speed_kt: MeanSd,
    #[serde(rename = "altitude_hundred_feet")]
    pub altitude_ff: MeanSd,
    pub flight_distance_nm: MeanSd,
    #[serde(rename = "deviation_with_gcd_pct")]
    pub deviation_gcd_pct: f64,
}

/// One entry per cluster, in cluster-index order. `flights[i]` must be the
/// flight labeled by `c.labels()[i]`.
pub fn compute_stats<F: Borrow<FlightTrack>>(
    flights: &[F],
    c: &Clustering,
    airport_gcd_nm: f64,
) -> Result<Vec<ClusterStats>> {
    if flights.len() != c.len() {
        return Err(Error::Domain(format!(
            "{} flights but {} labels",
            flights.len(),
            c.len()
        )));
    }
    if !airport_gcd_nm.is_finite() || airport_gcd_nm <= 0.0 {
        return Err(Error::Domain(format!(
            "airport great-circle distance must be > 0, got {airport_gcd_nm}"
        )));
    }

    c.members()
        .into_iter()
        .enumerate()
        .map(|(cluster, members)| {
            let tracks: Vec<&FlightTrack> = members.iter().map(|&i| flights[i].borrow()).collect();
            let points = || tracks.iter().flat_map(|t| t.points());
            let speeds: Vec<f64> = points().map(|p| p.speed_kt).collect();
            let altitudes: Vec<f64> = points().map(|p| p.altitude_ff).collect();
            let lengths = tracks
                .iter()
                .map(|t| path_length_nm(&t.positions()))
                .collect::<Result<Vec<f64>>>()?;
            let empty = || Error::Domain(format!("cluster {cluster} has no flights"));
            let flight_distance_nm = MeanSd::of(&lengths).ok_or_else(empty)?;
            Ok(ClusterStats {
                cluster,
                n_flights: tracks.len(),
                n_points: speeds.len(),
                speed_kt: MeanSd::of(&speeds).ok_or_else(empty)?,
                altitude_ff: MeanSd::of(&altitudes).ok_or_else(empty)?,
                deviation_gcd_pct: 100.0 * (flight_distance_nm.mean - airport_gcd_nm)
                    / airport_gcd_nm,
                flight_distance_nm,
            })
        })
        .collect()
}
