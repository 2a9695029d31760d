//! Response payloads and GeoJSON export.

use std::collections::BTreeMap;

use geojson::{Feature, FeatureCollection, Geometry, JsonObject, Value as GeoValue};
use serde::Serialize;

use super::request::ClusterMode;
use crate::hcluster::{Clustering, Dendrogram, Linkage};
use crate::metrics::MetricKind;
use crate::quality::SilhouetteReport;
use crate::sampling::{extract, ExtractionFactor};
use crate::stats::ClusterStats;
use crate::track::{FlightTrack, TrackQuery};

/// Target vertex count for polylines shipped to clients. Longer tracks are
/// thinned for display only.
pub const MAX_POLYLINE_POINTS: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterMembers {
    pub cluster: usize,
    pub flight_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlightPolyline {
    pub flight_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cluster: Option<usize>,
    pub origin: String,
    pub destination: String,
    pub departure: String,
    pub n_points: usize,
    /// `[lon, lat]` pairs.
    pub coordinates: Vec<[f64; 2]>,
}

impl FlightPolyline {
    pub fn new(track: &FlightTrack, cluster: Option<usize>) -> Self {
        let points = track.positions();
        let step = points.len().div_ceil(MAX_POLYLINE_POINTS).max(1);
        let step = ExtractionFactor::new(step).expect("step >= 1");
        let coordinates = extract(&points, step)
            .expect("tracks are non-empty")
            .into_iter()
            .map(|p| [p.lon, p.lat])
            .collect();
        FlightPolyline {
            flight_id: track.flight_id().to_string(),
            cluster,
            origin: track.origin().to_string(),
            destination: track.destination().to_string(),
            departure: track
                .departure()
                .to_rfc3339_opts(chrono::SecondsFormat::AutoSi, true),
            n_points: track.points().len(),
            coordinates,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SilhouettePayload {
    pub score: f64,
    pub k: usize,
    pub per_sample: BTreeMap<String, f64>,
}

impl SilhouettePayload {
    pub fn new(report: &SilhouetteReport, labels: &[String]) -> Self {
        SilhouettePayload {
            score: report.score,
            k: report.k,
            per_sample: labels
                .iter()
                .cloned()
                .zip(report.values.iter().copied())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub matrix_ms: f64,
    pub cluster_ms: f64,
    pub matrix_cached: bool,
}

/// Everything a client needs to render and re-cut a clustering.
///
/// `leaf_ids[i]` is the flight behind dendrogram leaf `i`. Apart from
/// `timing`, which comes last, the body is a pure function of the store
/// and the request.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterResponse {
    pub query: TrackQuery,
    pub metric: MetricKind,
    pub extraction_n: ExtractionFactor,
    pub linkage: Linkage,
    pub mode: ClusterMode,
    pub airport_gcd_nm: f64,
    pub k: usize,
    pub clusters: Vec<ClusterMembers>,
    pub flights: Vec<FlightPolyline>,
    pub leaf_ids: Vec<String>,
    pub dendrogram: Dendrogram,
    pub silhouette: Option<SilhouettePayload>,
    pub stats: Vec<ClusterStats>,
    pub timing: Timing,
}

pub fn cluster_members(c: &Clustering, labels: &[String]) -> Vec<ClusterMembers> {
    c.members()
        .into_iter()
        .enumerate()
        .map(|(cluster, leaves)| ClusterMembers {
            cluster,
            flight_ids: leaves.into_iter().map(|i| labels[i].clone()).collect(),
        })
        .collect()
}

/// One LineString per flight with `flight_id` and `cluster` properties.
/// Uses every canonical fix.
pub fn geojson_collection(flights: &[&FlightTrack], c: &Clustering) -> FeatureCollection {
    let features = flights
        .iter()
        .zip(c.labels())
        .map(|(track, &cluster)| {
            let line = track
                .points()
                .iter()
                .map(|p| vec![p.position.lon, p.position.lat])
                .collect();
            let mut properties = JsonObject::new();
            properties.insert("flight_id".into(), track.flight_id().into());
            properties.insert("cluster".into(), cluster.into());
            Feature {
                bbox: None,
                geometry: Some(Geometry::new(GeoValue::LineString(line))),
                id: None,
                properties: Some(properties),
                foreign_members: None,
            }
        })
        .collect();
    FeatureCollection {
        bbox: None,
        features,
        foreign_members: None,
    }
}
