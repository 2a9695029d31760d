use std::sync::Arc;
use std::time::Instant;

use log::info;

use super::cache::{MatrixCache, MatrixKey};
use super::report::{cluster_members, ClusterResponse, FlightPolyline, SilhouettePayload, Timing};
use super::request::{ClusterMode, ClusterRequest};
use super::ServiceError;
use crate::error::Error;
use crate::hcluster::{build_dendrogram, cut_k, cut_threshold, Clustering};
use crate::metrics::build_matrix;
use crate::quality::{auto_cut_with, silhouette, AutoCutOptions};
use crate::stats::compute_stats;
use crate::track::{FlightTrack, TrackStore};

/// Query, distance matrix, dendrogram, cut, silhouette and statistics.
pub fn run_cluster(
    store: &TrackStore,
    req: &ClusterRequest,
    cache: Option<&MatrixCache>,
) -> Result<ClusterResponse, ServiceError> {
    req.validate()?;
    let flights: Vec<&FlightTrack> = store.query(&req.query);
    let n = flights.len();
    if n == 0 {
        return Err(ServiceError::NoFlights(req.query.clone()));
    }
    if req.mode == ClusterMode::Auto && n < 3 {
        return Err(Error::TooFewFlights(n).into());
    }
    if let ClusterMode::K { k } = req.mode {
        if k > n {
            return Err(ServiceError::validation(
                "mode.k",
                format!("k = {k} exceeds the {n} matched flights"),
            ));
        }
    }
    let airport_gcd_nm = store.airport_gcd_nm(&req.query.origin, &req.query.destination)?;

    let started = Instant::now();
    let key = MatrixKey {
        query: req.query.clone(),
        metric: req.metric,
        extraction_n: req.extraction_n,
    };
    let cached = cache.and_then(|c| c.get(&key));
    let matrix_cached = cached.is_some();
    let matrix = match cached {
        Some(m) => m,
        None => {
            let m = Arc::new(build_matrix(&flights, req.metric, req.extraction_n)?);
            if let Some(c) = cache {
                c.insert(key, m.clone());
            }
            m
        }
    };
    let matrix_ms = started.elapsed().as_secs_f64() * 1e3;

    let started = Instant::now();
    let dendrogram = build_dendrogram(&matrix, req.linkage);
    let (clustering, report): (Clustering, _) = match req.mode {
        ClusterMode::Auto => {
            let options = AutoCutOptions { max_k: req.max_k };
            let (c, r) = auto_cut_with(&matrix, &dendrogram, options)?;
            (c, Some(r))
        }
        ClusterMode::Threshold { t } => {
            let c = cut_threshold(&dendrogram, t);
            let r = silhouette(&matrix, &c).ok();
            (c, r)
        }
        ClusterMode::K { k } => {
            let c = cut_k(&dendrogram, k)?;
            let r = silhouette(&matrix, &c).ok();
            (c, r)
        }
    };
    let cluster_ms = started.elapsed().as_secs_f64() * 1e3;
    info!(
        "{} flights, k = {}, matrix {matrix_ms:.1} ms, clustering {cluster_ms:.1} ms",
        n,
        clustering.k()
    );

    let stats = compute_stats(&flights, &clustering, airport_gcd_nm)?;
    let labels = matrix.labels();
    Ok(ClusterResponse {
        query: req.query.clone(),
        metric: req.metric,
        extraction_n: req.extraction_n,
        linkage: req.linkage,
        mode: req.mode,
        airport_gcd_nm,
        k: clustering.k(),
        clusters: cluster_members(&clustering, labels),
        flights: flights
            .iter()
            .zip(clustering.labels())
            .map(|(f, &c)| FlightPolyline::new(f, Some(c)))
            .collect(),
        leaf_ids: labels.to_vec(),
        silhouette: report.map(|r| SilhouettePayload::new(&r, labels)),
        dendrogram,
        stats,
        timing: Timing {
            matrix_ms,
            cluster_ms,
            matrix_cached,
        },
    })
}

/// The clustering a response describes, rebuilt from its cluster lists.
pub fn response_clustering(resp: &ClusterResponse) -> Clustering {
    let mut raw = vec![0; resp.leaf_ids.len()];
    for members in &resp.clusters {
        for id in &members.flight_ids {
            let leaf = resp
                .leaf_ids
                .iter()
                .position(|l| l == id)
                .expect("known leaf");
            raw[leaf] = members.cluster;
        }
    }
    Clustering::from_assignment(&raw, crate::hcluster::ClusterSource::Auto)
}
