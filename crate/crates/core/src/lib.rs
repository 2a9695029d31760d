//! Flight-path clustering.
//!
//! Flights between an airport pair are compared with one of two distance
//! models, clustered agglomeratively, and the resulting dendrogram is cut
//! either at the level with the best silhouette score or at an analyst
//! supplied threshold. Per-cluster descriptive statistics summarise the
//! result.
//!
//! ```no_run
//! use flightclust::prelude::*;
//!
//! let scenario = synthgen::generate(&ScenarioSpec::new(ScenarioKind::TwoBundles))?;
//! let matrix = build_matrix(&scenario.flights, MetricKind::Geographic, ExtractionFactor::NONE)?;
//! let tree = build_dendrogram(&matrix, Linkage::Average);
//! let (clusters, report) = auto_cut(&matrix, &tree)?;
//! println!("k = {}, silhouette = {:.2}", clusters.k(), report.score);
//! # Ok::<(), flightclust::Error>(())
//! ```

pub mod error;
pub mod geo;
pub mod hcluster;
pub mod metrics;
pub mod quality;
pub mod sampling;
pub mod service;
pub mod stats;
pub mod synthgen;
pub mod track;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::geo::{great_circle_nm, path_length_nm, GeoPoint, EARTH_RADIUS_NM};
    pub use crate::hcluster::{
        build_dendrogram, cut_k, cut_threshold, ClusterSource, Clustering, Dendrogram, Linkage,
    };
    pub use crate::metrics::{
        build_matrix, cosine_distance, geo_distance, DistanceMatrix, MetricKind,
    };
    pub use crate::quality::{auto_cut, silhouette, SilhouetteReport};
    pub use crate::sampling::{extract, pair_tracks, ExtractionFactor};
    pub use crate::stats::{compute_stats, ClusterStats};
    pub use crate::synthgen::{self, ScenarioKind, ScenarioSpec};
    pub use crate::track::{FlightTrack, TrackPoint, TrackQuery, TrackStore};
}
