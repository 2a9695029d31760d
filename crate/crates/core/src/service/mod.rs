//! Program entry points: the batch CLI and the HTTP/JSON API.
//!
//! Both front ends drive the same [`pipeline::run_cluster`], which turns a
//! [`ClusterRequest`] over a [`TrackStore`](crate::track::TrackStore) into a
//! [`ClusterResponse`].

pub mod cache;
pub mod cli;
pub mod http;
pub mod pipeline;
pub mod report;
pub mod request;

pub use cache::MatrixCache;
pub use pipeline::run_cluster;
pub use report::ClusterResponse;
pub use request::{ClusterMode, ClusterRequest};

use thiserror::Error;

use crate::error::Error;
use crate::track::TrackQuery;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },

    #[error("no flights matched {}->{} between {} and {}", .0.origin, .0.destination, .0.date_from, .0.date_to)]
    NoFlights(TrackQuery),

    #[error("cannot read {path}: {source}")]
    Input {
        path: String,
        #[source]
        source: Error,
    },

    #[error(transparent)]
    Core(#[from] Error),
}

impl ServiceError {
    pub fn validation(field: &str, message: impl Into<String>) -> Self {
        ServiceError::Validation {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// Process exit code for the CLI. Each failure class gets its own code.
    pub fn exit_code(&self) -> u8 {
        match self {
            ServiceError::Validation { .. } => 7,
            ServiceError::NoFlights(_) => 5,
            ServiceError::Input { source, .. } => core_exit_code(source),
            ServiceError::Core(e) => core_exit_code(e),
        }
    }
}

fn core_exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 3,
        Error::Format(_) | Error::EmptyResult { .. } | Error::DuplicateFlight(_) => 4,
        Error::TooFewFlights(_) | Error::UndefinedSilhouette { .. } => 6,
        Error::InsufficientPoints { .. } | Error::DegenerateTrack { .. } => 8,
        Error::MissingAirport(_) => 9,
        Error::Domain(_) => 1,
    }
}
