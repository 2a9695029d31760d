use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("no valid rows in input ({skipped} skipped)")]
    EmptyResult { skipped: usize },

    #[error("unknown airport code {0:?}")]
    MissingAirport(String),

    #[error("duplicate flight id {0:?}")]
    DuplicateFlight(String),

    #[error("flight {flight_id:?} has {points} point(s) after extraction; at least 2 are needed for direction vectors")]
    InsufficientPoints { flight_id: String, points: usize },

    #[error("flights {a:?} and {b:?} share no comparable direction vectors")]
    DegenerateTrack { a: String, b: String },

    #[error("silhouette is undefined for k = {k} with {n} samples")]
    UndefinedSilhouette { k: usize, n: usize },

    #[error("need at least 3 flights for automatic cutting, got {0}")]
    TooFewFlights(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
