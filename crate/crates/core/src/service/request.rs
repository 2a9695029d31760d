//! Cluster request parsing and validation.
//!
//! Wire format for `POST /api/cluster`:
//!
//! ```json
//! {
//!   "query": {"origin": "CMH", "destination": "ATL",
//!             "date_from": "2014-06-01", "date_to": "2014-06-22"},
//!   "metric": "geo",
//!   "extraction_n": 1,
//!   "linkage": "average",
//!   "mode": {"type": "threshold", "t": 50.0}
//! }
//! ```
//!
//! `extraction_n`, `linkage` and `mode` are optional (defaults 1, average,
//! auto). `mode` is one of `{"type": "auto"}`, `{"type": "threshold", "t": x}`
//! or `{"type": "k", "k": n}`.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::ServiceError;
use crate::hcluster::Linkage;
use crate::metrics::MetricKind;
use crate::sampling::ExtractionFactor;
use crate::track::TrackQuery;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ClusterMode {
    Auto,
    Threshold { t: f64 },
    K { k: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterRequest {
    pub query: TrackQuery,
    pub metric: MetricKind,
    pub extraction_n: ExtractionFactor,
    pub linkage: Linkage,
    pub mode: ClusterMode,
    /// Cap on the cluster counts tried in auto mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_k: Option<usize>,
}

impl ClusterRequest {
    pub fn new(
        query: TrackQuery,
        metric: MetricKind,
        mode: ClusterMode,
    ) -> Result<Self, ServiceError> {
        let req = ClusterRequest {
            query,
            metric,
            extraction_n: ExtractionFactor::NONE,
            linkage: Linkage::Average,
            mode,
            max_k: None,
        };
        req.validate()?;
        Ok(req)
    }

    /// Checks that mode parameters are in the metric's units.
    pub fn validate(&self) -> Result<(), ServiceError> {
        match self.mode {
            ClusterMode::Auto => {}
            ClusterMode::Threshold { t } => validate_threshold(self.metric, t)?,
            ClusterMode::K { k } => {
                if k == 0 {
                    return Err(ServiceError::validation("mode.k", "k must be >= 1"));
                }
            }
        }
        if self.max_k.is_some_and(|k| k < 2) {
            return Err(ServiceError::validation("max_k", "max_k must be >= 2"));
        }
        Ok(())
    }

    /// Parses and validates a JSON request body, naming the offending field
    /// on failure.
    pub fn from_json(body: &[u8]) -> Result<Self, ServiceError> {
        let value: Value = serde_json::from_slice(body)
            .map_err(|e| ServiceError::validation("body", format!("malformed JSON: {e}")))?;
        let obj = value
            .as_object()
            .ok_or_else(|| ServiceError::validation("body", "expected a JSON object"))?;

        let query = obj
            .get("query")
            .and_then(Value::as_object)
            .ok_or_else(|| ServiceError::validation("query", "missing query object"))?;
        let text = |field: &str| -> Result<&str, ServiceError> {
            query.get(field).and_then(Value::as_str).ok_or_else(|| {
                ServiceError::validation(&format!("query.{field}"), "missing or not a string")
            })
        };
        let origin = text("origin")?;
        let destination = text("destination")?;
        let date_from = parse_date("query.date_from", text("date_from")?)?;
        let date_to = parse_date("query.date_to", text("date_to")?)?;
        let query = build_query(
            origin,
            destination,
            date_from,
            date_to,
            "query.date_from,query.date_to",
        )?;

        let metric = match obj.get("metric") {
            Some(Value::String(s)) => s.parse::<MetricKind>().map_err(|_| {
                ServiceError::validation(
                    "metric",
                    format!("unknown metric {s:?}; use geo or cosine"),
                )
            })?,
            _ => {
                return Err(ServiceError::validation(
                    "metric",
                    "missing; use geo or cosine",
                ))
            }
        };
        let extraction_n = match obj.get("extraction_n") {
            None | Some(Value::Null) => ExtractionFactor::NONE,
            Some(v) => v
                .as_u64()
                .and_then(|n| ExtractionFactor::new(n as usize).ok())
                .ok_or_else(|| {
                    ServiceError::validation("extraction_n", "must be an integer >= 1")
                })?,
        };
        let linkage = match obj.get("linkage") {
            None | Some(Value::Null) => Linkage::Average,
            Some(Value::String(s)) => s.parse().map_err(|_| {
                ServiceError::validation("linkage", format!("unknown linkage {s:?}"))
            })?,
            Some(_) => return Err(ServiceError::validation("linkage", "must be a string")),
        };
        let mode = match obj.get("mode") {
            None | Some(Value::Null) => ClusterMode::Auto,
            Some(v) => parse_mode(v)?,
        };
        let max_k = match obj.get("max_k") {
            None | Some(Value::Null) => None,
            Some(v) => Some(
                v.as_u64()
                    .ok_or_else(|| ServiceError::validation("max_k", "must be an integer"))?
                    as usize,
            ),
        };
        let req = ClusterRequest {
            query,
            metric,
            extraction_n,
            linkage,
            mode,
            max_k,
        };
        req.validate()?;
        Ok(req)
    }
}

fn parse_mode(v: &Value) -> Result<ClusterMode, ServiceError> {
    let kind = v.get("type").and_then(Value::as_str).ok_or_else(|| {
        ServiceError::validation("mode.type", "missing; use auto, threshold or k")
    })?;
    match kind {
        "auto" => Ok(ClusterMode::Auto),
        "threshold" => v
            .get("t")
            .and_then(Value::as_f64)
            .map(|t| ClusterMode::Threshold { t })
            .ok_or_else(|| ServiceError::validation("mode.t", "threshold mode needs a numeric t")),
        "k" => v
            .get("k")
            .and_then(Value::as_u64)
            .map(|k| ClusterMode::K { k: k as usize })
            .ok_or_else(|| ServiceError::validation("mode.k", "k mode needs an integer k")),
        other => Err(ServiceError::validation(
            "mode.type",
            format!("unknown mode {other:?}; use auto, threshold or k"),
        )),
    }
}

pub fn validate_threshold(metric: MetricKind, t: f64) -> Result<(), ServiceError> {
    if !t.is_finite() || t < 0.0 {
        return Err(ServiceError::validation(
            "mode.t",
            "threshold must be finite and >= 0",
        ));
    }
    if t > metric.max_distance() {
        return Err(ServiceError::validation(
            "mode.t",
            format!(
                "threshold {t} does not match the {metric} metric's units ({}, at most {})",
                metric.unit(),
                metric.max_distance()
            ),
        ));
    }
    Ok(())
}

pub fn parse_date(field: &str, raw: &str) -> Result<NaiveDate, ServiceError> {
    raw.trim()
        .parse()
        .map_err(|_| ServiceError::validation(field, format!("{raw:?} is not a YYYY-MM-DD date")))
}

pub fn build_query(
    origin: &str,
    destination: &str,
    from: NaiveDate,
    to: NaiveDate,
    range_fields: &str,
) -> Result<TrackQuery, ServiceError> {
    if origin.trim().is_empty() {
        return Err(ServiceError::validation("origin", "empty airport code"));
    }
    if destination.trim().is_empty() {
        return Err(ServiceError::validation(
            "destination",
            "empty airport code",
        ));
    }
    TrackQuery::new(origin, destination, from, to)
        .map_err(|_| ServiceError::validation(range_fields, format!("{from} is after {to}")))
}

#[derive(Debug, Deserialize)]
pub struct FlightsParams {
    pub origin: Option<String>,
    pub dest: Option<String>,
    pub from: Option<String>,
    pub to: Option<String>,
}

impl FlightsParams {
    pub fn to_query(&self) -> Result<TrackQuery, ServiceError> {
        fn need<'a>(v: &'a Option<String>, field: &str) -> Result<&'a str, ServiceError> {
            v.as_deref()
                .ok_or_else(|| ServiceError::validation(field, "missing parameter"))
        }
        let from = parse_date("from", need(&self.from, "from")?)?;
        let to = parse_date("to", need(&self.to, "to")?)?;
        build_query(
            need(&self.origin, "origin")?,
            need(&self.dest, "dest")?,
            from,
            to,
            "from,to",
        )
    }
}
