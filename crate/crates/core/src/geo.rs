//! Spherical-earth geometry.
//!
//! Distances use the spherical law of cosines with the arccos argument
//! clamped to `[-1, 1]`. The longitude difference is taken as
//! `|lon_p - lon_q|` without wrapping: cosine is even and 2π-periodic, so a
//! difference of 350° gives the same result as 10°.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean earth radius in nautical miles.
pub const EARTH_RADIUS_NM: f64 = 3440.065;

/// Spherical earth used for every distance in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EarthModel {
    pub radius_nm: f64,
}

impl EarthModel {
    pub const MEAN: EarthModel = EarthModel {
        radius_nm: EARTH_RADIUS_NM,
    };
}

impl Default for EarthModel {
    fn default() -> Self {
        Self::MEAN
    }
}

/// A latitude/longitude pair in decimal degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    /// Validates latitude and wraps longitude into `[-180, 180]`.
    pub fn new(lat: f64, lon: f64) -> Result<Self> {
        if !lat.is_finite() || !lon.is_finite() {
            return Err(Error::Domain(format!(
                "non-finite coordinate ({lat}, {lon})"
            )));
        }
        if !(-90.0..=90.0).contains(&lat) {
            return Err(Error::Domain(format!("latitude {lat} outside [-90, 90]")));
        }
        Ok(GeoPoint {
            lat,
            lon: normalize_lon(lon),
        })
    }
}

fn normalize_lon(lon: f64) -> f64 {
    if (-180.0..=180.0).contains(&lon) {
        return lon;
    }
    let wrapped = (lon + 180.0).rem_euclid(360.0) - 180.0;
    // rem_euclid maps 180 to -180; keep the sign the caller meant
    if wrapped == -180.0 && lon > 0.0 {
        180.0
    } else {
        wrapped
    }
}

/// Great-circle distance in nautical miles.
pub fn great_circle_nm(p: GeoPoint, q: GeoPoint) -> f64 {
    central_angle(p, q) * EarthModel::MEAN.radius_nm
}

/// Central angle between two points in radians, in `[0, π]`.
pub fn central_angle(p: GeoPoint, q: GeoPoint) -> f64 {
    TrigPoint::new(p).central_angle(&TrigPoint::new(q))
}

/// A point with its latitude sine and cosine cached, for inner loops that
/// measure the same point many times. Results are bit-identical to
/// [`central_angle`].
#[derive(Debug, Clone, Copy)]
pub struct TrigPoint {
    point: GeoPoint,
    sin_lat: f64,
    cos_lat: f64,
}

impl TrigPoint {
    pub fn new(point: GeoPoint) -> Self {
        let lat = point.lat.to_radians();
        TrigPoint {
            point,
            sin_lat: lat.sin(),
            cos_lat: lat.cos(),
        }
    }

    pub fn point(&self) -> GeoPoint {
        self.point
    }

    pub fn central_angle(&self, other: &TrigPoint) -> f64 {
        // sin² + cos² can round to just below 1, which arccos turns into ~1e-8 rad
        if self.point == other.point {
            return 0.0;
        }
        let dlon = (self.point.lon - other.point.lon).abs().to_radians();
        let cos_angle = self.sin_lat * other.sin_lat + self.cos_lat * other.cos_lat * dlon.cos();
        cos_angle.clamp(-1.0, 1.0).acos()
    }

    pub fn distance_nm(&self, other: &TrigPoint) -> f64 {
        self.central_angle(other) * EarthModel::MEAN.radius_nm
    }
}

/// Flown length of a polyline: the sum of its leg distances.
pub fn path_length_nm(points: &[GeoPoint]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Domain("path length of an empty point list".into()));
    }
    Ok(points
        .windows(2)
        .map(|leg| great_circle_nm(leg[0], leg[1]))
        .sum())
}
