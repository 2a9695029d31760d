//! Deterministic synthetic flight scenarios.
//!
//! Three route archetypes are available:
//!
//! * `two-bundles`: CMH to ATL, two path families bowing east and west of
//!   the direct route. The west family is wider.
//! * `parallel-corridors`: SFO to PIT, three laterally offset corridors in
//!   the same direction. Two of them lie closer to each other than to the
//!   third.
//! * `shared-corridor-divergent-arrivals`: CMH to PHL, one shared enroute
//!   corridor for the first 80% of fixes, then two mirror-image arrival
//!   hooks, one swinging north and one south, in the final 20%.
//!
//! Each flight carries a smooth low-frequency lateral perturbation
//! `c1·sin(πs) + c2·sin(2πs)` with `c1, c2` uniform in `±jitter_deg`. The
//! perturbation is zero at both airports. Randomness comes from ChaCha8
//! (`rand_chacha::ChaCha8Rng`) seeded with `seed`, so a spec always
//! produces the same tracks.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use chrono::{Duration, NaiveDate, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::GeoPoint;
use crate::track::{AirportLocation, FlightTrack, TrackPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    TwoBundles,
    ParallelCorridors,
    SharedCorridorDivergentArrivals,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 3] = [
        ScenarioKind::TwoBundles,
        ScenarioKind::ParallelCorridors,
        ScenarioKind::SharedCorridorDivergentArrivals,
    ];

    fn name(self) -> &'static str {
        match self {
            ScenarioKind::TwoBundles => "two-bundles",
            ScenarioKind::ParallelCorridors => "parallel-corridors",
            ScenarioKind::SharedCorridorDivergentArrivals => "shared-corridor-divergent-arrivals",
        }
    }

    fn id_prefix(self) -> &'static str {
        match self {
            ScenarioKind::TwoBundles => "TB",
            ScenarioKind::ParallelCorridors => "PC",
            ScenarioKind::SharedCorridorDivergentArrivals => "SC",
        }
    }

    pub fn airports(self) -> (&'static str, &'static str) {
        match self {
            ScenarioKind::TwoBundles => ("CMH", "ATL"),
            ScenarioKind::ParallelCorridors => ("SFO", "PIT"),
            ScenarioKind::SharedCorridorDivergentArrivals => ("CMH", "PHL"),
        }
    }

    /// First and last departure dates used for the generated flights.
    pub fn date_range(self) -> (NaiveDate, NaiveDate) {
        let d = |y, m, day| NaiveDate::from_ymd_opt(y, m, day).expect("valid date");
        match self {
            ScenarioKind::TwoBundles => (d(2014, 6, 1), d(2014, 6, 22)),
            ScenarioKind::ParallelCorridors => (d(2014, 7, 19), d(2014, 8, 12)),
            ScenarioKind::SharedCorridorDivergentArrivals => (d(2014, 10, 1), d(2014, 10, 8)),
        }
    }

    fn groups(self) -> usize {
        match self {
            ScenarioKind::ParallelCorridors => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown scenario {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub flights_per_group: usize,
    pub points_per_flight: usize,
    pub jitter_deg: f64,
    pub seed: u64,
}

impl ScenarioSpec {
    /// Default sizes: 20 flights per group for two-bundles, 12 for
    /// parallel-corridors, 15 for shared-corridor; 120 fixes per flight.
    pub fn new(kind: ScenarioKind) -> Self {
        let (flights_per_group, jitter_deg) = match kind {
            ScenarioKind::TwoBundles => (20, 0.05),
            ScenarioKind::ParallelCorridors => (12, 0.08),
            ScenarioKind::SharedCorridorDivergentArrivals => (15, 0.05),
        };
        ScenarioSpec {
            kind,
            flights_per_group,
            points_per_flight: 120,
            jitter_deg,
            seed: 2014,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.flights_per_group < 2 {
            return Err(Error::Domain("flights_per_group must be >= 2".into()));
        }
        if self.points_per_flight < 2 {
            return Err(Error::Domain("points_per_flight must be >= 2".into()));
        }
        if !self.jitter_deg.is_finite() || self.jitter_deg < 0.0 {
            return Err(Error::Domain("jitter_deg must be finite and >= 0".into()));
        }
        Ok(())
    }
}

/// Generated flights with their ground-truth group labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub flights: Vec<FlightTrack>,
    pub truth: Vec<usize>,
    pub origin: String,
    pub destination: String,
}

/// Airports referenced by the scenarios.
pub fn scenario_airports() -> Vec<AirportLocation> {
    [
        ("ATL", 33.6367, -84.4281),
        ("CMH", 39.9980, -82.8919),
        ("PHL", 39.8719, -75.2411),
        ("PIT", 40.4915, -80.2329),
        ("SFO", 37.6190, -122.3750),
    ]
    .into_iter()
    .map(|(code, lat, lon)| AirportLocation {
        code: code.to_string(),
        position: GeoPoint { lat, lon },
    })
    .collect()
}

fn airport(code: &str) -> (f64, f64) {
    let a = scenario_airports()
        .into_iter()
        .find(|a| a.code == code)
        .expect("scenario airport");
    (a.position.lat, a.position.lon)
}

/// 0 at the ends, 1 on the cruise plateau, smoothstep ramps of width `ramp`.
fn plateau(s: f64, ramp: f64) -> f64 {
    let x = (s / ramp).min((1.0 - s) / ramp).clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}

struct Route {
    origin: (f64, f64),
    dest: (f64, f64),
}

impl Route {
    fn along(&self) -> (f64, f64) {
        (self.dest.0 - self.origin.0, self.dest.1 - self.origin.1)
    }

    /// Unit vector to the left of the direction of travel, in degree space.
    fn left(&self) -> (f64, f64) {
        let (dlat, dlon) = self.along();
        let len = dlat.hypot(dlon);
        (dlon / len, -dlat / len)
    }
}

struct Profile {
    cruise_ff: f64,
    cruise_kt: f64,
}

pub fn generate(spec: &ScenarioSpec) -> Result<Scenario> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (origin, destination) = spec.kind.airports();
    let route = Route {
        origin: airport(origin),
        dest: airport(destination),
    };
    let (first_day, last_day) = spec.kind.date_range();
    let days = (last_day - first_day).num_days() + 1;
    let m = spec.points_per_flight;

    let mut flights = Vec::new();
    let mut truth = Vec::new();
    for group in 0..spec.kind.groups() {
        for idx in 0..spec.flights_per_group {
            let jitter = spec.jitter_deg * group_jitter_scale(spec.kind, group);
            let c1 = rng.random_range(-1.0..=1.0) * jitter;
            let c2 = rng.random_range(-1.0..=1.0) * jitter;
            let profile = Profile {
                cruise_ff: group_cruise_ff(spec.kind, group) + rng.random_range(-10.0..=10.0),
                cruise_kt: group_cruise_kt(spec.kind, group) + rng.random_range(-12.0..=12.0),
            };
            let serial = (group * spec.flights_per_group + idx) as i64;
            let day = first_day + Duration::days(serial % days);
            let departure = Utc.from_utc_datetime(&day.and_hms_opt(6, 0, 0).expect("valid time"))
                + Duration::minutes(37 * (serial % 20));

            let mut points = Vec::with_capacity(m);
            for j in 0..m {
                let s = j as f64 / (m - 1) as f64;
                let (lat, lon) = position(spec.kind, &route, group, s, c1, c2);
                let shape = plateau(s, 0.15);
                let altitude_ff =
                    (20.0 + (profile.cruise_ff - 20.0) * shape + rng.random_range(-2.0..=2.0))
                        .max(0.0);
                let speed_kt =
                    (180.0 + (profile.cruise_kt - 180.0) * shape + rng.random_range(-4.0..=4.0))
                        .max(0.0);
                points.push(TrackPoint::new(
                    GeoPoint::new(lat, lon)?,
                    altitude_ff,
                    speed_kt,
                    departure + Duration::seconds(60 * j as i64),
                )?);
            }
            let id = format!("{}{}-{:03}", spec.kind.id_prefix(), group, idx);
            flights.push(FlightTrack::new(id, origin, destination, points)?);
            truth.push(group);
        }
    }
    Ok(Scenario {
        flights,
        truth,
        origin: origin.to_string(),
        destination: destination.to_string(),
    })
}

fn group_jitter_scale(kind: ScenarioKind, group: usize) -> f64 {
    match (kind, group) {
        (ScenarioKind::TwoBundles, 1) => 2.0,
        _ => 1.0,
    }
}

fn group_cruise_ff(kind: ScenarioKind, group: usize) -> f64 {
    match kind {
        ScenarioKind::TwoBundles => [225.0, 232.0][group],
        ScenarioKind::ParallelCorridors => [338.0, 322.0, 332.0][group],
        ScenarioKind::SharedCorridorDivergentArrivals => [280.0, 290.0][group],
    }
}

fn group_cruise_kt(kind: ScenarioKind, group: usize) -> f64 {
    match kind {
        ScenarioKind::TwoBundles => [382.0, 370.0][group],
        ScenarioKind::ParallelCorridors => [465.0, 478.0, 463.0][group],
        ScenarioKind::SharedCorridorDivergentArrivals => [400.0, 395.0][group],
    }
}

/// Fraction of fixes flown on the shared corridor before the arrival hook.
const CORRIDOR_SHARE: f64 = 0.8;
/// Fraction of the origin-destination distance covered by the corridor.
const CORRIDOR_REACH: f64 = 0.95;
/// Lateral offset of the hook control point, in degrees.
const HOOK_OFFSET_DEG: f64 = 0.5;

fn position(
    kind: ScenarioKind,
    route: &Route,
    group: usize,
    s: f64,
    c1: f64,
    c2: f64,
) -> (f64, f64) {
    let (along_lat, along_lon) = route.along();
    let (left_lat, left_lon) = route.left();
    let jitter = |u: f64| c1 * (PI * u).sin() + c2 * (2.0 * PI * u).sin();
    let at = |u: f64, lateral: f64| {
        (
            route.origin.0 + u * along_lat + lateral * left_lat,
            route.origin.1 + u * along_lon + lateral * left_lon,
        )
    };
    match kind {
        ScenarioKind::TwoBundles => {
            // left of a southbound route is east
            let bow = [0.35, -0.9][group];
            at(s, bow * (PI * s).sin() + jitter(s))
        }
        ScenarioKind::ParallelCorridors => {
            let offset = [1.25, 0.0, -2.5][group];
            at(s, offset * plateau(s, 0.15) + jitter(s))
        }
        ScenarioKind::SharedCorridorDivergentArrivals => {
            if s <= CORRIDOR_SHARE {
                let u = s / CORRIDOR_SHARE;
                at(u * CORRIDOR_REACH, jitter(u))
            } else {
                // quadratic Bézier from the corridor end to the runway with
                // the control point pushed left (group 0) or right (group 1)
                let u = (s - CORRIDOR_SHARE) / (1.0 - CORRIDOR_SHARE);
                let start = at(CORRIDOR_REACH, 0.0);
                let side = [1.0, -1.0][group];
                let control = at((1.0 + CORRIDOR_REACH) / 2.0, side * HOOK_OFFSET_DEG);
                let end = route.dest;
                let w = [(1.0 - u).powi(2), 2.0 * u * (1.0 - u), u * u];
                (
                    w[0] * start.0 + w[1] * control.0 + w[2] * end.0,
                    w[0] * start.1 + w[1] * control.1 + w[2] * end.1,
                )
            }
        }
    }
}
