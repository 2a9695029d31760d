//! Flight tracks, flat-file ingestion and the in-memory query store.
//!
//! Track files carry one row per surveillance fix:
//!
//! ```text
//! flight_id,timestamp,lat,lon,altitude_ff,speed_kt,origin,destination
//! AAL123,2014-06-01T14:03:00Z,39.99,-82.89,35,210,CMH,ATL
//! ```
//!
//! JSONL files use one object per line with the same field names. Airport
//! tables are `code,lat,lon`.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDate, SecondsFormat, Utc};
use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::{great_circle_nm, GeoPoint};

pub const TRACK_COLUMNS: [&str; 8] = [
    "flight_id",
    "timestamp",
    "lat",
    "lon",
    "altitude_ff",
    "speed_kt",
    "origin",
    "destination",
];

/// One surveillance fix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackPoint {
    pub position: GeoPoint,
    /// Hundreds of feet.
    pub altitude_ff: f64,
    pub speed_kt: f64,
    pub timestamp: DateTime<Utc>,
}

impl TrackPoint {
    pub fn new(
        position: GeoPoint,
        altitude_ff: f64,
        speed_kt: f64,
        timestamp: DateTime<Utc>,
    ) -> Result<Self> {
        if !altitude_ff.is_finite() || altitude_ff < 0.0 {
            return Err(Error::Domain(format!(
                "altitude {altitude_ff} must be >= 0"
            )));
        }
        if !speed_kt.is_finite() || speed_kt < 0.0 {
            return Err(Error::Domain(format!("speed {speed_kt} must be >= 0")));
        }
        Ok(TrackPoint {
            position,
            altitude_ff,
            speed_kt,
            timestamp,
        })
    }
}

/// A flight's time-ordered fixes plus its identity and airport pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlightTrack {
    flight_id: String,
    origin: String,
    destination: String,
    points: Vec<TrackPoint>,
}

impl FlightTrack {
    /// Fails unless `points` is non-empty and strictly time-ascending.
    pub fn new(
        flight_id: impl Into<String>,
        origin: impl Into<String>,
        destination: impl Into<String>,
        points: Vec<TrackPoint>,
    ) -> Result<Self> {
        let flight_id = flight_id.into();
        if flight_id.is_empty() {
            return Err(Error::Domain("empty flight id".into()));
        }
        if points.is_empty() {
            return Err(Error::Domain(format!("flight {flight_id:?} has no points")));
        }
        if points.windows(2).any(|w| w[0].timestamp >= w[1].timestamp) {
            return Err(Error::Domain(format!(
                "flight {flight_id:?} points are not strictly time-ascending"
            )));
        }
        Ok(FlightTrack {
            flight_id,
            origin: normalize_code(&origin.into()),
            destination: normalize_code(&destination.into()),
            points,
        })
    }

    pub fn flight_id(&self) -> &str {
        &self.flight_id
    }

    pub fn origin(&self) -> &str {
        &self.origin
    }

    pub fn destination(&self) -> &str {
        &self.destination
    }

    pub fn points(&self) -> &[TrackPoint] {
        &self.points
    }

    pub fn positions(&self) -> Vec<GeoPoint> {
        self.points.iter().map(|p| p.position).collect()
    }

    pub fn departure(&self) -> DateTime<Utc> {
        self.points[0].timestamp
    }
}

fn normalize_code(code: &str) -> String {
    code.trim().to_ascii_uppercase()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AirportLocation {
    pub code: String,
    pub position: GeoPoint,
}

/// Origin/destination pair plus an inclusive UTC date range.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TrackQuery {
    pub origin: String,
    pub destination: String,
    pub date_from: NaiveDate,
    pub date_to: NaiveDate,
}

impl TrackQuery {
    pub fn new(
        origin: &str,
        destination: &str,
        date_from: NaiveDate,
        date_to: NaiveDate,
    ) -> Result<Self> {
        if date_from > date_to {
            return Err(Error::Domain(format!(
                "date_from {date_from} is after date_to {date_to}"
            )));
        }
        Ok(TrackQuery {
            origin: normalize_code(origin),
            destination: normalize_code(destination),
            date_from,
            date_to,
        })
    }

    /// A flight matches on its airports and the UTC date of its first fix.
    pub fn matches(&self, track: &FlightTrack) -> bool {
        let day = track.departure().date_naive();
        track.origin == self.origin
            && track.destination == self.destination
            && self.date_from <= day
            && day <= self.date_to
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackFormat {
    Csv,
    Jsonl,
}

impl TrackFormat {
    /// `.jsonl` / `.ndjson` are JSON lines, everything else is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("ndjson") => TrackFormat::Jsonl,
            _ => TrackFormat::Csv,
        }
    }
}

/// Parsed tracks plus the number of rows that were dropped.
#[derive(Debug, Clone)]
pub struct ParseReport {
    pub tracks: Vec<FlightTrack>,
    pub skipped: usize,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Field {
    Num(f64),
    Text(String),
}

impl Field {
    fn as_f64(&self) -> Option<f64> {
        match self {
            Field::Num(v) => Some(*v),
            Field::Text(s) => s.trim().parse().ok(),
        }
    }
}

#[derive(Debug, Deserialize)]
struct JsonRow {
    flight_id: String,
    timestamp: String,
    lat: Field,
    lon: Field,
    altitude_ff: Field,
    speed_kt: Field,
    origin: String,
    destination: String,
}

struct Row {
    flight_id: String,
    origin: String,
    destination: String,
    point: TrackPoint,
}

fn parse_number(raw: &str) -> Option<f64> {
    raw.trim().parse().ok()
}

#[allow(clippy::too_many_arguments)]
fn build_row(
    flight_id: &str,
    timestamp: &str,
    lat: Option<f64>,
    lon: Option<f64>,
    altitude_ff: Option<f64>,
    speed_kt: Option<f64>,
    origin: &str,
    destination: &str,
) -> Option<Row> {
    let flight_id = flight_id.trim();
    let (origin, destination) = (normalize_code(origin), normalize_code(destination));
    if flight_id.is_empty() || origin.is_empty() || destination.is_empty() {
        return None;
    }
    let timestamp = DateTime::parse_from_rfc3339(timestamp.trim())
        .ok()?
        .with_timezone(&Utc);
    let position = GeoPoint::new(lat?, lon?).ok()?;
    let point = TrackPoint::new(position, altitude_ff?, speed_kt?, timestamp).ok()?;
    Some(Row {
        flight_id: flight_id.to_string(),
        origin,
        destination,
        point,
    })
}

/// Reads tracks from a CSV or JSONL stream.
///
/// Unparseable rows, rows whose airports disagree with the flight's first
/// row, and repeated timestamps within a flight are skipped and counted.
pub fn parse_tracks<R: Read>(input: R, format: TrackFormat) -> Result<ParseReport> {
    let mut skipped = 0;
    let rows = match format {
        TrackFormat::Csv => read_csv_rows(input, &mut skipped)?,
        TrackFormat::Jsonl => read_jsonl_rows(input, &mut skipped)?,
    };
    assemble(rows, skipped)
}

fn read_csv_rows<R: Read>(input: R, skipped: &mut usize) -> Result<Vec<Row>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| Error::Format(format!("unreadable header: {e}")))?
        .clone();
    let mut columns = [0usize; 8];
    for (slot, name) in columns.iter_mut().zip(TRACK_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Format(format!("header is missing column {name:?}")))?;
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let Ok(record) = record else {
            *skipped += 1;
            continue;
        };
        let field = |i: usize| record.get(columns[i]).unwrap_or("");
        let num = |i: usize| parse_number(field(i));
        match build_row(
            field(0),
            field(1),
            num(2),
            num(3),
            num(4),
            num(5),
            field(6),
            field(7),
        ) {
            Some(row) => rows.push(row),
            None => *skipped += 1,
        }
    }
    Ok(rows)
}

fn read_jsonl_rows<R: Read>(input: R, skipped: &mut usize) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for line in BufReader::new(input).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<JsonRow>(&line).ok().and_then(|r| {
            build_row(
                &r.flight_id,
                &r.timestamp,
                r.lat.as_f64(),
                r.lon.as_f64(),
                r.altitude_ff.as_f64(),
                r.speed_kt.as_f64(),
                &r.origin,
                &r.destination,
            )
        });
        match parsed {
            Some(row) => rows.push(row),
            None => *skipped += 1,
        }
    }
    Ok(rows)
}

fn assemble(rows: Vec<Row>, mut skipped: usize) -> Result<ParseReport> {
    let mut by_flight: BTreeMap<String, (String, String, Vec<TrackPoint>)> = BTreeMap::new();
    for row in rows {
        let entry = by_flight
            .entry(row.flight_id)
            .or_insert_with(|| (row.origin.clone(), row.destination.clone(), Vec::new()));
        if entry.0 != row.origin || entry.1 != row.destination {
            skipped += 1;
            continue;
        }
        entry.2.push(row.point);
    }
    let mut tracks = Vec::with_capacity(by_flight.len());
    for (flight_id, (origin, destination, mut points)) in by_flight {
        // stable: among equal timestamps the first row in file order survives
        points.sort_by_key(|p| p.timestamp);
        let before = points.len();
        points.dedup_by_key(|p| p.timestamp);
        skipped += before - points.len();
        tracks.push(FlightTrack::new(flight_id, origin, destination, points)?);
    }
    if tracks.is_empty() {
        return Err(Error::EmptyResult { skipped });
    }
    if skipped > 0 {
        debug!("skipped {skipped} track rows");
    }
    Ok(ParseReport { tracks, skipped })
}

fn format_timestamp(ts: &DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

/// Writes tracks in the CSV layout `parse_tracks` reads.
pub fn write_tracks_csv<W: Write>(out: W, tracks: &[FlightTrack]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(TRACK_COLUMNS).map_err(csv_err)?;
    for track in tracks {
        for p in &track.points {
            writer
                .write_record([
                    track.flight_id.clone(),
                    format_timestamp(&p.timestamp),
                    p.position.lat.to_string(),
                    p.position.lon.to_string(),
                    p.altitude_ff.to_string(),
                    p.speed_kt.to_string(),
                    track.origin.clone(),
                    track.destination.clone(),
                ])
                .map_err(csv_err)?;
        }
    }
    writer.flush()?;
    Ok(())
}

pub fn write_tracks_jsonl<W: Write>(mut out: W, tracks: &[FlightTrack]) -> Result<()> {
    for track in tracks {
        for p in &track.points {
            let row = serde_json::json!({
                "flight_id": track.flight_id,
                "timestamp": format_timestamp(&p.timestamp),
                "lat": p.position.lat,
                "lon": p.position.lon,
                "altitude_ff": p.altitude_ff,
                "speed_kt": p.speed_kt,
                "origin": track.origin,
                "destination": track.destination,
            });
            writeln!(out, "{row}")?;
        }
    }
    Ok(())
}

pub fn write_airports_csv<W: Write>(out: W, airports: &[AirportLocation]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer
        .write_record(["code", "lat", "lon"])
        .map_err(csv_err)?;
    for a in airports {
        writer
            .write_record([
                a.code.clone(),
                a.position.lat.to_string(),
                a.position.lon.to_string(),
            ])
            .map_err(csv_err)?;
    }
    writer.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Format(format!("{other:?}")),
    }
}

/// Reads a `code,lat,lon` airport table. Duplicate codes are rejected.
pub fn parse_airports<R: Read>(input: R) -> Result<Vec<AirportLocation>> {
    #[derive(Deserialize)]
    struct AirportRow {
        code: String,
        lat: f64,
        lon: f64,
    }
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| Error::Format(format!("unreadable airport header: {e}")))?;
    for name in ["code", "lat", "lon"] {
        if !headers.iter().any(|h| h == name) {
            return Err(Error::Format(format!(
                "airport header is missing column {name:?}"
            )));
        }
    }
    let mut seen = HashMap::new();
    let mut airports = Vec::new();
    for (line, row) in reader.deserialize::<AirportRow>().enumerate() {
        let row = row.map_err(|e| Error::Format(format!("airport row {}: {e}", line + 1)))?;
        let code = normalize_code(&row.code);
        if seen.insert(code.clone(), ()).is_some() {
            return Err(Error::Format(format!("duplicate airport code {code:?}")));
        }
        airports.push(AirportLocation {
            code,
            position: GeoPoint::new(row.lat, row.lon)?,
        });
    }
    Ok(airports)
}

/// Read-only after loading. Flights are kept ordered by id.
#[derive(Debug, Clone, Default)]
pub struct TrackStore {
    flights: BTreeMap<String, FlightTrack>,
    airports: HashMap<String, GeoPoint>,
}

impl TrackStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, track: FlightTrack) -> Result<()> {
        if self.flights.contains_key(&track.flight_id) {
            return Err(Error::DuplicateFlight(track.flight_id));
        }
        self.flights.insert(track.flight_id.clone(), track);
        Ok(())
    }

    pub fn extend(&mut self, tracks: impl IntoIterator<Item = FlightTrack>) -> Result<()> {
        tracks.into_iter().try_for_each(|t| self.insert(t))
    }

    pub fn add_airport(&mut self, airport: AirportLocation) {
        self.airports
            .insert(normalize_code(&airport.code), airport.position);
    }

    pub fn len(&self) -> usize {
        self.flights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flights.is_empty()
    }

    pub fn flights(&self) -> impl Iterator<Item = &FlightTrack> {
        self.flights.values()
    }

    pub fn airport(&self, code: &str) -> Option<GeoPoint> {
        self.airports.get(&normalize_code(code)).copied()
    }

    /// Matching flights in flight-id order.
    pub fn query(&self, q: &TrackQuery) -> Vec<&FlightTrack> {
        self.flights.values().filter(|t| q.matches(t)).collect()
    }

    pub fn airport_gcd_nm(&self, origin: &str, destination: &str) -> Result<f64> {
        let lookup = |code: &str| {
            self.airport(code)
                .ok_or_else(|| Error::MissingAirport(code.to_string()))
        };
        Ok(great_circle_nm(lookup(origin)?, lookup(destination)?))
    }

    /// Loads one track file (format from its extension). Returns the skipped-row count.
    pub fn load_track_file(&mut self, path: &Path) -> Result<usize> {
        let report = parse_tracks(File::open(path)?, TrackFormat::from_path(path))?;
        self.extend(report.tracks)?;
        if report.skipped > 0 {
            warn!("{}: skipped {} rows", path.display(), report.skipped);
        }
        Ok(report.skipped)
    }

    pub fn load_airport_file(&mut self, path: &Path) -> Result<()> {
        for airport in parse_airports(File::open(path)?)? {
            self.add_airport(airport);
        }
        Ok(())
    }

    /// Loads a data directory: `airports.csv` is the airport table, every
    /// other `*.csv`, `*.jsonl` or `*.ndjson` file holds tracks.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let mut store = TrackStore::new();
        let mut files: Vec<_> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        files.sort();
        for path in files {
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
            let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
            if name == "airports.csv" {
                store.load_airport_file(&path)?;
            } else if matches!(ext, "csv" | "jsonl" | "ndjson") {
                store.load_track_file(&path)?;
            }
        }
        Ok(store)
    }
}
