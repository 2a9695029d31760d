//! Command-line front end.
//!
//! ```text
//! flightclust cluster --data tracks.csv --airports airports.csv \
//!     --origin CMH --dest ATL --from 2014-06-01 --to 2014-06-22 \
//!     --metric geo --mode auto [--linkage average] [--extract-n 1] \
//!     [--threshold T | --k K] [--out report.json] [--geojson paths.geojson]
//! flightclust generate --scenario two-bundles --out tracks.csv --airports-out airports.csv
//! flightclust --serve --port 8080 --data-dir data/
//! ```

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use super::http::{serve, AppState};
use super::pipeline::run_cluster;
use super::report::geojson_collection;
use super::request::{build_query, parse_date, ClusterMode, ClusterRequest};
use super::ServiceError;
use crate::error::Error;
use crate::hcluster::{ClusterSource, Clustering, Linkage};
use crate::metrics::MetricKind;
use crate::sampling::ExtractionFactor;
use crate::synthgen::{self, ScenarioKind, ScenarioSpec};
use crate::track::{
    write_airports_csv, write_tracks_csv, write_tracks_jsonl, TrackFormat, TrackStore,
};

#[derive(Debug, Parser)]
#[command(
    name = "flightclust",
    version,
    about = "Cluster flight paths between an airport pair"
)]
#[command(args_conflicts_with_subcommands = true, arg_required_else_help = true)]
pub struct Cli {
    /// Run the HTTP API instead of a batch command.
    #[arg(long)]
    pub serve: bool,

    #[arg(long, default_value_t = 8080, requires = "serve")]
    pub port: u16,

    /// Directory holding airports.csv and track files (.csv/.jsonl).
    #[arg(long, requires = "serve")]
    pub data_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster the flights matching a query and write a JSON report.
    Cluster(ClusterArgs),
    /// Write a synthetic scenario as track and airport files.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MetricArg {
    Geo,
    Cosine,
}

impl From<MetricArg> for MetricKind {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Geo => MetricKind::Geographic,
            MetricArg::Cosine => MetricKind::Cosine,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Auto,
    Threshold,
    K,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LinkageArg {
    Average,
    Complete,
    Single,
}

impl From<LinkageArg> for Linkage {
    fn from(l: LinkageArg) -> Self {
        match l {
            LinkageArg::Average => Linkage::Average,
            LinkageArg::Complete => Linkage::Complete,
            LinkageArg::Single => Linkage::Single,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct ClusterArgs {
    /// Track file (.csv or .jsonl) or a directory of them.
    #[arg(long)]
    pub data: PathBuf,
    /// Airport table (code,lat,lon).
    #[arg(long)]
    pub airports: PathBuf,
    #[arg(long)]
    pub origin: String,
    #[arg(long)]
    pub dest: String,
    /// First departure date, YYYY-MM-DD (inclusive).
    #[arg(long)]
    pub from: String,
    /// Last departure date, YYYY-MM-DD (inclusive).
    #[arg(long)]
    pub to: String,
    #[arg(long, value_enum, default_value = "geo")]
    pub metric: MetricArg,
    #[arg(long, value_enum, default_value = "auto")]
    pub mode: ModeArg,
    /// Cut threshold (nm for geo, unitless for cosine); threshold mode only.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Cluster count; k mode only.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum, default_value = "average")]
    pub linkage: LinkageArg,
    #[arg(long = "extract-n", default_value_t = 1)]
    pub extract_n: usize,
    /// Largest cluster count tried in auto mode.
    #[arg(long)]
    pub max_k: Option<usize>,
    /// Report path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write clustered paths as a GeoJSON FeatureCollection.
    #[arg(long)]
    pub geojson: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub scenario: ScenarioKind,
    #[arg(long)]
    pub flights_per_group: Option<usize>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub jitter: Option<f64>,
    #[arg(long, default_value_t = 2014)]
    pub seed: u64,
    /// Track output (.csv or .jsonl).
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub airports_out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<(), ServiceError> {
    if cli.serve {
        let dir = cli
            .data_dir
            .ok_or_else(|| ServiceError::validation("data-dir", "--serve needs --data-dir"))?;
        let store = TrackStore::load_dir(&dir).map_err(|e| input_error(&dir, e))?;
        let runtime = tokio::runtime::Runtime::new().map_err(Error::Io)?;
        return runtime
            .block_on(serve(AppState::new(store), cli.port))
            .map_err(|e| Error::Io(e).into());
    }
    match cli.command {
        Some(Command::Cluster(args)) => cluster(&args),
        Some(Command::Generate(args)) => generate(&args),
        None => Err(ServiceError::validation(
            "command",
            "expected a subcommand or --serve",
        )),
    }
}

fn input_error(path: &Path, source: Error) -> ServiceError {
    ServiceError::Input {
        path: path.display().to_string(),
        source,
    }
}

pub fn cluster_request(args: &ClusterArgs) -> Result<ClusterRequest, ServiceError> {
    let from = parse_date("from", &args.from)?;
    let to = parse_date("to", &args.to)?;
    let query = build_query(&args.origin, &args.dest, from, to, "from,to")?;
    let mode = match args.mode {
        ModeArg::Auto => ClusterMode::Auto,
        ModeArg::Threshold => ClusterMode::Threshold {
            t: args.threshold.ok_or_else(|| {
                ServiceError::validation("threshold", "--mode threshold needs --threshold")
            })?,
        },
        ModeArg::K => ClusterMode::K {
            k: args
                .k
                .ok_or_else(|| ServiceError::validation("k", "--mode k needs --k"))?,
        },
    };
    let extraction_n = ExtractionFactor::new(args.extract_n)
        .map_err(|_| ServiceError::validation("extract-n", "must be >= 1"))?;
    let req = ClusterRequest {
        query,
        metric: args.metric.into(),
        extraction_n,
        linkage: args.linkage.into(),
        mode,
        max_k: args.max_k,
    };
    req.validate()?;
    Ok(req)
}

pub fn load_store(data: &Path, airports: &Path) -> Result<TrackStore, ServiceError> {
    let mut store = if data.is_dir() {
        TrackStore::load_dir(data).map_err(|e| input_error(data, e))?
    } else {
        let mut s = TrackStore::new();
        s.load_track_file(data).map_err(|e| input_error(data, e))?;
        s
    };
    store
        .load_airport_file(airports)
        .map_err(|e| input_error(airports, e))?;
    Ok(store)
}

fn cluster(args: &ClusterArgs) -> Result<(), ServiceError> {
    let req = cluster_request(args)?;
    let store = load_store(&args.data, &args.airports)?;
    let response = run_cluster(&store, &req, None)?;

    let mut out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(Error::Io)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    serde_json::to_writer_pretty(&mut out, &response).map_err(|e| Error::Io(e.into()))?;
    writeln!(out).map_err(Error::Io)?;
    out.flush().map_err(Error::Io)?;

    if let Some(path) = &args.geojson {
        let flights = store.query(&req.query);
        let raw: Vec<usize> = flights
            .iter()
            .map(|f| {
                response
                    .clusters
                    .iter()
                    .find(|c| c.flight_ids.iter().any(|id| id == f.flight_id()))
                    .map(|c| c.cluster)
                    .expect("every flight is clustered")
            })
            .collect();
        let clustering = Clustering::from_assignment(&raw, ClusterSource::Auto);
        let collection = geojson_collection(&flights, &clustering);
        let file = BufWriter::new(File::create(path).map_err(Error::Io)?);
        serde_json::to_writer(file, &collection).map_err(|e| Error::Io(e.into()))?;
    }
    Ok(())
}

fn generate(args: &GenerateArgs) -> Result<(), ServiceError> {
    let mut spec = ScenarioSpec::new(args.scenario);
    spec.seed = args.seed;
    if let Some(n) = args.flights_per_group {
        spec.flights_per_group = n;
    }
    if let Some(n) = args.points {
        spec.points_per_flight = n;
    }
    if let Some(j) = args.jitter {
        spec.jitter_deg = j;
    }
    let scenario = synthgen::generate(&spec)?;
    let file = BufWriter::new(File::create(&args.out).map_err(Error::Io)?);
    match TrackFormat::from_path(&args.out) {
        TrackFormat::Csv => write_tracks_csv(file, &scenario.flights)?,
        TrackFormat::Jsonl => write_tracks_jsonl(file, &scenario.flights)?,
    }
    if let Some(path) = &args.airports_out {
        let file = BufWriter::new(File::create(path).map_err(Error::Io)?);
        write_airports_csv(file, &synthgen::scenario_airports())?;
    }
    Ok(())
}
