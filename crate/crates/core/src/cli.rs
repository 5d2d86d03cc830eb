//! The `ocelf` command line.
//!
//! Exit codes: 0 success, 1 domain error (validation failure, unknown type or
//! execution, bad feature spec), 2 input, parse or I/O error.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::encoders::{encode_graph, encode_sequential, encode_tabular, execution_dot};
use crate::error::{EncodeError, FeatureError, ModelError, OcelError};
use crate::executions::{extract, Extraction, ExtractionReport, Strategy};
use crate::features::{build_graphs, compute_matrix_with_graphs, FeatureSpec};
use crate::graph::ObjectGraph;
use crate::model::{validate, EventLog};
use crate::ocel::parse_ocel;
use crate::timeseries::{sublog_timeseries, write_timeseries_csv, SeriesAggregation};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "ocelf",
    version,
    about = "Extract and encode features from object-centric event logs"
)]
pub struct Cli {
    /// Worker threads (default: number of cores).
    #[arg(long, global = true, env = "OCELF_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the structural invariants of a log.
    Validate(ValidateArgs),
    /// Extract process executions and report on them.
    Extract(ExtractArgs),
    /// Compute features and write an encoding.
    Featurize(FeaturizeArgs),
    /// Aggregate an event-local feature over fixed time windows.
    Timeseries(TimeseriesArgs),
    /// Render one execution as a variant.
    Variant(VariantArgs),
    /// Summary statistics; optionally export the object graph.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub path: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyName {
    Components,
    Leading,
}

#[derive(Debug, Clone, Args)]
pub struct StrategyArgs {
    #[arg(long, value_enum, default_value = "components")]
    pub strategy: StrategyName,
    /// Leading object type (required with `--strategy leading`).
    #[arg(long)]
    pub lead_type: Option<String>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    pub path: PathBuf,
    #[command(flatten)]
    pub strategy: StrategyArgs,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EncodingName {
    Tabular,
    Sequential,
    Graph,
}

#[derive(Debug, Args)]
pub struct FeaturizeArgs {
    pub path: PathBuf,
    #[command(flatten)]
    pub strategy: StrategyArgs,
    /// Feature spec such as `C3[place order]` or `D1[amount,avg]`; repeatable.
    #[arg(long = "feature")]
    pub features: Vec<String>,
    #[arg(long, value_enum, default_value = "tabular")]
    pub encoding: EncodingName,
    #[arg(long)]
    pub out: PathBuf,
    /// Graph encoding only: also write one DOT digraph per execution here.
    #[arg(long)]
    pub dot: Option<PathBuf>,
    /// Replace missing feature values with 0.
    #[arg(long)]
    pub impute_zero: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct TimeseriesArgs {
    pub path: PathBuf,
    /// Window length in seconds.
    #[arg(long)]
    pub window: f64,
    #[arg(long)]
    pub feature: String,
    #[arg(long, default_value = "avg")]
    pub agg: String,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantFormat {
    Dot,
    Json,
    Seq,
}

#[derive(Debug, Args)]
pub struct VariantArgs {
    pub path: PathBuf,
    #[arg(long)]
    pub exec_id: usize,
    #[command(flatten)]
    pub strategy: StrategyArgs,
    #[arg(long, value_enum, default_value = "dot")]
    pub format: VariantFormat,
    /// Features to attach to nodes or steps (json and seq formats).
    #[arg(long = "feature")]
    pub features: Vec<String>,
    /// Write here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub path: PathBuf,
    #[arg(long)]
    pub object_graph_dot: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

/// A failed command: message plus exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl CliError {
    fn domain(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }

    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<OcelError> for CliError {
    fn from(err: OcelError) -> Self {
        CliError::input(err.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(err: ModelError) -> Self {
        CliError::domain(err.to_string())
    }
}

impl From<FeatureError> for CliError {
    fn from(err: FeatureError) -> Self {
        CliError::domain(err.to_string())
    }
}

impl From<EncodeError> for CliError {
    fn from(err: EncodeError) -> Self {
        match err {
            EncodeError::Feature(f) => f.into(),
            EncodeError::UnknownExecution(_) => CliError::domain(err.to_string()),
            other => CliError::input(other.to_string()),
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes)
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, text.as_bytes()),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::input(format!("cannot write to stdout: {e}"))),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

fn parse_specs(specs: &[String]) -> Result<Vec<FeatureSpec>, CliError> {
    specs
        .iter()
        .map(|s| s.parse::<FeatureSpec>().map_err(CliError::from))
        .collect()
}

impl StrategyArgs {
    fn resolve(&self) -> Result<Strategy, CliError> {
        match (self.strategy, &self.lead_type) {
            (StrategyName::Components, _) => Ok(Strategy::Components),
            (StrategyName::Leading, Some(t)) => Ok(Strategy::LeadingType(t.clone())),
            (StrategyName::Leading, None) => {
                Err(CliError::domain("--strategy leading requires --lead-type"))
            }
        }
    }
}

fn load_and_extract(
    path: &Path,
    strategy: &StrategyArgs,
) -> Result<(EventLog, Strategy, Extraction), CliError> {
    let strategy = strategy.resolve()?;
    let log = parse_ocel(path)?;
    let graph = ObjectGraph::build(&log);
    let extraction = extract(&log, &graph, &strategy)?;
    Ok((log, strategy, extraction))
}

#[derive(Serialize)]
struct ValidateSummary<'a> {
    schema_version: u32,
    clean: bool,
    violations: &'a [crate::model::Violation],
}

fn cmd_validate(args: &ValidateArgs) -> Result<i32, CliError> {
    let log = parse_ocel(&args.path)?;
    let report = validate(&log);
    eprint!("{report}");
    if args.json {
        emit(
            None,
            &to_json(&ValidateSummary {
                schema_version: SCHEMA_VERSION,
                clean: report.is_clean(),
                violations: &report.violations,
            }),
        )?;
    }
    Ok(if report.is_clean() { 0 } else { 1 })
}

fn cmd_extract(args: &ExtractArgs) -> Result<i32, CliError> {
    let (log, strategy, extraction) = load_and_extract(&args.path, &args.strategy)?;
    let report = ExtractionReport::new(&log, &strategy, &extraction);
    let text = to_json(&report);
    emit(args.out.as_deref(), &text)?;
    if args.out.is_some() {
        if args.json {
            emit(None, &text)?;
        } else {
            eprintln!(
                "{} execution(s), {} dropped",
                report.execution_count,
                report.dropped.len()
            );
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct FeaturizeSummary {
    schema_version: u32,
    encoding: &'static str,
    executions: usize,
    rows: usize,
    columns: Vec<String>,
    shared_events: usize,
}

fn cmd_featurize(args: &FeaturizeArgs) -> Result<i32, CliError> {
    let specs = parse_specs(&args.features)?;
    let (log, _, extraction) = load_and_extract(&args.path, &args.strategy)?;
    let executions = &extraction.executions;
    let graphs = build_graphs(&log, executions);
    let mut matrix = compute_matrix_with_graphs(&log, executions, &graphs, &specs)?;
    if args.impute_zero {
        matrix.impute_zero();
    }
    let encoding = match args.encoding {
        EncodingName::Tabular => {
            let csv = encode_tabular(&log, &matrix).to_csv_string()?;
            write_file(&args.out, csv.as_bytes())?;
            "tabular"
        }
        EncodingName::Sequential => {
            let jsonl = encode_sequential(&log, &matrix, executions).to_jsonl_string()?;
            write_file(&args.out, jsonl.as_bytes())?;
            "sequential"
        }
        EncodingName::Graph => {
            let json = encode_graph(&log, &matrix, executions, &graphs).to_json_string()?;
            write_file(&args.out, json.as_bytes())?;
            if let Some(dot_path) = &args.dot {
                let dot: String = executions
                    .iter()
                    .zip(&graphs)
                    .map(|(p, g)| execution_dot(&log, p, g))
                    .collect();
                write_file(dot_path, dot.as_bytes())?;
            }
            "graph"
        }
    };
    let summary = FeaturizeSummary {
        schema_version: SCHEMA_VERSION,
        encoding,
        executions: executions.len(),
        rows: matrix.num_rows(),
        columns: matrix.column_names.clone(),
        shared_events: extraction.shared_events().len(),
    };
    if args.json {
        emit(None, &to_json(&summary))?;
    } else {
        let unit = match args.encoding {
            EncodingName::Tabular => format!("{} row(s)", summary.rows),
            EncodingName::Sequential => format!("{} sequence(s)", summary.executions),
            EncodingName::Graph => format!("{} graph(s)", summary.executions),
        };
        eprintln!("wrote {unit} to {}", args.out.display());
        if summary.shared_events > 0 {
            eprintln!(
                "{} event(s) appear in more than one execution",
                summary.shared_events
            );
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct TimeseriesSummary {
    schema_version: u32,
    feature: String,
    windows: usize,
}

fn cmd_timeseries(args: &TimeseriesArgs) -> Result<i32, CliError> {
    let spec: FeatureSpec = args.feature.parse()?;
    let agg: SeriesAggregation = args.agg.parse().map_err(CliError::domain)?;
    let log = parse_ocel(&args.path)?;
    let points = sublog_timeseries(&log, args.window, &spec, agg)?;
    let mut buf = Vec::new();
    write_timeseries_csv(&points, &mut buf)?;
    write_file(&args.out, &buf)?;
    if args.json {
        emit(
            None,
            &to_json(&TimeseriesSummary {
                schema_version: SCHEMA_VERSION,
                feature: spec.to_string(),
                windows: points.len(),
            }),
        )?;
    }
    Ok(0)
}

fn cmd_variant(args: &VariantArgs) -> Result<i32, CliError> {
    let specs = parse_specs(&args.features)?;
    let (log, _, extraction) = load_and_extract(&args.path, &args.strategy)?;
    let execution = extraction
        .executions
        .iter()
        .find(|p| p.exec_id == args.exec_id)
        .cloned()
        .ok_or_else(|| CliError::domain(format!("unknown execution {}", args.exec_id)))?;
    let executions = std::slice::from_ref(&execution);
    let graphs = build_graphs(&log, executions);
    let text = match args.format {
        VariantFormat::Dot => execution_dot(&log, &execution, &graphs[0]),
        VariantFormat::Json => {
            let matrix = compute_matrix_with_graphs(&log, executions, &graphs, &specs)?;
            let encoded = encode_graph(&log, &matrix, executions, &graphs);
            to_json(&encoded.graphs[0])
        }
        VariantFormat::Seq => {
            let matrix = compute_matrix_with_graphs(&log, executions, &graphs, &specs)?;
            let encoded = encode_sequential(&log, &matrix, executions);
            to_json(&encoded.sequences[0])
        }
    };
    emit(args.out.as_deref(), &text)?;
    Ok(0)
}

#[derive(Serialize)]
struct Stats {
    schema_version: u32,
    events: usize,
    objects: usize,
    object_types: Vec<String>,
    activities: Vec<String>,
    object_graph_edges: usize,
    connected_components: usize,
}

fn cmd_stats(args: &StatsArgs) -> Result<i32, CliError> {
    let log = parse_ocel(&args.path)?;
    let graph = ObjectGraph::build(&log);
    if let Some(path) = &args.object_graph_dot {
        write_file(path, graph.to_dot(&log).as_bytes())?;
    }
    let stats = Stats {
        schema_version: SCHEMA_VERSION,
        events: log.num_events(),
        objects: log.num_objects(),
        object_types: log.object_types().to_vec(),
        activities: log.activities(),
        object_graph_edges: graph.num_edges(),
        connected_components: graph.connected_components().len(),
    };
    if args.json {
        emit(None, &to_json(&stats))?;
    } else {
        let text = format!(
            "events: {}\nobjects: {}\nobject types: {}\nactivities: {}\nobject graph edges: {}\nconnected components: {}\n",
            stats.events,
            stats.objects,
            stats.object_types.join(", "),
            stats.activities.len(),
            stats.object_graph_edges,
            stats.connected_components
        );
        emit(None, &text)?;
    }
    Ok(0)
}

pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Validate(a) => cmd_validate(a),
        Command::Extract(a) => cmd_extract(a),
        Command::Featurize(a) => cmd_featurize(a),
        Command::Timeseries(a) => cmd_timeseries(a),
        Command::Variant(a) => cmd_variant(a),
        Command::Stats(a) => cmd_stats(a),
    }
}

/// Parses arguments, runs the command on a pool of `--threads` workers and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { 2 } else { 0 };
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n.max(1));
    }
    let pool = match pool.build() {
        Ok(pool) => pool,
        Err(err) => {
            eprintln!("error: cannot start worker pool: {err}");
            return 2;
        }
    };
    match pool.install(|| execute(&cli)) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.code
        }
    }
}
