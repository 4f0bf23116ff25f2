//! Command-line front end: argument parsing and rendering around [`launch_decision::analysis`].
//!
//! [`dispatch`] is the whole program; the binary only wires it to the process streams.
//! Exit codes: 0 success, 1 validation or runtime error, 2 usage error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use launch_decision::analysis::{
    self, compare_rows, prior_table, render_table, sig, DecideRequest, NamedAxis, SpaceRequest,
    COMPARE_HEADERS,
};
use launch_decision::bootstrap::{bootstrap_record, BootstrapConfig};
use launch_decision::experiment::{ExperimentRecord, MetricSchema};
use launch_decision::posterior::DEFAULT_LEVEL;
use launch_decision::prior::{Prior, ShrinkageLevel};
use launch_decision::registry::RegistryStore;
use launch_decision::sim::{self, flips_to_csv, SimConfig, UnitExperiment};
use launch_decision::units::read_units;
use launch_decision::{Error, Result};
use launch_decision_service::render;
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Parser)]
#[command(
    name = "launch-decision",
    version,
    about = "Launch/roll-back decisions from experiment results"
)]
pub struct Cli {
    /// Registry file (JSON Lines, one experiment per line).
    #[arg(
        long,
        global = true,
        env = "LAUNCHDECIDE_REGISTRY",
        default_value = "registry.jsonl"
    )]
    pub registry: PathBuf,
    /// Seed for randomized steps; echoed in their output.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output format (default: csv for `flips`, json otherwise).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Credible level for intervals.
    #[arg(long, global = true, default_value_t = DEFAULT_LEVEL)]
    pub level: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Register an experiment from unit-level outcomes or a record file.
    Ingest(IngestArgs),
    /// Show the hierarchical prior pooled from the registry.
    Prior(PriorArgs),
    /// Posterior of a registered experiment.
    Posterior(PosteriorArgs),
    /// Launch/roll-back recommendation under a trade-off vector.
    Decide(DecideArgs),
    /// Launch/roll-back regions over a grid of two trade-offs.
    Space(SpaceArgs),
    /// Simulation study of MSE, coverage and interval width across shrinkage levels.
    Simulate(SimulateArgs),
    /// Experiments whose significance changes between two shrinkage levels.
    Flips(FlipsArgs),
    /// Run the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Unit-level CSV with header `unit_id,arm,<metric1>,...`.
    #[arg(long, required_unless_present = "record", conflicts_with = "record")]
    pub units: Option<PathBuf>,
    /// A complete experiment record as JSON.
    #[arg(long)]
    pub record: Option<PathBuf>,
    /// Experiment id (default: the units file stem).
    #[arg(long)]
    pub id: Option<String>,
    /// Completion time (default: one after the latest registered timestamp).
    #[arg(long, allow_negative_numbers = true)]
    pub timestamp: Option<i64>,
    /// Human-readable treatment label.
    #[arg(long)]
    pub label: Option<String>,
    #[arg(long, default_value_t = 1000)]
    pub bootstrap_replicates: usize,
}

fn parse_k(s: &str) -> std::result::Result<ShrinkageLevel, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_list<T: std::str::FromStr>(s: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<T>()
                .map_err(|e| format!("`{}`: {e}", v.trim()))
        })
        .collect()
}

fn parse_floats(s: &str) -> std::result::Result<Vec<f64>, String> {
    parse_list(s)
}

fn parse_ks(s: &str) -> std::result::Result<Vec<ShrinkageLevel>, String> {
    s.split(',').map(|v| parse_k(v.trim())).collect()
}

/// `metric:v1,v2,...` or `metric:lo..hi:steps` (inclusive, evenly spaced).
fn parse_axis(s: &str) -> std::result::Result<NamedAxis, String> {
    let (metric, rest) = s
        .split_once(':')
        .ok_or("expected `metric:v1,v2,...` or `metric:lo..hi:steps`")?;
    if metric.is_empty() {
        return Err("axis metric name is empty".into());
    }
    let values = if let Some((range, steps)) = rest.split_once(':') {
        let (lo, hi) = range.split_once("..").ok_or("expected `lo..hi:steps`")?;
        let lo: f64 = lo.trim().parse().map_err(|e| format!("`{lo}`: {e}"))?;
        let hi: f64 = hi.trim().parse().map_err(|e| format!("`{hi}`: {e}"))?;
        let steps: usize = steps
            .trim()
            .parse()
            .map_err(|e| format!("`{steps}`: {e}"))?;
        match steps {
            0 => return Err("steps must be >= 1".into()),
            1 => vec![lo],
            _ => (0..steps)
                .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
                .collect(),
        }
    } else {
        parse_floats(rest)?
    };
    Ok(NamedAxis {
        metric: metric.to_string(),
        values,
    })
}

#[derive(Debug, Args)]
pub struct PriorArgs {
    /// Pool only experiments finishing strictly before this time.
    #[arg(long, allow_negative_numbers = true)]
    pub before: Option<i64>,
    #[arg(long, default_value = "1", value_parser = parse_k)]
    pub k: ShrinkageLevel,
    /// Comma-separated metric schema to pool (required if the registry mixes schemas).
    #[arg(long)]
    pub metrics: Option<String>,
}

#[derive(Debug, Args)]
pub struct PosteriorArgs {
    #[arg(long)]
    pub experiment: String,
    #[arg(long, default_value = "1", value_parser = parse_k)]
    pub k: ShrinkageLevel,
    /// Comma-separated shrinkage levels to report side by side, e.g. `0,1,inf`.
    #[arg(long, value_parser = parse_ks)]
    pub compare_k: Option<::std::vec::Vec<ShrinkageLevel>>,
}

#[derive(Debug, Args)]
pub struct DecideArgs {
    #[arg(long)]
    pub experiment: String,
    #[arg(long, default_value = "1", value_parser = parse_k)]
    pub k: ShrinkageLevel,
    /// Comma-separated trade-offs, one per metric, e.g. `1,-99`.
    #[arg(long, value_parser = parse_floats, allow_hyphen_values = true)]
    pub tradeoffs: ::std::vec::Vec<f64>,
    /// Cost of rolling back.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub c0: f64,
    /// Cost of launching.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub c1: f64,
    /// Samples for the joint success probability (0 skips it).
    #[arg(long, default_value_t = analysis::DEFAULT_JOINT_SAMPLES)]
    pub joint_samples: usize,
}

#[derive(Debug, Args)]
pub struct SpaceArgs {
    #[arg(long)]
    pub experiment: String,
    #[arg(long, default_value = "1", value_parser = parse_k)]
    pub k: ShrinkageLevel,
    /// `metric:v1,v2,...` or `metric:lo..hi:steps`.
    #[arg(long, value_parser = parse_axis, allow_hyphen_values = true)]
    pub axis1: NamedAxis,
    #[arg(long, value_parser = parse_axis, allow_hyphen_values = true)]
    pub axis2: NamedAxis,
    /// Trade-offs for all metrics in schema order; axis entries are overwritten (default 0).
    #[arg(long, value_parser = parse_floats, allow_hyphen_values = true)]
    pub fixed: Option<::std::vec::Vec<f64>>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub c0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub c1: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON simulation config; omitted fields take their defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Unit-level CSVs to shuffle into permutation nulls, in time order (overrides the generator).
    #[arg(long, num_args = 1..)]
    pub units: Vec<PathBuf>,
    /// Also write the per-metric CSV table here.
    #[arg(long)]
    pub csv_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FlipsArgs {
    #[arg(long, default_value = "inf", value_parser = parse_k)]
    pub ka: ShrinkageLevel,
    #[arg(long, default_value = "1", value_parser = parse_k)]
    pub kb: ShrinkageLevel,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "LAUNCHDECIDE_PORT", default_value_t = 8080)]
    pub port: u16,
    #[arg(long, env = "LAUNCHDECIDE_HOST", default_value = "127.0.0.1")]
    pub host: IpAddr,
    /// Allowed browser origin; `*` or omitted allows any.
    #[arg(long, env = "LAUNCHDECIDE_CORS_ORIGIN")]
    pub cors_origin: Option<String>,
}

/// Parses `argv` (including the program name), runs the command and returns the exit code.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match run(&cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILURE
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    emit(out, &render(value)?)
}

fn unsupported(cmd: &str, f: Format) -> Error {
    Error::InvalidArgument(format!("`{cmd}` does not support --format {f:?}").to_lowercase())
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "--level must be in (0, 1), got {level}"
        )))
    }
}

fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    check_level(cli.level)?;
    let format = cli.format.unwrap_or(match cli.command {
        Command::Flips(_) => Format::Csv,
        _ => Format::Json,
    });
    match &cli.command {
        Command::Ingest(a) => ingest(cli, a, format, out),
        Command::Prior(a) => prior(cli, a, format, out),
        Command::Posterior(a) => posterior(cli, a, format, out),
        Command::Decide(a) => decide(cli, a, format, out),
        Command::Space(a) => space(cli, a, format, out),
        Command::Simulate(a) => simulate(cli, a, format, out, err),
        Command::Flips(a) => flips(cli, a, format, out),
        Command::Serve(a) => serve(cli, a, err),
    }
}

fn open(cli: &Cli) -> Result<RegistryStore> {
    RegistryStore::open(&cli.registry)
}

fn read_units_file(path: &Path) -> Result<(MetricSchema, Vec<launch_decision::UnitOutcomes>)> {
    let file =
        File::open(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    read_units(BufReader::new(file))
}

fn file_stem(path: &Path) -> Result<String> {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .ok_or_else(|| {
            Error::InvalidArgument(format!("cannot derive an id from {}", path.display()))
        })
}

#[derive(Serialize)]
struct Ingested<'a> {
    registered: &'a ExperimentRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bootstrap_replicates: Option<usize>,
}

fn ingest(cli: &Cli, a: &IngestArgs, format: Format, out: &mut dyn Write) -> Result<()> {
    let store = open(cli)?;
    let next_ts = store
        .snapshot()
        .records()
        .iter()
        .map(|r| r.timestamp)
        .max()
        .map_or(0, |t| t + 1);
    let (mut rec, seed) = match (&a.units, &a.record) {
        (Some(path), _) => {
            let (schema, units) = read_units_file(path)?;
            let id = match &a.id {
                Some(id) => id.clone(),
                None => file_stem(path)?,
            };
            let cfg = BootstrapConfig {
                replicates: a.bootstrap_replicates,
                seed: cli.seed.unwrap_or(0),
            };
            let rec = bootstrap_record(id, a.timestamp.unwrap_or(next_ts), schema, &units, &cfg)?;
            (rec, Some(cfg.seed))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            let mut rec: ExperimentRecord = serde_json::from_str(&text)?;
            if let Some(id) = &a.id {
                rec.id = id.clone();
            }
            if let Some(t) = a.timestamp {
                rec.timestamp = t;
            }
            (rec, None)
        }
        (None, None) => unreachable!("clap requires a source"),
    };
    if let Some(label) = &a.label {
        rec.treatment_label = Some(label.clone());
    }
    store.append(rec.clone())?;
    match format {
        Format::Json => emit_json(
            out,
            &Ingested {
                registered: &rec,
                seed,
                bootstrap_replicates: seed.map(|_| a.bootstrap_replicates),
            },
        ),
        Format::Table => {
            let mut text = format!(
                "registered `{}` at t={} ({} metrics)\n",
                rec.id,
                rec.timestamp,
                rec.dim()
            );
            if let Some(s) = seed {
                text.push_str(&format!(
                    "bootstrap: {} replicates, seed {s}\n",
                    a.bootstrap_replicates
                ));
            }
            let rows: Vec<Vec<String>> = rec
                .schema
                .names
                .iter()
                .enumerate()
                .map(|(j, m)| {
                    vec![
                        m.clone(),
                        sig(rec.x[j], 4),
                        sig(rec.sigma[(j, j)].sqrt(), 4),
                    ]
                })
                .collect();
            text.push_str(&render_table(
                &["metric".into(), "x".into(), "se".into()],
                &rows,
            ));
            emit(out, &text)
        }
        Format::Csv => Err(unsupported("ingest", format)),
    }
}

fn prior(cli: &Cli, a: &PriorArgs, format: Format, out: &mut dyn Write) -> Result<()> {
    let store = open(cli)?;
    let schema = a
        .metrics
        .as_deref()
        .map(|m| MetricSchema::new(m.split(',').map(str::trim)));
    let result = analysis::prior_for(&store.snapshot(), a.before, schema.as_ref(), a.k)?;
    match format {
        Format::Json => emit_json(out, &result),
        Format::Table => {
            if result.prior == Prior::Flat {
                let why = if a.k.is_infinite() {
                    "k = inf"
                } else {
                    "no earlier experiments"
                };
                emit(
                    out,
                    &format!(
                        "prior: flat ({why}); {} experiments in history",
                        result.history_count
                    ),
                )
            } else {
                emit(out, &prior_table(&result))
            }
        }
        Format::Csv => {
            let mut text = String::from("metric,mean,sd\n");
            if let Some(r) = &result.report {
                for (j, m) in r.metrics.iter().enumerate() {
                    text.push_str(&format!("{m},{},{}\n", r.means[j], r.sds[j]));
                }
            }
            emit(out, &text)
        }
    }
}

fn posterior(cli: &Cli, a: &PosteriorArgs, format: Format, out: &mut dyn Write) -> Result<()> {
    let store = open(cli)?;
    let reg = store.snapshot();
    let posts = match &a.compare_k {
        Some(levels) => analysis::compare_k(&reg, &a.experiment, levels, cli.level)?,
        None => vec![analysis::posterior_for(
            &reg,
            &a.experiment,
            a.k,
            cli.level,
        )?],
    };
    match format {
        Format::Json if a.compare_k.is_none() => emit_json(out, &posts[0]),
        Format::Json => emit_json(out, &posts),
        Format::Table => {
            let headers: Vec<String> = COMPARE_HEADERS.iter().map(|h| h.to_string()).collect();
            emit(out, &render_table(&headers, &compare_rows(&posts)))
        }
        Format::Csv => {
            let mut text = String::from("metric,k,est,low,high,significant\n");
            for p in &posts {
                for (j, m) in p.metrics.iter().enumerate() {
                    text.push_str(&format!(
                        "{m},{},{},{},{},{}\n",
                        p.k_used,
                        p.gaussian.mean[j],
                        p.intervals[j].low,
                        p.intervals[j].high,
                        p.significant[j]
                    ));
                }
            }
            emit(out, &text)
        }
    }
}

fn decide(cli: &Cli, a: &DecideArgs, format: Format, out: &mut dyn Write) -> Result<()> {
    let store = open(cli)?;
    let req = DecideRequest {
        experiment: a.experiment.clone(),
        k: a.k,
        tradeoffs: a.tradeoffs.clone(),
        c0: a.c0,
        c1: a.c1,
        level: cli.level,
        joint_samples: a.joint_samples,
        seed: cli.seed.unwrap_or(0),
    };
    let report = analysis::decide(&store.snapshot(), &req)?;
    match format {
        Format::Json => emit_json(out, &report),
        Format::Table => {
            let mut text = format!(
                "recommendation: {:?}\nrisk(launch) = {}  risk(rollback) = {}\n",
                report.recommendation,
                sig(report.risk_launch, 4),
                sig(report.risk_rollback, 4)
            )
            .to_lowercase();
            if let Some(j) = &report.joint_success {
                text.push_str(&format!(
                    "P(all metrics move the valued way) = {} +/- {} ({} draws, seed {})\n",
                    sig(j.probability, 4),
                    sig(j.std_error, 2),
                    j.samples,
                    j.seed
                ));
            }
            let p = &report.posterior;
            let rows: Vec<Vec<String>> = p
                .metrics
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    vec![
                        m.clone(),
                        sig(report.tradeoffs[i], 4),
                        sig(report.weights[i], 4),
                        sig(p.gaussian.mean[i], 4),
                        sig(p.intervals[i].low, 4),
                        sig(p.intervals[i].high, 4),
                    ]
                })
                .collect();
            let headers = ["metric", "lambda", "weight", "est", "low", "high"].map(String::from);
            text.push_str(&render_table(&headers, &rows));
            emit(out, &text)
        }
        Format::Csv => Err(unsupported("decide", format)),
    }
}

fn space(cli: &Cli, a: &SpaceArgs, format: Format, out: &mut dyn Write) -> Result<()> {
    let store = open(cli)?;
    let req = SpaceRequest {
        experiment: a.experiment.clone(),
        k: a.k,
        axis1: a.axis1.clone(),
        axis2: a.axis2.clone(),
        fixed: a.fixed.clone(),
        c0: a.c0,
        c1: a.c1,
        level: cli.level,
    };
    let resp = analysis::space(&store.snapshot(), &req)?;
    match format {
        Format::Json => emit_json(out, &resp),
        Format::Csv => emit(out, &resp.to_csv()?),
        Format::Table => {
            let mut text = format!(
                "{} (rows) x {} (columns); L = launch, . = rollback, ? = skipped\n",
                resp.axis1, resp.axis2
            );
            for r in 0..resp.rows {
                text.push_str(&format!(
                    "{:>10} ",
                    sig(resp.grid[r * resp.cols].lambda1, 4)
                ));
                for c in 0..resp.cols {
                    text.push(match resp.grid[r * resp.cols + c].decision {
                        launch_decision::risk::GridDecision::Launch => 'L',
                        launch_decision::risk::GridDecision::Rollback => '.',
                        launch_decision::risk::GridDecision::Skipped => '?',
                    });
                }
                text.push('\n');
            }
            emit(out, &text)
        }
    }
}

fn simulate(
    cli: &Cli,
    a: &SimulateArgs,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<()> {
    let mut cfg: SimConfig = match &a.config {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
        None => SimConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.credible_level = cli.level;
    let report = if a.units.is_empty() {
        sim::run_simulation(&cfg)?
    } else {
        let data = a
            .units
            .iter()
            .enumerate()
            .map(|(i, path)| {
                let (schema, units) = read_units_file(path)?;
                Ok(UnitExperiment {
                    id: file_stem(path)?,
                    timestamp: i as i64,
                    schema,
                    units,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        sim::run_permutation_simulation(&cfg, &data)?
    };
    let _ = writeln!(err, "simulate: seed {}", report.seed);
    if let Some(path) = &a.csv_out {
        std::fs::write(path, report.to_csv()?)?;
    }
    match format {
        Format::Json => emit_json(out, &report),
        Format::Csv => emit(out, &report.to_csv()?),
        Format::Table => {
            let mut rows = Vec::new();
            for l in &report.levels {
                for (j, m) in report.metrics.iter().enumerate() {
                    rows.push(vec![
                        l.k.to_string(),
                        m.clone(),
                        sig(l.mse[j], 4),
                        sig(l.coverage[j], 4),
                        sig(l.interval_width[j], 4),
                        sig(l.significance_rate[j], 4),
                    ]);
                }
            }
            let headers =
                ["k", "metric", "mse", "coverage", "width", "significant"].map(String::from);
            emit(
                out,
                &format!(
                    "{} experiments, seed {}\n{}",
                    report.n_experiments,
                    report.seed,
                    render_table(&headers, &rows)
                ),
            )
        }
    }
}

fn flips(cli: &Cli, a: &FlipsArgs, format: Format, out: &mut dyn Write) -> Result<()> {
    let store = open(cli)?;
    let rows = sim::flip_report(&store.snapshot(), a.ka, a.kb, cli.level)?;
    match format {
        Format::Csv => emit(out, &flips_to_csv(&rows)?),
        Format::Json => emit_json(out, &rows),
        Format::Table => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let est = |e: &sim::Estimate| {
                        format!("{} [{}, {}]", sig(e.est, 4), sig(e.low, 4), sig(e.high, 4))
                    };
                    vec![
                        r.experiment.clone(),
                        r.treatment_label.clone().unwrap_or_default(),
                        r.metric.clone(),
                        est(&r.a),
                        est(&r.b),
                    ]
                })
                .collect();
            let headers = vec![
                "experiment".to_string(),
                "treatment".to_string(),
                "metric".to_string(),
                format!("k={}", a.ka),
                format!("k={}", a.kb),
            ];
            emit(out, &render_table(&headers, &table))
        }
    }
}

fn serve(cli: &Cli, a: &ServeArgs, err: &mut dyn Write) -> Result<()> {
    let store = Arc::new(open(cli)?);
    let addr = SocketAddr::new(a.host, a.port);
    let _ = writeln!(err, "serving {} on http://{addr}", cli.registry.display());
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?;
    runtime.block_on(launch_decision_service::serve(
        store,
        addr,
        a.cors_origin.as_deref(),
    ))
}
