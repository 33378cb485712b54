//! Command implementations behind the `airsent` binary.

pub mod config;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use airsent_core::corpus::IngestReport;
use airsent_core::report::{analyze, write_report_files, Report, ReportParams};
use airsent_core::svm::dataset::load_kaggle_path;
use airsent_core::svm::Metrics;
use airsent_core::{Airline, Normalizer, SentimentModel, Store};
use airsent_service::{AppState, ServiceDefaults};
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

pub use config::PipelineConfig;

/// Exit status 1: the environment or the numerics failed.
pub const EXIT_RUNTIME: u8 = 1;
/// Exit status 2: bad arguments, configuration or input data.
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_RUNTIME,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<airsent_core::Error> for CliError {
    fn from(e: airsent_core::Error) -> Self {
        if e.is_input_error() {
            CliError::usage(e.to_string())
        } else {
            CliError::runtime(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::runtime(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "airsent", version, about = "Airline tweet sentiment monitoring")]
pub struct Cli {
    /// Pipeline configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Append raw tweet records (JSONL) to the store.
    Ingest(IngestArgs),
    /// Train and evaluate a sentiment model on a labeled CSV.
    Train(TrainArgs),
    /// Fill sentiment probabilities for unscored records.
    Score(ScoreArgs),
    /// Write the series, breakout and word-table CSVs for one airline.
    Report(ReportArgs),
    /// Serve the read-only HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub airline: Airline,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Labeled CSV with `airline_sentiment` and `text` columns.
    pub dataset: PathBuf,
    /// Output model path.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Every stored airline when omitted.
    #[arg(long)]
    pub airline: Option<Airline>,
    #[arg(long)]
    pub from: Option<NaiveDate>,
    #[arg(long)]
    pub to: Option<NaiveDate>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub airline: Airline,
    /// Defaults to the first stored date.
    #[arg(long)]
    pub from: Option<NaiveDate>,
    /// Defaults to the last stored date.
    #[arg(long)]
    pub to: Option<NaiveDate>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub k: Option<f64>,
    /// Output directory; `reports_dir` from the config by default.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub bind: Option<std::net::SocketAddr>,
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let config = PipelineConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Ingest(args) => {
            let report = cmd_ingest(&config, &args.input, args.airline)?;
            writeln!(
                out,
                "{}: accepted {}, duplicates {}, rejected {}",
                args.airline, report.accepted, report.duplicates, report.rejected
            )?;
            for r in &report.rejections {
                writeln!(out, "  line {}: {}", r.line, r.reason)?;
            }
        }
        Command::Train(args) => {
            let path = args.model.clone().unwrap_or_else(|| config.model.clone());
            let model = cmd_train(&config, &args.dataset, &path, args.seed)?;
            write_training_summary(out, &model, &path)?;
        }
        Command::Score(args) => {
            let path = args.model.clone().unwrap_or_else(|| config.model.clone());
            for (airline, n) in cmd_score(&config, &path, args.airline, args.from, args.to)? {
                writeln!(out, "{airline}: scored {n}")?;
            }
        }
        Command::Report(args) => {
            let (report, files) = cmd_report(&config, &args)?;
            write_report_summary(out, &report, &files)?;
        }
        Command::Serve(args) => cmd_serve(&config, args.bind)?,
    }
    Ok(())
}

pub fn open_store(config: &PipelineConfig) -> Result<Store, CliError> {
    Ok(Store::open(&config.data_dir)?)
}

pub fn cmd_ingest(config: &PipelineConfig, input: &Path, airline: Airline) -> Result<IngestReport, CliError> {
    if !input.is_file() {
        return Err(CliError::usage(format!("input file {} does not exist", input.display())));
    }
    let query = config.query(airline)?;
    Ok(open_store(config)?.ingest_path(input, airline, &query)?)
}

pub fn cmd_train(config: &PipelineConfig, dataset: &Path, model_out: &Path, seed: Option<u64>) -> Result<SentimentModel, CliError> {
    let corpus = load_kaggle_path(dataset)?;
    let model = SentimentModel::train(&corpus, &config.train_config(seed))?;
    if let Some(dir) = model_out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    model.save(model_out)?;
    Ok(model)
}

pub fn cmd_score(
    config: &PipelineConfig,
    model_path: &Path,
    airline: Option<Airline>,
    from: Option<NaiveDate>,
    to: Option<NaiveDate>,
) -> Result<Vec<(Airline, usize)>, CliError> {
    let model = SentimentModel::load(model_path)?;
    let scorer = model.scorer()?;
    let store = open_store(config)?;
    let airlines: Vec<Airline> = match airline {
        Some(a) => vec![a],
        None => store.summary()?.into_iter().map(|s| s.airline).collect(),
    };
    let mut counts = Vec::new();
    for airline in airlines {
        let n = store.score_unscored(airline, from, to, |r| {
            let s = scorer.score_record(r)?;
            Ok((s.p_positive, s.p_negative))
        })?;
        counts.push((airline, n));
    }
    Ok(counts)
}

/// Parameters `cmd_report` resolves from the config, flags and the store.
pub fn report_params(config: &PipelineConfig, store: &Store, args: &ReportArgs) -> Result<ReportParams, CliError> {
    let mut series = config.series.clone();
    series.window = args.window.unwrap_or(series.window);
    series.multiplier = args.k.unwrap_or(series.multiplier);
    config.check_series(series.window, series.multiplier)?;
    let coverage = store.coverage(args.airline)?;
    let (from, to) = match (args.from, args.to, coverage) {
        (Some(f), Some(t), _) => (f, t),
        (f, t, Some((first, last))) => (f.unwrap_or(first), t.unwrap_or(last)),
        (_, _, None) => return Err(CliError::usage(format!("no stored tweets for {}", args.airline))),
    };
    if from > to {
        return Err(CliError::usage(format!("--from {from} is after --to {to}")));
    }
    Ok(ReportParams {
        airline: args.airline,
        from,
        to,
        series,
        top_k: config.report.top_k,
        padding: config.report.padding,
    })
}

pub fn cmd_report(config: &PipelineConfig, args: &ReportArgs) -> Result<(Report, Vec<PathBuf>), CliError> {
    let store = open_store(config)?;
    let params = report_params(config, &store, args)?;
    let records = store.load_range(params.airline, params.from, params.to)?;
    let normalizer = Normalizer::new(config.normalization.clone())?;
    let report = analyze(&records, &normalizer, &params)?;
    let dir = args.out.clone().unwrap_or_else(|| config.reports_dir.clone());
    let files = write_report_files(&report, &dir)?;
    Ok((report, files))
}

pub fn service_state(config: &PipelineConfig) -> Result<AppState, CliError> {
    let defaults = ServiceDefaults {
        series: config.series.clone(),
        top_k: config.report.top_k,
        padding: config.report.padding,
    };
    Ok(AppState::new(
        open_store(config)?,
        Normalizer::new(config.normalization.clone())?,
        defaults,
    ))
}

pub fn cmd_serve(config: &PipelineConfig, bind: Option<std::net::SocketAddr>) -> Result<(), CliError> {
    let state = Arc::new(service_state(config)?);
    let addr = bind.unwrap_or(config.service.bind);
    let runtime = tokio::runtime::Runtime::new()?;
    runtime
        .block_on(airsent_service::serve(state, addr, config.service.static_dir.clone()))
        .map_err(|e| CliError::runtime(format!("server failed: {e}")))
}

fn write_metrics(out: &mut dyn Write, title: &str, m: &Metrics) -> std::io::Result<()> {
    let c = &m.confusion;
    writeln!(out, "{title}")?;
    writeln!(out, "  accuracy  {:.4}", m.accuracy)?;
    writeln!(out, "  precision {:.4}", m.precision)?;
    writeln!(out, "  recall    {:.4}", m.recall)?;
    writeln!(out, "  f1        {:.4}", m.f1)?;
    writeln!(out, "  confusion        pred+  pred-")?;
    writeln!(out, "    actual+  {:>9} {:>6}", c.true_positive, c.false_negative)?;
    writeln!(out, "    actual-  {:>9} {:>6}", c.false_positive, c.true_negative)
}

pub fn write_training_summary(out: &mut dyn Write, model: &SentimentModel, path: &Path) -> std::io::Result<()> {
    let t = &model.training;
    writeln!(out, "dataset {} (train {}, test {}, seed {})", t.provenance, t.n_train, t.n_test, t.seed)?;
    writeln!(
        out,
        "svm: {} support vectors, {} iterations, kernel {:?}",
        t.svm.support_vectors, t.svm.iterations, t.svm.kernel
    )?;
    if let Some(m) = &t.test_metrics {
        write_metrics(out, "test", m)?;
    }
    write_metrics(out, "all rows", &t.full_metrics)?;
    writeln!(out, "model written to {}", path.display())
}

pub fn write_report_summary(out: &mut dyn Write, report: &Report, files: &[PathBuf]) -> std::io::Result<()> {
    let p = &report.params;
    writeln!(
        out,
        "{} {}..{} window {} k {}: {} breakouts",
        p.airline,
        p.from,
        p.to,
        p.series.window,
        p.series.multiplier,
        report.breakouts.len()
    )?;
    for b in &report.breakouts {
        writeln!(out, "  {} {} z={:.3}", b.date, b.direction.as_str(), b.z_value)?;
    }
    for f in files {
        writeln!(out, "wrote {}", f.display())?;
    }
    Ok(())
}
