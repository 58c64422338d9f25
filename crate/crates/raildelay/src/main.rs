//! `raildelay` — simulate dual-mode railway delay campaigns, train and
//! select delay models, generate PR-mode datasets, and emit reliability
//! and regional reports.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use raildelay::data::DelayKind;
use raildelay::ml::ModelPreset;
use raildelay::pipeline::{
    cmd_evaluate, cmd_export_geo, cmd_generate, cmd_report, cmd_select, cmd_simulate, cmd_train,
    resolve_seed, PipelineError, ReportKind,
};
use raildelay::sim::{parse_scenario_file, ScenarioConfig};

#[derive(Parser)]
#[command(name = "raildelay", version, about = "Railway cellular delay modeling toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a measurement campaign; writes bq.csv and pr.csv
    Simulate {
        /// Scenario config file; the bundled default scenario when omitted
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
        /// Override the scenario seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the scenario config of the bundled default campaign
    PrintConfig,
    /// Train model presets on a PR-mode dataset
    Train {
        /// PR-mode dataset CSV
        #[arg(long)]
        data: PathBuf,
        /// Delay kind (position|ma|tcp|http|dns) or 'all'
        #[arg(long)]
        delay: String,
        /// Preset slug or 'all'
        #[arg(long, default_value = "all")]
        preset: String,
        /// Output directory for model files
        #[arg(long)]
        out: PathBuf,
        /// Training seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate trained models on a dataset; writes metrics.csv
    Evaluate {
        /// Model files (repeatable), or use --models for a directory
        #[arg(long = "model")]
        models: Vec<PathBuf>,
        /// Directory holding *.rdm model files
        #[arg(long)]
        models_dir: Option<PathBuf>,
        /// Dataset CSV to evaluate against
        #[arg(long)]
        data: PathBuf,
        /// Evaluate on the chronological tail only (e.g. 0.7 holds out 30%)
        #[arg(long)]
        split: Option<f64>,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Pick the minimum-RMSE preset per delay kind; writes selection.csv
    Select {
        /// metrics.csv produced by evaluate
        #[arg(long)]
        metrics: PathBuf,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a PR-mode dataset from BQ measurements with selected models
    Generate {
        /// Directory holding the trained model files
        #[arg(long)]
        models_dir: PathBuf,
        /// selection.csv produced by select
        #[arg(long)]
        selection: PathBuf,
        /// BQ-mode dataset CSV
        #[arg(long)]
        data: PathBuf,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Emit reliability, regional, or summary tables
    Report {
        /// Dataset CSVs (repeatable)
        #[arg(long = "data", required = true)]
        data: Vec<PathBuf>,
        /// Table to produce: reliability|regional|summary
        #[arg(long)]
        kind: String,
        /// East/west boundary longitude for regional reports
        #[arg(long, default_value_t = raildelay::data::DEFAULT_BOUNDARY_LON)]
        boundary_lon: f64,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Export one delay kind as a GeoJSON FeatureCollection
    ExportGeo {
        /// Dataset CSV
        #[arg(long)]
        data: PathBuf,
        /// Delay kind (position|ma|tcp|http|dns)
        #[arg(long)]
        delay: String,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_kinds(raw: &str) -> Result<Vec<DelayKind>, PipelineError> {
    if raw.eq_ignore_ascii_case("all") {
        return Ok(DelayKind::ALL.to_vec());
    }
    raw.parse::<DelayKind>()
        .map(|kind| vec![kind])
        .map_err(PipelineError::input)
}

fn parse_presets(raw: &str) -> Result<Vec<ModelPreset>, PipelineError> {
    if raw.eq_ignore_ascii_case("all") {
        return Ok(ModelPreset::ALL.to_vec());
    }
    raw.parse::<ModelPreset>()
        .map(|preset| vec![preset])
        .map_err(PipelineError::input)
}

fn parse_report_kind(raw: &str) -> Result<ReportKind, PipelineError> {
    match raw {
        "reliability" => Ok(ReportKind::Reliability),
        "regional" => Ok(ReportKind::Regional),
        "summary" => Ok(ReportKind::Summary),
        other => Err(PipelineError::Input(format!(
            "unknown report kind '{other}' (expected reliability|regional|summary)"
        ))),
    }
}

fn load_scenario(
    config: Option<&PathBuf>,
    seed_flag: Option<u64>,
) -> Result<ScenarioConfig, PipelineError> {
    let mut scenario = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                PipelineError::Input(format!("cannot read {}: {e}", path.display()))
            })?;
            parse_scenario_file(&text)?
        }
        None => ScenarioConfig::default_scenario(),
    };
    scenario.seed = resolve_seed(seed_flag, scenario.seed)?;
    Ok(scenario)
}

fn collect_models(
    models: Vec<PathBuf>,
    models_dir: Option<PathBuf>,
) -> Result<Vec<PathBuf>, PipelineError> {
    let mut files = models;
    if let Some(dir) = models_dir {
        let mut found: Vec<PathBuf> = std::fs::read_dir(&dir)
            .map_err(|e| PipelineError::Input(format!("cannot read {}: {e}", dir.display())))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "rdm"))
            .collect();
        found.sort();
        files.extend(found);
    }
    if files.is_empty() {
        return Err(PipelineError::Input(
            "no model files given (use --model or --models-dir)".into(),
        ));
    }
    Ok(files)
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Simulate { config, out, seed } => {
            let scenario = load_scenario(config.as_ref(), seed)?;
            cmd_simulate(&scenario, &out)?;
        }
        Command::PrintConfig => {
            print!(
                "{}",
                raildelay::sim::write_scenario_file(&ScenarioConfig::default_scenario())
            );
        }
        Command::Train {
            data,
            delay,
            preset,
            out,
            seed,
        } => {
            let kinds = parse_kinds(&delay)?;
            let presets = parse_presets(&preset)?;
            let seed = resolve_seed(seed, 42)?;
            cmd_train(&data, &kinds, &presets, seed, &out)?;
        }
        Command::Evaluate {
            models,
            models_dir,
            data,
            split,
            out,
        } => {
            let files = collect_models(models, models_dir)?;
            cmd_evaluate(&files, &data, split, &out)?;
        }
        Command::Select { metrics, out } => {
            cmd_select(&metrics, &out)?;
        }
        Command::Generate {
            models_dir,
            selection,
            data,
            out,
        } => {
            cmd_generate(&models_dir, &selection, &data, &out)?;
        }
        Command::Report {
            data,
            kind,
            boundary_lon,
            out,
        } => {
            let kind = parse_report_kind(&kind)?;
            cmd_report(&data, kind, boundary_lon, &out)?;
        }
        Command::ExportGeo { data, delay, out } => {
            let kind = delay.parse::<DelayKind>().map_err(PipelineError::input)?;
            cmd_export_geo(&data, kind, &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
