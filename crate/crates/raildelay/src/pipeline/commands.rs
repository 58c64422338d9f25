//! The seven pipeline commands. Each writes its outputs plus a
//! `manifest.json` into the target directory and returns the paths it
//! produced.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::data::{
    parse_csv, time_split, to_features, write_csv, Dataset, DelayKind, DelayValues, Mode,
};
use crate::metrics::{evaluate, MetricsReport};
use crate::ml::{train_preset, ModelPreset, TrainedModel};
use crate::pipeline::geojson::export_geojson;
use crate::pipeline::manifest::{sha256_hex, RunManifest};
use crate::pipeline::report::{
    reliability_report, render_metric_line, render_reliability, render_summary, summary_report,
};
use crate::pipeline::PipelineError;
use crate::sim::{simulate, write_scenario_file, ScenarioConfig};

/// Environment variable that overrides the config seed.
pub const SEED_ENV_VAR: &str = "RAILDELAY_SEED";

/// Seed precedence: explicit flag, then `RAILDELAY_SEED`, then the
/// config/default value.
pub fn resolve_seed(flag: Option<u64>, fallback: u64) -> Result<u64, PipelineError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV_VAR) {
        Ok(raw) => raw.parse::<u64>().map_err(|_| {
            PipelineError::Input(format!("{SEED_ENV_VAR} '{raw}' is not a valid seed"))
        }),
        Err(_) => Ok(fallback),
    }
}

fn ensure_dir(dir: &Path) -> Result<(), PipelineError> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn read_dataset(path: &Path) -> Result<Dataset, PipelineError> {
    let file = fs::File::open(path)
        .map_err(|e| PipelineError::Input(format!("cannot open {}: {e}", path.display())))?;
    parse_csv(file).map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))
}

fn write_dataset(path: &Path, dataset: &Dataset) -> Result<(), PipelineError> {
    let mut file = fs::File::create(path)
        .map_err(|e| PipelineError::Input(format!("cannot create {}: {e}", path.display())))?;
    write_csv(dataset, &mut file)?;
    Ok(())
}

fn path_string(path: &Path) -> String {
    path.display().to_string()
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub struct SimulateOutput {
    pub bq_csv: PathBuf,
    pub pr_csv: PathBuf,
    pub manifest: PathBuf,
}

/// Run a campaign and write `bq.csv` and `pr.csv`.
pub fn cmd_simulate(
    config: &ScenarioConfig,
    out_dir: &Path,
) -> Result<SimulateOutput, PipelineError> {
    ensure_dir(out_dir)?;
    let output = simulate(config)?;
    let bq_csv = out_dir.join("bq.csv");
    let pr_csv = out_dir.join("pr.csv");
    write_dataset(&bq_csv, &output.bq)?;
    write_dataset(&pr_csv, &output.pr)?;

    let digest = sha256_hex(&[write_scenario_file(config).as_bytes()]);
    let manifest = RunManifest::new(
        "simulate",
        digest,
        Some(config.seed),
        vec![],
        vec![path_string(&bq_csv), path_string(&pr_csv)],
    )
    .write(out_dir)?;
    println!(
        "simulate: {} samples per mode -> {}",
        output.bq.len(),
        out_dir.display()
    );
    Ok(SimulateOutput {
        bq_csv,
        pr_csv,
        manifest,
    })
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub struct TrainOutput {
    pub model_files: Vec<PathBuf>,
    pub report: PathBuf,
    pub manifest: PathBuf,
}

/// Train the requested presets for the requested delay kinds on a
/// PR-mode dataset.
pub fn cmd_train(
    data: &Path,
    kinds: &[DelayKind],
    presets: &[ModelPreset],
    seed: u64,
    out_dir: &Path,
) -> Result<TrainOutput, PipelineError> {
    ensure_dir(out_dir)?;
    let dataset = read_dataset(data)?;
    if dataset.mode() != Mode::PacketReplication {
        return Err(PipelineError::Input(format!(
            "training is constrained to PR-mode data; {} has mode {}",
            data.display(),
            dataset.mode()
        )));
    }

    let mut model_files = Vec::new();
    let mut report_rows = Vec::new();
    for &kind in kinds {
        let extraction = to_features(&dataset, kind)?;
        for &preset in presets {
            let model = train_preset(
                preset,
                &extraction.features,
                &extraction.targets,
                seed,
                Some(kind),
            )?;
            let predictions = model.predict(&extraction.features)?;
            let train_rmse = crate::metrics::rmse(&extraction.targets, &predictions)?;
            let file = out_dir.join(format!("{}_{}.rdm", kind.slug(), preset.slug()));
            fs::write(&file, model.to_bytes())?;
            report_rows.push(serde_json::json!({
                "delay": kind.slug(),
                "preset": preset.slug(),
                "rows": extraction.targets.len(),
                "seed": seed,
                "train_rmse": train_rmse,
                "file": path_string(&file),
            }));
            println!(
                "train: {} {} on {} rows (train rmse {:.2}) -> {}",
                kind.slug(),
                preset.slug(),
                extraction.targets.len(),
                train_rmse,
                file.display()
            );
            model_files.push(file);
        }
    }

    let report = out_dir.join("training_report.json");
    fs::write(
        &report,
        serde_json::to_string_pretty(&report_rows).expect("report serializes"),
    )?;

    let data_bytes = fs::read(data)?;
    let digest = sha256_hex(&[b"train", &data_bytes, &seed.to_le_bytes()]);
    let manifest = RunManifest::new(
        "train",
        digest,
        Some(seed),
        vec![path_string(data)],
        model_files.iter().map(|p| path_string(p)).collect(),
    )
    .write(out_dir)?;
    Ok(TrainOutput {
        model_files,
        report,
        manifest,
    })
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

/// One parsed row of the evaluation table.
#[derive(Debug, Clone)]
pub struct EvalRow {
    pub kind: DelayKind,
    pub preset: ModelPreset,
    pub report: MetricsReport,
    /// Samples the metrics were computed on.
    pub rows: usize,
}

#[derive(Debug)]
pub struct EvaluateOutput {
    pub metrics_csv: PathBuf,
    pub manifest: PathBuf,
    pub rows: Vec<EvalRow>,
}

const METRICS_CSV_HEADER: &str =
    "delay,preset,rmse,r2,mae,precision,recall,threshold_ms,scope,rows";

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Evaluate trained models against a dataset; when `holdout_fraction` is
/// given, metrics are computed on the chronological tail only, and the
/// output labels the scope either way.
pub fn cmd_evaluate(
    model_files: &[PathBuf],
    data: &Path,
    holdout_fraction: Option<f64>,
    out_dir: &Path,
) -> Result<EvaluateOutput, PipelineError> {
    ensure_dir(out_dir)?;
    if model_files.is_empty() {
        return Err(PipelineError::Input("no model files given".into()));
    }
    let dataset = read_dataset(data)?;
    let (scope, eval_set) = match holdout_fraction {
        Some(fraction) => {
            let (_, test) = time_split(&dataset, fraction)?;
            (format!("holdout{fraction}"), test)
        }
        None => ("full".to_string(), dataset),
    };

    let mut rows = Vec::new();
    for file in model_files {
        let bytes = fs::read(file)
            .map_err(|e| PipelineError::Input(format!("cannot read {}: {e}", file.display())))?;
        let model = TrainedModel::from_bytes(&bytes)
            .map_err(|e| PipelineError::Input(format!("{}: {e}", file.display())))?;
        let kind = model.metadata.delay_kind.ok_or_else(|| {
            PipelineError::Input(format!("{}: model lacks a delay kind", file.display()))
        })?;
        let extraction = to_features(&eval_set, kind)?;
        let predictions = model.predict(&extraction.features)?;
        let report = evaluate(
            &extraction.targets,
            &predictions,
            kind.critical_threshold_ms(),
        )?;
        rows.push(EvalRow {
            kind,
            preset: model.preset,
            report,
            rows: extraction.targets.len(),
        });
    }
    rows.sort_by_key(|row| (row.kind.index(), row.preset.index()));

    let metrics_csv = out_dir.join("metrics.csv");
    let mut text = format!("{METRICS_CSV_HEADER}\n");
    for row in &rows {
        let r = &row.report;
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            row.kind.slug(),
            row.preset.slug(),
            r.rmse,
            fmt_opt(r.r2),
            r.mae,
            fmt_opt(r.precision),
            fmt_opt(r.recall),
            r.threshold_ms,
            scope,
            row.rows
        ));
    }
    fs::write(&metrics_csv, &text)?;

    print_eval_table(&rows, &scope);

    let data_bytes = fs::read(data)?;
    let digest = sha256_hex(&[b"evaluate", &data_bytes]);
    let manifest = RunManifest::new(
        "evaluate",
        digest,
        None,
        model_files
            .iter()
            .map(|p| path_string(p))
            .chain([path_string(data)])
            .collect(),
        vec![path_string(&metrics_csv)],
    )
    .write(out_dir)?;
    Ok(EvaluateOutput {
        metrics_csv,
        manifest,
        rows,
    })
}

fn print_eval_table(rows: &[EvalRow], scope: &str) {
    println!("evaluation scope: {scope}");
    let headers: Vec<String> = ModelPreset::ALL
        .iter()
        .map(|p| format!("{:>12}", p.display_name()))
        .collect();
    println!("{:<12} {}", "", headers.join(" "));
    for kind in DelayKind::ALL {
        let kind_rows: Vec<&EvalRow> = rows.iter().filter(|r| r.kind == kind).collect();
        if kind_rows.is_empty() {
            continue;
        }
        println!("{}", kind.display_name());
        let by_preset = |f: &dyn Fn(&MetricsReport) -> Option<f64>| -> Vec<Option<f64>> {
            ModelPreset::ALL
                .iter()
                .map(|p| {
                    kind_rows
                        .iter()
                        .find(|r| r.preset == *p)
                        .and_then(|r| f(&r.report))
                })
                .collect()
        };
        println!("{}", render_metric_line("RMSE", &by_preset(&|r| Some(r.rmse))));
        println!("{}", render_metric_line("R2", &by_preset(&|r| r.r2)));
        println!("{}", render_metric_line("MAE", &by_preset(&|r| Some(r.mae))));
        println!("{}", render_metric_line("Precision", &by_preset(&|r| r.precision)));
        println!("{}", render_metric_line("Recall", &by_preset(&|r| r.recall)));
    }
}

/// Parse a metrics CSV written by [`cmd_evaluate`].
pub fn read_eval_rows(path: &Path) -> Result<Vec<EvalRow>, PipelineError> {
    let text = fs::read_to_string(path)
        .map_err(|e| PipelineError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == METRICS_CSV_HEADER => {}
        _ => {
            return Err(PipelineError::Input(format!(
                "{}: not a metrics table",
                path.display()
            )))
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(PipelineError::Input(format!(
                "{} line {}: expected 10 fields",
                path.display(),
                i + 2
            )));
        }
        let parse_req = |raw: &str, what: &str| -> Result<f64, PipelineError> {
            raw.parse::<f64>().map_err(|_| {
                PipelineError::Input(format!("{} line {}: bad {what}", path.display(), i + 2))
            })
        };
        let parse_opt = |raw: &str, what: &str| -> Result<Option<f64>, PipelineError> {
            if raw.is_empty() {
                Ok(None)
            } else {
                parse_req(raw, what).map(Some)
            }
        };
        rows.push(EvalRow {
            kind: fields[0].parse().map_err(PipelineError::input)?,
            preset: fields[1].parse().map_err(PipelineError::input)?,
            report: MetricsReport {
                rmse: parse_req(fields[2], "rmse")?,
                r2: parse_opt(fields[3], "r2")?,
                mae: parse_req(fields[4], "mae")?,
                precision: parse_opt(fields[5], "precision")?,
                recall: parse_opt(fields[6], "recall")?,
                threshold_ms: parse_req(fields[7], "threshold_ms")?,
            },
            rows: fields[9].parse().unwrap_or(0),
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// select
// ---------------------------------------------------------------------------

/// Chosen preset and the candidate metrics for one delay kind.
#[derive(Debug, Clone)]
pub struct SelectionRow {
    pub kind: DelayKind,
    pub chosen: ModelPreset,
    pub candidates: Vec<(ModelPreset, MetricsReport)>,
}

#[derive(Debug, Clone)]
pub struct SelectionTable {
    pub rows: Vec<SelectionRow>,
}

impl SelectionTable {
    pub fn chosen_for(&self, kind: DelayKind) -> Option<ModelPreset> {
        self.rows.iter().find(|r| r.kind == kind).map(|r| r.chosen)
    }
}

/// Pick the minimum-RMSE preset per delay kind; ties resolve to the
/// earliest preset in declared order. Every kind present must carry a
/// complete set of presets.
pub fn select_best(rows: &[EvalRow]) -> Result<SelectionTable, PipelineError> {
    let mut by_kind: BTreeMap<usize, Vec<&EvalRow>> = BTreeMap::new();
    for row in rows {
        by_kind.entry(row.kind.index()).or_default().push(row);
    }
    if by_kind.is_empty() {
        return Err(PipelineError::Input("metrics table is empty".into()));
    }
    let mut selection = Vec::new();
    for (kind_index, kind_rows) in by_kind {
        let kind = DelayKind::ALL[kind_index];
        let mut candidates = Vec::new();
        for preset in ModelPreset::ALL {
            let row = kind_rows
                .iter()
                .find(|r| r.preset == preset)
                .ok_or_else(|| {
                    PipelineError::Input(format!(
                        "metrics table is missing {} for {}",
                        preset.slug(),
                        kind.slug()
                    ))
                })?;
            candidates.push((preset, row.report.clone()));
        }
        let chosen = candidates
            .iter()
            .min_by(|(_, a), (_, b)| a.rmse.total_cmp(&b.rmse))
            .map(|(p, _)| *p)
            .expect("candidates are complete");
        selection.push(SelectionRow {
            kind,
            chosen,
            candidates,
        });
    }
    Ok(SelectionTable { rows: selection })
}

#[derive(Debug)]
pub struct SelectOutput {
    pub selection_csv: PathBuf,
    pub manifest: PathBuf,
    pub table: SelectionTable,
}

const SELECTION_CSV_HEADER: &str = "delay,preset,rmse,chosen";

/// Select the best preset per delay kind from an evaluation table.
pub fn cmd_select(metrics_csv: &Path, out_dir: &Path) -> Result<SelectOutput, PipelineError> {
    ensure_dir(out_dir)?;
    let rows = read_eval_rows(metrics_csv)?;
    let table = select_best(&rows)?;

    let selection_csv = out_dir.join("selection.csv");
    let mut text = format!("{SELECTION_CSV_HEADER}\n");
    for row in &table.rows {
        for (preset, report) in &row.candidates {
            text.push_str(&format!(
                "{},{},{},{}\n",
                row.kind.slug(),
                preset.slug(),
                report.rmse,
                *preset == row.chosen
            ));
        }
        println!(
            "select: {} -> {} (rmse {:.2})",
            row.kind.slug(),
            row.chosen.slug(),
            row.candidates
                .iter()
                .find(|(p, _)| *p == row.chosen)
                .map(|(_, r)| r.rmse)
                .unwrap_or(f64::NAN)
        );
    }
    fs::write(&selection_csv, &text)?;

    let metrics_bytes = fs::read(metrics_csv)?;
    let digest = sha256_hex(&[b"select", &metrics_bytes]);
    let manifest = RunManifest::new(
        "select",
        digest,
        None,
        vec![path_string(metrics_csv)],
        vec![path_string(&selection_csv)],
    )
    .write(out_dir)?;
    Ok(SelectOutput {
        selection_csv,
        manifest,
        table,
    })
}

/// Parse a selection CSV written by [`cmd_select`] into kind -> preset.
pub fn read_selection(path: &Path) -> Result<BTreeMap<usize, ModelPreset>, PipelineError> {
    let text = fs::read_to_string(path)
        .map_err(|e| PipelineError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == SELECTION_CSV_HEADER => {}
        _ => {
            return Err(PipelineError::Input(format!(
                "{}: not a selection table",
                path.display()
            )))
        }
    }
    let mut chosen = BTreeMap::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(PipelineError::Input(format!(
                "{}: malformed selection row '{line}'",
                path.display()
            )));
        }
        if fields[3] == "true" {
            let kind: DelayKind = fields[0].parse().map_err(PipelineError::input)?;
            let preset: ModelPreset = fields[1].parse().map_err(PipelineError::input)?;
            chosen.insert(kind.index(), preset);
        }
    }
    if chosen.is_empty() {
        return Err(PipelineError::Input(format!(
            "{}: no chosen presets",
            path.display()
        )));
    }
    Ok(chosen)
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub struct GenerateOutput {
    pub generated_csv: PathBuf,
    pub manifest: PathBuf,
    pub skipped_kinds: Vec<DelayKind>,
}

/// Predicted delays are floored at this value to keep them positive.
const MIN_GENERATED_DELAY_MS: f64 = 0.001;

/// Generate a PR-style dataset for a BQ-measured campaign: positions,
/// KPIs, and speeds are copied; delays are replaced by the selected
/// models' predictions; the mode becomes `GEN_PR`.
pub fn cmd_generate(
    models_dir: &Path,
    selection_csv: &Path,
    bq_data: &Path,
    out_dir: &Path,
) -> Result<GenerateOutput, PipelineError> {
    ensure_dir(out_dir)?;
    let dataset = read_dataset(bq_data)?;
    if dataset.mode() != Mode::BestQuality {
        return Err(PipelineError::Input(format!(
            "generate expects BQ-mode input; {} has mode {}",
            bq_data.display(),
            dataset.mode()
        )));
    }
    let chosen = read_selection(selection_csv)?;

    // Output records start as delay-free copies tagged GEN_PR.
    let mut records: Vec<_> = dataset
        .records()
        .iter()
        .map(|r| {
            let mut copy = r.clone();
            copy.delays = DelayValues::new();
            copy.mode = Mode::GeneratedPr;
            copy
        })
        .collect();

    let mut skipped_kinds = Vec::new();
    let mut used_models = Vec::new();
    for kind in DelayKind::ALL {
        let Some(&preset) = chosen.get(&kind.index()) else {
            continue;
        };
        let model_file = models_dir.join(format!("{}_{}.rdm", kind.slug(), preset.slug()));
        if !model_file.exists() {
            eprintln!(
                "warning: no model for {} ({} missing); kind omitted",
                kind.slug(),
                model_file.display()
            );
            skipped_kinds.push(kind);
            continue;
        }
        let bytes = fs::read(&model_file)?;
        let model = TrainedModel::from_bytes(&bytes)
            .map_err(|e| PipelineError::Input(format!("{}: {e}", model_file.display())))?;
        // Predict wherever the BQ campaign sampled this kind.
        let extraction = to_features(&dataset, kind)?;
        let predictions = model.predict(&extraction.features)?;
        for (row, prediction) in extraction.row_index.iter().zip(predictions) {
            records[*row]
                .delays
                .set(kind, prediction.max(MIN_GENERATED_DELAY_MS));
        }
        used_models.push(model_file);
    }
    if used_models.is_empty() {
        return Err(PipelineError::Input(
            "no models found for any delay kind".into(),
        ));
    }

    // MA stays on its 10 s schedule: rows where the BQ campaign had no MA
    // sample got no prediction, which the dataset invariants require.
    let generated = Dataset::from_records(Mode::GeneratedPr, records)
        .map_err(|e| PipelineError::Internal(format!("generated dataset invalid: {e}")))?;
    let generated_csv = out_dir.join("generated_pr.csv");
    write_dataset(&generated_csv, &generated)?;
    println!(
        "generate: {} records -> {}",
        generated.len(),
        generated_csv.display()
    );

    let data_bytes = fs::read(bq_data)?;
    let digest = sha256_hex(&[b"generate", &data_bytes]);
    let manifest = RunManifest::new(
        "generate",
        digest,
        None,
        used_models
            .iter()
            .map(|p| path_string(p))
            .chain([path_string(bq_data), path_string(selection_csv)])
            .collect(),
        vec![path_string(&generated_csv)],
    )
    .write(out_dir)?;
    Ok(GenerateOutput {
        generated_csv,
        manifest,
        skipped_kinds,
    })
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

/// Which report table to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    Reliability,
    Regional,
    Summary,
}

impl ReportKind {
    pub fn slug(self) -> &'static str {
        match self {
            ReportKind::Reliability => "reliability",
            ReportKind::Regional => "regional",
            ReportKind::Summary => "summary",
        }
    }
}

#[derive(Debug)]
pub struct ReportOutput {
    pub report_csv: PathBuf,
    pub manifest: PathBuf,
    pub rendered: String,
}

/// Produce one of the three report tables over one or more datasets.
pub fn cmd_report(
    data: &[PathBuf],
    kind: ReportKind,
    boundary_lon: f64,
    out_dir: &Path,
) -> Result<ReportOutput, PipelineError> {
    ensure_dir(out_dir)?;
    if data.is_empty() {
        return Err(PipelineError::Input("no datasets given".into()));
    }
    let datasets: Vec<Dataset> = data
        .iter()
        .map(|p| read_dataset(p))
        .collect::<Result<_, _>>()?;

    let (csv_text, rendered) = match kind {
        ReportKind::Reliability => {
            let rows = reliability_report(&datasets)?;
            let mut csv = String::from("delay,mode,count,percentage\n");
            for row in &rows {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    row.kind.slug(),
                    row.mode_label,
                    row.count,
                    row.percentage
                ));
            }
            (csv, render_reliability(&rows))
        }
        ReportKind::Regional => {
            let mut slices = Vec::new();
            for dataset in &datasets {
                let (east, west) = crate::data::region_split(dataset, boundary_lon)?;
                let mode = dataset.mode().display_name();
                slices.push((format!("{mode} East"), east));
                slices.push((format!("{mode} West"), west));
            }
            let slice_refs: Vec<(String, &Dataset)> = slices
                .iter()
                .filter(|(_, ds)| !ds.is_empty())
                .map(|(label, ds)| (label.clone(), ds))
                .collect();
            let rows = summary_report(&slice_refs)?;
            let mut csv = String::from("delay,slice,mean,min,q25,median,q75,max,n\n");
            for row in &rows {
                let s = &row.stats;
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    row.kind.slug(),
                    row.label,
                    s.mean,
                    s.min,
                    s.q25,
                    s.median,
                    s.q75,
                    s.max,
                    row.n
                ));
            }
            (csv, render_summary(&rows))
        }
        ReportKind::Summary => {
            let slices: Vec<(String, &Dataset)> = datasets
                .iter()
                .map(|ds| (ds.mode().display_name().to_string(), ds))
                .collect();
            let rows = summary_report(&slices)?;
            let mut csv = String::from("delay,slice,mean,min,q25,median,q75,max,n\n");
            for row in &rows {
                let s = &row.stats;
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    row.kind.slug(),
                    row.label,
                    s.mean,
                    s.min,
                    s.q25,
                    s.median,
                    s.q75,
                    s.max,
                    row.n
                ));
            }
            (csv, render_summary(&rows))
        }
    };

    let report_csv = out_dir.join(format!("report_{}.csv", kind.slug()));
    fs::write(&report_csv, &csv_text)?;
    print!("{rendered}");

    let mut digest_parts: Vec<Vec<u8>> = vec![b"report".to_vec()];
    for path in data {
        digest_parts.push(fs::read(path)?);
    }
    let part_refs: Vec<&[u8]> = digest_parts.iter().map(|v| v.as_slice()).collect();
    let manifest = RunManifest::new(
        "report",
        sha256_hex(&part_refs),
        None,
        data.iter().map(|p| path_string(p)).collect(),
        vec![path_string(&report_csv)],
    )
    .write(out_dir)?;
    Ok(ReportOutput {
        report_csv,
        manifest,
        rendered,
    })
}

// ---------------------------------------------------------------------------
// export-geo
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub struct ExportGeoOutput {
    pub geojson: PathBuf,
    pub manifest: PathBuf,
}

/// Export one delay kind of a dataset as a GeoJSON FeatureCollection.
pub fn cmd_export_geo(
    data: &Path,
    kind: DelayKind,
    out_dir: &Path,
) -> Result<ExportGeoOutput, PipelineError> {
    ensure_dir(out_dir)?;
    let dataset = read_dataset(data)?;
    let collection = export_geojson(&dataset, kind)?;
    let geojson = out_dir.join(format!("{}.geojson", kind.slug()));
    fs::write(
        &geojson,
        serde_json::to_string_pretty(&collection).expect("geojson serializes"),
    )?;
    println!(
        "export-geo: {} features -> {}",
        collection["features"].as_array().map_or(0, |f| f.len()),
        geojson.display()
    );

    let data_bytes = fs::read(data)?;
    let digest = sha256_hex(&[b"export-geo", &data_bytes]);
    let manifest = RunManifest::new(
        "export-geo",
        digest,
        None,
        vec![path_string(data)],
        vec![path_string(&geojson)],
    )
    .write(out_dir)?;
    Ok(ExportGeoOutput { geojson, manifest })
}
