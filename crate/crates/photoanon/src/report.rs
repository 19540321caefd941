//! Evaluation reports: canonical JSON plus CSV and Markdown renders.
//!
//! The JSON file is the machine interface: keys sorted at every level, no
//! timestamps or host details, so identical inputs produce identical bytes
//! regardless of how the run was parallelized. The CSV render keeps full
//! precision (separate mean/std/count columns per metric); the Markdown
//! render is the human view with `mean ± std` cells.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intrinsic::BilateralParams;
use crate::metrics::{Aggregate, DEFAULT_REID_THRESHOLD};
use crate::pipeline::{PipelineConfig, DEFAULT_PYRAMID_DEPTH};

/// Per-pair metrics an evaluation run computes, in report order.
pub const PAIR_METRICS: [&str; 10] = [
    "delta_c",
    "delta_e2000",
    "delta_l",
    "embedding_cosine",
    "expression_error",
    "landmark_error",
    "mse_ab",
    "mse_l",
    "si_l2",
    "si_mse",
];

/// Settings a run echoes into its report.
///
/// The worker count is deliberately not serialized: parallelism must not
/// change report bytes, so it is an execution detail, not configuration.
/// Absent fields fall back to defaults, so a config file can set just the
/// keys it cares about.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub relight: bool,
    pub pyramid: bool,
    pub color_transfer: bool,
    pub levels: usize,
    /// Bilateral overrides; `None` means image-scaled defaults.
    pub sigma_spatial: Option<f64>,
    pub sigma_range: Option<f64>,
    pub reid_threshold: f64,
    /// Metric names the run computes per pair.
    pub metrics: Vec<String>,
    #[serde(skip)]
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            relight: true,
            pyramid: true,
            color_transfer: true,
            levels: DEFAULT_PYRAMID_DEPTH,
            sigma_spatial: None,
            sigma_range: None,
            reid_threshold: DEFAULT_REID_THRESHOLD,
            metrics: PAIR_METRICS.iter().map(|s| s.to_string()).collect(),
            workers: 1,
        }
    }
}

impl RunConfig {
    /// Bilateral parameters for an image of the given dims, with any sigma
    /// overrides applied; the window radius follows the spatial sigma.
    pub fn bilateral_for(&self, height: usize, width: usize) -> BilateralParams {
        let mut params = BilateralParams::for_dims(height, width);
        if let Some(s) = self.sigma_spatial {
            params.sigma_spatial = s;
            params.radius = (2.0 * s).ceil() as usize;
        }
        if let Some(r) = self.sigma_range {
            params.sigma_range = r;
        }
        params
    }

    /// The stage selection for a pair of the given dims.
    pub fn pipeline_for(&self, height: usize, width: usize) -> PipelineConfig {
        PipelineConfig {
            relight: self.relight,
            pyramid: self.pyramid,
            color_transfer: self.color_transfer,
            levels: self.levels,
            bilateral: Some(self.bilateral_for(height, width)),
        }
    }
}

/// One manifest row's results: computed metric values, reasons for any
/// metric that could not be computed, and diagnostic flags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PairResult {
    pub pair_id: String,
    pub metrics: BTreeMap<String, f64>,
    pub skipped: BTreeMap<String, String>,
    pub flags: Vec<String>,
}

/// A full evaluation: per-pair records, aggregates recomputable from them,
/// dataset-level metrics, and the configuration echo.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub version: String,
    pub config: RunConfig,
    pub pairs: Vec<PairResult>,
    pub aggregates: BTreeMap<String, Aggregate>,
    pub dataset: BTreeMap<String, f64>,
}

impl MetricReport {
    pub fn new(config: RunConfig) -> MetricReport {
        MetricReport {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            pairs: Vec::new(),
            aggregates: BTreeMap::new(),
            dataset: BTreeMap::new(),
        }
    }

    /// Recompute `aggregates` from the per-pair records, in manifest order.
    pub fn recompute_aggregates(&mut self) {
        self.aggregates.clear();
        let mut by_metric: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        for pair in &self.pairs {
            for (name, value) in &pair.metrics {
                by_metric.entry(name).or_default().push(*value);
            }
        }
        for (name, values) in by_metric {
            if let Some(agg) = crate::metrics::aggregate(&values) {
                self.aggregates.insert(name.to_string(), agg);
            }
        }
    }
}

/// Serialize with sorted keys and a fixed layout; the canonical byte form.
pub fn to_canonical_json(report: &MetricReport) -> Result<String> {
    let value = serde_json::to_value(report)
        .map_err(|e| Error::Parse(format!("report serialization: {e}")))?;
    let mut out = serde_json::to_string_pretty(&value)
        .map_err(|e| Error::Parse(format!("report serialization: {e}")))?;
    out.push('\n');
    Ok(out)
}

pub fn write_report(report: &MetricReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_canonical_json(report)?).map_err(|e| Error::io(path, e))
}

pub fn read_report(path: impl AsRef<Path>) -> Result<MetricReport> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Sorted union of the aggregate and dataset metric names across runs.
fn column_names(runs: &[(String, MetricReport)]) -> (Vec<String>, Vec<String>) {
    let mut agg = std::collections::BTreeSet::new();
    let mut ds = std::collections::BTreeSet::new();
    for (_, report) in runs {
        agg.extend(report.aggregates.keys().cloned());
        ds.extend(report.dataset.keys().cloned());
    }
    (agg.into_iter().collect(), ds.into_iter().collect())
}

/// One row per run; aggregates as full-precision mean/std/count column
/// triples so the table reparses to exactly the JSON values.
pub fn render_csv(runs: &[(String, MetricReport)]) -> String {
    let (agg_names, ds_names) = column_names(runs);
    let mut header = vec!["run".to_string()];
    for name in &agg_names {
        header.push(format!("{name}_mean"));
        header.push(format!("{name}_std"));
        header.push(format!("{name}_count"));
    }
    header.extend(ds_names.iter().cloned());

    let mut out = header.join(",") + "\n";
    for (label, report) in runs {
        let mut row = vec![label.clone()];
        for name in &agg_names {
            match report.aggregates.get(name) {
                Some(a) => {
                    row.push(a.mean.to_string());
                    row.push(a.std.to_string());
                    row.push(a.count.to_string());
                }
                None => row.extend([String::new(), String::new(), String::new()]),
            }
        }
        for name in &ds_names {
            row.push(
                report
                    .dataset
                    .get(name)
                    .map(f64::to_string)
                    .unwrap_or_default(),
            );
        }
        out += &(row.join(",") + "\n");
    }
    out
}

/// One row per run with `mean ± std` cells; the table layout of the
/// evaluation write-up.
pub fn render_markdown(runs: &[(String, MetricReport)]) -> String {
    let (agg_names, ds_names) = column_names(runs);
    let mut header = vec!["run".to_string()];
    header.extend(agg_names.iter().cloned());
    header.extend(ds_names.iter().cloned());

    let mut out = format!("| {} |\n", header.join(" | "));
    out += &format!("|{}\n", " --- |".repeat(header.len()));
    for (label, report) in runs {
        let mut row = vec![label.clone()];
        for name in &agg_names {
            row.push(
                report
                    .aggregates
                    .get(name)
                    .map(|a| a.to_string())
                    .unwrap_or_default(),
            );
        }
        for name in &ds_names {
            row.push(
                report
                    .dataset
                    .get(name)
                    .map(|v| format!("{v:.4}"))
                    .unwrap_or_default(),
            );
        }
        out += &format!("| {} |\n", row.join(" | "));
    }
    out
}
