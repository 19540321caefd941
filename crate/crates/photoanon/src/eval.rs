//! Batch evaluation: score every manifest pair, then the dataset.
//!
//! Evaluation never runs the repair pipeline; it scores the manifest's
//! images exactly as stored, so the same evaluator measures raw anonymizer
//! output and post-processed output alike. Pairs are scored in parallel but
//! collected in manifest order, and nothing time- or thread-dependent
//! enters the report, so a rerun is byte-identical at any worker count.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::intrinsic::{decompose, load_shading};
use crate::landmarks::load_landmarks;
use crate::manifest::PairRecord;
use crate::metrics::{
    color_metrics, cosine_similarity, detection_rate, emotion_agreement, expression_error, fid,
    landmark_error, load_detections, load_embedding, load_feature_matrix, load_labels, reid_rate,
    si_l2, si_mse,
};
use crate::raster::{load_image, load_mask, ImageF, Mask};
use crate::report::{MetricReport, PairResult, RunConfig, PAIR_METRICS};

/// Dataset-level inputs that are not per-pair sidecars: feature matrices
/// for the distribution distance and a detector's hit table.
#[derive(Clone, Debug, Default)]
pub struct DatasetInputs {
    pub features_real: Option<PathBuf>,
    pub features_fake: Option<PathBuf>,
    pub detections: Option<PathBuf>,
}

type LabelTables = HashMap<PathBuf, HashMap<String, String>>;

fn requested(config: &RunConfig, name: &str) -> bool {
    config.metrics.iter().any(|m| m == name)
}

fn load_pair_images(record: &PairRecord) -> Result<(ImageF, ImageF, Option<Mask>)> {
    let original = load_image(&record.original)?;
    let anonymized = load_image(&record.anonymized)?;
    if (original.height(), original.width()) != (anonymized.height(), anonymized.width()) {
        return Err(Error::Shape(format!(
            "pair {}: dims {}x{} vs {}x{}",
            record.pair_id,
            original.height(),
            original.width(),
            anonymized.height(),
            anonymized.width()
        )));
    }
    let mask = record.mask.as_deref().map(load_mask).transpose()?;
    Ok((original, anonymized, mask))
}

fn evaluate_pair(record: &PairRecord, config: &RunConfig) -> Result<PairResult> {
    let (original, anonymized, mask) = load_pair_images(record)?;
    let mask = mask.as_ref();
    let mut result = PairResult {
        pair_id: record.pair_id.clone(),
        ..PairResult::default()
    };

    if requested(config, "si_mse") {
        let score = si_mse(&original, &anonymized, mask)?;
        result.metrics.insert("si_mse".into(), score.value);
        if score.test_all_zero {
            result.flags.push("si_mse_test_all_zero".into());
        }
    }

    if requested(config, "si_l2") {
        // Shading sidecars win; otherwise estimate both maps here.
        let (s_o, s_a) = match (&record.shading_o, &record.shading_a) {
            (Some(po), Some(pa)) => (load_shading(po)?, load_shading(pa)?),
            _ => {
                let params = config.bilateral_for(original.height(), original.width());
                (
                    decompose(&original, &params)?.1,
                    decompose(&anonymized, &params)?.1,
                )
            }
        };
        let score = si_l2(&s_o, &s_a, mask)?;
        result.metrics.insert("si_l2".into(), score.value);
        if score.test_all_zero {
            result.flags.push("si_l2_test_all_zero".into());
        }
    }

    let color_names = ["delta_l", "delta_c", "delta_e2000", "mse_l", "mse_ab"];
    if color_names.iter().any(|n| requested(config, n)) {
        let cm = color_metrics(&original, &anonymized, mask)?;
        let values = [
            cm.mean_delta_l,
            cm.mean_delta_c,
            cm.mean_delta_e2000,
            cm.mse_l,
            cm.mse_ab,
        ];
        for (name, value) in color_names.iter().zip(values) {
            if requested(config, name) {
                result.metrics.insert((*name).into(), value);
            }
        }
    }

    let landmarks_requested =
        requested(config, "landmark_error") || requested(config, "expression_error");
    if landmarks_requested {
        match (&record.landmarks_o, &record.landmarks_a) {
            (Some(po), Some(pa)) => {
                let lm_o = load_landmarks(po)?;
                let lm_a = load_landmarks(pa)?;
                if requested(config, "landmark_error") {
                    result
                        .metrics
                        .insert("landmark_error".into(), landmark_error(&lm_o, &lm_a)?);
                }
                if requested(config, "expression_error") {
                    result
                        .metrics
                        .insert("expression_error".into(), expression_error(&lm_o, &lm_a)?);
                }
            }
            _ => {
                for name in ["landmark_error", "expression_error"] {
                    if requested(config, name) {
                        result
                            .skipped
                            .insert(name.into(), "no landmark sidecars".into());
                    }
                }
            }
        }
    }

    if requested(config, "embedding_cosine") {
        match (&record.emb_o, &record.emb_a) {
            (Some(po), Some(pa)) => {
                let cos = cosine_similarity(&load_embedding(po)?, &load_embedding(pa)?)?;
                result.metrics.insert("embedding_cosine".into(), cos);
            }
            _ => {
                result
                    .skipped
                    .insert("embedding_cosine".into(), "no embedding sidecars".into());
            }
        }
    }

    result.flags.sort();
    Ok(result)
}

/// Load each distinct label table once; rows share files.
fn load_label_tables(records: &[PairRecord]) -> Result<LabelTables> {
    let mut tables = LabelTables::new();
    for record in records {
        for path in [&record.label_o, &record.label_a].into_iter().flatten() {
            if !tables.contains_key(path.as_path()) {
                let table = load_labels(path)?.into_iter().collect();
                tables.insert(path.clone(), table);
            }
        }
    }
    Ok(tables)
}

/// Attach emotion agreement: pairs contribute when both label tables list
/// their id; everything else gets a skip marker.
fn apply_emotion_metric(
    records: &[PairRecord],
    pairs: &mut [PairResult],
    tables: &LabelTables,
    report: &mut MetricReport,
) -> Result<()> {
    let mut labeled = Vec::new();
    for (record, pair) in records.iter().zip(pairs.iter_mut()) {
        let (Some(po), Some(pa)) = (&record.label_o, &record.label_a) else {
            pair.skipped
                .insert("emotion_agreement".into(), "no label tables".into());
            continue;
        };
        let lookup = |p: &Path| tables[p].get(&record.pair_id);
        match (lookup(po), lookup(pa)) {
            (Some(lo), Some(la)) => labeled.push((lo.clone(), la.clone())),
            _ => {
                pair.skipped.insert(
                    "emotion_agreement".into(),
                    "pair_id missing from label table".into(),
                );
            }
        }
    }
    if !labeled.is_empty() {
        report
            .dataset
            .insert("emotion_agreement".into(), emotion_agreement(&labeled)?);
    }
    Ok(())
}

fn apply_dataset_inputs(inputs: &DatasetInputs, report: &mut MetricReport) -> Result<()> {
    match (&inputs.features_real, &inputs.features_fake) {
        (Some(real), Some(fake)) => {
            let d = fid(&load_feature_matrix(real)?, &load_feature_matrix(fake)?)?;
            report.dataset.insert("fid".into(), d);
        }
        (None, None) => {}
        _ => {
            return Err(Error::Parse(
                "feature matrices must be given for both distributions or neither".into(),
            ));
        }
    }
    if let Some(path) = &inputs.detections {
        let rate = detection_rate(&load_detections(path)?)?;
        report.dataset.insert("detection_rate".into(), rate);
    }
    Ok(())
}

/// Evaluate a manifest and assemble the full report.
pub fn evaluate(
    records: &[PairRecord],
    config: &RunConfig,
    inputs: &DatasetInputs,
) -> Result<MetricReport> {
    for name in &config.metrics {
        if !PAIR_METRICS.contains(&name.as_str()) {
            return Err(Error::Parse(format!("unknown metric {name:?}")));
        }
    }
    if records.is_empty() {
        return Err(Error::NothingEvaluable("manifest has no pairs".into()));
    }

    let tables = load_label_tables(records)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .map_err(|e| Error::Parse(format!("worker pool: {e}")))?;
    let outcomes: Vec<Result<PairResult>> = pool.install(|| {
        records
            .par_iter()
            .map(|record| evaluate_pair(record, config))
            .collect()
    });
    let mut pairs = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        pairs.push(outcome?);
    }

    let mut report = MetricReport::new(config.clone());
    apply_emotion_metric(records, &mut pairs, &tables, &mut report)?;

    let cosines: Vec<f64> = pairs
        .iter()
        .filter_map(|p| p.metrics.get("embedding_cosine"))
        .copied()
        .collect();
    if !cosines.is_empty() {
        report
            .dataset
            .insert("reid_rate".into(), reid_rate(&cosines, config.reid_threshold)?);
    }

    apply_dataset_inputs(inputs, &mut report)?;

    report.pairs = pairs;
    report.recompute_aggregates();
    Ok(report)
}
