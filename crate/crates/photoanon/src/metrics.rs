//! Evaluation metrics for (original, anonymized) face pairs.
//!
//! Covers lighting (scale-invariant MSE and L2 on shadings), color (Lab
//! deltas), geometry (landmark errors), privacy (embedding similarity and
//! re-identification rate), realism (FID over externally computed feature
//! sets) and categorical agreement (detection rate, emotion labels). All
//! heavy perception models stay outside: this module consumes their
//! exports (embeddings, features, detections, labels) from plain files.
//!
//! Everything here is pure; batch drivers may fan pairs out to threads and
//! still get identical numbers.

use std::fmt;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::color::{delta_c, delta_e2000, delta_l, rgb_to_lab, ColorLab};
use crate::error::{Error, Result};
use crate::intrinsic::ShadingMap;
use crate::landmarks::LandmarkSet;
use crate::raster::{ImageF, Mask};

/// Similarity above which a pair counts as re-identified, unless the caller
/// picks another operating point.
pub const DEFAULT_REID_THRESHOLD: f64 = 0.5;

/// Result of a scale-invariant comparison: the residual after the optimal
/// global gain, the gain itself, and whether the gain was defined at all.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaleInvariantScore {
    pub value: f64,
    /// Least-squares gain applied to the test signal.
    pub alpha: f64,
    /// True when the test signal had no energy: alpha is forced to 0 and
    /// `value` degrades to the reference energy. Reports flag these pairs.
    pub test_all_zero: bool,
}

fn check_mask_dims(mask: &Mask, height: usize, width: usize) -> Result<()> {
    if (mask.height(), mask.width()) != (height, width) {
        return Err(Error::Shape(format!(
            "mask {}x{} vs image {}x{}",
            mask.height(),
            mask.width(),
            height,
            width
        )));
    }
    Ok(())
}

fn masked_pixel_count(mask: Option<&Mask>, total: usize) -> Result<usize> {
    let n = match mask {
        Some(m) => m.count_selected(),
        None => total,
    };
    if n == 0 {
        return Err(Error::Degenerate("mask selects no pixels".into()));
    }
    Ok(n)
}

/// Scale-invariant mean squared error between a reference image and a test
/// image: `min_alpha ||ref - alpha*test||^2 / N` with N the number of
/// participating pixels (channel residuals summed inside the norm).
///
/// The minimizing gain has the closed form `<ref,test>/<test,test>` over
/// the masked samples of all three channels pooled. A test image with no
/// energy leaves the gain undefined; the score then reports the reference
/// energy with `alpha = 0` and the `test_all_zero` flag set.
pub fn si_mse(
    reference: &ImageF,
    test: &ImageF,
    mask: Option<&Mask>,
) -> Result<ScaleInvariantScore> {
    if (reference.height(), reference.width()) != (test.height(), test.width()) {
        return Err(Error::Shape(format!(
            "si_mse pair {}x{} vs {}x{}",
            reference.height(),
            reference.width(),
            test.height(),
            test.width()
        )));
    }
    if let Some(m) = mask {
        check_mask_dims(m, reference.height(), reference.width())?;
    }
    let pixels = reference.height() * reference.width();
    let n = masked_pixel_count(mask, pixels)?;
    let selected = |i: usize| mask.is_none_or(|m| m.data()[i]);

    let (o, a) = (reference.data(), test.data());
    let mut cross = 0.0;
    let mut energy = 0.0;
    for i in 0..pixels {
        if selected(i) {
            for c in 0..3 {
                cross += o[i * 3 + c] * a[i * 3 + c];
                energy += a[i * 3 + c] * a[i * 3 + c];
            }
        }
    }
    let test_all_zero = energy == 0.0;
    let alpha = if test_all_zero { 0.0 } else { cross / energy };
    let mut residual = 0.0;
    for i in 0..pixels {
        if selected(i) {
            for c in 0..3 {
                let d = o[i * 3 + c] - alpha * a[i * 3 + c];
                residual += d * d;
            }
        }
    }
    Ok(ScaleInvariantScore {
        value: residual / n as f64,
        alpha,
        test_all_zero,
    })
}

/// Scale-invariant L2 distance between two shading maps:
/// `sqrt(||S_ref - alpha*S_test||^2)` with the same closed-form gain as
/// [`si_mse`] and no size normalization, so the figure grows with the
/// masked area.
pub fn si_l2(
    reference: &ShadingMap,
    test: &ShadingMap,
    mask: Option<&Mask>,
) -> Result<ScaleInvariantScore> {
    if (reference.height(), reference.width()) != (test.height(), test.width()) {
        return Err(Error::Shape(format!(
            "si_l2 pair {}x{} vs {}x{}",
            reference.height(),
            reference.width(),
            test.height(),
            test.width()
        )));
    }
    if let Some(m) = mask {
        check_mask_dims(m, reference.height(), reference.width())?;
    }
    masked_pixel_count(mask, reference.data().len())?;
    let selected = |i: usize| mask.is_none_or(|m| m.data()[i]);

    let (o, a) = (reference.data(), test.data());
    let mut cross = 0.0;
    let mut energy = 0.0;
    for i in 0..o.len() {
        if selected(i) {
            cross += o[i] * a[i];
            energy += a[i] * a[i];
        }
    }
    let test_all_zero = energy == 0.0;
    let alpha = if test_all_zero { 0.0 } else { cross / energy };
    let mut residual = 0.0;
    for i in 0..o.len() {
        if selected(i) {
            let d = o[i] - alpha * a[i];
            residual += d * d;
        }
    }
    Ok(ScaleInvariantScore {
        value: residual.sqrt(),
        alpha,
        test_all_zero,
    })
}

fn normalized_l1(
    original: &[(f64, f64)],
    anonymized: &[(f64, f64)],
    interocular: f64,
) -> f64 {
    let total: f64 = original
        .iter()
        .zip(anonymized)
        .map(|(o, a)| (o.0 - a.0).abs() + (o.1 - a.1).abs())
        .sum();
    total / interocular / original.len() as f64
}

/// Mean per-point L1 landmark displacement over all 68 points, normalized
/// by the interocular distance of the original set.
pub fn landmark_error(original: &LandmarkSet, anonymized: &LandmarkSet) -> Result<f64> {
    let iod = original.interocular_distance()?;
    Ok(normalized_l1(original.points(), anonymized.points(), iod))
}

/// Same as [`landmark_error`] restricted to the 51 expression points, still
/// normalized by the full-face interocular distance of the original set.
pub fn expression_error(original: &LandmarkSet, anonymized: &LandmarkSet) -> Result<f64> {
    let iod = original.interocular_distance()?;
    Ok(normalized_l1(
        original.expression_points(),
        anonymized.expression_points(),
        iod,
    ))
}

/// Cosine of the angle between two identity embeddings.
pub fn cosine_similarity(e1: &[f64], e2: &[f64]) -> Result<f64> {
    if e1.len() != e2.len() {
        return Err(Error::Shape(format!(
            "embedding dims {} vs {}",
            e1.len(),
            e2.len()
        )));
    }
    let dot: f64 = e1.iter().zip(e2).map(|(a, b)| a * b).sum();
    let n1 = e1.iter().map(|v| v * v).sum::<f64>().sqrt();
    let n2 = e2.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n1 <= 1e-12 || n2 <= 1e-12 {
        return Err(Error::Degenerate(
            "cosine similarity of a zero-norm embedding".into(),
        ));
    }
    Ok(dot / (n1 * n2))
}

/// Percentage of similarity scores strictly above the threshold. A score
/// exactly at the threshold does not count as re-identified.
pub fn reid_rate(similarities: &[f64], threshold: f64) -> Result<f64> {
    if similarities.is_empty() {
        return Err(Error::NothingEvaluable("no similarity scores".into()));
    }
    let hits = similarities.iter().filter(|&&s| s > threshold).count();
    Ok(100.0 * hits as f64 / similarities.len() as f64)
}

/// Feature vectors of N samples in D dims, one sample per row. N >= 2 so a
/// sample covariance exists.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    inner: DMatrix<f64>,
}

impl FeatureMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<FeatureMatrix> {
        if rows.len() < 2 {
            return Err(Error::Shape(format!(
                "feature matrix needs at least 2 samples, got {}",
                rows.len()
            )));
        }
        let dims = rows[0].len();
        if dims == 0 {
            return Err(Error::Shape("feature matrix has zero columns".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dims {
                return Err(Error::Shape(format!(
                    "feature row {i} has {} values, expected {dims}",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::Parse(format!(
                    "feature row {i} contains non-finite value {v}"
                )));
            }
        }
        let inner =
            DMatrix::from_row_iterator(rows.len(), dims, rows.into_iter().flatten());
        Ok(FeatureMatrix { inner })
    }

    pub fn samples(&self) -> usize {
        self.inner.nrows()
    }

    pub fn dims(&self) -> usize {
        self.inner.ncols()
    }
}

/// Mean vector and sample covariance (ddof = 1) of a feature set: the
/// Gaussian the Frechet distance compares.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianSummary {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

/// Fit the Gaussian summary of a feature set.
pub fn gaussian_summary(features: &FeatureMatrix) -> GaussianSummary {
    let x = &features.inner;
    let (n, d) = (x.nrows(), x.ncols());
    let mut mean = DVector::zeros(d);
    for j in 0..d {
        mean[j] = x.column(j).sum() / n as f64;
    }
    let mut centered = x.clone();
    for j in 0..d {
        for i in 0..n {
            centered[(i, j)] -= mean[j];
        }
    }
    let cov = (centered.transpose() * &centered) / (n as f64 - 1.0);
    GaussianSummary { mean, cov }
}

/// Eigenvalues of a symmetric matrix, floored at zero. Covariances are PSD
/// exactly; the floor absorbs the small negative residue eigensolvers
/// leave behind.
fn psd_eigen(m: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let values = eig.eigenvalues.map(|v| v.max(0.0));
    (eig.eigenvectors, values)
}

fn sqrt_psd(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (vectors, values) = psd_eigen(m);
    let sqrt_diag = DMatrix::from_diagonal(&values.map(f64::sqrt));
    &vectors * sqrt_diag * vectors.transpose()
}

/// Frechet distance between the Gaussian summaries of two feature sets:
/// `||mu1 - mu2||^2 + Tr(C1 + C2 - 2 sqrt(C1^1/2 C2 C1^1/2))`, floored at 0.
///
/// The square root goes through the symmetric product form so one
/// eigendecomposition of a PSD matrix suffices; its trace is the sum of the
/// square roots of the eigenvalues, so the root matrix itself is never
/// materialized.
pub fn fid_from_summaries(a: &GaussianSummary, b: &GaussianSummary) -> Result<f64> {
    if a.mean.len() != b.mean.len() {
        return Err(Error::Shape(format!(
            "feature dims {} vs {}",
            a.mean.len(),
            b.mean.len()
        )));
    }
    for (name, s) in [("first", a), ("second", b)] {
        let asym = (&s.cov - s.cov.transpose()).abs().max();
        if asym > 1e-9 {
            return Err(Error::Degenerate(format!(
                "{name} covariance asymmetric by {asym}"
            )));
        }
    }
    let mean_term = (&a.mean - &b.mean).norm_squared();
    let trace_term = a.cov.trace() + b.cov.trace();
    let a_half = sqrt_psd(&a.cov);
    let product = &a_half * &b.cov * &a_half;
    let (_, values) = psd_eigen(&product);
    let cross: f64 = values.iter().map(|v| v.sqrt()).sum();
    Ok((mean_term + trace_term - 2.0 * cross).max(0.0))
}

/// Frechet Inception Distance between two feature sets (features extracted
/// by whatever network the caller trusts).
pub fn fid(real: &FeatureMatrix, fake: &FeatureMatrix) -> Result<f64> {
    if real.dims() != fake.dims() {
        return Err(Error::Shape(format!(
            "feature dims {} vs {}",
            real.dims(),
            fake.dims()
        )));
    }
    fid_from_summaries(&gaussian_summary(real), &gaussian_summary(fake))
}

/// One row of a face-detector export.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectionRecord {
    pub image_id: String,
    pub detected: bool,
}

/// Percentage of records with a successful detection.
pub fn detection_rate(records: &[DetectionRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::NothingEvaluable("no detection records".into()));
    }
    let hits = records.iter().filter(|r| r.detected).count();
    Ok(100.0 * hits as f64 / records.len() as f64)
}

/// Percentage of pairs whose two labels match exactly (case-sensitive
/// string equality; labels are opaque).
pub fn emotion_agreement(pairs: &[(String, String)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::NothingEvaluable("no label pairs".into()));
    }
    let hits = pairs.iter().filter(|(a, b)| a == b).count();
    Ok(100.0 * hits as f64 / pairs.len() as f64)
}

/// Perceptual color differences between two aligned images.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ColorMetrics {
    /// Mean |L_o - L_a| over the mask.
    pub mean_delta_l: f64,
    /// Mean |C_o - C_a| over the mask, C = sqrt(a^2 + b^2).
    pub mean_delta_c: f64,
    /// Mean CIEDE2000 difference over the mask.
    pub mean_delta_e2000: f64,
    /// Mean squared lightness difference on the L/100 scale.
    pub mse_l: f64,
    /// Mean squared (a,b)-plane distance on the /128 scale.
    pub mse_ab: f64,
}

/// Color metrics straight from Lab samples; `mask` selects indices.
pub fn color_metrics_lab(
    original: &[ColorLab],
    anonymized: &[ColorLab],
    mask: Option<&Mask>,
) -> Result<ColorMetrics> {
    if original.len() != anonymized.len() {
        return Err(Error::Shape(format!(
            "lab sample counts {} vs {}",
            original.len(),
            anonymized.len()
        )));
    }
    if let Some(m) = mask {
        if m.data().len() != original.len() {
            return Err(Error::Shape(format!(
                "mask selects {} samples, images have {}",
                m.data().len(),
                original.len()
            )));
        }
    }
    let n = masked_pixel_count(mask, original.len())? as f64;
    let selected = |i: usize| mask.is_none_or(|m| m.data()[i]);
    let mut out = ColorMetrics {
        mean_delta_l: 0.0,
        mean_delta_c: 0.0,
        mean_delta_e2000: 0.0,
        mse_l: 0.0,
        mse_ab: 0.0,
    };
    for i in 0..original.len() {
        if !selected(i) {
            continue;
        }
        let (o, a) = (&original[i], &anonymized[i]);
        out.mean_delta_l += delta_l(o, a);
        out.mean_delta_c += delta_c(o, a);
        out.mean_delta_e2000 += delta_e2000(o, a);
        let dl = (o.l - a.l) / 100.0;
        out.mse_l += dl * dl;
        let (da, db) = ((o.a - a.a) / 128.0, (o.b - a.b) / 128.0);
        out.mse_ab += da * da + db * db;
    }
    out.mean_delta_l /= n;
    out.mean_delta_c /= n;
    out.mean_delta_e2000 /= n;
    out.mse_l /= n;
    out.mse_ab /= n;
    Ok(out)
}

/// Color metrics between two aligned RGB images.
pub fn color_metrics(
    original: &ImageF,
    anonymized: &ImageF,
    mask: Option<&Mask>,
) -> Result<ColorMetrics> {
    if (original.height(), original.width()) != (anonymized.height(), anonymized.width()) {
        return Err(Error::Shape(format!(
            "color metrics pair {}x{} vs {}x{}",
            original.height(),
            original.width(),
            anonymized.height(),
            anonymized.width()
        )));
    }
    if let Some(m) = mask {
        check_mask_dims(m, original.height(), original.width())?;
    }
    color_metrics_lab(&rgb_to_lab(original), &rgb_to_lab(anonymized), mask)
}

/// Mean and population spread of a per-pair metric across a dataset.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Aggregate {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

impl fmt::Display for Aggregate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4} \u{b1} {:.4}", self.mean, self.std)
    }
}

/// Aggregate per-pair values into mean and population std (divide by n: the
/// dataset is the whole population being described). Empty input has no
/// aggregate.
pub fn aggregate(values: &[f64]) -> Option<Aggregate> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Some(Aggregate {
        mean,
        std: var.sqrt(),
        count: values.len(),
    })
}

/// Read an identity embedding: plain text, whitespace-separated reals, one
/// vector per file.
pub fn load_embedding(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut values = Vec::new();
    for token in text.split_whitespace() {
        let v: f64 = token.parse().map_err(|_| {
            Error::Parse(format!("{}: bad number {token:?}", path.display()))
        })?;
        if !v.is_finite() {
            return Err(Error::Parse(format!(
                "{}: non-finite value {token:?}",
                path.display()
            )));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::Parse(format!(
            "{}: empty embedding file",
            path.display()
        )));
    }
    Ok(values)
}

/// Read a feature matrix: headerless CSV, one sample per row.
pub fn load_feature_matrix(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let row: Vec<f64> = record
            .iter()
            .map(|field| {
                field.parse().map_err(|_| {
                    Error::Parse(format!("{}: bad number {field:?}", path.display()))
                })
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    FeatureMatrix::from_rows(rows)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Read detector output: CSV with header `image_id,detected`, detected in
/// {0,1}, one row per image, ids unique.
pub fn load_detections(path: impl AsRef<Path>) -> Result<Vec<DetectionRecord>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    if headers != vec!["image_id", "detected"] {
        return Err(Error::Parse(format!(
            "{}: expected header image_id,detected",
            path.display()
        )));
    }
    let mut records = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let id = record
            .get(0)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| Error::Parse(format!("{}: empty image_id", path.display())))?;
        if !seen.insert(id.to_string()) {
            return Err(Error::Parse(format!(
                "{}: duplicate image_id {id:?}",
                path.display()
            )));
        }
        let detected = match record.get(1) {
            Some("0") => false,
            Some("1") => true,
            other => {
                return Err(Error::Parse(format!(
                    "{}: detected must be 0 or 1, got {other:?}",
                    path.display()
                )))
            }
        };
        records.push(DetectionRecord {
            image_id: id.to_string(),
            detected,
        });
    }
    Ok(records)
}

/// Read classifier labels: CSV with header `image_id,label`, ids unique,
/// labels opaque strings.
pub fn load_labels(path: impl AsRef<Path>) -> Result<Vec<(String, String)>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    if headers != vec!["image_id", "label"] {
        return Err(Error::Parse(format!(
            "{}: expected header image_id,label",
            path.display()
        )));
    }
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let id = record
            .get(0)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| Error::Parse(format!("{}: empty image_id", path.display())))?;
        if !seen.insert(id.to_string()) {
            return Err(Error::Parse(format!(
                "{}: duplicate image_id {id:?}",
                path.display()
            )));
        }
        let label = record
            .get(1)
            .ok_or_else(|| Error::Parse(format!("{}: missing label", path.display())))?;
        out.push((id.to_string(), label.to_string()));
    }
    Ok(out)
}
