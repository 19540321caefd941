//! Deterministic synthetic inputs for end-to-end runs and tests.
//!
//! Everything here is generated from fixed seeds and analytic formulas, so
//! a fixture tree is reproducible and needs no external dataset. The tree
//! contains a photometric recovery pair (shared texture, gradient vs flat
//! lighting), a ten-pair manifest with every sidecar kind, an identity
//! manifest (anonymized = original) whose metrics are known in closed form,
//! reference landmark files, and analytic feature matrices.

use std::fs;
use std::path::{Path, PathBuf};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::intrinsic::{save_shading, ShadingMap};
use crate::landmarks::{save_landmarks, LandmarkSet, LANDMARK_COUNT};
use crate::manifest::{write_manifest, PairRecord};
use crate::raster::{save_gray, save_image, GrayImage, ImageF};

/// Rows in the generated evaluation manifest.
pub const PAIR_COUNT: usize = 10;

/// Side length of the manifest pair images.
pub const PAIR_SIZE: usize = 64;

/// Side length of the photometric recovery pair.
pub const RECOVERY_SIZE: usize = 128;

const EMBEDDING_DIM: usize = 128;
const EMBEDDING_SEED: u64 = 0xE3B0;

/// Identity-embedding cosines baked into the manifest pairs. Pair 9 gets
/// no embedding cells at all, so an evaluation sees the first nine values
/// (five of them above the 0.5 re-identification threshold).
pub const COSINE_TARGETS: [f64; PAIR_COUNT] =
    [0.9, 0.7, 0.6, 0.55, 0.52, 0.48, 0.45, 0.3, 0.2, 0.1];

const EMOTIONS: [&str; 5] = ["neutral", "happy", "sad", "angry", "surprised"];
/// Pairs whose anonymized emotion label disagrees with the original's.
const DISAGREEING_PAIRS: [usize; 2] = [3, 7];
/// The one image the synthetic face detector misses.
const UNDETECTED_PAIR: usize = 4;

/// Paths of everything a generated fixture tree contains.
#[derive(Clone, Debug)]
pub struct FixtureSet {
    pub root: PathBuf,
    /// Gradient-lit original of the recovery pair.
    pub recovery_original: PathBuf,
    /// Flat-lit, differently textured counterpart.
    pub recovery_anonymized: PathBuf,
    /// Ten-pair manifest with masks, landmarks, embeddings, shading maps
    /// and label tables.
    pub manifest: PathBuf,
    /// Same images with anonymized = original and shared sidecars.
    pub identity_manifest: PathBuf,
    /// Face landmarks with interocular distance 100.
    pub landmarks_base: PathBuf,
    /// The base landmarks translated by (3, 4).
    pub landmarks_shifted: PathBuf,
    pub detections: PathBuf,
    pub features_real: PathBuf,
    pub features_fake: PathBuf,
}

/// A canonical 68-point face with interocular distance `iod`, eye centers
/// at (cx -+ iod/2, cy). Eye rings are regular hexagons, so their centroids
/// sit on the ring centers and the set's measured interocular distance
/// matches `iod` to rounding error.
pub fn face_landmarks(iod: f64, cx: f64, cy: f64) -> LandmarkSet {
    let s = iod / 100.0;
    let mut points = Vec::with_capacity(LANDMARK_COUNT);
    // Jaw: open arc under the face.
    for i in 0..17 {
        let a = std::f64::consts::PI * (1.0 - i as f64 / 16.0);
        points.push((cx + 80.0 * s * a.cos(), cy + 30.0 * s + 60.0 * s * a.sin()));
    }
    // Brows: two shallow arches above the eyes.
    for side in [-1.0, 1.0] {
        for i in 0..5 {
            let t = i as f64 / 4.0 - 0.5;
            points.push((
                cx + side * (50.0 + 30.0 * t) * s,
                cy - (22.0 + 6.0 * (1.0 - t * t)) * s,
            ));
        }
    }
    // Nose: bridge then base.
    for i in 0..4 {
        points.push((cx, cy + (i as f64 * 8.0) * s));
    }
    for i in 0..5 {
        points.push((cx + (i as f64 - 2.0) * 6.0 * s, cy + 30.0 * s));
    }
    // Eyes: hexagonal rings centered exactly iod apart.
    for side in [-1.0, 1.0] {
        for k in 0..6 {
            let a = k as f64 / 6.0 * std::f64::consts::TAU;
            points.push((
                cx + side * iod / 2.0 + 8.0 * s * a.cos(),
                cy + 5.0 * s * a.sin(),
            ));
        }
    }
    // Mouth: outer ring of 12, inner ring of 8.
    for k in 0..12 {
        let a = k as f64 / 12.0 * std::f64::consts::TAU;
        points.push((cx + 22.0 * s * a.cos(), cy + 48.0 * s + 10.0 * s * a.sin()));
    }
    for k in 0..8 {
        let a = k as f64 / 8.0 * std::f64::consts::TAU;
        points.push((cx + 12.0 * s * a.cos(), cy + 48.0 * s + 5.0 * s * a.sin()));
    }
    LandmarkSet::new(points).expect("face template has 68 points")
}

/// The photometric recovery pair: a shared albedo texture where the
/// original is lit by a horizontal gradient and the anonymized counterpart
/// carries its own texture phase, flat dim lighting, and a warm cast.
pub fn recovery_pair(n: usize) -> (ImageF, ImageF) {
    let albedo = |x: usize, y: usize| -> [f64; 3] {
        let t = 0.10 * ((x as f64 / 5.0).sin() + (y as f64 / 7.0).cos());
        [
            (0.75 + t).clamp(0.0, 1.0),
            (0.65 + t).clamp(0.0, 1.0),
            (0.6 + t).clamp(0.0, 1.0),
        ]
    };
    let original = ImageF::from_fn(n, n, |x, y| {
        let s = 0.3 + 0.65 * x as f64 / (n - 1) as f64;
        let a = albedo(x, y);
        [a[0] * s, a[1] * s, a[2] * s]
    });
    let anonymized = ImageF::from_fn(n, n, |x, y| {
        let t = 0.06 * (((x + 3) as f64 / 4.0).cos() + ((y + 5) as f64 / 6.0).sin());
        let s = 0.6;
        [
            ((0.8 + t) * s).clamp(0.0, 1.0),
            ((0.62 + t) * s).clamp(0.0, 1.0),
            ((0.5 + t) * s).clamp(0.0, 1.0),
        ]
    });
    (original, anonymized)
}

/// Shading fields used by manifest pair `i`: a gradient for the original
/// (direction cycling with `i`) and a flat level for the anonymized image.
fn pair_shading(i: usize, n: usize) -> (GrayImage, GrayImage) {
    let m = (n - 1) as f64;
    let gradient = GrayImage::from_fn(n, n, |x, y| {
        let t = match i % 3 {
            0 => x as f64 / m,
            1 => y as f64 / m,
            _ => (x + y) as f64 / (2.0 * m),
        };
        0.35 + 0.55 * t
    });
    let flat = GrayImage::from_fn(n, n, |_, _| 0.5 + 0.03 * (i % 4) as f64);
    (gradient, flat)
}

fn pair_images(i: usize, n: usize) -> (ImageF, ImageF) {
    let (gradient, flat) = pair_shading(i, n);
    let phase = i as f64 * 0.9;
    let original = ImageF::from_fn(n, n, |x, y| {
        let t = 0.15 * ((x as f64 / 5.0 + phase).sin() + (y as f64 / 7.0).cos());
        let s = gradient.get(x, y);
        [(0.75 + t) * s, (0.65 + t) * s, (0.6 + t) * s].map(|v| v.clamp(0.0, 1.0))
    });
    let anonymized = ImageF::from_fn(n, n, |x, y| {
        let t = 0.12 * (((x + 3) as f64 / 4.0 + phase).cos() + ((y + 5) as f64 / 6.0).sin());
        let s = flat.get(x, y);
        [(0.8 + t) * s, (0.62 + t) * s, (0.5 + t) * s].map(|v| v.clamp(0.0, 1.0))
    });
    (original, anonymized)
}

/// Elliptical face-region mask, slightly different per pair.
fn pair_mask(i: usize, n: usize) -> GrayImage {
    let (cx, cy) = (n as f64 / 2.0, n as f64 / 2.0 - 2.0);
    let (rx, ry) = (
        n as f64 * (0.30 + 0.02 * (i % 3) as f64),
        n as f64 * 0.38,
    );
    GrayImage::from_fn(n, n, |x, y| {
        let dx = (x as f64 - cx) / rx;
        let dy = (y as f64 - cy) / ry;
        if dx * dx + dy * dy <= 1.0 {
            1.0
        } else {
            0.0
        }
    })
}

/// Landmark translation applied to pair `i`'s anonymized set.
fn pair_shift(i: usize) -> (f64, f64) {
    (0.5 * (i % 4) as f64, 0.5 * ((i + 1) % 3) as f64)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Two embeddings whose cosine similarity is `cosine` up to rounding:
/// the second is built in the plane spanned by the first and an
/// orthogonalized random direction.
fn embedding_pair(rng: &mut ChaCha8Rng, cosine: f64) -> (Vec<f64>, Vec<f64>) {
    let u: Vec<f64> = (0..EMBEDDING_DIM)
        .map(|_| rng.random::<f64>() * 2.0 - 1.0)
        .collect();
    let mut v: Vec<f64> = (0..EMBEDDING_DIM)
        .map(|_| rng.random::<f64>() * 2.0 - 1.0)
        .collect();
    let nu = dot(&u, &u).sqrt();
    let uhat: Vec<f64> = u.iter().map(|x| x / nu).collect();
    let proj = dot(&v, &uhat);
    for (vi, ui) in v.iter_mut().zip(&uhat) {
        *vi -= proj * ui;
    }
    let nv = dot(&v, &v).sqrt();
    let sine = (1.0 - cosine * cosine).sqrt();
    let a = uhat
        .iter()
        .zip(&v)
        .map(|(ui, vi)| cosine * ui + sine * vi / nv)
        .collect();
    (u, a)
}

/// Four samples per distribution with exactly diagonal sample covariance:
/// sign columns are orthogonal with zero mean, so column `j` has mean
/// `means[j]` and sample variance `4 spreads[j]^2 / 3`.
fn sign_pattern_features(means: [f64; 3], spreads: [f64; 3]) -> Vec<[f64; 3]> {
    const SIGNS: [[f64; 3]; 4] = [
        [1.0, 1.0, 1.0],
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
    ];
    SIGNS
        .iter()
        .map(|row| {
            [
                means[0] + row[0] * spreads[0],
                means[1] + row[1] * spreads[1],
                means[2] + row[2] * spreads[2],
            ]
        })
        .collect()
}

fn write_text(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| Error::io(path, e))
}

fn write_features(path: &Path, rows: &[[f64; 3]]) -> Result<()> {
    let mut out = String::new();
    for row in rows {
        out.push_str(&format!("{},{},{}\n", row[0], row[1], row[2]));
    }
    write_text(path, &out)
}

fn write_embedding(path: &Path, values: &[f64]) -> Result<()> {
    let line = values
        .iter()
        .map(f64::to_string)
        .collect::<Vec<_>>()
        .join(" ");
    write_text(path, &(line + "\n"))
}

fn translated(set: &LandmarkSet, dx: f64, dy: f64) -> LandmarkSet {
    LandmarkSet::new(set.points().iter().map(|p| (p.0 + dx, p.1 + dy)).collect())
        .expect("translation preserves the point count")
}

fn mkdir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Generate the full fixture tree under `root` and return its paths.
pub fn generate(root: impl AsRef<Path>) -> Result<FixtureSet> {
    let root = root.as_ref().to_path_buf();
    let pairs = root.join("pairs");
    for sub in ["recovery", "landmarks", "features"] {
        mkdir(&root.join(sub))?;
    }
    for sub in ["images", "masks", "landmarks", "embeddings", "shading"] {
        mkdir(&pairs.join(sub))?;
    }

    let recovery_original = root.join("recovery/original.png");
    let recovery_anonymized = root.join("recovery/anonymized.png");
    let (ro, ra) = recovery_pair(RECOVERY_SIZE);
    save_image(&ro, &recovery_original)?;
    save_image(&ra, &recovery_anonymized)?;

    let mut records = Vec::with_capacity(PAIR_COUNT);
    let mut identity = Vec::with_capacity(PAIR_COUNT);
    let mut labels_o = String::from("image_id,label\n");
    let mut labels_a = String::from("image_id,label\n");
    let mut detections = String::from("image_id,detected\n");
    for i in 0..PAIR_COUNT {
        let id = format!("p{i}");
        let (original, anonymized) = pair_images(i, PAIR_SIZE);
        save_image(&original, pairs.join(format!("images/{id}_o.png")))?;
        save_image(&anonymized, pairs.join(format!("images/{id}_a.png")))?;
        save_gray(&pair_mask(i, PAIR_SIZE), pairs.join(format!("masks/{id}.png")))?;

        let lm_o = face_landmarks(24.0, 32.0, 26.0);
        let (dx, dy) = pair_shift(i);
        save_landmarks(&lm_o, pairs.join(format!("landmarks/{id}_o.csv")))?;
        save_landmarks(
            &translated(&lm_o, dx, dy),
            pairs.join(format!("landmarks/{id}_a.csv")),
        )?;

        let mut rng = ChaCha8Rng::seed_from_u64(EMBEDDING_SEED + i as u64);
        let (emb_o, emb_a) = embedding_pair(&mut rng, COSINE_TARGETS[i]);
        write_embedding(&pairs.join(format!("embeddings/{id}_o.txt")), &emb_o)?;
        write_embedding(&pairs.join(format!("embeddings/{id}_a.txt")), &emb_a)?;

        let (shading_o, shading_a) = pair_shading(i, PAIR_SIZE);
        save_shading(
            &ShadingMap::from_gray_clamped(shading_o),
            pairs.join(format!("shading/{id}_o.png")),
        )?;
        save_shading(
            &ShadingMap::from_gray_clamped(shading_a),
            pairs.join(format!("shading/{id}_a.png")),
        )?;

        let emotion = EMOTIONS[i % EMOTIONS.len()];
        labels_o.push_str(&format!("{id},{emotion}\n"));
        let emotion_a = if DISAGREEING_PAIRS.contains(&i) {
            EMOTIONS[(i + 1) % EMOTIONS.len()]
        } else {
            emotion
        };
        labels_a.push_str(&format!("{id},{emotion_a}\n"));
        detections.push_str(&format!(
            "{id},{}\n",
            u8::from(i != UNDETECTED_PAIR)
        ));

        // Pair 9 exercises skip handling: no mask, no embeddings.
        let last = i == PAIR_COUNT - 1;
        let mut r = PairRecord::new(
            &id,
            format!("images/{id}_o.png"),
            format!("images/{id}_a.png"),
        );
        r.mask = (!last).then(|| format!("masks/{id}.png").into());
        r.landmarks_o = Some(format!("landmarks/{id}_o.csv").into());
        r.landmarks_a = Some(format!("landmarks/{id}_a.csv").into());
        r.emb_o = (!last).then(|| format!("embeddings/{id}_o.txt").into());
        r.emb_a = (!last).then(|| format!("embeddings/{id}_a.txt").into());
        r.shading_o = Some(format!("shading/{id}_o.png").into());
        r.shading_a = Some(format!("shading/{id}_a.png").into());
        r.label_o = Some("labels_o.csv".into());
        r.label_a = Some("labels_a.csv".into());
        records.push(r);

        let mut ident = PairRecord::new(
            &id,
            format!("images/{id}_o.png"),
            format!("images/{id}_o.png"),
        );
        ident.mask = Some(format!("masks/{id}.png").into());
        ident.landmarks_o = Some(format!("landmarks/{id}_o.csv").into());
        ident.landmarks_a = Some(format!("landmarks/{id}_o.csv").into());
        ident.emb_o = Some(format!("embeddings/{id}_o.txt").into());
        ident.emb_a = Some(format!("embeddings/{id}_o.txt").into());
        ident.shading_o = Some(format!("shading/{id}_o.png").into());
        ident.shading_a = Some(format!("shading/{id}_o.png").into());
        ident.label_o = Some("labels_o.csv".into());
        ident.label_a = Some("labels_o.csv".into());
        identity.push(ident);
    }
    write_text(&pairs.join("labels_o.csv"), &labels_o)?;
    write_text(&pairs.join("labels_a.csv"), &labels_a)?;

    let manifest = pairs.join("manifest.csv");
    let identity_manifest = pairs.join("identity.csv");
    write_manifest(&records, &manifest)?;
    write_manifest(&identity, &identity_manifest)?;

    let landmarks_base = root.join("landmarks/base.csv");
    let landmarks_shifted = root.join("landmarks/shifted.csv");
    let base = face_landmarks(100.0, 120.0, 90.0);
    save_landmarks(&base, &landmarks_base)?;
    save_landmarks(&translated(&base, 3.0, 4.0), &landmarks_shifted)?;

    let detections_path = root.join("detections.csv");
    write_text(&detections_path, &detections)?;

    let features_real = root.join("features/real.csv");
    let features_fake = root.join("features/fake.csv");
    write_features(
        &features_real,
        &sign_pattern_features([0.0, 0.0, 0.0], [0.6, 0.45, 0.3]),
    )?;
    write_features(
        &features_fake,
        &sign_pattern_features([0.5, -0.25, 0.125], [0.3, 0.6, 0.15]),
    )?;

    Ok(FixtureSet {
        root,
        recovery_original,
        recovery_anonymized,
        manifest,
        identity_manifest,
        landmarks_base,
        landmarks_shifted,
        detections: detections_path,
        features_real,
        features_fake,
    })
}
