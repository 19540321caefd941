//! Identity and distribution metrics: cosine re-identification, FID,
//! detection rate, emotion agreement.
//!
//! Embeddings are synthetic but geometrically honest: each anonymized
//! vector is built at a chosen angle to its original, so the cosine
//! similarities and the resulting re-identification rate are exact.

use photoanon::metrics::{
    cosine_similarity, detection_rate, emotion_agreement, fid, reid_rate, DetectionRecord,
    FeatureMatrix, DEFAULT_REID_THRESHOLD,
};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn rotated_pair(rng: &mut ChaCha8Rng, cosine: f64, dim: usize) -> (Vec<f64>, Vec<f64>) {
    let u: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    let mut v: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let uhat: Vec<f64> = u.iter().map(|x| x / nu).collect();
    let proj: f64 = v.iter().zip(&uhat).map(|(a, b)| a * b).sum();
    for (vi, ui) in v.iter_mut().zip(&uhat) {
        *vi -= proj * ui;
    }
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let sine = (1.0 - cosine * cosine).sqrt();
    let w = uhat.iter().zip(&v).map(|(ui, vi)| cosine * ui + sine * vi / nv).collect();
    (u, w)
}

fn main() -> photoanon::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let targets = [0.95, 0.7, 0.55, 0.4, 0.2];
    let mut cosines = Vec::new();
    for target in targets {
        let (original, anonymized) = rotated_pair(&mut rng, target, 256);
        cosines.push(cosine_similarity(&original, &anonymized)?);
    }
    println!("cosine similarities: {cosines:.3?}");
    println!(
        "re-identification rate at threshold {DEFAULT_REID_THRESHOLD}: {}%",
        reid_rate(&cosines, DEFAULT_REID_THRESHOLD)?
    );

    // Two feature clouds a unit apart in one dimension, same spread:
    // the distribution distance is exactly the mean gap squared.
    let real = FeatureMatrix::from_rows(vec![
        vec![-(0.5f64.sqrt())],
        vec![0.5f64.sqrt()],
    ])?;
    let fake = FeatureMatrix::from_rows(vec![
        vec![1.0 - 0.5f64.sqrt()],
        vec![1.0 + 0.5f64.sqrt()],
    ])?;
    println!("fid of unit-shifted 1-D clouds: {:.6}", fid(&real, &fake)?);

    let detections: Vec<DetectionRecord> = (0..8)
        .map(|i| DetectionRecord {
            image_id: format!("img{i}"),
            detected: i % 4 != 3,
        })
        .collect();
    println!("detection rate: {}%", detection_rate(&detections)?);

    let labels: Vec<(String, String)> = [
        ("happy", "happy"),
        ("sad", "sad"),
        ("neutral", "surprised"),
        ("angry", "angry"),
    ]
    .iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect();
    println!("emotion agreement: {}%", emotion_agreement(&labels)?);
    Ok(())
}
