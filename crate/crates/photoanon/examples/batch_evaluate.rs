//! Manifest-driven batch evaluation, library-side.
//!
//! Generates the synthetic fixture tree in a temp directory, evaluates
//! both of its manifests (a real anonymization run and the identity run
//! where nothing changed), and renders the comparison table. The identity
//! row is all zeros with cosine 1: the evaluator's fixed point.

use photoanon::eval::{evaluate, DatasetInputs};
use photoanon::fixtures;
use photoanon::manifest::read_manifest;
use photoanon::report::{render_markdown, RunConfig};

fn main() -> photoanon::Result<()> {
    let dir = std::env::temp_dir().join("photoanon_batch_example");
    let set = fixtures::generate(&dir)?;
    println!("fixtures under {}\n", set.root.display());

    let config = RunConfig::default();
    let inputs = DatasetInputs {
        features_real: Some(set.features_real.clone()),
        features_fake: Some(set.features_fake.clone()),
        detections: Some(set.detections.clone()),
    };

    let anonymized = evaluate(&read_manifest(&set.manifest)?, &config, &inputs)?;
    let identity = evaluate(
        &read_manifest(&set.identity_manifest)?,
        &config,
        &DatasetInputs::default(),
    )?;

    let skipped: usize = anonymized.pairs.iter().map(|p| p.skipped.len()).sum();
    println!(
        "anonymized run: {} pairs, {} skipped metric slots (missing sidecars)",
        anonymized.pairs.len(),
        skipped
    );

    let runs = vec![
        ("anonymized".to_string(), anonymized),
        ("identity".to_string(), identity),
    ];
    println!("\n{}", render_markdown(&runs));
    Ok(())
}
