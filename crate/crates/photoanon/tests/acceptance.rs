//! Release gate: ten end-to-end checks, one test per criterion. Each test
//! prints a `criterion N (...): PASS` line with the measured values (visible
//! under `cargo test -- --nocapture`); failed assertions carry the same
//! context. Tolerances are pinned beside the assertions.

use std::fs;
use std::time::Instant;

use photoanon::color::{delta_e2000, rgb_to_ycbcr, ColorLab};
use photoanon::eval::{evaluate, DatasetInputs};
use photoanon::fixtures;
use photoanon::intrinsic::decompose;
use photoanon::landmarks::{load_landmarks, LandmarkSet};
use photoanon::manifest::read_manifest;
use photoanon::metrics::{
    color_metrics, expression_error, fid, landmark_error, si_l2, si_mse, FeatureMatrix,
};
use photoanon::pipeline::{postprocess, PipelineConfig};
use photoanon::pyramid::{build_laplacian, reconstruct};
use photoanon::raster::{load_image, save_image, ImageF};
use photoanon::report::{to_canonical_json, RunConfig};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn pass(criterion: u32, what: &str, detail: String) {
    println!("criterion {criterion} ({what}): PASS; {detail}");
}

fn random_rgb(rng: &mut ChaCha8Rng, height: usize, width: usize) -> ImageF {
    ImageF::from_fn(height, width, |_, _| {
        [rng.random(), rng.random(), rng.random()]
    })
}

/// Laplacian analysis followed by synthesis is lossless to float precision
/// for every depth the pipeline uses, and fast enough to run everywhere.
#[test]
fn criterion_01_pyramid_round_trip() {
    const TOLERANCE: f64 = 1e-5;
    const BUDGET_SECS: f64 = 5.0;
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let images: Vec<ImageF> = (0..50).map(|_| random_rgb(&mut rng, 64, 64)).collect();

    let start = Instant::now();
    let mut worst = 0.0f64;
    for img in &images {
        for depth in 1..=4 {
            let rebuilt = reconstruct(&build_laplacian(img, depth).unwrap()).unwrap();
            worst = worst.max(rebuilt.max_abs_diff(img));
        }
    }
    let elapsed = start.elapsed();

    assert!(
        worst <= TOLERANCE,
        "worst round-trip error {worst:.3e} exceeds {TOLERANCE:.0e}"
    );
    assert!(
        elapsed.as_secs_f64() < BUDGET_SECS,
        "round trips took {elapsed:?}, budget {BUDGET_SECS} s"
    );
    pass(
        1,
        "pyramid round trip",
        format!("max error {worst:.2e} over 50 images x depths 1..=4 in {elapsed:.2?} (bounds 1e-5, 5 s)"),
    );
}

/// The closed-form gain lands on the same minimum a brute grid search over
/// the gain finds, and doubling an image costs nothing under the metric.
#[test]
fn criterion_02_scale_invariant_mse_matches_grid_search() {
    const TOLERANCE: f64 = 1e-6;
    const GRID_STEP: f64 = 1e-4;
    let mut rng = ChaCha8Rng::seed_from_u64(202);

    let mut worst = 0.0f64;
    for _ in 0..100 {
        let reference = random_rgb(&mut rng, 16, 16);
        let test = random_rgb(&mut rng, 16, 16);
        let closed = si_mse(&reference, &test, None).unwrap().value;

        let (o, a) = (reference.data(), test.data());
        let pixels = (reference.height() * reference.width()) as f64;
        let mut best = f64::INFINITY;
        for step in 0..=40_000u32 {
            let alpha = f64::from(step) * GRID_STEP;
            let mut residual = 0.0;
            for (&ov, &av) in o.iter().zip(a) {
                let d = ov - alpha * av;
                residual += d * d;
            }
            best = best.min(residual / pixels);
        }
        worst = worst.max((closed - best).abs());
    }
    assert!(
        worst <= TOLERANCE,
        "closed form strays {worst:.3e} from the grid optimum, bound {TOLERANCE:.0e}"
    );

    let img = random_rgb(&mut rng, 16, 16);
    let doubled =
        ImageF::from_vec(16, 16, img.data().iter().map(|v| 2.0 * v).collect()).unwrap();
    let gain_free = si_mse(&img, &doubled, None).unwrap().value;
    assert!(
        gain_free <= 1e-10,
        "si_mse(I, 2I) = {gain_free:.3e}, bound 1e-10"
    );
    pass(
        2,
        "scale-invariant mse vs grid oracle",
        format!("max |closed - grid| {worst:.2e} over 100 pairs (bound 1e-6); si_mse(I,2I) {gain_free:.1e} (bound 1e-10)"),
    );
}

/// Published CIEDE2000 verification dataset: L1,a1,b1, L2,a2,b2, dE00.
/// Rows 9 to 16 sit on the hue-discontinuity branches.
const CIEDE2000_CASES: [(f64, f64, f64, f64, f64, f64, f64); 34] = [
    (50.0000, 2.6772, -79.7751, 50.0000, 0.0000, -82.7485, 2.0425),
    (50.0000, 3.1571, -77.2803, 50.0000, 0.0000, -82.7485, 2.8615),
    (50.0000, 2.8361, -74.0200, 50.0000, 0.0000, -82.7485, 3.4412),
    (50.0000, -1.3802, -84.2814, 50.0000, 0.0000, -82.7485, 1.0000),
    (50.0000, -1.1848, -84.8006, 50.0000, 0.0000, -82.7485, 1.0000),
    (50.0000, -0.9009, -85.5211, 50.0000, 0.0000, -82.7485, 1.0000),
    (50.0000, 0.0000, 0.0000, 50.0000, -1.0000, 2.0000, 2.3669),
    (50.0000, -1.0000, 2.0000, 50.0000, 0.0000, 0.0000, 2.3669),
    (50.0000, 2.4900, -0.0010, 50.0000, -2.4900, 0.0009, 7.1792),
    (50.0000, 2.4900, -0.0010, 50.0000, -2.4900, 0.0010, 7.1792),
    (50.0000, 2.4900, -0.0010, 50.0000, -2.4900, 0.0011, 7.2195),
    (50.0000, 2.4900, -0.0010, 50.0000, -2.4900, 0.0012, 7.2195),
    (50.0000, -0.0010, 2.4900, 50.0000, 0.0009, -2.4900, 4.8045),
    (50.0000, -0.0010, 2.4900, 50.0000, 0.0010, -2.4900, 4.8045),
    (50.0000, -0.0010, 2.4900, 50.0000, 0.0011, -2.4900, 4.7461),
    (50.0000, 2.5000, 0.0000, 50.0000, 0.0000, -2.5000, 4.3065),
    (50.0000, 2.5000, 0.0000, 73.0000, 25.0000, -18.0000, 27.1492),
    (50.0000, 2.5000, 0.0000, 61.0000, -5.0000, 29.0000, 22.8977),
    (50.0000, 2.5000, 0.0000, 56.0000, -27.0000, -3.0000, 31.9030),
    (50.0000, 2.5000, 0.0000, 58.0000, 24.0000, 15.0000, 19.4535),
    (50.0000, 2.5000, 0.0000, 50.0000, 3.1736, 0.5854, 1.0000),
    (50.0000, 2.5000, 0.0000, 50.0000, 3.2972, 0.0000, 1.0000),
    (50.0000, 2.5000, 0.0000, 50.0000, 1.8634, 0.5757, 1.0000),
    (50.0000, 2.5000, 0.0000, 50.0000, 3.2592, 0.3350, 1.0000),
    (60.2574, -34.0099, 36.2677, 60.4626, -34.1751, 39.4387, 1.2644),
    (63.0109, -31.0961, -5.8663, 62.8187, -29.7946, -4.0864, 1.2630),
    (61.2901, 3.7196, -5.3901, 61.4292, 2.2480, -4.9620, 1.8731),
    (35.0831, -44.1164, 3.7933, 35.0232, -40.0716, 1.5901, 1.8645),
    (22.7233, 20.0904, -46.6940, 23.0331, 14.9730, -42.5619, 2.0373),
    (36.4612, 47.8580, 18.3852, 36.2715, 50.5065, 21.2231, 1.4146),
    (90.8027, -2.0831, 1.4410, 91.1528, -1.6435, 0.0447, 1.4441),
    (90.9257, -0.5406, -0.9208, 88.6381, -0.8985, -0.7239, 1.5381),
    (6.7747, -0.2908, -2.4247, 5.8714, -0.0985, -2.2286, 0.6377),
    (2.0776, 0.0795, -1.1350, 0.9033, -0.0636, -0.5514, 0.9082),
];

/// The color-difference formula reproduces every published verification
/// pair, including the hue-discontinuity rows.
#[test]
fn criterion_03_ciede2000_verification_pairs() {
    const TOLERANCE: f64 = 1e-4;
    let mut worst = 0.0f64;
    for (i, &(l1, a1, b1, l2, a2, b2, expect)) in CIEDE2000_CASES.iter().enumerate() {
        let c1 = ColorLab { l: l1, a: a1, b: b1 };
        let c2 = ColorLab { l: l2, a: a2, b: b2 };
        let got = delta_e2000(&c1, &c2);
        assert!(
            (got - expect).abs() <= TOLERANCE,
            "pair {}: expected {expect}, got {got}",
            i + 1
        );
        worst = worst.max((got - expect).abs());
    }
    pass(
        3,
        "ciede2000 verification pairs",
        format!("34/34 pairs within {worst:.2e} (bound 1e-4)"),
    );
}

/// Chroma transfer matches the reference moments before any gamut clamp,
/// never touches luma, and is a no-op on identical inputs.
#[test]
fn criterion_04_chroma_transfer_moment_matching() {
    use photoanon::transfer::{chroma_stats, color_transfer, transfer_chroma, ChromaChannel};

    const TOLERANCE: f64 = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let src = rgb_to_ycbcr(&random_rgb(&mut rng, 12, 17));
        let reference = rgb_to_ycbcr(&random_rgb(&mut rng, 12, 17));
        let out = transfer_chroma(&src, &reference, None).unwrap();
        for channel in [ChromaChannel::Cb, ChromaChannel::Cr] {
            let got = chroma_stats(&out, channel, None).unwrap();
            let want = chroma_stats(&reference, channel, None).unwrap();
            worst = worst
                .max((got.mean - want.mean).abs())
                .max((got.std - want.std).abs());
        }
        assert_eq!(out.y, src.y, "luma plane must come through bit-identical");
    }
    assert!(
        worst <= TOLERANCE,
        "pre-clamp moment mismatch {worst:.3e}, bound {TOLERANCE:.0e}"
    );

    let img = random_rgb(&mut rng, 20, 20);
    let same = color_transfer(&img, &img, None).unwrap();
    let drift = same.max_abs_diff(&img);
    assert!(
        drift <= 1e-6,
        "self-transfer drifts by {drift:.3e}, bound 1e-6"
    );
    pass(
        4,
        "chroma transfer moment matching",
        format!("pre-clamp moment error {worst:.2e} over 50 pairs, self-transfer drift {drift:.2e} (bounds 1e-6), luma bit-identical"),
    );
}

/// Distribution distance oracles: zero against itself, an exact-moment 1-D
/// construction landing on 1.0, and a 3-D diagonal case matching the
/// per-axis closed form.
#[test]
fn criterion_05_fid_oracles() {
    const TOLERANCE: f64 = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let rows: Vec<Vec<f64>> = (0..16)
        .map(|_| (0..5).map(|_| rng.random()).collect())
        .collect();
    let features = FeatureMatrix::from_rows(rows).unwrap();
    let self_distance = fid(&features, &features).unwrap();
    assert!(
        self_distance <= TOLERANCE,
        "fid(A, A) = {self_distance:.3e}, bound {TOLERANCE:.0e}"
    );

    // Two-sample sets place the sample means exactly at 0 and 1 with equal
    // spreads, so the distance collapses to the squared mean gap.
    let real_1d = FeatureMatrix::from_rows(vec![vec![-0.25], vec![0.25]]).unwrap();
    let fake_1d = FeatureMatrix::from_rows(vec![vec![0.75], vec![1.25]]).unwrap();
    let unit = fid(&real_1d, &fake_1d).unwrap();
    assert!(
        (unit - 1.0).abs() <= TOLERANCE,
        "1-D exact-moment fixture: fid = {unit}, expected 1.0 within {TOLERANCE:.0e}"
    );

    // Orthogonal sign patterns make the sample covariance exactly diagonal;
    // the distance must then separate into per-axis terms
    // (mu1-mu2)^2 + (sigma1-sigma2)^2.
    let signs: [[f64; 3]; 4] = [
        [1.0, 1.0, 1.0],
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
    ];
    let build = |means: [f64; 3], spreads: [f64; 3]| {
        let rows = signs
            .iter()
            .map(|s| (0..3).map(|d| means[d] + spreads[d] * s[d]).collect())
            .collect();
        FeatureMatrix::from_rows(rows).unwrap()
    };
    let (m1, s1) = ([0.1f64, -0.4, 0.3], [0.5f64, 0.25, 0.75]);
    let (m2, s2) = ([-0.2f64, 0.1, 0.6], [0.3f64, 0.5, 0.25]);
    // Sample std (n-1 denominator) of a 4-row sign pattern is spread*sqrt(4/3).
    let k = (4.0f64 / 3.0).sqrt();
    let expected: f64 = (0..3)
        .map(|d| (m1[d] - m2[d]).powi(2) + (k * s1[d] - k * s2[d]).powi(2))
        .sum();
    let diagonal = fid(&build(m1, s1), &build(m2, s2)).unwrap();
    assert!(
        (diagonal - expected).abs() <= TOLERANCE,
        "3-D diagonal fixture: fid = {diagonal}, separable closed form {expected}"
    );
    pass(
        5,
        "fid oracles",
        format!("fid(A,A) {self_distance:.1e}, 1-D fixture {unit:.9}, 3-D diagonal |err| {:.2e} (bounds 1e-6)", (diagonal - expected).abs()),
    );
}

/// Landmark error on the known-shift fixture, invariance under the
/// transforms that preserve the per-axis form, and the 51-point expression
/// subset contract.
#[test]
fn criterion_06_landmark_metrics() {
    let base = fixtures::face_landmarks(100.0, 320.0, 240.0);
    let shifted = LandmarkSet::new(
        base.points().iter().map(|&(x, y)| (x + 3.0, y + 4.0)).collect(),
    )
    .unwrap();
    let reference_error = landmark_error(&base, &shifted).unwrap();
    assert!(
        (reference_error - 0.07).abs() <= 1e-12,
        "shift (3,4) at IOD 100: got {reference_error}, expected 0.07"
    );

    // The per-axis absolute error is invariant under translation, uniform
    // scale, axis-aligned reflection, and quarter turns, but not general
    // rotation (|dx|+|dy| is not a Euclidean length). Only the former group
    // is checked.
    const INVARIANCE_TOLERANCE: f64 = 1e-9;
    type Transform = fn(f64, f64) -> (f64, f64);
    let transforms: [(&str, Transform); 5] = [
        ("translation", |x, y| (x + 17.5, y - 42.0)),
        ("uniform scale", |x, y| (3.7 * x, 3.7 * y)),
        ("x reflection", |x, y| (-x, y)),
        ("quarter turn", |x, y| (-y, x)),
        ("scaled quarter turn + shift", |x, y| {
            (2.0 * -y + 5.0, 2.0 * x - 3.0)
        }),
    ];
    let apply = |set: &LandmarkSet, f: Transform| {
        LandmarkSet::new(set.points().iter().map(|&(x, y)| f(x, y)).collect()).unwrap()
    };
    let reference_expression = expression_error(&base, &shifted).unwrap();
    let mut worst = 0.0f64;
    for (name, f) in transforms {
        let moved_error = landmark_error(&apply(&base, f), &apply(&shifted, f)).unwrap();
        let moved_expression =
            expression_error(&apply(&base, f), &apply(&shifted, f)).unwrap();
        assert!(
            (moved_error - reference_error).abs() <= INVARIANCE_TOLERANCE,
            "{name}: landmark error moved {reference_error} -> {moved_error}"
        );
        assert!(
            (moved_expression - reference_expression).abs() <= INVARIANCE_TOLERANCE,
            "{name}: expression error moved {reference_expression} -> {moved_expression}"
        );
        worst = worst
            .max((moved_error - reference_error).abs())
            .max((moved_expression - reference_expression).abs());
    }

    // Expression subset: 51 points, indices 17..=67 of the 68-point set.
    assert_eq!(base.expression_points().len(), 51);
    assert_eq!(base.expression_points()[0], base.points()[17]);
    assert_eq!(base.expression_points()[50], base.points()[67]);
    assert!(LandmarkSet::new(base.points()[..67].to_vec()).is_err());

    // The file parser enforces the same count and index contract.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("landmarks.csv");
    photoanon::landmarks::save_landmarks(&base, &path).unwrap();
    assert_eq!(load_landmarks(&path).unwrap().points(), base.points());
    let full = fs::read_to_string(&path).unwrap();
    let truncated: String = full.lines().take(68).map(|l| format!("{l}\n")).collect();
    fs::write(&path, truncated).unwrap();
    assert!(load_landmarks(&path).is_err(), "67-row file must not parse");
    let duplicated = format!("{full}10,0,0\n");
    fs::write(&path, duplicated).unwrap();
    assert!(
        load_landmarks(&path).is_err(),
        "duplicate index must not parse"
    );

    pass(
        6,
        "landmark metrics",
        format!("shift fixture 0.07 within 1e-12; invariance over translation/scale/axis reflection/quarter turns within {worst:.1e} (bound 1e-9, general rotation excluded by the L1 form); 51-point subset and parser contract hold"),
    );
}

/// On the generated recovery pair, the full chain recovers the original
/// lighting (shading residual at least halved) and closes most of the
/// color gap.
#[test]
fn criterion_07_photometric_recovery_on_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let set = fixtures::generate(dir.path()).unwrap();
    let original = load_image(&set.recovery_original).unwrap();
    let anonymized = load_image(&set.recovery_anonymized).unwrap();

    let config = PipelineConfig::default();
    let output = postprocess(&original, &anonymized, None, &config).unwrap();

    let params = config.bilateral_for(original.height(), original.width());
    let shading_of = |img: &ImageF| decompose(img, &params).unwrap().1;
    let reference = shading_of(&original);
    let before = si_l2(&reference, &shading_of(&anonymized), None).unwrap().value;
    let after = si_l2(&reference, &shading_of(&output), None).unwrap().value;
    assert!(
        after < 0.5 * before,
        "shading residual {before:.4} -> {after:.4}, needs < half"
    );

    let de_before = color_metrics(&original, &anonymized, None)
        .unwrap()
        .mean_delta_e2000;
    let de_after = color_metrics(&original, &output, None)
        .unwrap()
        .mean_delta_e2000;
    assert!(
        de_after < de_before,
        "mean color difference grew: {de_before:.3} -> {de_after:.3}"
    );
    pass(
        7,
        "photometric recovery",
        format!("shading residual {before:.3} -> {after:.3} (ratio {:.3}, bound 0.5); mean dE2000 {de_before:.3} -> {de_after:.3}", after / before),
    );
}

/// With everything off the pipeline is a byte-faithful pass-through; each
/// stage flipped on its own moves the output measurably.
#[test]
fn criterion_08_ablation_toggles() {
    const MIN_EFFECT: f64 = 1e-4;
    let dir = tempfile::tempdir().unwrap();
    let set = fixtures::generate(dir.path()).unwrap();
    let original = load_image(&set.recovery_original).unwrap();
    let anonymized = load_image(&set.recovery_anonymized).unwrap();

    let all_off = PipelineConfig {
        relight: false,
        pyramid: false,
        color_transfer: false,
        ..PipelineConfig::default()
    };
    let through = postprocess(&original, &anonymized, None, &all_off).unwrap();
    assert_eq!(
        through.max_abs_diff(&anonymized),
        0.0,
        "all-off pipeline must be a pass-through"
    );
    let reencoded = dir.path().join("reencoded.png");
    save_image(&through, &reencoded).unwrap();
    assert_eq!(
        fs::read(&reencoded).unwrap(),
        fs::read(&set.recovery_anonymized).unwrap(),
        "re-encoding the pass-through must reproduce the source file"
    );

    let all_on = postprocess(&original, &anonymized, None, &PipelineConfig::default()).unwrap();
    let ablations: [(&str, PipelineConfig); 3] = [
        (
            "relight",
            PipelineConfig { relight: false, ..PipelineConfig::default() },
        ),
        (
            "pyramid",
            PipelineConfig { pyramid: false, ..PipelineConfig::default() },
        ),
        (
            "color transfer",
            PipelineConfig { color_transfer: false, ..PipelineConfig::default() },
        ),
    ];
    let mut effects = Vec::new();
    for (name, config) in ablations {
        let out = postprocess(&original, &anonymized, None, &config).unwrap();
        let effect = out.max_abs_diff(&all_on);
        assert!(
            effect > MIN_EFFECT,
            "disabling {name} changed nothing (max abs diff {effect:.2e})"
        );
        effects.push(format!("{name} {effect:.2e}"));
    }
    pass(
        8,
        "ablation toggles",
        format!("all-off is byte-faithful; single-stage effects: {} (each above 1e-4)", effects.join(", ")),
    );
}

/// Reports do not depend on the worker count, and a manifest pairing every
/// image with itself scores perfect on every pair metric.
#[test]
fn criterion_09_deterministic_reports_and_identity_scores() {
    let dir = tempfile::tempdir().unwrap();
    let set = fixtures::generate(dir.path()).unwrap();

    let records = read_manifest(&set.manifest).unwrap();
    let inputs = DatasetInputs {
        features_real: Some(set.features_real.clone()),
        features_fake: Some(set.features_fake.clone()),
        detections: Some(set.detections.clone()),
    };
    let mut config = RunConfig { workers: 1, ..RunConfig::default() };
    let single = to_canonical_json(&evaluate(&records, &config, &inputs).unwrap()).unwrap();
    config.workers = 8;
    let pooled = to_canonical_json(&evaluate(&records, &config, &inputs).unwrap()).unwrap();
    assert_eq!(
        single.into_bytes(),
        pooled.into_bytes(),
        "reports differ between 1 and 8 workers"
    );

    let identity = read_manifest(&set.identity_manifest).unwrap();
    let report = evaluate(&identity, &RunConfig::default(), &DatasetInputs::default()).unwrap();
    let mut worst_cosine_gap = 0.0f64;
    for pair in &report.pairs {
        for name in ["si_mse", "si_l2", "delta_e2000", "landmark_error"] {
            assert_eq!(
                pair.metrics[name], 0.0,
                "{}: {name} must be exactly zero on the identity manifest",
                pair.pair_id
            );
        }
        let gap = (pair.metrics["embedding_cosine"] - 1.0).abs();
        assert!(
            gap <= 1e-12,
            "{}: self-similarity {} strays from 1.0",
            pair.pair_id,
            pair.metrics["embedding_cosine"]
        );
        worst_cosine_gap = worst_cosine_gap.max(gap);
    }
    pass(
        9,
        "deterministic reports and identity scores",
        format!("1- and 8-worker reports byte-identical over {} pairs; identity manifest: si_mse/si_l2/delta_e2000/landmark_error all exactly 0, cosine within {worst_cosine_gap:.1e} of 1.0 (bound 1e-12)", records.len()),
    );
}

/// A full-resolution pair clears the chain in interactive time. The chain
/// itself is sequential; no thread pool is involved.
#[test]
fn criterion_10_full_resolution_postprocess_under_budget() {
    const BUDGET_SECS: f64 = 10.0;
    let (original, anonymized) = fixtures::recovery_pair(1024);

    let start = Instant::now();
    let output = postprocess(&original, &anonymized, None, &PipelineConfig::default()).unwrap();
    let elapsed = start.elapsed();

    assert!(output.data().iter().all(|v| v.is_finite()));
    assert!(
        elapsed.as_secs_f64() < BUDGET_SECS,
        "1024x1024 postprocess took {elapsed:?}, budget {BUDGET_SECS} s"
    );
    pass(
        10,
        "full-resolution postprocess",
        format!("1024x1024 pair in {elapsed:.2?} (budget 10 s, sequential)"),
    );
}
