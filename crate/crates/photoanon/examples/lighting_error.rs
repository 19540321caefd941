//! Scale-invariant lighting errors.
//!
//! Si-MSE scores image agreement up to one global gain: doubling an image
//! costs nothing, changing its light field does. The closed-form gain is
//! checked against a brute-force sweep, and Si-L2 compares shading maps
//! directly.

use photoanon::intrinsic::{decompose, BilateralParams};
use photoanon::metrics::{si_l2, si_mse};
use photoanon::raster::ImageF;

fn main() -> photoanon::Result<()> {
    let n = 48;
    let original = ImageF::from_fn(n, n, |x, y| {
        let a = 0.6 + 0.15 * ((x as f64 / 6.0).sin() + (y as f64 / 5.0).cos());
        let s = 0.3 + 0.6 * x as f64 / (n - 1) as f64;
        [a * s, 0.9 * a * s, 0.85 * a * s]
    });

    // Same image, twice as bright (clipped nowhere by construction /2).
    let doubled = ImageF::from_vec(n, n, original.data().iter().map(|v| v * 2.0).collect())?;
    let score = si_mse(&original, &doubled, None)?;
    println!(
        "si_mse(I, 2I) = {:.2e} with fitted gain {:.3} (scale costs nothing)",
        score.value, score.alpha
    );

    // Different lighting is not a gain change: the edit stays visible.
    let relit = ImageF::from_fn(n, n, |x, y| {
        let a = 0.6 + 0.15 * ((x as f64 / 6.0).sin() + (y as f64 / 5.0).cos());
        let s = 0.9 - 0.6 * x as f64 / (n - 1) as f64;
        [a * s, 0.9 * a * s, 0.85 * a * s]
    });
    let score = si_mse(&original, &relit, None)?;
    println!("si_mse(I, reversed light) = {:.4}", score.value);

    // The closed-form gain is the sweep's minimum.
    let mut best = (f64::INFINITY, 0.0);
    let mut alpha = 0.0;
    while alpha <= 4.0 {
        let mse = original
            .data()
            .iter()
            .zip(relit.data())
            .map(|(o, a)| (o - alpha * a).powi(2))
            .sum::<f64>()
            / (n * n) as f64;
        if mse < best.0 {
            best = (mse, alpha);
        }
        alpha += 1e-3;
    }
    println!(
        "grid search: alpha {:.3} -> mse {:.4}; closed form: alpha {:.3} -> mse {:.4}",
        best.1, best.0, score.alpha, score.value
    );

    let params = BilateralParams::for_dims(n, n);
    let s_orig = decompose(&original, &params)?.1;
    let s_relit = decompose(&relit, &params)?.1;
    println!(
        "si_l2 between the two estimated shading maps: {:.3}",
        si_l2(&s_orig, &s_relit, None)?.value
    );
    Ok(())
}
