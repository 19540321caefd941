//! Chroma statistics transfer.
//!
//! Moves the Cb/Cr mean and spread of a blue-cast image onto a warm
//! reference. Luma is never touched: brightness and contrast stay put
//! while the cast goes away.

use photoanon::color::rgb_to_ycbcr;
use photoanon::raster::ImageF;
use photoanon::transfer::{chroma_stats, color_transfer, ChromaChannel};

fn main() -> photoanon::Result<()> {
    let n = 48;
    let reference = ImageF::from_fn(n, n, |x, y| {
        let t = 0.3 + 0.4 * ((x + y) as f64 / (2 * n - 2) as f64);
        let warm = 0.10 + 0.08 * (y as f64 / (n - 1) as f64);
        [t + warm, t + 0.3 * warm, t - warm]
    });
    let cast = ImageF::from_fn(n, n, |x, y| {
        let t = 0.35 + 0.3 * ((x as f64 / 9.0).sin() * 0.5 + 0.5) + 0.002 * y as f64;
        let blue = 0.12 + 0.10 * (x as f64 / (n - 1) as f64);
        [t - blue, t, t + blue]
    });

    let corrected = color_transfer(&cast, &reference, None)?;

    let show = |label: &str, img: &ImageF| -> photoanon::Result<()> {
        let ycc = rgb_to_ycbcr(img);
        let cb = chroma_stats(&ycc, ChromaChannel::Cb, None)?;
        let cr = chroma_stats(&ycc, ChromaChannel::Cr, None)?;
        println!(
            "{label:10} Cb {:+.4} / {:.4}   Cr {:+.4} / {:.4}",
            cb.mean, cb.std, cr.mean, cr.std
        );
        Ok(())
    };
    println!("           chroma  mean / std");
    show("reference", &reference)?;
    show("cast", &cast)?;
    show("corrected", &corrected)?;

    let luma_drift = rgb_to_ycbcr(&cast)
        .y
        .iter()
        .zip(rgb_to_ycbcr(&corrected).y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("max luma drift: {luma_drift:.2e} (zero: the transfer is chroma-only)");
    Ok(())
}
