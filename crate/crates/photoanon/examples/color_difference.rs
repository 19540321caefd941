//! Perceptual color differences: CIEDE2000 and friends.
//!
//! Single-color distances first, then the image-level summary (mean
//! lightness/chroma/total differences plus the two MSE variants) on a
//! pair that differs only by a color cast.

use photoanon::color::{delta_e2000, srgb_to_lab, ColorLab};
use photoanon::metrics::color_metrics;
use photoanon::raster::ImageF;

fn main() -> photoanon::Result<()> {
    let pairs = [
        ("white vs white", [1.0, 1.0, 1.0], [1.0, 1.0, 1.0]),
        ("red vs orange", [0.8, 0.1, 0.1], [0.9, 0.45, 0.1]),
        ("mid gray, +5% light", [0.5, 0.5, 0.5], [0.55, 0.55, 0.55]),
        ("blue vs teal", [0.1, 0.2, 0.8], [0.1, 0.6, 0.6]),
    ];
    println!("single colors (sRGB in [0,1]):");
    for (label, a, b) in pairs {
        let (la, lb) = (srgb_to_lab(a), srgb_to_lab(b));
        println!("  {label:22} dE2000 {:7.3}", delta_e2000(&la, &lb));
    }

    // Lab coordinates straight from the CIE definition ranges.
    let c1 = ColorLab { l: 50.0, a: 2.6772, b: -79.7751 };
    let c2 = ColorLab { l: 50.0, a: 0.0, b: -82.7485 };
    println!("  lab textbook pair       dE2000 {:7.4}", delta_e2000(&c1, &c2));

    let n = 40;
    let scene = |x: usize, y: usize| 0.35 + 0.3 * ((x as f64 / 7.0).sin() * 0.5 + 0.5) + 0.002 * (y as f64);
    let original = ImageF::from_fn(n, n, |x, y| {
        let t = scene(x, y);
        [t + 0.05, t, t - 0.05]
    });
    let shifted = ImageF::from_fn(n, n, |x, y| {
        let t = scene(x, y);
        [t - 0.04, t + 0.02, t + 0.09]
    });
    let m = color_metrics(&original, &shifted, None)?;
    println!("\nimage pair with a cool cast:");
    println!("  mean dL     {:8.4}", m.mean_delta_l);
    println!("  mean dC     {:8.4}", m.mean_delta_c);
    println!("  mean dE2000 {:8.4}", m.mean_delta_e2000);
    println!("  mse L       {:8.6}", m.mse_l);
    println!("  mse ab      {:8.6}", m.mse_ab);
    Ok(())
}
