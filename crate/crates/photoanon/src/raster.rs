//! Float image containers, grayscale conversion, pyramid resampling kernels,
//! and PNG I/O.
//!
//! Everything downstream works on `f64` samples with nominal range [0,1];
//! integer codes exist only at the file boundary (8-bit out, 8- or 16-bit in).

use std::path::Path;

use crate::error::{Error, Result};

/// Burt-Adelson binomial 5-tap kernel, sums to 1.
const KERNEL: [f64; 5] = [
    1.0 / 16.0,
    4.0 / 16.0,
    6.0 / 16.0,
    4.0 / 16.0,
    1.0 / 16.0,
];

#[inline]
fn clamp_index(i: isize, n: usize) -> usize {
    i.clamp(0, n as isize - 1) as usize
}

/// Three-channel float raster, interleaved RGB, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageF {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

/// Single-channel float raster, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayImage {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

/// Binary pixel selection, row-major. Loaded from single-channel PNGs
/// (code > 127 selects) or built in memory.
#[derive(Clone, Debug, PartialEq)]
pub struct Mask {
    height: usize,
    width: usize,
    data: Vec<bool>,
}

impl ImageF {
    /// All-zero image.
    pub fn new(height: usize, width: usize) -> ImageF {
        ImageF {
            height,
            width,
            data: vec![0.0; height * width * 3],
        }
    }

    pub fn from_vec(height: usize, width: usize, data: Vec<f64>) -> Result<ImageF> {
        if data.len() != height * width * 3 {
            return Err(Error::Shape(format!(
                "rgb buffer length {} does not match {height}x{width}x3",
                data.len()
            )));
        }
        Ok(ImageF {
            height,
            width,
            data,
        })
    }

    /// Build from a per-pixel function returning [r,g,b].
    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> [f64; 3]) -> ImageF {
        let mut data = Vec::with_capacity(height * width * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        ImageF {
            height,
            width,
            data,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn set_pixel(&mut self, x: usize, y: usize, px: [f64; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&px);
    }

    /// BT.601 full-range luma, the gray(.) operator of the decomposition and
    /// the Y channel of the transfer stage. Output stays in [0,1] for
    /// in-range input because the weights are a convex combination.
    pub fn to_gray(&self) -> GrayImage {
        let mut data = Vec::with_capacity(self.height * self.width);
        for px in self.data.chunks_exact(3) {
            data.push(0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2]);
        }
        GrayImage {
            height: self.height,
            width: self.width,
            data,
        }
    }

    /// Separable binomial filter then 2x decimation; output dims ceil(d/2).
    pub fn downsample2(&self) -> Result<ImageF> {
        check_downsample_dims(self.height, self.width)?;
        let (hd, wd) = (self.height.div_ceil(2), self.width.div_ceil(2));
        let mut out = ImageF::new(hd, wd);
        for c in 0..3 {
            let plane = extract_plane(&self.data, c);
            let down = downsample_plane(&plane, self.height, self.width);
            insert_plane(&mut out.data, &down, c);
        }
        Ok(out)
    }

    /// Zero-insertion to the target grid, then the binomial kernel with gain
    /// 2 per separable pass. Target dims must be 2d-1 or 2d per axis; the
    /// explicit target is what makes pyramid round trips exact in shape.
    pub fn upsample2(&self, target_h: usize, target_w: usize) -> Result<ImageF> {
        check_upsample_dims(self.height, self.width, target_h, target_w)?;
        let mut out = ImageF::new(target_h, target_w);
        for c in 0..3 {
            let plane = extract_plane(&self.data, c);
            let up = upsample_plane(&plane, self.height, self.width, target_h, target_w);
            insert_plane(&mut out.data, &up, c);
        }
        Ok(out)
    }

    /// Largest absolute per-sample difference; images must share dims.
    pub fn max_abs_diff(&self, other: &ImageF) -> f64 {
        assert_eq!(
            (self.height, self.width),
            (other.height, other.width),
            "max_abs_diff on mismatched dims"
        );
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn clamped01(mut self) -> ImageF {
        for v in &mut self.data {
            *v = v.clamp(0.0, 1.0);
        }
        self
    }
}

impl GrayImage {
    pub fn new(height: usize, width: usize) -> GrayImage {
        GrayImage {
            height,
            width,
            data: vec![0.0; height * width],
        }
    }

    pub fn from_vec(height: usize, width: usize, data: Vec<f64>) -> Result<GrayImage> {
        if data.len() != height * width {
            return Err(Error::Shape(format!(
                "gray buffer length {} does not match {height}x{width}",
                data.len()
            )));
        }
        Ok(GrayImage {
            height,
            width,
            data,
        })
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> f64) -> GrayImage {
        let mut data = Vec::with_capacity(height * width);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        GrayImage {
            height,
            width,
            data,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    pub fn downsample2(&self) -> Result<GrayImage> {
        check_downsample_dims(self.height, self.width)?;
        let data = downsample_plane(&self.data, self.height, self.width);
        Ok(GrayImage {
            height: self.height.div_ceil(2),
            width: self.width.div_ceil(2),
            data,
        })
    }

    pub fn upsample2(&self, target_h: usize, target_w: usize) -> Result<GrayImage> {
        check_upsample_dims(self.height, self.width, target_h, target_w)?;
        let data = upsample_plane(&self.data, self.height, self.width, target_h, target_w);
        Ok(GrayImage {
            height: target_h,
            width: target_w,
            data,
        })
    }
}

impl Mask {
    /// Mask selecting every pixel.
    pub fn full(height: usize, width: usize) -> Mask {
        Mask {
            height,
            width,
            data: vec![true; height * width],
        }
    }

    pub fn from_vec(height: usize, width: usize, data: Vec<bool>) -> Result<Mask> {
        if data.len() != height * width {
            return Err(Error::Shape(format!(
                "mask buffer length {} does not match {height}x{width}",
                data.len()
            )));
        }
        Ok(Mask {
            height,
            width,
            data,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    #[inline]
    pub fn selected(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    pub fn count_selected(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }
}

pub(crate) fn check_downsample_dims(h: usize, w: usize) -> Result<()> {
    if h.min(w) < 2 {
        return Err(Error::Shape(format!(
            "cannot downsample a {h}x{w} image, need both dims >= 2"
        )));
    }
    Ok(())
}

fn check_upsample_dims(h: usize, w: usize, th: usize, tw: usize) -> Result<()> {
    let ok = |d: usize, t: usize| t == 2 * d || t == 2 * d - 1;
    if !ok(h, th) || !ok(w, tw) {
        return Err(Error::Shape(format!(
            "upsample target {th}x{tw} not in {{2d-1, 2d}} of source {h}x{w}"
        )));
    }
    Ok(())
}

fn extract_plane(rgb: &[f64], c: usize) -> Vec<f64> {
    rgb.iter().skip(c).step_by(3).copied().collect()
}

fn insert_plane(rgb: &mut [f64], plane: &[f64], c: usize) {
    for (dst, &v) in rgb.iter_mut().skip(c).step_by(3).zip(plane) {
        *dst = v;
    }
}

/// One separable pass of filter + decimate along x, applied twice with a
/// transpose-free index swap. Replicate padding at both borders.
fn downsample_plane(data: &[f64], h: usize, w: usize) -> Vec<f64> {
    let wd = w.div_ceil(2);
    let hd = h.div_ceil(2);
    let mut tmp = vec![0.0; h * wd];
    for y in 0..h {
        let row = &data[y * w..(y + 1) * w];
        for i in 0..wd {
            let center = 2 * i as isize;
            let mut acc = 0.0;
            for (k, kv) in KERNEL.iter().enumerate() {
                acc += kv * row[clamp_index(center + k as isize - 2, w)];
            }
            tmp[y * wd + i] = acc;
        }
    }
    let mut out = vec![0.0; hd * wd];
    for i in 0..hd {
        let center = 2 * i as isize;
        for x in 0..wd {
            let mut acc = 0.0;
            for (k, kv) in KERNEL.iter().enumerate() {
                acc += kv * tmp[clamp_index(center + k as isize - 2, h) * wd + x];
            }
            out[i * wd + x] = acc;
        }
    }
    out
}

/// Polyphase form of zero-insertion + binomial kernel with gain 2 per pass.
/// Even taps reduce to (s[i-1] + 6 s[i] + s[i+1])/8 and odd taps to the
/// midpoint average; border indices replicate in the source domain, which is
/// what keeps constants exactly constant.
fn upsample_axis(src: &[f64], n: usize, target: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(target);
    for j in 0..target {
        let i = (j / 2) as isize;
        let v = if j % 2 == 0 {
            let a = src[clamp_index(i - 1, n)];
            let b = src[clamp_index(i, n)];
            let c = src[clamp_index(i + 1, n)];
            (a + 6.0 * b + c) / 8.0
        } else {
            let a = src[clamp_index(i, n)];
            let b = src[clamp_index(i + 1, n)];
            0.5 * (a + b)
        };
        out.push(v);
    }
    out
}

fn upsample_plane(data: &[f64], h: usize, w: usize, th: usize, tw: usize) -> Vec<f64> {
    let mut tmp = vec![0.0; h * tw];
    for y in 0..h {
        let row = upsample_axis(&data[y * w..(y + 1) * w], w, tw);
        tmp[y * tw..(y + 1) * tw].copy_from_slice(&row);
    }
    let mut col = vec![0.0; h];
    let mut out = vec![0.0; th * tw];
    for x in 0..tw {
        for y in 0..h {
            col[y] = tmp[y * tw + x];
        }
        let up = upsample_axis(&col, h, th);
        for (y, v) in up.iter().enumerate() {
            out[y * tw + x] = *v;
        }
    }
    out
}

/// Load an 8- or 16-bit RGB(A) PNG; integer codes map linearly to [0,1] and
/// alpha is dropped.
pub fn load_image(path: impl AsRef<Path>) -> Result<ImageF> {
    let path = path.as_ref();
    let dynimg = image::open(path).map_err(|e| Error::image(path, e.to_string()))?;
    let (w, h) = (dynimg.width() as usize, dynimg.height() as usize);
    if w == 0 || h == 0 {
        return Err(Error::image(path, "zero-dimension image"));
    }
    let data: Vec<f64> = match dynimg {
        image::DynamicImage::ImageRgb8(b) => b.into_raw().iter().map(|&v| v as f64 / 255.0).collect(),
        image::DynamicImage::ImageRgba8(b) => b
            .into_raw()
            .chunks_exact(4)
            .flat_map(|px| px[..3].iter().map(|&v| v as f64 / 255.0).collect::<Vec<_>>())
            .collect(),
        image::DynamicImage::ImageRgb16(b) => b.into_raw().iter().map(|&v| v as f64 / 65535.0).collect(),
        image::DynamicImage::ImageRgba16(b) => b
            .into_raw()
            .chunks_exact(4)
            .flat_map(|px| px[..3].iter().map(|&v| v as f64 / 65535.0).collect::<Vec<_>>())
            .collect(),
        other => {
            return Err(Error::image(
                path,
                format!("unsupported pixel layout {:?}, expected 8/16-bit RGB or RGBA", other.color()),
            ))
        }
    };
    ImageF::from_vec(h, w, data)
}

/// Clamp to [0,1], quantize with round(v*255), write 8-bit RGB PNG.
pub fn save_image(img: &ImageF, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes: Vec<u8> = img
        .data()
        .iter()
        .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect();
    let buf = image::RgbImage::from_raw(img.width() as u32, img.height() as u32, bytes)
        .expect("buffer length matches dims by construction");
    buf.save(path).map_err(|e| Error::image(path, e.to_string()))
}

/// Load a single-channel 8- or 16-bit PNG as [0,1] grays (alpha dropped).
pub fn load_gray(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let dynimg = image::open(path).map_err(|e| Error::image(path, e.to_string()))?;
    let (w, h) = (dynimg.width() as usize, dynimg.height() as usize);
    if w == 0 || h == 0 {
        return Err(Error::image(path, "zero-dimension image"));
    }
    let data: Vec<f64> = match dynimg {
        image::DynamicImage::ImageLuma8(b) => b.into_raw().iter().map(|&v| v as f64 / 255.0).collect(),
        image::DynamicImage::ImageLumaA8(b) => b.into_raw().iter().step_by(2).map(|&v| v as f64 / 255.0).collect(),
        image::DynamicImage::ImageLuma16(b) => b.into_raw().iter().map(|&v| v as f64 / 65535.0).collect(),
        image::DynamicImage::ImageLumaA16(b) => b.into_raw().iter().step_by(2).map(|&v| v as f64 / 65535.0).collect(),
        other => {
            return Err(Error::image(
                path,
                format!("unsupported pixel layout {:?}, expected single-channel PNG", other.color()),
            ))
        }
    };
    GrayImage::from_vec(h, w, data)
}

/// Write a single-channel 8-bit PNG, round(v*255) after clamping.
pub fn save_gray(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes: Vec<u8> = img
        .data()
        .iter()
        .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect();
    let buf = image::GrayImage::from_raw(img.width() as u32, img.height() as u32, bytes)
        .expect("buffer length matches dims by construction");
    buf.save(path).map_err(|e| Error::image(path, e.to_string()))
}

/// Load a binary mask from an 8-bit single-channel PNG: code > 127 selects.
pub fn load_mask(path: impl AsRef<Path>) -> Result<Mask> {
    let path = path.as_ref();
    let gray = load_gray(path)?;
    let data = gray.data().iter().map(|&v| v * 255.0 > 127.0).collect();
    Mask::from_vec(gray.height(), gray.width(), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_image(rng: &mut impl Rng, h: usize, w: usize) -> ImageF {
        ImageF::from_fn(h, w, |_, _| [rng.random(), rng.random(), rng.random()])
    }

    /// Independent 2D convolution + decimation oracle with replicate padding.
    fn downsample_oracle(img: &GrayImage) -> GrayImage {
        let (h, w) = (img.height(), img.width());
        let full = GrayImage::from_fn(h, w, |x, y| {
            let mut acc = 0.0;
            for (ky, kv_y) in KERNEL.iter().enumerate() {
                for (kx, kv_x) in KERNEL.iter().enumerate() {
                    let sy = clamp_index(y as isize + ky as isize - 2, h);
                    let sx = clamp_index(x as isize + kx as isize - 2, w);
                    acc += kv_y * kv_x * img.get(sx, sy);
                }
            }
            acc
        });
        GrayImage::from_fn(h.div_ceil(2), w.div_ceil(2), |x, y| full.get(2 * x, 2 * y))
    }

    #[test]
    fn gray_of_white_is_one() {
        let img = ImageF::from_fn(2, 2, |_, _| [1.0, 1.0, 1.0]);
        assert!(img.to_gray().data().iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn gray_of_pure_red_is_luma_weight() {
        let img = ImageF::from_fn(2, 3, |_, _| [1.0, 0.0, 0.0]);
        assert!(img.to_gray().data().iter().all(|&v| (v - 0.299).abs() < 1e-12));
    }

    #[test]
    fn gray_matches_per_pixel_dot_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let img = random_image(&mut rng, 7, 9);
        let gray = img.to_gray();
        for y in 0..7 {
            for x in 0..9 {
                let [r, g, b] = img.pixel(x, y);
                let expect = 0.299 * r + 0.587 * g + 0.114 * b;
                assert!((gray.get(x, y) - expect).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn downsample_constant_halves_dims() {
        let img = GrayImage::from_fn(6, 7, |_, _| 0.42);
        let down = img.downsample2().unwrap();
        assert_eq!((down.height(), down.width()), (3, 4));
        assert!(down.data().iter().all(|&v| (v - 0.42).abs() < 1e-12));
    }

    #[test]
    fn downsample_ceil_rule_on_odd_dims() {
        let img = GrayImage::new(5, 5);
        let down = img.downsample2().unwrap();
        assert_eq!((down.height(), down.width()), (3, 3));
    }

    #[test]
    fn downsample_matches_full_convolution_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for (h, w) in [(4, 4), (5, 7), (16, 9)] {
            let img = GrayImage::from_fn(h, w, |_, _| rng.random());
            let fast = img.downsample2().unwrap();
            let slow = downsample_oracle(&img);
            for (a, b) in fast.data().iter().zip(slow.data()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn downsample_of_ramp_stays_monotone() {
        let img = GrayImage::from_fn(4, 4, |x, _| x as f64 / 3.0);
        let down = img.downsample2().unwrap();
        let slow = downsample_oracle(&img);
        for (a, b) in down.data().iter().zip(slow.data()) {
            assert!((a - b).abs() < 1e-12);
        }
        for y in 0..down.height() {
            assert!(down.get(0, y) < down.get(1, y));
        }
    }

    #[test]
    fn downsample_rejects_degenerate_dims() {
        let img = GrayImage::new(1, 8);
        assert!(matches!(img.downsample2(), Err(Error::Shape(_))));
    }

    #[test]
    fn upsample_constant_is_constant_at_both_parities() {
        let img = GrayImage::from_fn(3, 4, |_, _| 0.7);
        for (th, tw) in [(6, 8), (5, 7), (6, 7), (5, 8)] {
            let up = img.upsample2(th, tw).unwrap();
            assert_eq!((up.height(), up.width()), (th, tw));
            assert!(up.data().iter().all(|&v| (v - 0.7).abs() < 1e-12), "{th}x{tw}");
        }
    }

    #[test]
    fn down_then_up_of_constant_is_identity() {
        let img = GrayImage::from_fn(9, 6, |_, _| 0.3);
        let down = img.downsample2().unwrap();
        let up = down.upsample2(9, 6).unwrap();
        for (a, b) in up.data().iter().zip(img.data()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn upsample_preserves_mean_within_two_percent() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let img = GrayImage::from_fn(16, 16, |_, _| rng.random());
        let up = img.upsample2(32, 32).unwrap();
        let mean = |d: &[f64]| d.iter().sum::<f64>() / d.len() as f64;
        let (m0, m1) = (mean(img.data()), mean(up.data()));
        assert!((m0 - m1).abs() / m0 < 0.02, "mean drifted {m0} -> {m1}");
    }

    #[test]
    fn upsample_rejects_inconsistent_target() {
        let img = GrayImage::new(4, 4);
        assert!(matches!(img.upsample2(9, 8), Err(Error::Shape(_))));
        assert!(matches!(img.upsample2(8, 6), Err(Error::Shape(_))));
    }

    #[test]
    fn rgb_resampling_matches_per_plane_gray() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let img = random_image(&mut rng, 10, 8);
        let down = img.downsample2().unwrap();
        for c in 0..3 {
            let plane = GrayImage::from_vec(10, 8, extract_plane(img.data(), c)).unwrap();
            let dplane = plane.downsample2().unwrap();
            for (y, row) in dplane.data().chunks_exact(dplane.width()).enumerate() {
                for (x, v) in row.iter().enumerate() {
                    assert!((down.pixel(x, y)[c] - v).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn save_clamps_and_load_roundtrips_within_quantization() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.png");
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let mut img = random_image(&mut rng, 9, 11);
        img.set_pixel(0, 0, [1.2, -0.1, 0.5]);
        save_image(&img, &path).unwrap();
        let back = load_image(&path).unwrap();
        assert_eq!(back.pixel(0, 0)[0], 1.0);
        assert_eq!(back.pixel(0, 0)[1], 0.0);
        let clamped = img.clamped01();
        let err = clamped.max_abs_diff(&back);
        assert!(err <= 1.0 / 510.0 + 1e-12, "round-trip error {err}");
    }

    #[test]
    fn load_maps_8bit_codes_linearly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("px.png");
        image::RgbImage::from_raw(1, 1, vec![255, 0, 128]).unwrap().save(&path).unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!(img.pixel(0, 0)[0], 1.0);
        assert_eq!(img.pixel(0, 0)[1], 0.0);
        assert!((img.pixel(0, 0)[2] - 128.0 / 255.0).abs() < 1e-12);
    }

    #[test]
    fn load_drops_alpha() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rgba.png");
        image::RgbaImage::from_raw(1, 1, vec![10, 20, 30, 7]).unwrap().save(&path).unwrap();
        let img = load_image(&path).unwrap();
        let px = img.pixel(0, 0);
        assert!((px[0] - 10.0 / 255.0).abs() < 1e-12);
        assert!((px[2] - 30.0 / 255.0).abs() < 1e-12);
    }

    #[test]
    fn load_maps_16bit_codes_linearly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("px16.png");
        let buf: image::ImageBuffer<image::Rgb<u16>, Vec<u16>> =
            image::ImageBuffer::from_raw(1, 1, vec![65535u16, 0, 32768]).unwrap();
        buf.save(&path).unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!(img.pixel(0, 0)[0], 1.0);
        assert!((img.pixel(0, 0)[2] - 32768.0 / 65535.0).abs() < 1e-12);
    }

    #[test]
    fn load_missing_file_is_io_error() {
        assert!(load_image("/nonexistent/nope.png").is_err());
    }

    #[test]
    fn mask_loads_threshold_at_127() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mask.png");
        image::GrayImage::from_raw(1, 3, vec![0, 127, 128]).unwrap().save(&path).unwrap();
        let mask = load_mask(&path).unwrap();
        assert_eq!(mask.data(), &[false, false, true]);
        assert_eq!(mask.count_selected(), 1);
    }

    #[test]
    fn gray_png_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.png");
        let img = GrayImage::from_fn(4, 4, |x, y| (x + y) as f64 / 8.0);
        save_gray(&img, &path).unwrap();
        let back = load_gray(&path).unwrap();
        for (a, b) in img.data().iter().zip(back.data()) {
            assert!((a - b).abs() <= 1.0 / 510.0 + 1e-12);
        }
    }

    #[test]
    fn from_vec_rejects_wrong_length() {
        assert!(matches!(ImageF::from_vec(2, 2, vec![0.0; 5]), Err(Error::Shape(_))));
        assert!(matches!(GrayImage::from_vec(2, 2, vec![0.0; 5]), Err(Error::Shape(_))));
    }
}
