//! Global chroma statistics transfer between aligned image pairs.
//!
//! Matches the first two moments of the Cb and Cr planes of a source image
//! to those of a reference, leaving luma untouched. An affine map per
//! channel is all it takes: anonymizers tend to shift skin tone globally,
//! not locally. Statistics can be restricted to a mask (the face region)
//! while the map itself is applied to the whole frame, so the correction
//! has no seams.

use crate::color::{rgb_to_ycbcr, ycbcr_to_rgb, ImageYCbCr};
use crate::error::{Error, Result};
use crate::raster::{ImageF, Mask};

/// Below this the source channel is treated as constant and only the mean
/// is shifted; dividing by a vanishing std would blow up quantization noise.
pub const MIN_TRANSFER_STD: f64 = 1e-6;

/// The two channels the transfer may touch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChromaChannel {
    Cb,
    Cr,
}

/// First two moments of one plane. `std` is the population figure
/// (divide by n, not n-1): these are descriptive stats of a fixed frame,
/// not estimates from a sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelStats {
    pub mean: f64,
    pub std: f64,
}

fn plane(img: &ImageYCbCr, channel: ChromaChannel) -> &[f64] {
    match channel {
        ChromaChannel::Cb => &img.cb,
        ChromaChannel::Cr => &img.cr,
    }
}

/// Mean and population std of one chroma plane, over the mask if given.
///
/// Two-pass evaluation: mean first, then centered second moment.
pub fn chroma_stats(
    img: &ImageYCbCr,
    channel: ChromaChannel,
    mask: Option<&Mask>,
) -> Result<ChannelStats> {
    let values = plane(img, channel);
    if let Some(m) = mask {
        if (m.height(), m.width()) != (img.height, img.width) {
            return Err(Error::Shape(format!(
                "mask {}x{} vs image {}x{}",
                m.height(),
                m.width(),
                img.height,
                img.width
            )));
        }
    }
    let selected = |i: usize| mask.is_none_or(|m| m.data()[i]);
    let n = match mask {
        Some(m) => m.count_selected(),
        None => values.len(),
    };
    if n == 0 {
        return Err(Error::Degenerate("mask selects no pixels".into()));
    }
    let mut sum = 0.0;
    for (i, v) in values.iter().enumerate() {
        if selected(i) {
            sum += v;
        }
    }
    let mean = sum / n as f64;
    let mut sq = 0.0;
    for (i, v) in values.iter().enumerate() {
        if selected(i) {
            sq += (v - mean) * (v - mean);
        }
    }
    Ok(ChannelStats {
        mean,
        std: (sq / n as f64).sqrt(),
    })
}

/// Affine map matching source moments to reference moments. Degenerate
/// source spread turns the map into a pure mean shift.
fn affine(src: ChannelStats, reference: ChannelStats) -> (f64, f64) {
    let gain = if src.std < MIN_TRANSFER_STD {
        1.0
    } else {
        reference.std / src.std
    };
    (gain, reference.mean - gain * src.mean)
}

/// Move the Cb and Cr moments of `src` onto those of `reference`; the luma
/// plane is carried over untouched.
///
/// Stats come from the masked region when a mask is given; the resulting
/// map is applied to every pixel. Images must share dims (the mask gates
/// both sides of the pair).
pub fn transfer_chroma(
    src: &ImageYCbCr,
    reference: &ImageYCbCr,
    mask: Option<&Mask>,
) -> Result<ImageYCbCr> {
    if (src.height, src.width) != (reference.height, reference.width) {
        return Err(Error::Shape(format!(
            "transfer pair {}x{} vs {}x{}",
            src.height, src.width, reference.height, reference.width
        )));
    }
    let mut out = src.clone();
    for channel in [ChromaChannel::Cb, ChromaChannel::Cr] {
        let s = chroma_stats(src, channel, mask)?;
        let r = chroma_stats(reference, channel, mask)?;
        let (gain, offset) = affine(s, r);
        let dst = match channel {
            ChromaChannel::Cb => &mut out.cb,
            ChromaChannel::Cr => &mut out.cr,
        };
        for v in dst.iter_mut() {
            *v = gain * *v + offset;
        }
    }
    Ok(out)
}

/// RGB front end for [`transfer_chroma`]: converts both images, transfers,
/// converts back (which clamps into gamut).
pub fn color_transfer(
    src: &ImageF,
    reference: &ImageF,
    mask: Option<&Mask>,
) -> Result<ImageF> {
    let out = transfer_chroma(&rgb_to_ycbcr(src), &rgb_to_ycbcr(reference), mask)?;
    Ok(ycbcr_to_rgb(&out))
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn rgb_strategy() -> impl Strategy<Value = ImageF> {
        (4..12usize, 4..12usize).prop_flat_map(|(h, w)| {
            proptest::collection::vec(0.0..1.0f64, h * w * 3)
                .prop_map(move |data| ImageF::from_vec(h, w, data).unwrap())
        })
    }

    proptest! {
        #[test]
        fn moments_always_land_on_reference(a in rgb_strategy(), seed in 0u64..1000) {
            use rand::prelude::*;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let b = ImageF::from_fn(a.height(), a.width(), |_, _| {
                [rng.random(), rng.random(), rng.random()]
            });
            let src = rgb_to_ycbcr(&a);
            let reference = rgb_to_ycbcr(&b);
            let s = chroma_stats(&src, ChromaChannel::Cb, None).unwrap();
            prop_assume!(s.std > 1e-3);
            let out = transfer_chroma(&src, &reference, None).unwrap();
            let got = chroma_stats(&out, ChromaChannel::Cb, None).unwrap();
            let want = chroma_stats(&reference, ChromaChannel::Cb, None).unwrap();
            prop_assert!((got.mean - want.mean).abs() < 1e-9);
            prop_assert!((got.std - want.std).abs() < 1e-9);
        }

        #[test]
        fn luma_never_moves(a in rgb_strategy(), seed in 0u64..1000) {
            use rand::prelude::*;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let b = ImageF::from_fn(a.height(), a.width(), |_, _| {
                [rng.random(), rng.random(), rng.random()]
            });
            let src = rgb_to_ycbcr(&a);
            let out = transfer_chroma(&src, &rgb_to_ycbcr(&b), None).unwrap();
            prop_assert_eq!(&out.y, &src.y);
        }
    }
}
