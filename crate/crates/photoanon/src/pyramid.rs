//! Laplacian pyramid decomposition and low-frequency substitution.
//!
//! A depth-K pyramid splits an image into K band-pass detail levels plus a
//! low-pass base. Rebuilding with the detail levels of one image and the
//! base of another swaps coarse lighting and color while keeping fine
//! structure: the frequency-domain half of repairing an anonymized frame.
//!
//! Analysis and synthesis share the binomial resampler from [`crate::raster`],
//! so a build/reconstruct round trip is exact up to float noise. Values are
//! only clamped after the final reconstruction, never per level; detail
//! levels are signed.

use crate::error::{Error, Result};
use crate::raster::{check_downsample_dims, ImageF};

/// Detail levels fine to coarse, plus the residual low-pass base.
#[derive(Clone, Debug)]
pub struct LaplacianPyramid {
    levels: Vec<ImageF>,
    base: ImageF,
}

impl LaplacianPyramid {
    /// Band-pass detail levels, finest first. Level 0 has the source dims.
    pub fn levels(&self) -> &[ImageF] {
        &self.levels
    }

    /// Residual low-pass image after the last detail level.
    pub fn base(&self) -> &ImageF {
        &self.base
    }

    /// Number of detail levels.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }
}

/// Largest depth `build_laplacian` accepts for these dims: every level to be
/// downsampled needs both sides >= 2.
pub fn max_depth(height: usize, width: usize) -> usize {
    let mut depth = 0;
    let (mut h, mut w) = (height, width);
    while h >= 2 && w >= 2 {
        depth += 1;
        h = h.div_ceil(2);
        w = w.div_ceil(2);
    }
    depth
}

fn sub(mut a: ImageF, b: &ImageF) -> ImageF {
    for (x, y) in a.data_mut().iter_mut().zip(b.data()) {
        *x -= y;
    }
    a
}

fn add(mut a: ImageF, b: &ImageF) -> ImageF {
    for (x, y) in a.data_mut().iter_mut().zip(b.data()) {
        *x += y;
    }
    a
}

/// Decompose into `depth` detail levels and a base.
///
/// Each step keeps `G - upsample(downsample(G))` as the detail level and
/// recurses on the downsampled image, so `reconstruct` inverts the analysis
/// exactly.
pub fn build_laplacian(img: &ImageF, depth: usize) -> Result<LaplacianPyramid> {
    if depth == 0 {
        return Err(Error::Degenerate(
            "pyramid depth must be at least 1".into(),
        ));
    }
    let available = max_depth(img.height(), img.width());
    if depth > available {
        return Err(Error::Shape(format!(
            "{}x{} supports pyramid depth at most {available}, requested {depth}",
            img.height(),
            img.width()
        )));
    }
    let mut levels = Vec::with_capacity(depth);
    let mut current = img.clone();
    for _ in 0..depth {
        check_downsample_dims(current.height(), current.width())?;
        let down = current.downsample2()?;
        let up = down.upsample2(current.height(), current.width())?;
        levels.push(sub(current, &up));
        current = down;
    }
    Ok(LaplacianPyramid {
        levels,
        base: current,
    })
}

/// Invert [`build_laplacian`]: upsample from the base, adding each detail
/// level on the way up. No clamping; feeding back an unmodified pyramid
/// returns the source up to float noise.
pub fn reconstruct(pyramid: &LaplacianPyramid) -> Result<ImageF> {
    let mut current = pyramid.base.clone();
    for level in pyramid.levels.iter().rev() {
        current = add(current.upsample2(level.height(), level.width())?, level);
    }
    Ok(current)
}

/// Rebuild with the detail levels of `detail` and the base of `base`,
/// clamped to [0,1].
///
/// Both images must share dims so the two pyramids line up level by level.
pub fn blend_low_frequency(detail: &ImageF, base: &ImageF, depth: usize) -> Result<ImageF> {
    if (detail.height(), detail.width()) != (base.height(), base.width()) {
        return Err(Error::Shape(format!(
            "blend inputs {}x{} vs {}x{}",
            detail.height(),
            detail.width(),
            base.height(),
            base.width()
        )));
    }
    let fine = build_laplacian(detail, depth)?;
    let coarse = build_laplacian(base, depth)?;
    let merged = LaplacianPyramid {
        levels: fine.levels,
        base: coarse.base,
    };
    Ok(reconstruct(&merged)?.clamped01())
}
