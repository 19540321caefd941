//! 68-point face landmark sets: the iBUG layout, CSV on disk.
//!
//! Indices 0-16 outline the jaw; 17-67 cover brows, nose, eyes and mouth
//! and form the expression subset used when rigid placement should not
//! count. Eye rings 36-41 and 42-47 define the interocular distance that
//! normalizes every landmark metric, so the geometry stays comparable
//! across face scales.

use std::ops::RangeInclusive;
use std::path::Path;

use crate::error::{Error, Result};

/// Full set size.
pub const LANDMARK_COUNT: usize = 68;

/// Indices of the expression subset: everything but the jaw outline.
pub const EXPRESSION_RANGE: RangeInclusive<usize> = 17..=67;

const LEFT_EYE: RangeInclusive<usize> = 36..=41;
const RIGHT_EYE: RangeInclusive<usize> = 42..=47;

/// One image's 68 landmark positions, in pixel coordinates, indexed by the
/// iBUG numbering.
#[derive(Clone, Debug, PartialEq)]
pub struct LandmarkSet {
    points: Vec<(f64, f64)>,
}

impl LandmarkSet {
    /// Wrap a full set of positions; the vec index is the landmark index.
    pub fn new(points: Vec<(f64, f64)>) -> Result<LandmarkSet> {
        if points.len() != LANDMARK_COUNT {
            return Err(Error::Shape(format!(
                "landmark set needs {LANDMARK_COUNT} points, got {}",
                points.len()
            )));
        }
        Ok(LandmarkSet { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// The 51 non-jaw points.
    pub fn expression_points(&self) -> &[(f64, f64)] {
        &self.points[*EXPRESSION_RANGE.start()..=*EXPRESSION_RANGE.end()]
    }

    fn eye_centroid(&self, ring: RangeInclusive<usize>) -> (f64, f64) {
        let n = ring.clone().count() as f64;
        let (mut cx, mut cy) = (0.0, 0.0);
        for i in ring {
            cx += self.points[i].0;
            cy += self.points[i].1;
        }
        (cx / n, cy / n)
    }

    /// Distance between the two eye-ring centroids.
    ///
    /// Degenerate geometry (coincident eyes) is an error: every caller is
    /// about to divide by this.
    pub fn interocular_distance(&self) -> Result<f64> {
        let l = self.eye_centroid(LEFT_EYE);
        let r = self.eye_centroid(RIGHT_EYE);
        let d = ((l.0 - r.0).powi(2) + (l.1 - r.1).powi(2)).sqrt();
        if d < 1e-9 {
            return Err(Error::Degenerate(format!(
                "interocular distance {d} is effectively zero"
            )));
        }
        Ok(d)
    }
}

/// Read a landmark CSV: header `idx,x,y`, one row per landmark, every index
/// 0..=67 exactly once, any row order.
pub fn load_landmarks(path: impl AsRef<Path>) -> Result<LandmarkSet> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    if headers != vec!["idx", "x", "y"] {
        return Err(Error::Parse(format!(
            "{}: expected header idx,x,y, got {}",
            path.display(),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut points = vec![None; LANDMARK_COUNT];
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let field = |i: usize| -> Result<&str> {
            record.get(i).ok_or_else(|| {
                Error::Parse(format!("{}: row has fewer than 3 fields", path.display()))
            })
        };
        let raw_idx = field(0)?;
        let idx: usize = raw_idx.parse().map_err(|_| {
            Error::Parse(format!(
                "{}: bad landmark index {raw_idx:?}",
                path.display()
            ))
        })?;
        if idx >= LANDMARK_COUNT {
            return Err(Error::Parse(format!(
                "{}: landmark index {idx} out of range",
                path.display()
            )));
        }
        let parse_coord = |i: usize| -> Result<f64> {
            let raw = field(i)?;
            let v: f64 = raw.parse().map_err(|_| {
                Error::Parse(format!("{}: bad coordinate {raw:?}", path.display()))
            })?;
            if !v.is_finite() {
                return Err(Error::Parse(format!(
                    "{}: non-finite coordinate {raw:?}",
                    path.display()
                )));
            }
            Ok(v)
        };
        let xy = (parse_coord(1)?, parse_coord(2)?);
        if points[idx].replace(xy).is_some() {
            return Err(Error::Parse(format!(
                "{}: duplicate landmark index {idx}",
                path.display()
            )));
        }
    }
    let mut out = Vec::with_capacity(LANDMARK_COUNT);
    for (idx, p) in points.into_iter().enumerate() {
        match p {
            Some(xy) => out.push(xy),
            None => {
                return Err(Error::Parse(format!(
                    "{}: missing landmark index {idx}",
                    path.display()
                )))
            }
        }
    }
    LandmarkSet::new(out)
}

/// Write the CSV format [`load_landmarks`] reads, rows in index order.
/// Coordinates print with enough digits to round-trip exactly.
pub fn save_landmarks(set: &LandmarkSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse(format!("{}: {other:?}", path.display())),
    })?;
    writer
        .write_record(["idx", "x", "y"])
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    for (idx, (x, y)) in set.points().iter().enumerate() {
        writer
            .write_record([idx.to_string(), x.to_string(), y.to_string()])
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    }
    writer
        .flush()
        .map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// A plausible frontal-face constellation: eye rings centered at (30,40)
/// and (70,40), everything else spread deterministically. Shared by tests
/// across the crate.
#[cfg(test)]
pub(crate) fn synthetic_face() -> LandmarkSet {
    let mut points = Vec::with_capacity(LANDMARK_COUNT);
    for i in 0..LANDMARK_COUNT {
        let t = i as f64;
        points.push((10.0 + t * 1.25, 80.0 - (t * 0.7).sin() * 30.0));
    }
    for (k, i) in LEFT_EYE.enumerate() {
        let a = k as f64 / 6.0 * std::f64::consts::TAU;
        points[i] = (30.0 + 3.0 * a.cos(), 40.0 + 2.0 * a.sin());
    }
    for (k, i) in RIGHT_EYE.enumerate() {
        let a = k as f64 / 6.0 * std::f64::consts::TAU;
        points[i] = (70.0 + 3.0 * a.cos(), 40.0 + 2.0 * a.sin());
    }
    LandmarkSet::new(points).unwrap()
}
