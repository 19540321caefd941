//! Landmark displacement, normalized by interocular distance.
//!
//! The error is the mean per-point L1 shift divided by the original's
//! eye-center distance, so it reads the same at any image resolution.
//! The expression variant drops the jaw line and scores points 17..=67.

use photoanon::fixtures::face_landmarks;
use photoanon::landmarks::LandmarkSet;
use photoanon::metrics::{expression_error, landmark_error};

fn shifted(set: &LandmarkSet, dx: f64, dy: f64) -> LandmarkSet {
    LandmarkSet::new(set.points().iter().map(|p| (p.0 + dx, p.1 + dy)).collect()).unwrap()
}

fn main() -> photoanon::Result<()> {
    let face = face_landmarks(100.0, 120.0, 90.0);
    println!(
        "template interocular distance: {:.6}",
        face.interocular_distance()?
    );

    let moved = shifted(&face, 3.0, 4.0);
    println!(
        "uniform (3,4) shift: landmark error {:.6} = (3+4)/100",
        landmark_error(&face, &moved)?
    );

    // Only the mouth moves: the full error dilutes over 68 points, the
    // expression error over its 51.
    let mut points = face.points().to_vec();
    for p in &mut points[48..68] {
        p.1 += 5.0;
    }
    let smile = LandmarkSet::new(points)?;
    println!(
        "mouth-only shift:    landmark error {:.6}, expression error {:.6}",
        landmark_error(&face, &smile)?,
        expression_error(&face, &smile)?
    );

    // Same face at double resolution: both errors are unchanged.
    let big = LandmarkSet::new(face.points().iter().map(|p| (p.0 * 2.0, p.1 * 2.0)).collect())?;
    let big_moved = LandmarkSet::new(moved.points().iter().map(|p| (p.0 * 2.0, p.1 * 2.0)).collect())?;
    println!(
        "after 2x upscale:    landmark error {:.6} (resolution independent)",
        landmark_error(&big, &big_moved)?
    );
    Ok(())
}
