//! Photometric repair and evaluation for face anonymization pairs.
//!
//! Anonymization pipelines that swap or synthesize a face tend to paint it
//! under studio lighting and a drifted color cast, which makes the result
//! easy to spot next to the original frame. This crate corrects the
//! anonymized image against its original and measures how well the pair
//! holds up, without touching the anonymization itself.
//!
//! # Repair chain
//!
//! [`pipeline::postprocess`] runs three independent stages:
//!
//! ```text
//! I = A * S                 (intrinsic decomposition, S from a bilateral filter)
//! relit   = A_anon * S_orig (keep the new face, restore the old lighting)
//! blended = detail bands of the anonymized image over the relit base
//! output  = blended with its Cb/Cr moments moved onto the original's
//! ```
//!
//! Every stage can be toggled off, which is how the evaluation isolates
//! their contributions.
//!
//! # Evaluation
//!
//! [`eval::evaluate`] scores a manifest of (original, anonymized) pairs:
//! scale-invariant lighting errors ([`metrics::si_mse`], [`metrics::si_l2`]),
//! perceptual color differences ([`metrics::color_metrics`]), landmark and
//! expression displacement, embedding cosine similarity, and dataset-level
//! figures (re-identification rate, feature distribution distance, detection
//! rate, emotion agreement). Reports serialize to canonical JSON: the same
//! inputs produce the same bytes at any worker count.
//!
//! # Quick start
//!
//! ```
//! use photoanon::fixtures::recovery_pair;
//! use photoanon::metrics::si_mse;
//! use photoanon::pipeline::{postprocess, PipelineConfig};
//!
//! // A ramp-lit textured original next to a flat-lit stand-in for it.
//! let (original, anonymized) = recovery_pair(64);
//!
//! let repaired = postprocess(&original, &anonymized, None, &PipelineConfig::default())?;
//! let before = si_mse(&original, &anonymized, None)?.value;
//! let after = si_mse(&original, &repaired, None)?.value;
//! assert!(after < 0.5 * before);
//! # Ok::<(), photoanon::Error>(())
//! ```
//!
//! The `photoanon` binary wraps the same calls as `postprocess`, `evaluate`,
//! `report`, and `fixtures` subcommands; the `examples/` directory walks
//! through each capability on its own.

pub mod color;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod intrinsic;
pub mod landmarks;
pub mod manifest;
pub mod metrics;
pub mod pipeline;
pub mod pyramid;
pub mod raster;
pub mod report;
pub mod transfer;

pub use error::{Error, Result};
