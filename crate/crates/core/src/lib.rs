//! seedkit: batch toolkit for seed imaging pipelines.
//!
//! Four subsystems, each usable on its own:
//!
//! 1. **compositor** – domain-randomized scene synthesis: sprites are
//!    extracted from alpha-matted captures, augmented, and composited onto
//!    backgrounds together with a unique-color instance mask.
//! 2. **annotations** – COCO instance-segmentation JSON and YOLO TXT label
//!    writers/readers with byte-stable output.
//! 3. **metrics** – detector-agnostic Recall/AP evaluation over bbox or
//!    mask IoU.
//! 4. **morphometry** – penny-calibrated seed length/width/area in metric
//!    units from instance masks.
//!
//! Shared 2-D primitives live in [`geometry`] (generic over the scalar
//! type) and [`mask`].

pub mod annotations;
pub mod cli;
pub mod compositor;
pub mod error;
pub mod geometry;
pub mod mask;
pub mod metrics;
pub mod morphometry;
pub mod rng;

pub use error::{Error, Result};

/// Scalar type used by the pipeline.
pub type Scalar = f64;
/// 2-D point over the pipeline scalar.
pub type Point = geometry::Point2<Scalar>;
/// Pixel polygon over the pipeline scalar.
pub type Polygon = geometry::PixelPolygon<Scalar>;
/// Axis-aligned box over the pipeline scalar.
pub type Box2 = geometry::AlignedBox<Scalar>;
/// Rotated rectangle over the pipeline scalar.
pub type Rect = geometry::RotatedRect<Scalar>;
