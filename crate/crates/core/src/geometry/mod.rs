//! Exact 2-D primitives shared by every other module: convex hulls,
//! minimum-area rotated rectangles, polygon areas, and box IoU.
//!
//! Everything here is generic over the scalar type through [`num_traits::Float`];
//! the crate root exposes `f64` aliases, which is what the pipeline uses.

mod hull;
mod iou;
mod point;
mod rect;

pub use hull::convex_hull;
pub use iou::{bbox_iou, AlignedBox};
pub use point::{PixelPolygon, Point2};
pub use rect::{min_area_rect, shoelace_area, RotatedRect};
