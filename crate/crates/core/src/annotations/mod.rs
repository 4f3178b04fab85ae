//! Writers and readers for the two annotation formats the detector
//! ecosystems consume: COCO instance-segmentation JSON and YOLO TXT
//! labels, plus the bridge from unique-color instance masks to per-instance
//! polygon geometry.
//!
//! COCO polygons cannot encode holes, so segmentation polygons are outer
//! boundaries with holes filled; `area` always carries the exact visible
//! pixel count so hole filling never corrupts downstream area use.

mod coco;
mod instances;
mod yolo;

pub use coco::{parse_coco, write_coco, CocoAnnotation, CocoCategory, CocoDocument, CocoImage};
pub use instances::{instances_from_mask, InstanceGeometry};
pub use yolo::{parse_yolo, write_yolo};
