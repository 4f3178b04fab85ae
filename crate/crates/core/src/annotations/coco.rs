use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// COCO instance-segmentation document. Field order is the serialization
/// order, so identical documents serialize to identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocoDocument {
    pub images: Vec<CocoImage>,
    pub annotations: Vec<CocoAnnotation>,
    pub categories: Vec<CocoCategory>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocoImage {
    pub id: u64,
    pub file_name: String,
    pub width: u32,
    pub height: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocoAnnotation {
    pub id: u64,
    pub image_id: u64,
    pub category_id: u32,
    /// One flat `[x1, y1, x2, y2, ...]` list per polygon.
    pub segmentation: Vec<Vec<f64>>,
    /// Exact visible pixel count, not the polygon shoelace area.
    pub area: f64,
    /// `[x, y, w, h]` in pixels.
    pub bbox: [f64; 4],
    pub iscrowd: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocoCategory {
    pub id: u32,
    pub name: String,
}

impl CocoDocument {
    /// Checks id uniqueness, reference resolution, bbox bounds, and
    /// positive areas.
    pub fn validate(&self) -> Result<()> {
        let mut image_dims: HashMap<u64, (u32, u32)> = HashMap::new();
        for img in &self.images {
            if image_dims.insert(img.id, (img.width, img.height)).is_some() {
                return Err(Error::DuplicateId(format!("image id {}", img.id)));
            }
        }
        let mut category_ids = HashSet::new();
        for cat in &self.categories {
            if !category_ids.insert(cat.id) {
                return Err(Error::DuplicateId(format!("category id {}", cat.id)));
            }
        }
        let mut ann_ids = HashSet::new();
        for ann in &self.annotations {
            if !ann_ids.insert(ann.id) {
                return Err(Error::DuplicateId(format!("annotation id {}", ann.id)));
            }
            let Some(&(w, h)) = image_dims.get(&ann.image_id) else {
                return Err(Error::DanglingReference(format!(
                    "annotation {} references missing image_id {}",
                    ann.id, ann.image_id
                )));
            };
            if !category_ids.contains(&ann.category_id) {
                return Err(Error::DanglingReference(format!(
                    "annotation {} references missing category_id {}",
                    ann.id, ann.category_id
                )));
            }
            let [x, y, bw, bh] = ann.bbox;
            if x < 0.0 || y < 0.0 || bw < 0.0 || bh < 0.0 || x + bw > w as f64 || y + bh > h as f64
            {
                return Err(Error::OutOfBounds {
                    context: format!("annotation {}", ann.id),
                    detail: format!("bbox {:?} exceeds image {}x{}", ann.bbox, w, h),
                });
            }
            if ann.area <= 0.0 {
                return Err(Error::OutOfBounds {
                    context: format!("annotation {}", ann.id),
                    detail: format!("area must be > 0, got {}", ann.area),
                });
            }
        }
        Ok(())
    }
}

/// Validates and serializes a COCO document. Output is byte-stable for
/// identical inputs.
pub fn write_coco(doc: &CocoDocument) -> Result<String> {
    doc.validate()?;
    serde_json::to_string_pretty(doc).map_err(|e| Error::Annotation(e.to_string()))
}

/// Parses and validates COCO document bytes.
pub fn parse_coco(bytes: &[u8]) -> Result<CocoDocument> {
    let doc: CocoDocument = serde_json::from_slice(bytes)
        .map_err(|e| Error::Annotation(format!("malformed COCO JSON: {e}")))?;
    doc.validate()?;
    Ok(doc)
}
