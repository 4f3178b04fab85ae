use image::RgbImage;

use crate::compositor::{color_code, InstanceRecord};
use crate::error::{Error, Result};
use crate::geometry::AlignedBox;
use crate::mask::{connected_components, trace_boundary, BinaryMask, Connectivity};
use crate::Polygon;

/// Geometry of one instance extracted from a unique-color mask: one outer
/// boundary polygon per connected piece of the visible region.
#[derive(Debug, Clone)]
pub struct InstanceGeometry {
    pub instance_id: u32,
    pub class_label: String,
    pub polygons: Vec<Polygon>,
    pub bbox: AlignedBox<f64>,
    /// Exact visible pixel count.
    pub pixel_area: usize,
}

/// Bridges a compositor instance mask to annotation geometry. Each record's
/// color region may be split into several pieces by occluders; every piece
/// contributes one polygon. A record whose color is absent from the mask is
/// an error.
pub fn instances_from_mask(
    instance_mask: &RgbImage,
    records: &[InstanceRecord],
) -> Result<Vec<InstanceGeometry>> {
    let (w, h) = (instance_mask.width(), instance_mask.height());
    let mut out = Vec::with_capacity(records.len());
    for record in records {
        let region = BinaryMask::from_fn(w, h, |x, y| {
            color_code(instance_mask.get_pixel(x, y)) == record.color
        });
        let pixel_area = region.count_ones();
        if pixel_area == 0 {
            return Err(Error::Annotation(format!(
                "record {} (color {}) has no pixels in the mask",
                record.instance_id, record.color
            )));
        }
        let mut polygons = Vec::new();
        for comp in connected_components(&region, Connectivity::Eight) {
            polygons.push(trace_boundary(&comp)?);
        }
        let bbox = region.bbox().unwrap();
        out.push(InstanceGeometry {
            instance_id: record.instance_id,
            class_label: record.class_label.clone(),
            polygons,
            bbox,
            pixel_area,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compositor::instance_color;
    use image::Rgb;

    fn record(id: u32) -> InstanceRecord {
        InstanceRecord {
            instance_id: id,
            class_label: "seed".into(),
            color: id + 1,
            visible_pixels: 0,
            footprint_pixels: 0,
            bbox: (0.0, 0.0, 0.0, 0.0),
        }
    }

    #[test]
    fn solid_blob_yields_one_polygon() {
        let mut mask = RgbImage::new(16, 16);
        for y in 3..8 {
            for x in 2..9 {
                mask.put_pixel(x, y, instance_color(0));
            }
        }
        let out = instances_from_mask(&mask, &[record(0)]).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].polygons.len(), 1);
        assert_eq!(out[0].pixel_area, 35);
        assert_eq!(out[0].bbox, AlignedBox::new(2.0, 3.0, 7.0, 5.0));
    }

    #[test]
    fn occluder_split_region_yields_two_polygons() {
        // instance 0 split in half by a vertical band of instance 1
        let mut mask = RgbImage::new(16, 8);
        for y in 2..6 {
            for x in 2..12 {
                mask.put_pixel(x, y, instance_color(0));
            }
            for x in 6..9 {
                mask.put_pixel(x, y, instance_color(1));
            }
        }
        let out = instances_from_mask(&mask, &[record(0), record(1)]).unwrap();
        assert_eq!(out[0].polygons.len(), 2);
        assert_eq!(out[0].pixel_area, 4 * (4 + 3));
        assert_eq!(out[1].polygons.len(), 1);
    }

    #[test]
    fn empty_records_give_empty_output() {
        let mask = RgbImage::new(8, 8);
        assert!(instances_from_mask(&mask, &[]).unwrap().is_empty());
    }

    #[test]
    fn missing_color_is_an_error() {
        let mask = RgbImage::new(8, 8);
        assert!(instances_from_mask(&mask, &[record(0)]).is_err());
    }

    #[test]
    fn background_black_is_never_an_instance() {
        let mut mask = RgbImage::new(8, 8);
        mask.put_pixel(4, 4, Rgb([0, 0, 1])); // color code 1 == instance 0
        let out = instances_from_mask(&mask, &[record(0)]).unwrap();
        assert_eq!(out[0].pixel_area, 1);
    }
}
