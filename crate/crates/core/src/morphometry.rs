//! Penny-calibrated seed morphometry: length, width (minimum-area rotated
//! rectangle sides), and area in metric units, converted through the pixel
//! area of US pennies in a calibration image.
//!
//! Areas convert as `area_px * coin_area_mm2 / coin_area_px`. Linear
//! measures use the square root of that scale; the source convention only
//! converts areas, so length/width in mm are flagged as an extension in
//! the CSV metadata.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::min_area_rect;
use crate::mask::{connected_components, trace_boundary, BinaryMask, Connectivity};
use crate::Point;

/// US penny constants. The area is the working convention's literal value
/// (pi * (19.05/2)^2 rounds to 285.02; the 0.05% difference is accepted to
/// stay aligned with that convention).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoinReference {
    pub diameter_mm: f64,
    pub area_mm2: f64,
}

/// Returns the fixed US penny reference.
pub fn coin_reference() -> CoinReference {
    CoinReference {
        diameter_mm: 19.05,
        area_mm2: 284.87,
    }
}

/// Which statistic of the per-coin pixel areas anchors the scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoinStat {
    Median,
    Mean,
}

/// Pixel-to-metric scale derived from coin masks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Calibration {
    pub coin_pixel_areas: Vec<usize>,
    pub coin_stat: CoinStat,
    /// Median (or mean) coin area in pixels.
    pub coin_px: f64,
    pub mm2_per_px: f64,
    pub mm_per_px: f64,
}

/// Builds a calibration from one binary mask per coin. Even-count medians
/// take the mean of the two middle values.
pub fn calibrate(coin_masks: &[BinaryMask], stat: CoinStat) -> Result<Calibration> {
    if coin_masks.is_empty() {
        return Err(Error::EmptyInput("calibrate requires at least 1 coin mask"));
    }
    let mut areas: Vec<usize> = Vec::with_capacity(coin_masks.len());
    for (i, mask) in coin_masks.iter().enumerate() {
        let area = mask.count_ones();
        if area == 0 {
            return Err(Error::InvalidArgument(format!("coin mask {i} is empty")));
        }
        areas.push(area);
    }
    let coin_px = match stat {
        CoinStat::Median => {
            let mut sorted = areas.clone();
            sorted.sort_unstable();
            let n = sorted.len();
            if n % 2 == 1 {
                sorted[n / 2] as f64
            } else {
                (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0
            }
        }
        CoinStat::Mean => areas.iter().sum::<usize>() as f64 / areas.len() as f64,
    };
    let mm2_per_px = coin_reference().area_mm2 / coin_px;
    Ok(Calibration {
        coin_pixel_areas: areas,
        coin_stat: stat,
        coin_px,
        mm2_per_px,
        mm_per_px: mm2_per_px.sqrt(),
    })
}

/// Measurements for one instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MorphometryRecord {
    pub instance_id: u32,
    pub class_label: String,
    pub length_px: f64,
    pub width_px: f64,
    pub area_px: usize,
    pub length_mm: f64,
    pub width_mm: f64,
    pub area_mm2: f64,
}

/// Measures one instance mask: length/width from the minimum-area rotated
/// rectangle over the boundary points of every piece of the mask, area
/// from the exact pixel count.
pub fn measure_instance(
    mask: &BinaryMask,
    calibration: &Calibration,
    instance_id: u32,
    class_label: &str,
) -> Result<MorphometryRecord> {
    let components = connected_components(mask, Connectivity::Eight);
    if components.is_empty() {
        return Err(Error::EmptyInput("measure_instance requires a non-empty mask"));
    }
    let mut boundary_points: Vec<Point> = Vec::new();
    for comp in &components {
        boundary_points.extend(trace_boundary(comp)?.vertices);
    }
    let rect = min_area_rect(&boundary_points)?;
    let area_px = mask.count_ones();
    Ok(MorphometryRecord {
        instance_id,
        class_label: class_label.to_string(),
        length_px: rect.length,
        width_px: rect.width,
        area_px,
        length_mm: rect.length * calibration.mm_per_px,
        width_mm: rect.width * calibration.mm_per_px,
        area_mm2: area_px as f64 * calibration.mm2_per_px,
    })
}

/// Measures every instance passing the class filter. The returned count is
/// the number of measured records.
pub fn measure_image(
    instances: &[(BinaryMask, String)],
    calibration: &Calibration,
    class_filter: Option<&str>,
) -> Result<(Vec<MorphometryRecord>, usize)> {
    let mut records = Vec::new();
    for (i, (mask, class)) in instances.iter().enumerate() {
        if let Some(filter) = class_filter {
            if class != filter {
                continue;
            }
        }
        records.push(measure_instance(mask, calibration, i as u32, class)?);
    }
    let count = records.len();
    Ok((records, count))
}

pub const CSV_HEADER: &str =
    "image,instance_id,class,length_px,width_px,area_px,length_mm,width_mm,area_mm2";

/// CSV report over per-image record lists, with a trailing `#` summary line
/// per image carrying the instance count. Linear mm values derive from
/// sqrt(mm2_per_px), noted in the leading metadata comment.
pub fn csv_report(per_image: &[(String, Vec<MorphometryRecord>)], calibration: &Calibration) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# coin_stat={:?} coin_px={} mm2_per_px={:.9} mm_per_px=sqrt(mm2_per_px) (linear scale is an extension of the area convention)\n",
        calibration.coin_stat, calibration.coin_px, calibration.mm2_per_px
    ));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (image, records) in per_image {
        for r in records {
            out.push_str(&format!(
                "{image},{},{},{:.3},{:.3},{},{:.4},{:.4},{:.4}\n",
                r.instance_id,
                r.class_label,
                r.length_px,
                r.width_px,
                r.area_px,
                r.length_mm,
                r.width_mm,
                r.area_mm2
            ));
        }
        out.push_str(&format!("# {image}: count={}\n", records.len()));
    }
    out
}
