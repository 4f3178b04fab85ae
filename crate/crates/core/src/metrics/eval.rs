use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{
    ap_over_range, ap_threshold_ladder, average_precision, match_greedy, recall_at, Detection,
    GroundTruthInstance, IouKind,
};
use crate::annotations::CocoDocument;
use crate::error::{Error, Result};
use crate::mask::{fill_polygons, BinaryMask};
use crate::{Box2, Polygon};

/// One prediction in the COCO results convention.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub image_id: u64,
    pub category_id: u32,
    pub score: f64,
    /// `[x, y, w, h]` in pixels.
    pub bbox: [f64; 4],
    /// Optional polygon segmentation, same layout as COCO annotations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segmentation: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalOptions {
    /// IoU used for the per-threshold AP columns: `mask` (default) or
    /// `bbox` for detectors without masks.
    pub ap_iou: String,
    /// Upper bound of the AP threshold ladder (0.95 default).
    pub ap_max: f64,
    /// Drop detections scoring below this before any metric.
    pub score_threshold: Option<f64>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            ap_iou: "mask".into(),
            ap_max: 0.95,
            score_threshold: None,
        }
    }
}

impl EvalOptions {
    fn iou_kind(&self) -> Result<IouKind> {
        match self.ap_iou.as_str() {
            "mask" => Ok(IouKind::Mask),
            "bbox" => Ok(IouKind::Bbox),
            other => Err(Error::InvalidArgument(format!(
                "ap_iou must be `mask` or `bbox`, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassReport {
    pub category_id: u32,
    pub name: String,
    pub gt_count: usize,
    pub det_count: usize,
    /// Recall at bbox IoU 0.5, all detections pooled across images.
    pub recall50: Option<f64>,
    /// AP at IoU 0.5 (mask IoU unless configured otherwise).
    pub ap50: Option<f64>,
    /// Mean AP over the threshold ladder.
    pub ap_range_mean: Option<f64>,
    pub tp50: usize,
    pub fp50: usize,
    pub fn50: usize,
    /// (threshold, AP) pairs across the ladder.
    pub ap_table: Vec<(f64, Option<f64>)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub interpolation: String,
    pub recall_pooling: String,
    pub ap_iou: String,
    pub ap_thresholds: Vec<f64>,
    pub score_threshold: Option<f64>,
    pub classes: Vec<ClassReport>,
}

fn polygons_from_flat(flat: &[Vec<f64>]) -> Vec<Polygon> {
    flat.iter()
        .map(|coords| {
            Polygon::new(
                coords
                    .chunks_exact(2)
                    .map(|c| crate::Point::new(c[0], c[1]))
                    .collect(),
            )
        })
        .collect()
}

fn bbox_mask(bbox: &Box2, w: u32, h: u32) -> BinaryMask {
    BinaryMask::from_fn(w, h, |x, y| {
        (x as f64) >= bbox.x
            && (x as f64) < bbox.right()
            && (y as f64) >= bbox.y
            && (y as f64) < bbox.bottom()
    })
}

/// Evaluates predictions against COCO ground truth: per-class Recall50,
/// AP50, and mean AP over the threshold ladder, with 0.5-threshold match
/// diagnostics. Prediction polygons are rasterized to masks at image
/// resolution before mask IoU; ground truths without polygons fall back to
/// their filled bbox.
pub fn evaluate_dataset(
    ground_truth: &CocoDocument,
    predictions: &[PredictionRecord],
    options: &EvalOptions,
) -> Result<EvalReport> {
    ground_truth.validate()?;
    let iou_kind = options.iou_kind()?;
    let thresholds = ap_threshold_ladder(options.ap_max);
    if thresholds.is_empty() {
        return Err(Error::Evaluation(format!(
            "ap_max {} leaves an empty threshold ladder",
            options.ap_max
        )));
    }

    let image_dims: HashMap<u64, (u32, u32)> = ground_truth
        .images
        .iter()
        .map(|img| (img.id, (img.width, img.height)))
        .collect();
    let category_names: HashMap<u32, &str> = ground_truth
        .categories
        .iter()
        .map(|c| (c.id, c.name.as_str()))
        .collect();

    let mut gts: Vec<GroundTruthInstance> = Vec::with_capacity(ground_truth.annotations.len());
    for ann in &ground_truth.annotations {
        let &(w, h) = image_dims.get(&ann.image_id).unwrap();
        let bbox = Box2::new(ann.bbox[0], ann.bbox[1], ann.bbox[2], ann.bbox[3]);
        let mask = if ann.segmentation.is_empty() {
            bbox_mask(&bbox, w, h)
        } else {
            fill_polygons(&polygons_from_flat(&ann.segmentation), w, h)
        };
        if mask.is_empty() {
            return Err(Error::Evaluation(format!(
                "annotation {} rasterizes to an empty mask",
                ann.id
            )));
        }
        gts.push(GroundTruthInstance {
            image_id: ann.image_id,
            class_id: ann.category_id,
            bbox,
            mask,
        });
    }

    let mut dets: Vec<Detection> = Vec::with_capacity(predictions.len());
    for (i, p) in predictions.iter().enumerate() {
        let Some(&(w, h)) = image_dims.get(&p.image_id) else {
            return Err(Error::DanglingReference(format!(
                "prediction {i} references missing image_id {}",
                p.image_id
            )));
        };
        if !category_names.contains_key(&p.category_id) {
            return Err(Error::DanglingReference(format!(
                "prediction {i} references missing category_id {}",
                p.category_id
            )));
        }
        if let Some(t) = options.score_threshold {
            if p.score < t {
                continue;
            }
        }
        let mask = p
            .segmentation
            .as_ref()
            .map(|seg| fill_polygons(&polygons_from_flat(seg), w, h));
        dets.push(Detection {
            image_id: p.image_id,
            class_id: p.category_id,
            score: p.score,
            bbox: Box2::new(p.bbox[0], p.bbox[1], p.bbox[2], p.bbox[3]),
            mask,
        });
    }

    let mut category_ids: Vec<u32> = ground_truth.categories.iter().map(|c| c.id).collect();
    category_ids.sort_unstable();

    let mut classes = Vec::new();
    for cid in category_ids {
        let class_gts: Vec<GroundTruthInstance> =
            gts.iter().filter(|g| g.class_id == cid).cloned().collect();
        let class_dets: Vec<Detection> =
            dets.iter().filter(|d| d.class_id == cid).cloned().collect();

        let recall50 = recall_at(&class_dets, &class_gts, 0.5)?;
        let ap50 = if class_gts.is_empty() {
            None
        } else {
            average_precision(&class_dets, &class_gts, iou_kind, 0.5)?
        };
        let ap_range_mean = match iou_kind {
            IouKind::Mask => ap_over_range(&class_dets, &class_gts, &thresholds)?,
            IouKind::Bbox => {
                if class_gts.is_empty() {
                    None
                } else {
                    let mut total = 0.0;
                    for &t in &thresholds {
                        total += average_precision(&class_dets, &class_gts, IouKind::Bbox, t)?
                            .unwrap_or(0.0);
                    }
                    Some(total / thresholds.len() as f64)
                }
            }
        };
        let mut ap_table = Vec::new();
        for &t in &thresholds {
            let ap = if class_gts.is_empty() {
                None
            } else {
                average_precision(&class_dets, &class_gts, iou_kind, t)?
            };
            ap_table.push((t, ap));
        }

        let assignment = match_greedy(&class_dets, &class_gts, IouKind::Bbox, 0.5)?;
        let tp50 = assignment.true_positive_count();
        classes.push(ClassReport {
            category_id: cid,
            name: category_names[&cid].to_string(),
            gt_count: class_gts.len(),
            det_count: class_dets.len(),
            recall50,
            ap50,
            ap_range_mean,
            tp50,
            fp50: class_dets.len() - tp50,
            fn50: class_gts.len() - tp50,
            ap_table,
        });
    }

    Ok(EvalReport {
        interpolation: "101-point".into(),
        recall_pooling: "instances pooled across images".into(),
        ap_iou: options.ap_iou.clone(),
        ap_thresholds: thresholds,
        score_threshold: options.score_threshold,
        classes,
    })
}

fn fmt_metric(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:.3}"),
        None => "n/a".to_string(),
    }
}

/// Aligned plain-text table with one row per class: Recall50, AP50, and the
/// mean AP column.
pub fn format_report_table(report: &EvalReport) -> String {
    let hi = report.ap_thresholds.last().copied().unwrap_or(0.95);
    let mut out = format!(
        "{:<12} {:>9} {:>9} {:>13}\n",
        "class",
        "Recall50",
        "AP50",
        format!("AP@[.50:.{:02}]", (hi * 100.0).round() as u32)
    );
    for c in &report.classes {
        out.push_str(&format!(
            "{:<12} {:>9} {:>9} {:>13}\n",
            c.name,
            fmt_metric(c.recall50),
            fmt_metric(c.ap50),
            fmt_metric(c.ap_range_mean),
        ));
    }
    out
}
