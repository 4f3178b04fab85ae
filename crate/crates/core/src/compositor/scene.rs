use image::{Rgb, RgbImage};
use rand::Rng;

use super::config::SynthConfig;
use super::sprite::{transform_sprite, transformed_extent, Sprite};
use crate::error::{Error, Result};
use crate::geometry::AlignedBox;
use crate::rng::image_stream;

/// One sprite instance scheduled for compositing. `z_order` is the
/// placement sequence number; later placements occlude earlier ones.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub sprite_index: usize,
    pub center: (f64, f64),
    pub scale: f64,
    pub rotation_deg: f64,
    pub brightness: f64,
    pub z_order: usize,
}

/// Ground-truth record for one surviving instance.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct InstanceRecord {
    pub instance_id: u32,
    pub class_label: String,
    /// 24-bit mask color; decodes to `instance_id + 1`.
    pub color: u32,
    pub visible_pixels: usize,
    /// Footprint before occlusion.
    pub footprint_pixels: usize,
    pub bbox: (f64, f64, f64, f64),
}

impl InstanceRecord {
    pub fn aligned_box(&self) -> AlignedBox<f64> {
        AlignedBox::new(self.bbox.0, self.bbox.1, self.bbox.2, self.bbox.3)
    }
}

/// Composite plus its unique-color instance mask and per-instance records.
#[derive(Debug, Clone)]
pub struct LabeledImage {
    pub composite: RgbImage,
    pub instance_mask: RgbImage,
    pub records: Vec<InstanceRecord>,
}

/// Encodes instance id `id` as the 24-bit mask color for `id + 1`.
pub fn instance_color(instance_id: u32) -> Rgb<u8> {
    let v = instance_id + 1;
    Rgb([(v >> 16) as u8, (v >> 8) as u8, v as u8])
}

/// Decodes a mask color back to its 24-bit integer (0 means background).
pub fn color_code(p: &Rgb<u8>) -> u32 {
    ((p[0] as u32) << 16) | ((p[1] as u32) << 8) | p[2] as u32
}

/// Draws a randomized placement plan for one image. Deterministic in
/// `(config.master_seed, image_index)`; overlap between placements is
/// unconstrained.
pub fn plan_scene(
    config: &SynthConfig,
    sprites: &[Sprite],
    image_index: u64,
) -> Result<Vec<Placement>> {
    config.validate()?;
    if sprites.is_empty() {
        return Err(Error::EmptyInput("plan_scene requires at least 1 sprite"));
    }
    let (canvas_w, canvas_h) = config.canvas_size;
    let mut rng = image_stream(config.master_seed, image_index);

    let count = rng.gen_range(config.count_range.0..=config.count_range.1) as usize;
    let mut plan = Vec::with_capacity(count);
    for z_order in 0..count {
        let sprite_index = rng.gen_range(0..sprites.len());
        let sprite = &sprites[sprite_index];
        let scale = sample_range(&mut rng, config.scale_range);
        let rotation_deg = sample_half_open(&mut rng, config.rotation_range);
        let brightness = sample_range(&mut rng, config.brightness_range);
        let (tw, th) = transformed_extent(sprite.width(), sprite.height(), scale, rotation_deg);

        let mut placed = None;
        for _ in 0..config.max_place_retries {
            let cx = rng.gen_range(0.0..canvas_w as f64);
            let cy = rng.gen_range(0.0..canvas_h as f64);
            let fits = cx - tw as f64 / 2.0 >= 0.0
                && cx + tw as f64 / 2.0 <= canvas_w as f64
                && cy - th as f64 / 2.0 >= 0.0
                && cy + th as f64 / 2.0 <= canvas_h as f64;
            if fits {
                placed = Some((cx, cy));
                break;
            }
        }
        let (cx, cy) = placed.ok_or(Error::PlacementRetriesExhausted {
            sprite_index,
            label: sprite.class_label.clone(),
            retries: config.max_place_retries,
            w: tw,
            h: th,
            canvas_w,
            canvas_h,
        })?;
        plan.push(Placement {
            sprite_index,
            center: (cx, cy),
            scale,
            rotation_deg,
            brightness,
            z_order,
        });
    }
    Ok(plan)
}

fn sample_range(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

fn sample_half_open(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..hi)
    }
}

/// Composites a plan over a background, painting the instance mask with
/// each placement's unique color. Instances that end up fully occluded, or
/// whose visible fraction falls below `min_visible_fraction`, are dropped
/// from the records and erased from the mask.
pub fn render_scene(
    plan: &[Placement],
    sprites: &[Sprite],
    background: &RgbImage,
    config: &SynthConfig,
) -> Result<LabeledImage> {
    let (canvas_w, canvas_h) = config.canvas_size;
    if background.width() != canvas_w || background.height() != canvas_h {
        return Err(Error::DimensionMismatch(
            background.width(),
            background.height(),
            canvas_w,
            canvas_h,
        ));
    }

    let mut composite = background.clone();
    // owner[i] = instance_id + 1, 0 = background
    let mut owner = vec![0u32; (canvas_w * canvas_h) as usize];
    let mut footprints = vec![0usize; plan.len()];
    let mut labels = vec![String::new(); plan.len()];

    for placement in plan {
        let sprite = &sprites[placement.sprite_index];
        let transformed = transform_sprite(
            sprite,
            placement.scale,
            placement.rotation_deg,
            placement.brightness,
        )?;
        let id = placement.z_order as u32;
        footprints[placement.z_order] = transformed.footprint_px;
        labels[placement.z_order] = transformed.class_label.clone();

        let (tw, th) = (transformed.width(), transformed.height());
        let x0 = ((placement.center.0 - tw as f64 / 2.0).round() as i64)
            .clamp(0, (canvas_w - tw.min(canvas_w)) as i64);
        let y0 = ((placement.center.1 - th as f64 / 2.0).round() as i64)
            .clamp(0, (canvas_h - th.min(canvas_h)) as i64);

        for sy in 0..th {
            for sx in 0..tw {
                let p = transformed.pixels.get_pixel(sx, sy);
                if p[3] != 255 {
                    continue;
                }
                let (cx, cy) = (x0 as u32 + sx, y0 as u32 + sy);
                if cx >= canvas_w || cy >= canvas_h {
                    continue;
                }
                composite.put_pixel(cx, cy, Rgb([p[0], p[1], p[2]]));
                owner[(cy * canvas_w + cx) as usize] = id + 1;
            }
        }
    }

    // visibility census
    let mut visible = vec![0usize; plan.len()];
    let mut bounds: Vec<Option<(u32, u32, u32, u32)>> = vec![None; plan.len()];
    for y in 0..canvas_h {
        for x in 0..canvas_w {
            let v = owner[(y * canvas_w + x) as usize];
            if v == 0 {
                continue;
            }
            let idx = (v - 1) as usize;
            visible[idx] += 1;
            bounds[idx] = Some(match bounds[idx] {
                None => (x, y, x, y),
                Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
            });
        }
    }

    let mut keep = vec![false; plan.len()];
    let mut records = Vec::new();
    for placement in plan {
        let idx = placement.z_order;
        if visible[idx] == 0 {
            continue;
        }
        let fraction = visible[idx] as f64 / footprints[idx] as f64;
        if fraction < config.min_visible_fraction {
            continue;
        }
        keep[idx] = true;
        let (x0, y0, x1, y1) = bounds[idx].unwrap();
        records.push(InstanceRecord {
            instance_id: idx as u32,
            class_label: labels[idx].clone(),
            color: idx as u32 + 1,
            visible_pixels: visible[idx],
            footprint_pixels: footprints[idx],
            bbox: (
                x0 as f64,
                y0 as f64,
                (x1 - x0 + 1) as f64,
                (y1 - y0 + 1) as f64,
            ),
        });
    }

    let mut instance_mask = RgbImage::new(canvas_w, canvas_h);
    for y in 0..canvas_h {
        for x in 0..canvas_w {
            let v = owner[(y * canvas_w + x) as usize];
            if v != 0 && keep[(v - 1) as usize] {
                instance_mask.put_pixel(x, y, instance_color(v - 1));
            }
        }
    }

    Ok(LabeledImage {
        composite,
        instance_mask,
        records,
    })
}
