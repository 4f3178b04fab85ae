use image::{Rgba, RgbaImage};

use crate::error::{Error, Result};
use crate::mask::{connected_components, BinaryMask, Connectivity};

/// Alpha level at and above which a pixel belongs to the sprite footprint.
pub const DEFAULT_ALPHA_THRESHOLD: u8 = 128;

/// Tight-cropped RGBA cutout of one seed or coin. Alpha is binary
/// (0 or 255) so the footprint is unambiguous.
#[derive(Debug, Clone)]
pub struct Sprite {
    pub pixels: RgbaImage,
    pub class_label: String,
    pub source_id: String,
    pub footprint_px: usize,
}

impl Sprite {
    pub fn width(&self) -> u32 {
        self.pixels.width()
    }

    pub fn height(&self) -> u32 {
        self.pixels.height()
    }

    /// Binary footprint mask at the sprite's own dimensions.
    pub fn footprint(&self) -> BinaryMask {
        BinaryMask::from_fn(self.width(), self.height(), |x, y| {
            self.pixels.get_pixel(x, y)[3] == 255
        })
    }
}

/// Extracts one sprite per 8-connected component of the alpha-thresholded
/// foreground, tight-cropped, skipping components smaller than `min_area`.
/// An image with no foreground yields an empty list.
pub fn extract_sprites(
    image: &RgbaImage,
    alpha_threshold: u8,
    min_area: usize,
    class_label: &str,
    source_id: &str,
) -> Vec<Sprite> {
    let fg = BinaryMask::from_fn(image.width(), image.height(), |x, y| {
        image.get_pixel(x, y)[3] >= alpha_threshold
    });
    let mut sprites = Vec::new();
    for comp in connected_components(&fg, Connectivity::Eight) {
        if comp.len() < min_area {
            continue;
        }
        let min_x = comp.pixels.iter().map(|p| p.0).min().unwrap();
        let max_x = comp.pixels.iter().map(|p| p.0).max().unwrap();
        let min_y = comp.pixels.iter().map(|p| p.1).min().unwrap();
        let max_y = comp.pixels.iter().map(|p| p.1).max().unwrap();
        let (w, h) = (max_x - min_x + 1, max_y - min_y + 1);
        let mut crop = RgbaImage::new(w, h);
        for &(x, y) in &comp.pixels {
            let src = image.get_pixel(x, y);
            crop.put_pixel(x - min_x, y - min_y, Rgba([src[0], src[1], src[2], 255]));
        }
        sprites.push(Sprite {
            pixels: crop,
            class_label: class_label.to_string(),
            source_id: source_id.to_string(),
            footprint_px: comp.len(),
        });
    }
    sprites
}

/// Loads a pre-extracted sprite PNG: the whole file is one sprite whose
/// footprint is the alpha-thresholded region, re-cropped tight.
pub fn sprite_from_image(
    image: &RgbaImage,
    alpha_threshold: u8,
    class_label: &str,
    source_id: &str,
) -> Result<Sprite> {
    let mut sprites = extract_sprites(image, alpha_threshold, 1, class_label, source_id);
    if sprites.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "sprite {source_id} has no pixels above alpha threshold {alpha_threshold}"
        )));
    }
    if sprites.len() == 1 {
        return Ok(sprites.remove(0));
    }
    // multiple blobs in one file still form one sprite: merge via a single
    // crop over the union footprint
    let fg = BinaryMask::from_fn(image.width(), image.height(), |x, y| {
        image.get_pixel(x, y)[3] >= alpha_threshold
    });
    let bbox = fg.bbox().unwrap();
    let (min_x, min_y) = (bbox.x as u32, bbox.y as u32);
    let (w, h) = (bbox.w as u32, bbox.h as u32);
    let mut crop = RgbaImage::new(w, h);
    let mut footprint = 0usize;
    for (x, y) in fg.pixels() {
        let src = image.get_pixel(x, y);
        crop.put_pixel(x - min_x, y - min_y, Rgba([src[0], src[1], src[2], 255]));
        footprint += 1;
    }
    Ok(Sprite {
        pixels: crop,
        class_label: class_label.to_string(),
        source_id: source_id.to_string(),
        footprint_px: footprint,
    })
}

/// Bounding-box size of a `w x h` raster after scaling and rotation, before
/// tight cropping. Used by the planner for fit checks; the rendered tight
/// crop never exceeds it.
pub fn transformed_extent(w: u32, h: u32, scale: f64, rotation_deg: f64) -> (u32, u32) {
    let rad = rotation_deg.to_radians();
    let (s, c) = (rad.sin().abs(), rad.cos().abs());
    let tw = scale * (w as f64 * c + h as f64 * s);
    let th = scale * (w as f64 * s + h as f64 * c);
    // epsilon guard: cos/sin of right angles carry ~1e-16 noise that would
    // otherwise bump the ceil by a full pixel
    (
        ((tw - 1e-9).ceil().max(1.0)) as u32,
        ((th - 1e-9).ceil().max(1.0)) as u32,
    )
}

/// Scales, rotates (about the sprite center), and brightness-adjusts a
/// sprite. RGB is bilinearly resampled with alpha premultiplication; the
/// alpha channel is resampled then re-binarized at 0.5, and the result is
/// tight-cropped to the new footprint.
pub fn transform_sprite(
    sprite: &Sprite,
    scale: f64,
    rotation_deg: f64,
    brightness: f64,
) -> Result<Sprite> {
    if scale <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "scale must be > 0, got {scale}"
        )));
    }
    let (sw, sh) = (sprite.width(), sprite.height());
    let (ow, oh) = transformed_extent(sw, sh, scale, rotation_deg);
    let rad = rotation_deg.to_radians();
    let (sin, cos) = (rad.sin(), rad.cos());
    let (ocx, ocy) = (ow as f64 / 2.0, oh as f64 / 2.0);
    let (scx, scy) = (sw as f64 / 2.0, sh as f64 / 2.0);

    let mut out = RgbaImage::new(ow, oh);
    for oy in 0..oh {
        for ox in 0..ow {
            // inverse map: un-translate, un-rotate, un-scale
            let dx = (ox as f64 + 0.5) - ocx;
            let dy = (oy as f64 + 0.5) - ocy;
            let rx = (dx * cos + dy * sin) / scale;
            let ry = (-dx * sin + dy * cos) / scale;
            let sx = rx + scx - 0.5;
            let sy = ry + scy - 0.5;
            let (r, g, b, a) = sample_premultiplied(&sprite.pixels, sx, sy);
            if a >= 127.5 {
                let br = |v: f64| ((v * brightness).round()).clamp(0.0, 255.0) as u8;
                out.put_pixel(ox, oy, Rgba([br(r), br(g), br(b), 255]));
            }
        }
    }

    let footprint = BinaryMask::from_fn(ow, oh, |x, y| out.get_pixel(x, y)[3] == 255);
    let bbox = footprint.bbox().ok_or_else(|| {
        Error::InvalidArgument(format!(
            "transform (scale {scale}, rot {rotation_deg}) erased sprite {}",
            sprite.source_id
        ))
    })?;
    let (min_x, min_y) = (bbox.x as u32, bbox.y as u32);
    let (cw, ch) = (bbox.w as u32, bbox.h as u32);
    let mut crop = RgbaImage::new(cw, ch);
    let mut count = 0usize;
    for y in 0..ch {
        for x in 0..cw {
            let p = *out.get_pixel(min_x + x, min_y + y);
            if p[3] == 255 {
                count += 1;
            }
            crop.put_pixel(x, y, p);
        }
    }
    Ok(Sprite {
        pixels: crop,
        class_label: sprite.class_label.clone(),
        source_id: sprite.source_id.clone(),
        footprint_px: count,
    })
}

// Bilinear sample with straight-alpha inputs handled as premultiplied so
// transparent neighbors do not darken edge colors. Returns un-premultiplied
// RGB plus the interpolated alpha.
fn sample_premultiplied(img: &RgbaImage, x: f64, y: f64) -> (f64, f64, f64, f64) {
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let mut acc = [0.0f64; 4];
    for (ix, wx) in [(x0 as i64, 1.0 - fx), (x0 as i64 + 1, fx)] {
        for (iy, wy) in [(y0 as i64, 1.0 - fy), (y0 as i64 + 1, fy)] {
            let w = wx * wy;
            if w == 0.0 {
                continue;
            }
            if ix < 0 || iy < 0 || ix >= img.width() as i64 || iy >= img.height() as i64 {
                continue; // outside contributes fully transparent
            }
            let p = img.get_pixel(ix as u32, iy as u32);
            let a = p[3] as f64;
            acc[0] += w * p[0] as f64 * a;
            acc[1] += w * p[1] as f64 * a;
            acc[2] += w * p[2] as f64 * a;
            acc[3] += w * a;
        }
    }
    if acc[3] <= 0.0 {
        (0.0, 0.0, 0.0, 0.0)
    } else {
        (acc[0] / acc[3], acc[1] / acc[3], acc[2] / acc[3], acc[3])
    }
}
