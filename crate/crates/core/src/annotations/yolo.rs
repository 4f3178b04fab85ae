use crate::error::{Error, Result};
use crate::geometry::AlignedBox;

/// Writes YOLO label lines: `class_id cx cy w h`, center/size normalized to
/// the image dimensions, fixed 6-decimal formatting, `\n` endings. Boxes
/// must lie within the image.
pub fn write_yolo(instances: &[(u32, AlignedBox<f64>)], image_dims: (u32, u32)) -> Result<String> {
    let (w, h) = image_dims;
    if w == 0 || h == 0 {
        return Err(Error::InvalidArgument(format!(
            "image dimensions must be positive, got {w}x{h}"
        )));
    }
    let (fw, fh) = (w as f64, h as f64);
    let mut out = String::new();
    for (class_id, b) in instances {
        if b.x < 0.0 || b.y < 0.0 || b.right() > fw || b.bottom() > fh {
            return Err(Error::OutOfBounds {
                context: "write_yolo".into(),
                detail: format!("bbox ({},{},{},{}) exceeds image {w}x{h}", b.x, b.y, b.w, b.h),
            });
        }
        let cx = (b.x + b.w / 2.0) / fw;
        let cy = (b.y + b.h / 2.0) / fh;
        out.push_str(&format!(
            "{class_id} {cx:.6} {cy:.6} {:.6} {:.6}\n",
            b.w / fw,
            b.h / fh
        ));
    }
    Ok(out)
}

/// Parses YOLO label lines back to pixel-space boxes. Blank lines are
/// skipped; wrong field counts and values outside [0, 1] are errors.
pub fn parse_yolo(text: &str, image_dims: (u32, u32)) -> Result<Vec<(u32, AlignedBox<f64>)>> {
    let (w, h) = image_dims;
    if w == 0 || h == 0 {
        return Err(Error::InvalidArgument(format!(
            "image dimensions must be positive, got {w}x{h}"
        )));
    }
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(Error::Annotation(format!(
                "line {}: expected 5 fields, got {}",
                lineno + 1,
                fields.len()
            )));
        }
        let class_id: u32 = fields[0].parse().map_err(|_| {
            Error::Annotation(format!("line {}: bad class id `{}`", lineno + 1, fields[0]))
        })?;
        let mut vals = [0.0f64; 4];
        for (i, f) in fields[1..].iter().enumerate() {
            let v: f64 = f.parse().map_err(|_| {
                Error::Annotation(format!("line {}: bad number `{f}`", lineno + 1))
            })?;
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfBounds {
                    context: format!("parse_yolo line {}", lineno + 1),
                    detail: format!("{v} outside [0,1]"),
                });
            }
            vals[i] = v;
        }
        let [cx, cy, bw, bh] = vals;
        out.push((
            class_id,
            AlignedBox::new(
                (cx - bw / 2.0) * w as f64,
                (cy - bh / 2.0) * h as f64,
                bw * w as f64,
                bh * h as f64,
            ),
        ));
    }
    Ok(out)
}
