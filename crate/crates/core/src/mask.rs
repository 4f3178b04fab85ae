//! Binary occupancy masks and the pixel-level operations built on them:
//! connected-component labeling, Moore boundary tracing, mask IoU, and
//! polygon rasterization.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::geometry::{AlignedBox, PixelPolygon, Point2};

/// Row-major boolean occupancy raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width >= 1 && height >= 1, "mask dimensions must be >= 1");
        BinaryMask {
            width,
            height,
            bits: vec![false; (width as usize) * (height as usize)],
        }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Self {
        let mut m = BinaryMask::new(width, height);
        for y in 0..height {
            for x in 0..width {
                if f(x, y) {
                    m.set(x, y, true);
                }
            }
        }
        m
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[(y as usize) * (self.width as usize) + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        self.bits[(y as usize) * (self.width as usize) + x as usize] = value;
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Set pixels in scan order.
    pub fn pixels(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.height)
            .flat_map(move |y| (0..self.width).map(move |x| (x, y)))
            .filter(move |&(x, y)| self.get(x, y))
    }

    /// Tight axis-aligned box of the set pixels (box spans whole pixels),
    /// or `None` for an empty mask.
    pub fn bbox(&self) -> Option<AlignedBox<f64>> {
        let mut min_x = u32::MAX;
        let mut min_y = u32::MAX;
        let mut max_x = 0u32;
        let mut max_y = 0u32;
        let mut any = false;
        for (x, y) in self.pixels() {
            any = true;
            min_x = min_x.min(x);
            min_y = min_y.min(y);
            max_x = max_x.max(x);
            max_y = max_y.max(y);
        }
        any.then(|| {
            AlignedBox::new(
                min_x as f64,
                min_y as f64,
                (max_x - min_x + 1) as f64,
                (max_y - min_y + 1) as f64,
            )
        })
    }
}

/// Pixel adjacency rule for component labeling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    fn offsets(self) -> &'static [(i64, i64)] {
        match self {
            Connectivity::Four => &[(-1, 0), (1, 0), (0, -1), (0, 1)],
            Connectivity::Eight => &[
                (-1, -1),
                (0, -1),
                (1, -1),
                (-1, 0),
                (1, 0),
                (-1, 1),
                (0, 1),
                (1, 1),
            ],
        }
    }
}

/// One maximal connected set of foreground pixels. Pixels are in scan order.
#[derive(Debug, Clone)]
pub struct Component {
    pub label: u32,
    pub pixels: Vec<(u32, u32)>,
}

impl Component {
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }
}

/// Labels maximal connected components of the set pixels. Components come
/// back ordered by their first pixel in scan order; an all-zero mask yields
/// an empty list.
pub fn connected_components(mask: &BinaryMask, connectivity: Connectivity) -> Vec<Component> {
    let (w, h) = (mask.width() as i64, mask.height() as i64);
    let mut labels = vec![0u32; (w * h) as usize];
    let mut components = Vec::new();
    let mut next_label = 1u32;
    let mut stack = Vec::new();

    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if !mask.get(x, y) || labels[(y as i64 * w + x as i64) as usize] != 0 {
                continue;
            }
            let label = next_label;
            next_label += 1;
            let mut pixels = Vec::new();
            stack.push((x as i64, y as i64));
            labels[(y as i64 * w + x as i64) as usize] = label;
            while let Some((cx, cy)) = stack.pop() {
                pixels.push((cx as u32, cy as u32));
                for &(dx, dy) in connectivity.offsets() {
                    let (nx, ny) = (cx + dx, cy + dy);
                    if nx < 0 || ny < 0 || nx >= w || ny >= h {
                        continue;
                    }
                    let idx = (ny * w + nx) as usize;
                    if mask.get(nx as u32, ny as u32) && labels[idx] == 0 {
                        labels[idx] = label;
                        stack.push((nx, ny));
                    }
                }
            }
            pixels.sort_by_key(|&(px, py)| (py, px));
            components.push(Component { label, pixels });
        }
    }
    components
}

// Clockwise Moore neighborhood in screen coordinates (y grows downward),
// starting west: W NW N NE E SE S SW.
const MOORE: [(i64, i64); 8] = [
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
];

/// Ordered outer boundary of a component by Moore-neighbor tracing with
/// Jacob's stopping criterion: the trace ends when the (pixel, backtrack)
/// state recurs at the start. A single-pixel component yields a 1-vertex
/// polygon. Vertices are pixel coordinates.
pub fn trace_boundary(component: &Component) -> Result<PixelPolygon<f64>> {
    if component.pixels.is_empty() {
        return Err(Error::EmptyInput("trace_boundary requires a non-empty component"));
    }
    let set: HashSet<(i64, i64)> = component
        .pixels
        .iter()
        .map(|&(x, y)| (x as i64, y as i64))
        .collect();

    // topmost-leftmost pixel; its west neighbor is guaranteed outside
    let &start = component
        .pixels
        .iter()
        .min_by_key(|&&(x, y)| (y, x))
        .unwrap();
    let start = (start.0 as i64, start.1 as i64);
    let backtrack0 = (start.0 - 1, start.1);

    let ring_index = |p: (i64, i64), n: (i64, i64)| -> usize {
        MOORE
            .iter()
            .position(|&(dx, dy)| (p.0 + dx, p.1 + dy) == n)
            .expect("backtrack must be a Moore neighbor")
    };

    let mut contour: Vec<(i64, i64)> = vec![start];
    let mut pixel = start;
    let mut backtrack = backtrack0;
    let max_steps = 4 * component.pixels.len() + 8;

    for _ in 0..max_steps {
        // scan clockwise around `pixel` starting just past the backtrack
        let from = ring_index(pixel, backtrack);
        let mut found = None;
        let mut last_free = backtrack;
        for step in 1..=8 {
            let (dx, dy) = MOORE[(from + step) % 8];
            let cand = (pixel.0 + dx, pixel.1 + dy);
            if set.contains(&cand) {
                found = Some(cand);
                break;
            }
            last_free = cand;
        }
        match found {
            None => break, // isolated pixel
            Some(next) => {
                pixel = next;
                backtrack = last_free;
                if pixel == start && backtrack == backtrack0 {
                    break;
                }
                contour.push(pixel);
            }
        }
    }

    Ok(polygon_from(contour))
}

fn polygon_from(contour: Vec<(i64, i64)>) -> PixelPolygon<f64> {
    let mut verts: Vec<Point2<f64>> = Vec::with_capacity(contour.len());
    for (x, y) in contour {
        let p = Point2::new(x as f64, y as f64);
        // collapse immediate repeats from re-visits of the same pixel
        if verts.last() != Some(&p) {
            verts.push(p);
        }
    }
    if verts.len() > 1 && verts.first() == verts.last() {
        verts.pop();
    }
    PixelPolygon::new(verts)
}

/// Pixel-count IoU of two equally sized masks. Two empty masks have IoU 0
/// by convention.
pub fn mask_iou(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::DimensionMismatch(
            a.width(),
            a.height(),
            b.width(),
            b.height(),
        ));
    }
    let mut inter = 0usize;
    let mut union = 0usize;
    for (pa, pb) in a.bits.iter().zip(&b.bits) {
        if *pa && *pb {
            inter += 1;
        }
        if *pa || *pb {
            union += 1;
        }
    }
    if union == 0 {
        Ok(0.0)
    } else {
        Ok(inter as f64 / union as f64)
    }
}

/// Rasterizes a set of polygons (pixel-coordinate vertices, one outer ring
/// each) into a filled mask. Interior is resolved with an even-odd crossing
/// test at pixel centers; boundary pixels are always included, so filling
/// the output of [`trace_boundary`] recovers the source blob for simple
/// shapes.
pub fn fill_polygons(polygons: &[PixelPolygon<f64>], width: u32, height: u32) -> BinaryMask {
    let mut mask = BinaryMask::new(width.max(1), height.max(1));
    for poly in polygons {
        let v = &poly.vertices;
        if v.is_empty() {
            continue;
        }
        // boundary: Bresenham along every edge
        for i in 0..v.len() {
            let a = v[i];
            let b = v[(i + 1) % v.len()];
            draw_segment(&mut mask, a, b);
        }
        if v.len() < 3 {
            continue;
        }
        // interior: even-odd test per pixel center inside the bbox
        let min_x = v.iter().map(|p| p.x).fold(f64::INFINITY, f64::min).floor().max(0.0) as u32;
        let max_x = v.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max).ceil() as i64;
        let min_y = v.iter().map(|p| p.y).fold(f64::INFINITY, f64::min).floor().max(0.0) as u32;
        let max_y = v.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max).ceil() as i64;
        let max_x = (max_x.max(0) as u32).min(width.saturating_sub(1));
        let max_y = (max_y.max(0) as u32).min(height.saturating_sub(1));
        for y in min_y..=max_y {
            for x in min_x..=max_x {
                if !mask.get(x, y) && point_in_polygon(x as f64, y as f64, v) {
                    mask.set(x, y, true);
                }
            }
        }
    }
    mask
}

fn draw_segment(mask: &mut BinaryMask, a: Point2<f64>, b: Point2<f64>) {
    let (mut x0, mut y0) = (a.x.round() as i64, a.y.round() as i64);
    let (x1, y1) = (b.x.round() as i64, b.y.round() as i64);
    let dx = (x1 - x0).abs();
    let dy = -(y1 - y0).abs();
    let sx = if x0 < x1 { 1 } else { -1 };
    let sy = if y0 < y1 { 1 } else { -1 };
    let mut err = dx + dy;
    loop {
        if x0 >= 0 && y0 >= 0 && (x0 as u32) < mask.width() && (y0 as u32) < mask.height() {
            mask.set(x0 as u32, y0 as u32, true);
        }
        if x0 == x1 && y0 == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x0 += sx;
        }
        if e2 <= dx {
            err += dx;
            y0 += sy;
        }
    }
}

fn point_in_polygon(px: f64, py: f64, v: &[Point2<f64>]) -> bool {
    let mut inside = false;
    let n = v.len();
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = (v[i].x, v[i].y);
        let (xj, yj) = (v[j].x, v[j].y);
        if ((yi > py) != (yj > py)) && px < (xj - xi) * (py - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}
