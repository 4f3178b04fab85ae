use num_traits::Float;

use super::hull::convex_hull;
use super::point::{PixelPolygon, Point2};
use crate::error::{Error, Result};

/// Minimum-area rotated rectangle. `length` is always the longer side and
/// `angle_deg` is the direction of that longer side, normalized to [0, 180).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatedRect<F> {
    pub center: Point2<F>,
    pub length: F,
    pub width: F,
    pub angle_deg: F,
}

impl<F: Float> RotatedRect<F> {
    pub fn area(&self) -> F {
        self.length * self.width
    }
}

fn normalize_angle_deg<F: Float>(mut deg: F) -> F {
    let half_turn = F::from(180.0).unwrap();
    while deg < F::zero() {
        deg = deg + half_turn;
    }
    while deg >= half_turn {
        deg = deg - half_turn;
    }
    deg
}

/// Smallest-area enclosing rectangle over any orientation, by rotating
/// calipers over the convex hull: the optimal rectangle has one side flush
/// with a hull edge, so it suffices to test each edge direction.
pub fn min_area_rect<F: Float>(points: &[Point2<F>]) -> Result<RotatedRect<F>> {
    let hull = convex_hull(points)?.vertices;

    if hull.len() == 1 {
        return Ok(RotatedRect {
            center: hull[0],
            length: F::zero(),
            width: F::zero(),
            angle_deg: F::zero(),
        });
    }

    let mut best: Option<RotatedRect<F>> = None;
    let n = hull.len();
    for i in 0..n {
        let a = hull[i];
        let b = hull[(i + 1) % n];
        let edge = b - a;
        let len = edge.norm();
        if len == F::zero() {
            continue;
        }
        let dir = edge.scale(F::one() / len);
        let normal = Point2::new(-dir.y, dir.x);

        let mut min_d = F::infinity();
        let mut max_d = F::neg_infinity();
        let mut min_n = F::infinity();
        let mut max_n = F::neg_infinity();
        for &p in &hull {
            let d = p.dot(dir);
            let t = p.dot(normal);
            min_d = min_d.min(d);
            max_d = max_d.max(d);
            min_n = min_n.min(t);
            max_n = max_n.max(t);
        }
        let side_d = max_d - min_d;
        let side_n = max_n - min_n;
        let area = side_d * side_n;

        if best.is_none_or(|r| area < r.area()) {
            let two = F::from(2.0).unwrap();
            let mid_d = (min_d + max_d) / two;
            let mid_n = (min_n + max_n) / two;
            let center = dir.scale(mid_d) + normal.scale(mid_n);
            let dir_angle = dir.y.atan2(dir.x).to_degrees();
            let (length, width, angle) = if side_d >= side_n {
                (side_d, side_n, dir_angle)
            } else {
                (side_n, side_d, dir_angle + F::from(90.0).unwrap())
            };
            best = Some(RotatedRect {
                center,
                length,
                width,
                angle_deg: normalize_angle_deg(angle),
            });
        }
    }

    best.ok_or(Error::EmptyInput("min_area_rect requires at least 1 point"))
}

/// Absolute shoelace area of a polygon; orientation-independent.
/// Polygons with fewer than 3 vertices have zero area.
pub fn shoelace_area<F: Float>(polygon: &PixelPolygon<F>) -> F {
    let v = &polygon.vertices;
    if v.len() < 3 {
        return F::zero();
    }
    let mut twice = F::zero();
    for i in 0..v.len() {
        let j = (i + 1) % v.len();
        twice = twice + v[i].cross(v[j]);
    }
    (twice / F::from(2.0).unwrap()).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pt(x: f64, y: f64) -> Point2<f64> {
        Point2::new(x, y)
    }

    #[test]
    fn axis_aligned_square() {
        let r = min_area_rect(&[pt(0.0, 0.0), pt(10.0, 0.0), pt(10.0, 10.0), pt(0.0, 10.0)])
            .unwrap();
        assert_abs_diff_eq!(r.length, 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.width, 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.area(), 100.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.center.x, 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.center.y, 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.angle_deg, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn square_rotated_45_degrees() {
        // 10x10 square rotated 45 deg about its center: corners at half-diagonal
        let d = 10.0 * std::f64::consts::SQRT_2 / 2.0;
        let corners = [pt(0.0, -d), pt(d, 0.0), pt(0.0, d), pt(-d, 0.0)];
        let r = min_area_rect(&corners).unwrap();
        assert_abs_diff_eq!(r.length, 10.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.width, 10.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.angle_deg.rem_euclid(90.0), 45.0, epsilon = 1e-9);
    }

    #[test]
    fn collinear_points_degenerate() {
        let r = min_area_rect(&[pt(0.0, 0.0), pt(5.0, 0.0), pt(9.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(r.length, 9.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.width, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn single_point_degenerate() {
        let r = min_area_rect(&[pt(3.0, 4.0)]).unwrap();
        assert_eq!(r.length, 0.0);
        assert_eq!(r.width, 0.0);
        assert_eq!(r.center, pt(3.0, 4.0));
    }

    #[test]
    fn shoelace_triangle_and_square() {
        let tri = PixelPolygon::new(vec![pt(0.0, 0.0), pt(4.0, 0.0), pt(0.0, 3.0)]);
        assert_abs_diff_eq!(shoelace_area(&tri), 6.0, epsilon = 1e-12);
        let sq = PixelPolygon::new(vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)]);
        assert_abs_diff_eq!(shoelace_area(&sq), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn shoelace_reversed_orientation_same_area() {
        let mut v = vec![pt(0.0, 0.0), pt(4.0, 0.0), pt(4.0, 2.0), pt(0.0, 2.0)];
        let fwd = shoelace_area(&PixelPolygon::new(v.clone()));
        v.reverse();
        let rev = shoelace_area(&PixelPolygon::new(v));
        assert_abs_diff_eq!(fwd, rev, epsilon = 1e-12);
    }

    #[test]
    fn shoelace_degenerate_is_zero() {
        assert_eq!(shoelace_area(&PixelPolygon::new(vec![pt(1.0, 1.0)])), 0.0);
        assert_eq!(
            shoelace_area(&PixelPolygon::new(vec![pt(0.0, 0.0), pt(2.0, 2.0)])),
            0.0
        );
    }

    /// Exhaustive rotation sweep oracle: rectangle area at the best of
    /// 0.01-degree steps.
    pub(crate) fn sweep_min_area(points: &[Point2<f64>], step_deg: f64) -> f64 {
        let mut best = f64::INFINITY;
        let mut deg = 0.0;
        while deg < 90.0 {
            let rad = deg.to_radians();
            let (c, s) = (rad.cos(), rad.sin());
            let mut min_x = f64::INFINITY;
            let mut max_x = f64::NEG_INFINITY;
            let mut min_y = f64::INFINITY;
            let mut max_y = f64::NEG_INFINITY;
            for p in points {
                let x = p.x * c + p.y * s;
                let y = -p.x * s + p.y * c;
                min_x = min_x.min(x);
                max_x = max_x.max(x);
                min_y = min_y.min(y);
                max_y = max_y.max(y);
            }
            best = best.min((max_x - min_x) * (max_y - min_y));
            deg += step_deg;
        }
        best
    }

    #[test]
    fn rotated_square_matches_sweep_oracle() {
        let d = 10.0 * std::f64::consts::SQRT_2 / 2.0;
        let corners = [pt(0.0, -d), pt(d, 0.0), pt(0.0, d), pt(-d, 0.0)];
        let r = min_area_rect(&corners).unwrap();
        let oracle = sweep_min_area(&corners, 0.01);
        assert!((r.area() - oracle).abs() / oracle < 1e-3);
    }

    #[test]
    fn translation_invariance() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<Point2<f64>> = (0..30)
            .map(|_| pt(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0)))
            .collect();
        let r0 = min_area_rect(&pts).unwrap();
        let (dx, dy) = (123.5, -77.25);
        let moved: Vec<Point2<f64>> = pts.iter().map(|p| pt(p.x + dx, p.y + dy)).collect();
        let r1 = min_area_rect(&moved).unwrap();
        assert_abs_diff_eq!(r1.center.x - r0.center.x, dx, epsilon = 1e-9);
        assert_abs_diff_eq!(r1.center.y - r0.center.y, dy, epsilon = 1e-9);
        assert_abs_diff_eq!(r1.length, r0.length, epsilon = 1e-9);
        assert_abs_diff_eq!(r1.width, r0.width, epsilon = 1e-9);
        assert_abs_diff_eq!(r1.angle_deg, r0.angle_deg, epsilon = 1e-9);
    }

    #[test]
    fn never_larger_than_axis_aligned_bbox() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let pts: Vec<Point2<f64>> = (0..15)
                .map(|_| pt(rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)))
                .collect();
            let r = min_area_rect(&pts).unwrap();
            let min_x = pts.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
            let max_x = pts.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
            let min_y = pts.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
            let max_y = pts.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
            let aabb = (max_x - min_x) * (max_y - min_y);
            assert!(r.area() <= aabb + 1e-9);
        }
    }
}
