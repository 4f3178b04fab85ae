use num_traits::Float;

use super::point::{PixelPolygon, Point2};
use crate::error::{Error, Result};

/// Convex hull of a point set via Andrew's monotone chain, returned
/// counter-clockwise (positive-cross orientation). Collinear points on
/// hull edges are dropped; duplicate inputs collapse.
///
/// Degenerate inputs are allowed: a single distinct point yields a
/// 1-vertex polygon, collinear points yield the 2 extreme endpoints.
pub fn convex_hull<F: Float>(points: &[Point2<F>]) -> Result<PixelPolygon<F>> {
    if points.is_empty() {
        return Err(Error::EmptyInput("convex_hull requires at least 1 point"));
    }
    let mut pts: Vec<Point2<F>> = points.to_vec();
    pts.sort_by(|a, b| {
        a.x.partial_cmp(&b.x)
            .unwrap()
            .then(a.y.partial_cmp(&b.y).unwrap())
    });
    pts.dedup_by(|a, b| a.x == b.x && a.y == b.y);

    if pts.len() == 1 {
        return Ok(PixelPolygon::new(pts));
    }

    let n = pts.len();
    let mut hull: Vec<Point2<F>> = Vec::with_capacity(2 * n);

    // lower chain
    for &p in &pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            if (b - a).cross(p - a) <= F::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    // upper chain
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            if (b - a).cross(p - a) <= F::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull.pop(); // last point repeats the first

    Ok(PixelPolygon::new(hull))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> Point2<f64> {
        Point2::new(x, y)
    }

    #[test]
    fn empty_input_errors() {
        assert!(convex_hull::<f64>(&[]).is_err());
    }

    #[test]
    fn triangle_is_its_own_hull() {
        let h = convex_hull(&[pt(0.0, 0.0), pt(4.0, 0.0), pt(2.0, 3.0)]).unwrap();
        assert_eq!(h.len(), 3);
    }

    #[test]
    fn interior_point_excluded() {
        let h = convex_hull(&[
            pt(0.0, 0.0),
            pt(10.0, 0.0),
            pt(10.0, 10.0),
            pt(0.0, 10.0),
            pt(5.0, 5.0),
        ])
        .unwrap();
        assert_eq!(h.len(), 4);
        assert!(!h.vertices.iter().any(|p| p.x == 5.0 && p.y == 5.0));
    }

    #[test]
    fn hull_is_counter_clockwise() {
        let h = convex_hull(&[pt(0.0, 0.0), pt(4.0, 0.0), pt(4.0, 4.0), pt(0.0, 4.0)]).unwrap();
        let v = &h.vertices;
        let mut area2 = 0.0;
        for i in 0..v.len() {
            let j = (i + 1) % v.len();
            area2 += v[i].cross(v[j]);
        }
        assert!(area2 > 0.0);
    }

    #[test]
    fn collinear_collapses_to_endpoints() {
        let h = convex_hull(&[pt(0.0, 0.0), pt(5.0, 0.0), pt(9.0, 0.0)]).unwrap();
        assert_eq!(h.len(), 2);
    }

    // O(n^3) oracle: a point pair (a, b) is a hull edge iff all other points
    // lie strictly on one side (or on the segment).
    fn brute_hull_vertices(points: &[Point2<f64>]) -> Vec<(i64, i64)> {
        let mut verts = std::collections::BTreeSet::new();
        let n = points.len();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (a, b) = (points[i], points[j]);
                if a == b {
                    continue;
                }
                let mut all_left = true;
                for (k, &p) in points.iter().enumerate() {
                    if k == i || k == j {
                        continue;
                    }
                    if (b - a).cross(p - a) < 0.0 {
                        all_left = false;
                        break;
                    }
                }
                if all_left {
                    verts.insert((a.x as i64, a.y as i64));
                    verts.insert((b.x as i64, b.y as i64));
                }
            }
        }
        verts.into_iter().collect()
    }

    #[test]
    fn matches_brute_force_on_random_clouds() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            // integer coordinates avoid near-collinear float ambiguity in the oracle
            let pts: Vec<Point2<f64>> = (0..20)
                .map(|_| pt(rng.gen_range(0..100) as f64, rng.gen_range(0..100) as f64))
                .collect();
            let hull = convex_hull(&pts).unwrap();
            let mut got: Vec<(i64, i64)> = hull
                .vertices
                .iter()
                .map(|p| (p.x as i64, p.y as i64))
                .collect();
            got.sort();
            let want = brute_hull_vertices(&pts);
            // the oracle may keep collinear edge-interior points; every
            // monotone-chain vertex must be an oracle vertex and the oracle
            // hull area must match
            for v in &got {
                assert!(want.contains(v), "{v:?} missing from oracle set");
            }
            let hull_area = super::super::rect::shoelace_area(&hull);
            let oracle_hull = convex_hull(
                &want
                    .iter()
                    .map(|&(x, y)| pt(x as f64, y as f64))
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            let oracle_area = super::super::rect::shoelace_area(&oracle_hull);
            assert!((hull_area - oracle_area).abs() < 1e-9);
        }
    }
}
