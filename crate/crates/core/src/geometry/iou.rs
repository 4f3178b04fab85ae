use num_traits::Float;

/// Axis-aligned box with top-left corner `(x, y)` and size `(w, h)` in pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignedBox<F> {
    pub x: F,
    pub y: F,
    pub w: F,
    pub h: F,
}

impl<F: Float> AlignedBox<F> {
    pub fn new(x: F, y: F, w: F, h: F) -> Self {
        AlignedBox { x, y, w, h }
    }

    pub fn area(&self) -> F {
        self.w * self.h
    }

    pub fn right(&self) -> F {
        self.x + self.w
    }

    pub fn bottom(&self) -> F {
        self.y + self.h
    }
}

/// Intersection-over-union of two axis-aligned boxes. Returns 0 when the
/// union is empty.
pub fn bbox_iou<F: Float>(a: &AlignedBox<F>, b: &AlignedBox<F>) -> F {
    let ix = (a.right().min(b.right()) - a.x.max(b.x)).max(F::zero());
    let iy = (a.bottom().min(b.bottom()) - a.y.max(b.y)).max(F::zero());
    let inter = ix * iy;
    let union = a.area() + b.area() - inter;
    if union <= F::zero() {
        F::zero()
    } else {
        inter / union
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identical_boxes_iou_one() {
        let b = AlignedBox::new(1.0, 2.0, 3.0, 4.0);
        assert_abs_diff_eq!(bbox_iou(&b, &b), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn disjoint_boxes_iou_zero() {
        let a = AlignedBox::new(0.0, 0.0, 2.0, 2.0);
        let b = AlignedBox::new(10.0, 10.0, 2.0, 2.0);
        assert_eq!(bbox_iou(&a, &b), 0.0);
    }

    #[test]
    fn overlapping_boxes_hand_value() {
        // intersection 1, union 4 + 4 - 1 = 7
        let a = AlignedBox::new(0.0, 0.0, 2.0, 2.0);
        let b = AlignedBox::new(1.0, 1.0, 2.0, 2.0);
        assert_abs_diff_eq!(bbox_iou(&a, &b), 1.0 / 7.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_union_returns_zero() {
        let a = AlignedBox::new(0.0, 0.0, 0.0, 0.0);
        assert_eq!(bbox_iou(&a, &a), 0.0);
    }

    #[test]
    fn symmetry() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let mut mk = || {
                AlignedBox::new(
                    rng.gen_range(0.0..10.0),
                    rng.gen_range(0.0..10.0),
                    rng.gen_range(0.0..10.0),
                    rng.gen_range(0.0..10.0),
                )
            };
            let (a, b) = (mk(), mk());
            assert_abs_diff_eq!(bbox_iou(&a, &b), bbox_iou(&b, &a), epsilon = 1e-12);
        }
    }
}
