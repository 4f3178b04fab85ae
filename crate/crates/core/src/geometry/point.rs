use num_traits::Float;

/// 2-D point in pixel coordinates. Sub-pixel values are permitted after
/// geometric transforms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2<F> {
    pub x: F,
    pub y: F,
}

impl<F: Float> Point2<F> {
    pub fn new(x: F, y: F) -> Self {
        Point2 { x, y }
    }

    pub fn dot(self, other: Self) -> F {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product `self × other`.
    pub fn cross(self, other: Self) -> F {
        self.x * other.y - self.y * other.x
    }

    pub fn scale(self, k: F) -> Self {
        Point2::new(self.x * k, self.y * k)
    }

    pub fn norm(self) -> F {
        self.dot(self).sqrt()
    }

    pub fn distance(self, other: Self) -> F {
        (self - other).norm()
    }
}

impl<F: Float> std::ops::Add for Point2<F> {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        Point2::new(self.x + other.x, self.y + other.y)
    }
}

impl<F: Float> std::ops::Sub for Point2<F> {
    type Output = Self;

    fn sub(self, other: Self) -> Self {
        Point2::new(self.x - other.x, self.y - other.y)
    }
}

/// Ordered polygon of pixel-coordinate vertices, closed by convention
/// (the last vertex connects back to the first).
#[derive(Debug, Clone, PartialEq)]
pub struct PixelPolygon<F> {
    pub vertices: Vec<Point2<F>>,
}

impl<F: Float> PixelPolygon<F> {
    pub fn new(vertices: Vec<Point2<F>>) -> Self {
        PixelPolygon { vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}
