//! Small planar geometry helpers shared by the mesh and assembly modules.

/// A point (or vector) in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn sub(self, other: Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }

    pub fn add(self, other: Point) -> Point {
        Point::new(self.x + other.x, self.y + other.y)
    }

    pub fn scale(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product of two plane vectors.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point) -> f64 {
        self.sub(other).norm()
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(
            self.x + t * (other.x - self.x),
            self.y + t * (other.y - self.y),
        )
    }
}

/// Twice the signed area of the triangle `(a, b, c)`; positive for
/// counter-clockwise orientation.
pub fn signed_area_x2(a: Point, b: Point, c: Point) -> f64 {
    b.sub(a).cross(c.sub(a))
}

/// Barycentric coordinates of `p` with respect to the triangle `(a, b, c)`.
pub fn barycentric(a: Point, b: Point, c: Point, p: Point) -> [f64; 3] {
    let det = signed_area_x2(a, b, c);
    let l0 = signed_area_x2(p, b, c) / det;
    let l1 = signed_area_x2(a, p, c) / det;
    let l2 = 1.0 - l0 - l1;
    [l0, l1, l2]
}

/// Gradients of the three P1 basis functions on the triangle `(a, b, c)`.
///
/// `grad[i]` is the constant gradient of the hat function that equals 1 at
/// vertex `i` and 0 at the other two.
pub fn p1_gradients(a: Point, b: Point, c: Point) -> [[f64; 2]; 3] {
    let det = signed_area_x2(a, b, c);
    [
        [(b.y - c.y) / det, (c.x - b.x) / det],
        [(c.y - a.y) / det, (a.x - c.x) / det],
        [(a.y - b.y) / det, (b.x - a.x) / det],
    ]
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub const fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn contains_strictly(&self, other: &Rect) -> bool {
        self.x0 < other.x0 && other.x1 < self.x1 && self.y0 < other.y0 && other.y1 < self.y1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn barycentric_reproduces_vertices() {
        let a = Point::new(0.0, 0.0);
        let b = Point::new(2.0, 0.0);
        let c = Point::new(0.0, 3.0);
        let l = barycentric(a, b, c, a);
        assert!((l[0] - 1.0).abs() < 1e-14 && l[1].abs() < 1e-14 && l[2].abs() < 1e-14);
        let mid = Point::new(1.0, 1.5);
        let l = barycentric(a, b, c, mid);
        assert!(l[0].abs() < 1e-14 && (l[1] - 0.5).abs() < 1e-14 && (l[2] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn p1_gradients_of_unit_right_triangle() {
        let g = p1_gradients(
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        );
        assert_eq!(g[0], [-1.0, -1.0]);
        assert_eq!(g[1], [1.0, 0.0]);
        assert_eq!(g[2], [0.0, 1.0]);
    }
}
