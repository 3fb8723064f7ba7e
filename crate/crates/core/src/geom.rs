//! Small geometric helpers shared by the mesh and unfolding code.

use nalgebra::{Vector2, Vector3};

pub type Vec3 = Vector3<f64>;
pub type Vec2 = Vector2<f64>;

/// Twice the signed area of the triangle `(a, b, c)`; positive when counterclockwise.
#[inline]
pub fn orient2d(a: &Vec2, b: &Vec2, c: &Vec2) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Signed area of a simple polygon (shoelace formula).
pub fn polygon_area(poly: &[Vec2]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        let p = &poly[i];
        let q = &poly[(i + 1) % n];
        acc += p.x * q.y - q.x * p.y;
    }
    0.5 * acc
}

/// Newell normal of a (possibly slightly non-planar) polygon loop. Not normalized.
pub fn newell_normal(points: &[Vec3]) -> Vec3 {
    let n = points.len();
    let mut normal = Vec3::zeros();
    for i in 0..n {
        let p = &points[i];
        let q = &points[(i + 1) % n];
        normal.x += (p.y - q.y) * (p.z + q.z);
        normal.y += (p.z - q.z) * (p.x + q.x);
        normal.z += (p.x - q.x) * (p.y + q.y);
    }
    normal
}

pub fn centroid3(points: &[Vec3]) -> Vec3 {
    points.iter().fold(Vec3::zeros(), |acc, p| acc + p) / points.len() as f64
}

/// Interior angle at `p` between the rays to `prev` and `next`.
pub fn corner_angle(prev: &Vec3, p: &Vec3, next: &Vec3) -> f64 {
    let u = prev - p;
    let v = next - p;
    u.cross(&v).norm().atan2(u.dot(&v))
}

/// Intersection point of three planes given as `(normal, offset)` with `normal · x = offset`.
pub fn intersect_planes(planes: [(Vec3, f64); 3]) -> Option<Vec3> {
    let m = nalgebra::Matrix3::from_rows(&[planes[0].0.transpose(), planes[1].0.transpose(), planes[2].0.transpose()]);
    let rhs = Vec3::new(planes[0].1, planes[1].1, planes[2].1);
    m.lu().solve(&rhs)
}

/// Axis-aligned bounding box in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb2 {
    pub min: Vec2,
    pub max: Vec2,
}

impl Aabb2 {
    pub fn of(points: &[Vec2]) -> Self {
        let mut min = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        Aabb2 { min, max }
    }

    pub fn union(&self, other: &Aabb2) -> Aabb2 {
        Aabb2 {
            min: Vec2::new(self.min.x.min(other.min.x), self.min.y.min(other.min.y)),
            max: Vec2::new(self.max.x.max(other.max.x), self.max.y.max(other.max.y)),
        }
    }

    /// True when the boxes overlap by more than `slack` in both axes.
    #[inline]
    pub fn overlaps(&self, other: &Aabb2, slack: f64) -> bool {
        self.min.x < other.max.x - slack
            && other.min.x < self.max.x - slack
            && self.min.y < other.max.y - slack
            && other.min.y < self.max.y - slack
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_area_and_orientation() {
        let sq = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)];
        assert!((polygon_area(&sq) - 1.0).abs() < 1e-15);
        assert!(orient2d(&sq[0], &sq[1], &sq[2]) > 0.0);
    }

    #[test]
    fn three_coordinate_planes_meet_at_point() {
        let p = intersect_planes([(Vec3::x(), 1.0), (Vec3::y(), 2.0), (Vec3::z(), 3.0)]).unwrap();
        assert_eq!(p, Vec3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn parallel_planes_have_no_intersection() {
        let got = intersect_planes([(Vec3::x(), 1.0), (Vec3::x(), 2.0), (Vec3::z(), 3.0)]);
        assert!(got.is_none());
    }
}
