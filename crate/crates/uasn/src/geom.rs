//! Minimal 3D point arithmetic.
//!
//! Coordinates are metres. The surface is the plane z = 0 and depth is
//! negative z, so every underwater node has z in [-H, 0].

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point3(pub [f64; 3]);

impl Point3 {
    pub const ORIGIN: Point3 = Point3([0.0, 0.0, 0.0]);

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Point3([x, y, z])
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn z(&self) -> f64 {
        self.0[2]
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        self.distance_sq(other).sqrt()
    }

    pub fn distance_sq(&self, other: &Point3) -> f64 {
        let dx = self.0[0] - other.0[0];
        let dy = self.0[1] - other.0[1];
        let dz = self.0[2] - other.0[2];
        dx * dx + dy * dy + dz * dz
    }

    /// Horizontal distance from the z axis.
    pub fn radial(&self) -> f64 {
        (self.0[0] * self.0[0] + self.0[1] * self.0[1]).sqrt()
    }

    pub fn sub(&self, other: &Point3) -> [f64; 3] {
        [
            self.0[0] - other.0[0],
            self.0[1] - other.0[1],
            self.0[2] - other.0[2],
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Affine combination sum_k w_k p_k. Callers are responsible for the
    /// weights summing to one when a convex combination is intended.
    pub fn combine(points: &[Point3], weights: &[f64]) -> Point3 {
        debug_assert_eq!(points.len(), weights.len());
        let mut acc = [0.0; 3];
        for (p, &w) in points.iter().zip(weights) {
            acc[0] += w * p.0[0];
            acc[1] += w * p.0[1];
            acc[2] += w * p.0[2];
        }
        Point3(acc)
    }

    /// Point on the segment between `a` and `b` at parameter `t` in [0, 1].
    pub fn lerp(a: &Point3, b: &Point3, t: f64) -> Point3 {
        Point3([
            a.0[0] + t * (b.0[0] - a.0[0]),
            a.0[1] + t * (b.0[1] - a.0[1]),
            a.0[2] + t * (b.0[2] - a.0[2]),
        ])
    }
}

pub fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_is_euclidean() {
        let a = Point3::new(1.0, 2.0, 2.0);
        assert_eq!(a.distance(&Point3::ORIGIN), 3.0);
    }

    #[test]
    fn combine_recovers_vertices() {
        let pts = [Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 1.0, -1.0)];
        let mid = Point3::combine(&pts, &[0.5, 0.5]);
        assert_eq!(mid, Point3::new(0.5, 0.5, -0.5));
    }
}
