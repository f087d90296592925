//! Points and axis-aligned boxes.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl std::ops::Sub for Point3 {
    type Output = Point3;

    fn sub(self, other: Point3) -> Point3 {
        Point3::new(self.x - other.x, self.y - other.y, self.z - other.z)
    }
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn dot(self, other: Point3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, other: Point3) -> f64 {
        (self - other).norm()
    }

    pub fn lerp(self, other: Point3, t: f64) -> Point3 {
        Point3::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
            self.z + (other.z - self.z) * t,
        )
    }

    fn axis(self, i: usize) -> f64 {
        match i {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Point3,
    pub max: Point3,
}

impl Aabb {
    pub fn new(min: Point3, max: Point3) -> Self {
        Aabb { min, max }
    }

    /// True if the point lies strictly inside the box.
    pub fn contains_strict(&self, p: Point3) -> bool {
        (0..3).all(|i| self.min.axis(i) < p.axis(i) && p.axis(i) < self.max.axis(i))
    }

    /// Distance from an interior point to the nearest face; negative outside.
    pub fn depth(&self, p: Point3) -> f64 {
        (0..3)
            .map(|i| (p.axis(i) - self.min.axis(i)).min(self.max.axis(i) - p.axis(i)))
            .fold(f64::INFINITY, f64::min)
    }

    /// Slab test of the segment `a -> b` against the open box.
    ///
    /// Only a positive-length overlap with the box interior counts; touching
    /// an edge or sliding along a face does not.
    pub fn segment_crosses_interior(&self, a: Point3, b: Point3) -> bool {
        let mut t_enter = 0.0_f64;
        let mut t_exit = 1.0_f64;
        for i in 0..3 {
            let origin = a.axis(i);
            let dir = b.axis(i) - origin;
            let (lo, hi) = (self.min.axis(i), self.max.axis(i));
            if dir == 0.0 {
                if origin <= lo || origin >= hi {
                    return false;
                }
                continue;
            }
            let mut t0 = (lo - origin) / dir;
            let mut t1 = (hi - origin) / dir;
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            t_enter = t_enter.max(t0);
            t_exit = t_exit.min(t1);
            if t_enter >= t_exit {
                return false;
            }
        }
        true
    }
}
