//! Planar vectors, poses, bounding boxes and convex polygon utilities.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::num::{wrap_angle, Real};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vector2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Vector2<T> {
    #[inline]
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    #[inline]
    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    /// Counter-clockwise perpendicular.
    #[inline]
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    #[inline]
    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    /// Unit vector, or `None` for a (near) zero vector.
    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        if n > T::epsilon() {
            Some(self * (T::one() / n))
        } else {
            None
        }
    }

    #[inline]
    pub fn rotate(self, yaw: T) -> Self {
        let (s, c) = yaw.sin_cos();
        self.rotate_sc(s, c)
    }

    #[inline]
    pub fn rotate_sc(self, s: T, c: T) -> Self {
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn cast<U: Real>(self) -> Vector2<U> {
        Vector2::new(U::lit(self.x.to_f64_lossy()), U::lit(self.y.to_f64_lossy()))
    }
}

impl<T: Real> Add for Vector2<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Real> Sub for Vector2<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Real> AddAssign for Vector2<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        self.x = self.x + o.x;
        self.y = self.y + o.y;
    }
}

impl<T: Real> SubAssign for Vector2<T> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        self.x = self.x - o.x;
        self.y = self.y - o.y;
    }
}

impl<T: Real> Mul<T> for Vector2<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s)
    }
}

impl<T: Real> Neg for Vector2<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl<T: Real> From<[T; 2]> for Vector2<T> {
    fn from(a: [T; 2]) -> Self {
        Self::new(a[0], a[1])
    }
}

impl<T: Real> From<Vector2<T>> for [T; 2] {
    fn from(v: Vector2<T>) -> Self {
        [v.x, v.y]
    }
}

impl<T: Real> Serialize for Vector2<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.x, self.y].serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for Vector2<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let a = <[T; 2]>::deserialize(d)?;
        Ok(a.into())
    }
}

/// Planar pose: position in meters and yaw in radians, yaw kept in `(-pi, pi]`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Pose2<T> {
    pub x: T,
    pub y: T,
    pub yaw: T,
}

impl<T: Real> Pose2<T> {
    pub fn new(x: T, y: T, yaw: T) -> Self {
        Self { x, y, yaw: wrap_angle(yaw) }
    }

    pub fn from_position(p: Vector2<T>) -> Self {
        Self::new(p.x, p.y, T::zero())
    }

    pub fn identity() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    #[inline]
    pub fn position(&self) -> Vector2<T> {
        Vector2::new(self.x, self.y)
    }

    /// Maps a point from the body frame to the world frame.
    #[inline]
    pub fn transform_point(&self, local: Vector2<T>) -> Vector2<T> {
        local.rotate(self.yaw) + self.position()
    }

    /// Maps a point from the world frame to the body frame.
    #[inline]
    pub fn inverse_transform_point(&self, world: Vector2<T>) -> Vector2<T> {
        (world - self.position()).rotate(-self.yaw)
    }

    /// `self ∘ local`: the world pose of a frame given relative to this one.
    pub fn compose(&self, local: &Pose2<T>) -> Pose2<T> {
        let p = self.transform_point(local.position());
        Pose2::new(p.x, p.y, self.yaw + local.yaw)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.yaw.is_finite()
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.yaw]
    }
}

impl<T: Real> From<[T; 3]> for Pose2<T> {
    fn from(a: [T; 3]) -> Self {
        Pose2::new(a[0], a[1], a[2])
    }
}

impl<T: Real> Serialize for Pose2<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.x, self.y, self.yaw].serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for Pose2<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let a = <[T; 3]>::deserialize(d)?;
        Ok(a.into())
    }
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Aabb<T> {
    pub min: Vector2<T>,
    pub max: Vector2<T>,
}

impl<T: Real> Aabb<T> {
    pub fn new(min: Vector2<T>, max: Vector2<T>) -> Self {
        Self { min, max }
    }

    pub fn from_center_half(c: Vector2<T>, hx: T, hy: T) -> Self {
        Self::new(Vector2::new(c.x - hx, c.y - hy), Vector2::new(c.x + hx, c.y + hy))
    }

    pub fn width(&self) -> T {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> T {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> T {
        self.width().max(T::zero()) * self.height().max(T::zero())
    }

    pub fn intersection(&self, o: &Self) -> Option<Self> {
        let min = Vector2::new(self.min.x.max(o.min.x), self.min.y.max(o.min.y));
        let max = Vector2::new(self.max.x.min(o.max.x), self.max.y.min(o.max.y));
        (min.x < max.x && min.y < max.y).then(|| Self::new(min, max))
    }

    pub fn union(&self, o: &Self) -> Self {
        Self::new(
            Vector2::new(self.min.x.min(o.min.x), self.min.y.min(o.min.y)),
            Vector2::new(self.max.x.max(o.max.x), self.max.y.max(o.max.y)),
        )
    }

    pub fn contains_aabb(&self, o: &Self) -> bool {
        o.min.x >= self.min.x && o.min.y >= self.min.y && o.max.x <= self.max.x && o.max.y <= self.max.y
    }
}

/// Corners of a rectangle with half-extents `(hx, hy)` at `pose`, counter-clockwise.
pub fn rect_corners<T: Real>(pose: &Pose2<T>, hx: T, hy: T) -> [Vector2<T>; 4] {
    let (s, c) = pose.yaw.sin_cos();
    let p = pose.position();
    [
        Vector2::new(-hx, -hy).rotate_sc(s, c) + p,
        Vector2::new(hx, -hy).rotate_sc(s, c) + p,
        Vector2::new(hx, hy).rotate_sc(s, c) + p,
        Vector2::new(-hx, hy).rotate_sc(s, c) + p,
    ]
}

/// Signed shoelace area; positive for counter-clockwise vertex order.
pub fn signed_area<T: Real>(poly: &[Vector2<T>]) -> T {
    if poly.len() < 3 {
        return T::zero();
    }
    let mut acc = T::zero();
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        acc = acc + a.cross(b);
    }
    acc * T::half()
}

pub fn polygon_area<T: Real>(poly: &[Vector2<T>]) -> T {
    signed_area(poly).abs()
}

/// Sutherland–Hodgman clip of `subject` against a convex, counter-clockwise `clip` polygon.
///
/// Returns the (possibly empty) intersection polygon.
pub fn clip_convex<T: Real>(subject: &[Vector2<T>], clip: &[Vector2<T>]) -> Vec<Vector2<T>> {
    let mut output: Vec<Vector2<T>> = subject.to_vec();
    let mut input = Vec::with_capacity(subject.len() + clip.len());
    for i in 0..clip.len() {
        if output.is_empty() {
            break;
        }
        let a = clip[i];
        let b = clip[(i + 1) % clip.len()];
        let edge = b - a;
        std::mem::swap(&mut input, &mut output);
        output.clear();
        let side = |p: Vector2<T>| edge.cross(p - a);
        for j in 0..input.len() {
            let cur = input[j];
            let prev = input[(j + input.len() - 1) % input.len()];
            let s_cur = side(cur);
            let s_prev = side(prev);
            if s_cur >= T::zero() {
                if s_prev < T::zero() {
                    output.push(intersect(prev, cur, s_prev, s_cur));
                }
                output.push(cur);
            } else if s_prev >= T::zero() {
                output.push(intersect(prev, cur, s_prev, s_cur));
            }
        }
    }
    output
}

fn intersect<T: Real>(p: Vector2<T>, q: Vector2<T>, sp: T, sq: T) -> Vector2<T> {
    let t = sp / (sp - sq);
    p + (q - p) * t
}

/// Area of the intersection of two convex counter-clockwise polygons.
pub fn convex_intersection_area<T: Real>(a: &[Vector2<T>], b: &[Vector2<T>]) -> T {
    polygon_area(&clip_convex(a, b))
}

/// Area of the lens formed by two circles.
pub fn circle_intersection_area<T: Real>(r0: T, r1: T, d: T) -> T {
    let zero = T::zero();
    if d >= r0 + r1 {
        return zero;
    }
    let pi = T::PI();
    if d <= (r0 - r1).abs() {
        let r = r0.min(r1);
        return pi * r * r;
    }
    let two = T::two();
    let a0 = ((d * d + r0 * r0 - r1 * r1) / (two * d * r0)).max(-T::one()).min(T::one()).acos();
    let a1 = ((d * d + r1 * r1 - r0 * r0) / (two * d * r1)).max(-T::one()).min(T::one()).acos();
    let k = (-d + r0 + r1) * (d + r0 - r1) * (d - r0 + r1) * (d + r0 + r1);
    r0 * r0 * a0 + r1 * r1 * a1 - T::half() * k.max(zero).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn square(c: Vector2<f64>, h: f64) -> Vec<Vector2<f64>> {
        rect_corners(&Pose2::from_position(c), h, h).to_vec()
    }

    #[test]
    fn pose_roundtrip() {
        let p = Pose2::new(1.0, -2.0, 0.7);
        let local = Vector2::new(0.3, 0.1);
        let w = p.transform_point(local);
        let back = p.inverse_transform_point(w);
        assert!((back - local).norm() < 1e-12);
        assert!((Pose2::new(0.0, 0.0, 3.0 * PI).yaw - PI).abs() < 1e-12);
    }

    #[test]
    fn clip_overlapping_squares() {
        let a = square(Vector2::new(0.0, 0.0), 1.0);
        let b = square(Vector2::new(1.0, 1.0), 1.0);
        assert!((convex_intersection_area(&a, &b) - 1.0).abs() < 1e-12);
        let c = square(Vector2::new(5.0, 0.0), 1.0);
        assert_eq!(convex_intersection_area(&a, &c), 0.0);
        assert!((convex_intersection_area(&a, &a) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn clip_rotated_square_in_square() {
        let a = square(Vector2::new(0.0, 0.0), 1.0);
        let d = rect_corners(&Pose2::new(0.0, 0.0, PI / 4.0), 0.5, 0.5);
        assert!((convex_intersection_area(&a, &d) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lens_area() {
        assert_eq!(circle_intersection_area(1.0, 1.0, 2.5), 0.0);
        assert!((circle_intersection_area(1.0, 0.5, 0.1) - PI * 0.25).abs() < 1e-12);
        // equal circles at distance r: 2r²acos(1/2) − (r/2)·sqrt(3)r
        let expected = 2.0 * (0.5f64).acos() - 0.5 * 3f64.sqrt();
        assert!((circle_intersection_area(1.0, 1.0, 1.0) - expected).abs() < 1e-12);
    }

    #[test]
    fn aabb_ops() {
        let a = Aabb::new(Vector2::new(0.0, 0.0), Vector2::new(2.0, 2.0));
        let b = Aabb::new(Vector2::new(1.0, 1.0), Vector2::new(3.0, 3.0));
        assert_eq!(a.intersection(&b).unwrap().area(), 1.0);
        assert!(a.union(&b).contains_aabb(&a));
    }
}
