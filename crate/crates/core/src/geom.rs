//! Planar primitives shared by every module: points, directions, affine maps
//! of the form `z ↦ az + b` with `a > 0`, and ray/segment intersection.

use crate::math;

/// A point in one polygon chart. Coordinates are chart length units.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlanarPoint {
    pub x: f64,
    pub y: f64,
}

impl PlanarPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn sub(&self, other: &PlanarPoint) -> (f64, f64) {
        (self.x - other.x, self.y - other.y)
    }

    #[inline]
    pub fn dist(&self, other: &PlanarPoint) -> f64 {
        math::hypot(self.x - other.x, self.y - other.y)
    }

    /// Linear interpolation `self + t (other - self)`.
    #[inline]
    pub fn lerp(&self, other: &PlanarPoint, t: f64) -> PlanarPoint {
        PlanarPoint::new(self.x + t * (other.x - self.x), self.y + t * (other.y - self.y))
    }
}

#[inline]
pub fn cross(a: (f64, f64), b: (f64, f64)) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

#[inline]
pub fn dot(a: (f64, f64), b: (f64, f64)) -> f64 {
    a.0 * b.0 + a.1 * b.1
}

#[inline]
pub fn norm(a: (f64, f64)) -> f64 {
    math::hypot(a.0, a.1)
}

/// A direction of the circle, kept in `[0, 2π)`.
///
/// Directions are globally defined on a dilation surface because chart
/// transitions have positive real linear part, so one angle describes a
/// direction in every chart at once.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DirectionAngle(f64);

impl DirectionAngle {
    pub fn new(theta: f64) -> Self {
        Self(math::normalize_angle(theta))
    }

    #[inline]
    pub fn radians(&self) -> f64 {
        self.0
    }

    /// Unit vector of this direction.
    #[inline]
    pub fn unit(&self) -> (f64, f64) {
        (math::cos(self.0), math::sin(self.0))
    }

    /// Opposite direction.
    pub fn opposite(&self) -> Self {
        Self::new(self.0 + math::PI)
    }

    pub fn of_vector(v: (f64, f64)) -> Self {
        Self::new(math::atan2(v.1, v.0))
    }
}

/// Orientation-preserving affine map `z ↦ a z + b`, `a > 0`.
///
/// These are the only transition maps of a dilation structure; `a` is the
/// dilation ratio and `b` a translation.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AffineMap {
    /// Linear part (dilation ratio), strictly positive.
    pub a: f64,
    /// Translation part.
    pub b: (f64, f64),
}

impl AffineMap {
    pub const IDENTITY: AffineMap = AffineMap { a: 1.0, b: (0.0, 0.0) };

    pub fn new(a: f64, b: (f64, f64)) -> Self {
        debug_assert!(a > 0.0, "dilation ratio must be positive");
        Self { a, b }
    }

    #[inline]
    pub fn apply(&self, p: &PlanarPoint) -> PlanarPoint {
        PlanarPoint::new(self.a * p.x + self.b.0, self.a * p.y + self.b.1)
    }

    /// Composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        AffineMap {
            a: self.a * other.a,
            b: (self.a * other.b.0 + self.b.0, self.a * other.b.1 + self.b.1),
        }
    }

    pub fn inverse(&self) -> AffineMap {
        let inv = 1.0 / self.a;
        AffineMap { a: inv, b: (-self.b.0 * inv, -self.b.1 * inv) }
    }

    /// Deviation from the identity, measured on translations and ratio.
    pub fn identity_defect(&self) -> f64 {
        math::abs(self.a - 1.0) + math::hypot(self.b.0, self.b.1)
    }
}

/// First hit of the forward ray `origin + t·dir` against segment `[a, b]`.
///
/// Returns `(t, s)` with `t > t_min` and `s ∈ [0, 1]` the barycentric
/// coordinate on the segment, or `None` for misses and near-parallel rays.
pub fn ray_segment_hit(
    origin: &PlanarPoint,
    dir: (f64, f64),
    a: &PlanarPoint,
    b: &PlanarPoint,
    t_min: f64,
) -> Option<(f64, f64)> {
    let e = b.sub(a);
    let denom = cross(dir, e);
    if math::abs(denom) < 1e-14 * (norm(e) + 1.0) {
        return None;
    }
    let ao = (a.x - origin.x, a.y - origin.y);
    let t = cross(ao, e) / denom;
    let s = cross(ao, dir) / denom;
    if t > t_min && (-1e-12..=1.0 + 1e-12).contains(&s) {
        Some((t, s.clamp(0.0, 1.0)))
    } else {
        None
    }
}

/// Parameter along the forward ray at which it passes closest to `p`,
/// together with the closest distance. The parameter may be negative.
pub fn ray_closest_approach(origin: &PlanarPoint, dir: (f64, f64), p: &PlanarPoint) -> (f64, f64) {
    let v = p.sub(origin);
    let t = dot(v, dir);
    let d = math::abs(cross(dir, v));
    (t, d)
}

/// Strict segment/segment intersection test on open interiors.
pub fn segments_cross(
    a0: &PlanarPoint,
    a1: &PlanarPoint,
    b0: &PlanarPoint,
    b1: &PlanarPoint,
) -> bool {
    let d1 = a1.sub(a0);
    let d2 = b1.sub(b0);
    let denom = cross(d1, d2);
    if math::abs(denom) < 1e-15 {
        return false;
    }
    let v = (b0.x - a0.x, b0.y - a0.y);
    let t = cross(v, d2) / denom;
    let u = cross(v, d1) / denom;
    let eps = 1e-12;
    t > eps && t < 1.0 - eps && u > eps && u < 1.0 - eps
}

/// Signed area of a polygon given by its vertex loop (positive = CCW).
pub fn signed_area(vertices: &[PlanarPoint]) -> f64 {
    let n = vertices.len();
    let mut acc = 0.0;
    for i in 0..n {
        let p = &vertices[i];
        let q = &vertices[(i + 1) % n];
        acc += p.x * q.y - q.x * p.y;
    }
    acc * 0.5
}

/// Whether a simple polygon boundary self-intersects (non-adjacent edges only).
pub fn is_self_intersecting(vertices: &[PlanarPoint]) -> bool {
    let n = vertices.len();
    for i in 0..n {
        for j in (i + 1)..n {
            // Adjacent edges share an endpoint and never count.
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            if segments_cross(
                &vertices[i],
                &vertices[(i + 1) % n],
                &vertices[j],
                &vertices[(j + 1) % n],
            ) {
                return true;
            }
        }
    }
    false
}

/// Point-in-polygon test on the closed region, with `eps` slack so points on
/// the boundary are accepted.
pub fn point_in_polygon(vertices: &[PlanarPoint], p: &PlanarPoint, eps: f64) -> bool {
    let n = vertices.len();
    // Boundary proximity first.
    for i in 0..n {
        let a = &vertices[i];
        let b = &vertices[(i + 1) % n];
        let e = b.sub(a);
        let len2 = dot(e, e);
        if len2 == 0.0 {
            continue;
        }
        let t = (dot(p.sub(a), e) / len2).clamp(0.0, 1.0);
        let proj = a.lerp(b, t);
        if proj.dist(p) <= eps {
            return true;
        }
    }
    // Crossing-number with a fixed horizontal ray.
    let mut inside = false;
    for i in 0..n {
        let a = &vertices[i];
        let b = &vertices[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if x_cross > p.x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Largest vertex-to-vertex distance.
pub fn diameter(vertices: &[PlanarPoint]) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..vertices.len() {
        for j in (i + 1)..vertices.len() {
            let d = vertices[i].dist(&vertices[j]);
            if d > best {
                best = d;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> [PlanarPoint; 4] {
        [
            PlanarPoint::new(0.0, 0.0),
            PlanarPoint::new(1.0, 0.0),
            PlanarPoint::new(1.0, 1.0),
            PlanarPoint::new(0.0, 1.0),
        ]
    }

    #[test]
    fn affine_compose_and_invert() {
        let t = AffineMap::new(2.0, (1.0, -1.0));
        let u = t.compose(&t.inverse());
        assert!(u.identity_defect() < 1e-15);
        let p = PlanarPoint::new(0.25, 0.75);
        let q = t.apply(&p);
        assert_eq!(q, PlanarPoint::new(1.5, 0.5));
    }

    #[test]
    fn ray_hits_square_side() {
        let sq = square();
        let hit = ray_segment_hit(
            &PlanarPoint::new(0.5, 0.5),
            (1.0, 0.0),
            &sq[1],
            &sq[2],
            1e-12,
        )
        .unwrap();
        assert!((hit.0 - 0.5).abs() < 1e-12);
        assert!((hit.1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn polygon_predicates() {
        let sq = square();
        assert!(signed_area(&sq) > 0.0);
        assert!(!is_self_intersecting(&sq));
        assert!(point_in_polygon(&sq, &PlanarPoint::new(0.5, 0.5), 1e-12));
        assert!(point_in_polygon(&sq, &PlanarPoint::new(1.0, 0.5), 1e-9));
        assert!(!point_in_polygon(&sq, &PlanarPoint::new(1.5, 0.5), 1e-9));

        let bow = [
            PlanarPoint::new(0.0, 0.0),
            PlanarPoint::new(1.0, 1.0),
            PlanarPoint::new(1.0, 0.0),
            PlanarPoint::new(0.0, 1.0),
        ];
        assert!(is_self_intersecting(&bow));
    }
}
