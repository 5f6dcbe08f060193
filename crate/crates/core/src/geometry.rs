//! Exact 2D primitives used by the propagation model: points, finite
//! segments, closed-segment intersection, mirroring across a line, and the
//! image-method specular point.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Tolerance (meters) for point-on-segment, degeneracy and touching tests.
pub const EPS_GEOM: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("non-finite coordinate in point ({x}, {y})")]
    NonFinite { x: f64, y: f64 },
    #[error("degenerate segment: endpoints {a} and {b} are closer than {EPS_GEOM} m")]
    DegenerateSegment { a: Point, b: Point },
    #[error("point {point} is {distance:e} m away from the surface")]
    OffSurface { point: Point, distance: f64 },
    #[error("incident ray has zero length")]
    ZeroLengthRay,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Left-hand perpendicular (rotated +90°).
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// A closed, non-degenerate line segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    a: Point,
    b: Point,
    len: f64,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Result<Self, GeometryError> {
        for p in [a, b] {
            if !p.is_finite() {
                return Err(GeometryError::NonFinite { x: p.x, y: p.y });
            }
        }
        let len = a.distance(b);
        if len <= EPS_GEOM {
            return Err(GeometryError::DegenerateSegment { a, b });
        }
        Ok(Segment { a, b, len })
    }

    pub fn a(&self) -> Point {
        self.a
    }

    pub fn b(&self) -> Point {
        self.b
    }

    pub fn direction(&self) -> Point {
        self.b - self.a
    }

    pub fn length(&self) -> f64 {
        self.len
    }

    pub fn point_at(&self, t: f64) -> Point {
        self.a + self.direction() * t
    }

    /// Unit normal (left of a→b).
    pub fn unit_normal(&self) -> Point {
        let d = self.direction();
        d.perp() * (1.0 / self.len)
    }

    /// Signed distance of `p` from the infinite supporting line, positive on
    /// the left of a→b.
    pub fn signed_distance(&self, p: Point) -> f64 {
        let d = self.direction();
        d.cross(p - self.a) / self.len
    }

    /// Parameter of the orthogonal projection of `p` onto the supporting line
    /// (0 at `a`, 1 at `b`).
    pub fn project(&self, p: Point) -> f64 {
        let d = self.direction();
        (p - self.a).dot(d) / d.norm_sq()
    }

    pub fn distance_to_point(&self, p: Point) -> f64 {
        let t = self.project(p).clamp(0.0, 1.0);
        self.point_at(t).distance(p)
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} -> {}]", self.a, self.b)
    }
}

fn sign_eps(v: f64, eps: f64) -> i8 {
    if v > eps {
        1
    } else if v < -eps {
        -1
    } else {
        0
    }
}

/// Closed-segment intersection test.
///
/// Endpoint contact and collinear overlap count as intersecting; `eps` is
/// the distance slack applied to those touching cases.
pub fn segments_intersect(s1: &Segment, s2: &Segment, eps: f64) -> bool {
    let o1 = sign_eps(s1.signed_distance(s2.a), eps);
    let o2 = sign_eps(s1.signed_distance(s2.b), eps);
    let o3 = sign_eps(s2.signed_distance(s1.a), eps);
    let o4 = sign_eps(s2.signed_distance(s1.b), eps);

    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && s1.distance_to_point(s2.a) <= eps)
        || (o2 == 0 && s1.distance_to_point(s2.b) <= eps)
        || (o3 == 0 && s2.distance_to_point(s1.a) <= eps)
        || (o4 == 0 && s2.distance_to_point(s1.b) <= eps)
}

/// Reflection of `p` across the infinite line through `surface`.
pub fn mirror_point(p: Point, surface: &Segment) -> Point {
    let foot = surface.point_at(surface.project(p));
    foot * 2.0 - p
}

/// Specular reflection point of the bounce `antenna -> surface -> ue`,
/// constructed with the image method.
///
/// Returns `None` when the two endpoints are not strictly on the same side
/// of the surface line or when the specular point falls outside the finite
/// extent of the surface (with `eps` slack).
pub fn reflection_point(antenna: Point, ue: Point, surface: &Segment, eps: f64) -> Option<Point> {
    let da = surface.signed_distance(antenna);
    let du = surface.signed_distance(ue);
    reflection_point_from_distances(antenna, mirror_point(ue, surface), surface, da, du, eps)
}

/// Same as [`reflection_point`] with the UE image and the signed line
/// distances of both endpoints already known.
pub(crate) fn reflection_point_from_distances(
    antenna: Point,
    image: Point,
    surface: &Segment,
    da: f64,
    du: f64,
    eps: f64,
) -> Option<Point> {
    if da.abs() <= eps || du.abs() <= eps || (da > 0.0) != (du > 0.0) {
        return None;
    }
    // The image sits at signed distance -du, so the antenna->image segment
    // meets the line at fraction da / (da + du).
    let r = antenna + (image - antenna) * (da / (da + du));
    let t = surface.project(r);
    let slack = eps / surface.length();
    if t < -slack || t > 1.0 + slack {
        return None;
    }
    Some(r)
}

/// Angle in `[0, π/2]` between the ray `antenna -> refl_pt` and the surface
/// normal.
pub fn incidence_angle(antenna: Point, refl_pt: Point, surface: &Segment) -> Result<f64, GeometryError> {
    let off = surface.distance_to_point(refl_pt);
    if off > EPS_GEOM {
        return Err(GeometryError::OffSurface { point: refl_pt, distance: off });
    }
    let v = antenna - refl_pt;
    if v.norm() <= EPS_GEOM {
        return Err(GeometryError::ZeroLengthRay);
    }
    let d = surface.direction();
    let tangential = v.dot(d).abs() / d.norm();
    let normal = v.cross(d).abs() / d.norm();
    Ok(tangential.atan2(normal))
}
