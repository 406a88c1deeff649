//! Planar primitives: points, poses, segment projection, polygon containment.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("degenerate segment: both endpoints at ({x}, {y})")]
    DegenerateSegment { x: f64, y: f64 },
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (other - self).norm()
    }

    /// Direction angle of the vector, in (−π, π].
    pub fn heading(self) -> f64 {
        normalize_angle(self.y.atan2(self.x))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, other: Point2, t: f64) -> Point2 {
        self + (other - self) * t
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

/// Position plus heading; heading is kept in (−π, π].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose2 {
    pub position: Point2,
    pub heading: f64,
}

impl Pose2 {
    pub fn new(position: Point2, heading: f64) -> Self {
        Self {
            position,
            heading: normalize_angle(heading),
        }
    }
}

/// Wraps an angle into (−π, π].
pub fn normalize_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// Wrapped difference `a − b` in (−π, π]. Antipodal inputs give +π.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    normalize_angle(a - b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SegmentRegion {
    Before,
    Within,
    After,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentProjection {
    pub region: SegmentRegion,
    /// Closest point of the segment.
    pub foot: Point2,
    /// `cross(p − a, b − a) / |b − a|`: distance to the supporting line, signed.
    pub signed_distance: f64,
    /// Unclamped line parameter of the orthogonal projection.
    pub param_t: f64,
}

impl SegmentProjection {
    /// Euclidean distance from the query point to the segment.
    pub fn distance_from(&self, p: Point2) -> f64 {
        p.distance(self.foot)
    }
}

/// Projects `p` onto segment `a → b`.
///
/// Region follows the dot-product split: `(p − a)·(b − a) < 0` is `Before`,
/// `(b − a)·(p − b) > 0` is `After`, and everything else (ties included) is
/// `Within`.
pub fn project_point_onto_segment(
    p: Point2,
    a: Point2,
    b: Point2,
) -> Result<SegmentProjection, GeometryError> {
    let seg = b - a;
    let len2 = seg.dot(seg);
    if len2 == 0.0 {
        return Err(GeometryError::DegenerateSegment { x: a.x, y: a.y });
    }
    let p0 = p - a;
    let p1 = p - b;
    let along = p0.dot(seg);
    let region = if along < 0.0 {
        SegmentRegion::Before
    } else if seg.dot(p1) > 0.0 {
        SegmentRegion::After
    } else {
        SegmentRegion::Within
    };
    let param_t = along / len2;
    let foot = match region {
        SegmentRegion::Before => a,
        SegmentRegion::After => b,
        SegmentRegion::Within => a + seg * param_t.clamp(0.0, 1.0),
    };
    Ok(SegmentProjection {
        region,
        foot,
        signed_distance: p0.cross(seg) / len2.sqrt(),
        param_t,
    })
}

/// Distance from `p` to segment `a → b`; a degenerate segment is a point.
pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let seg = b - a;
    let len2 = seg.dot(seg);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(seg) / len2).clamp(0.0, 1.0);
    p.distance(a + seg * t)
}

fn orientation(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment_collinear(p: Point2, a: Point2, b: Point2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed segment intersection test; touching endpoints count.
pub fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let d1 = orientation(c, d, a);
    let d2 = orientation(c, d, b);
    let d3 = orientation(a, b, c);
    let d4 = orientation(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment_collinear(a, c, d))
        || (d2 == 0.0 && on_segment_collinear(b, c, d))
        || (d3 == 0.0 && on_segment_collinear(c, a, b))
        || (d4 == 0.0 && on_segment_collinear(d, a, b))
}

const BOUNDARY_EPS: f64 = 1e-9;

/// Ray-casting containment; points on the boundary count as inside.
pub fn point_in_polygon(p: Point2, poly: &[Point2]) -> Result<bool, GeometryError> {
    if poly.len() < 3 {
        return Err(GeometryError::TooFewVertices(poly.len()));
    }
    let n = poly.len();
    let mut inside = false;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if point_segment_distance(p, a, b) <= BOUNDARY_EPS {
            return Ok(true);
        }
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x_cross {
                inside = !inside;
            }
        }
    }
    Ok(inside)
}

/// Distance from `p` to the polygon region (0 inside or on the boundary).
pub fn distance_to_polygon(p: Point2, poly: &[Point2]) -> Result<f64, GeometryError> {
    if point_in_polygon(p, poly)? {
        return Ok(0.0);
    }
    let n = poly.len();
    Ok((0..n)
        .map(|i| point_segment_distance(p, poly[i], poly[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min))
}

/// Axis-aligned bounding box as `(min, max)`.
pub fn bounding_box(points: &[Point2]) -> (Point2, Point2) {
    points.iter().fold(
        (
            Point2::new(f64::INFINITY, f64::INFINITY),
            Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        ),
        |(lo, hi), p| {
            (
                Point2::new(lo.x.min(p.x), lo.y.min(p.y)),
                Point2::new(hi.x.max(p.x), hi.y.max(p.y)),
            )
        },
    )
}

/// Exact distance between segment `a → b` and the closed rectangle `[lo, hi]`.
pub fn segment_rect_distance(a: Point2, b: Point2, lo: Point2, hi: Point2) -> f64 {
    let inside = |p: Point2| p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
    if inside(a) || inside(b) {
        return 0.0;
    }
    let corners = [
        lo,
        Point2::new(hi.x, lo.y),
        hi,
        Point2::new(lo.x, hi.y),
    ];
    for i in 0..4 {
        if segments_intersect(a, b, corners[i], corners[(i + 1) % 4]) {
            return 0.0;
        }
    }
    let clamp = |p: Point2| Point2::new(p.x.clamp(lo.x, hi.x), p.y.clamp(lo.y, hi.y));
    let mut best = a.distance(clamp(a)).min(b.distance(clamp(b)));
    for c in corners {
        best = best.min(point_segment_distance(c, a, b));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_angle_diff(a: f64, b: f64) -> f64 {
        (-2..=2)
            .map(|k| a - b + 2.0 * PI * k as f64)
            .min_by(|x, y| x.abs().partial_cmp(&y.abs()).unwrap())
            .unwrap()
    }

    #[test]
    fn angle_diff_examples() {
        assert_eq!(angle_diff(PI / 2.0, PI / 2.0), 0.0);
        assert_eq!(angle_diff(0.0, PI), PI);
        assert_eq!(angle_diff(PI, 0.0), PI);
        let oracle = brute_angle_diff(3.0, -3.0);
        assert!((oracle - -0.28319).abs() < 1e-5);
        assert!((angle_diff(3.0, -3.0) - oracle).abs() < 1e-12);
    }

    #[test]
    fn normalize_keeps_range() {
        for k in -20..20 {
            let a = k as f64 * 0.77;
            let n = normalize_angle(a);
            assert!(n > -PI && n <= PI, "{a} -> {n}");
        }
        assert_eq!(normalize_angle(-PI), PI);
    }

    #[test]
    fn projection_examples() {
        let a = Point2::new(0.0, 0.0);
        let b = Point2::new(10.0, 0.0);
        let pr = project_point_onto_segment(Point2::new(5.0, 3.0), a, b).unwrap();
        assert_eq!(pr.region, SegmentRegion::Within);
        assert_eq!(pr.foot, Point2::new(5.0, 0.0));
        assert_eq!(pr.signed_distance, -3.0);
        assert_eq!(pr.param_t, 0.5);

        let pr = project_point_onto_segment(Point2::new(-2.0, 1.0), a, b).unwrap();
        assert_eq!(pr.region, SegmentRegion::Before);
        assert_eq!(pr.foot, a);
        let pr = project_point_onto_segment(Point2::new(12.0, -1.0), a, b).unwrap();
        assert_eq!(pr.region, SegmentRegion::After);
        assert_eq!(pr.foot, b);
    }

    #[test]
    fn projection_ties_are_within() {
        let a = Point2::new(0.0, 0.0);
        let b = Point2::new(10.0, 0.0);
        let pr = project_point_onto_segment(a, a, b).unwrap();
        assert_eq!(pr.region, SegmentRegion::Within);
        assert_eq!(pr.foot, a);
        let pr = project_point_onto_segment(Point2::new(10.0, 4.0), a, b).unwrap();
        assert_eq!(pr.region, SegmentRegion::Within);
        assert_eq!(pr.foot, b);
    }

    #[test]
    fn degenerate_segment_is_error() {
        let a = Point2::new(1.0, 1.0);
        assert!(matches!(
            project_point_onto_segment(Point2::new(0.0, 0.0), a, a),
            Err(GeometryError::DegenerateSegment { .. })
        ));
    }

    #[test]
    fn polygon_containment() {
        let sq = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        assert!(point_in_polygon(Point2::new(0.5, 0.5), &sq).unwrap());
        assert!(!point_in_polygon(Point2::new(2.0, 2.0), &sq).unwrap());
        assert!(point_in_polygon(Point2::new(1.0, 0.5), &sq).unwrap());
        assert!(point_in_polygon(Point2::new(0.0, 0.0), &sq).unwrap());
        assert_eq!(
            point_in_polygon(Point2::new(0.0, 0.0), &sq[..2]),
            Err(GeometryError::TooFewVertices(2))
        );
    }

    #[test]
    fn segment_intersection_cases() {
        let p = Point2::new;
        assert!(segments_intersect(p(0., 0.), p(2., 2.), p(0., 2.), p(2., 0.)));
        assert!(segments_intersect(p(0., 0.), p(1., 0.), p(1., 0.), p(1., 1.)));
        assert!(!segments_intersect(p(0., 0.), p(1., 0.), p(0., 1.), p(1., 1.)));
        assert!(segments_intersect(p(0., 0.), p(2., 0.), p(1., 0.), p(3., 0.)));
        assert!(!segments_intersect(p(0., 0.), p(1., 0.), p(2., 0.), p(3., 0.)));
    }

    #[test]
    fn rect_distance_matches_sampling() {
        let lo = Point2::new(0.0, 0.0);
        let hi = Point2::new(2.0, 1.0);
        let cases = [
            (Point2::new(3.0, 3.0), Point2::new(5.0, 2.0)),
            (Point2::new(-1.0, 0.5), Point2::new(3.0, 0.5)),
            (Point2::new(-2.0, -1.0), Point2::new(-1.0, 3.0)),
            (Point2::new(2.5, -3.0), Point2::new(4.0, 3.0)),
        ];
        for (a, b) in cases {
            let exact = segment_rect_distance(a, b, lo, hi);
            let mut sampled = f64::INFINITY;
            for i in 0..=200 {
                for j in 0..=100 {
                    let q = Point2::new(i as f64 * 0.01, j as f64 * 0.01);
                    sampled = sampled.min(point_segment_distance(q, a, b));
                }
            }
            assert!((exact - sampled).abs() < 0.02, "{exact} vs {sampled}");
            assert!(exact <= sampled + 1e-12);
        }
    }
}
