//! Exact planar primitives.
//!
//! Coordinates are snapped to integer micrometres when they enter the
//! library. Orientation is then evaluated exactly in `i128`, and the
//! in-circle determinant (about 170 bits for the supported coordinate range)
//! takes a checked `i128` fast path and falls back to 256-bit integers.

use std::cmp::Ordering;
use std::fmt;

use ethnum::I256;

use crate::error::{Error, Result};

pub const MICROS_PER_METER: i64 = 1_000_000;

/// Largest absolute coordinate accepted, in micrometres (1000 km).
///
/// Keeps coordinate differences within 41 bits, which the fixed-width
/// predicate arithmetic below relies on.
pub const MAX_COORD_UM: i64 = 1_000_000_000_000;
pub const MAX_COORD_METERS: f64 = (MAX_COORD_UM / MICROS_PER_METER) as f64;

/// A snapped point, in integer micrometres.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    /// Builds a point from micrometre coordinates.
    ///
    /// # Panics
    /// If a coordinate exceeds [`MAX_COORD_UM`] in magnitude.
    pub const fn new(x: i64, y: i64) -> Self {
        assert!(x.abs() <= MAX_COORD_UM && y.abs() <= MAX_COORD_UM);
        Point { x, y }
    }

    /// Snaps decimal metres onto the micrometre grid.
    pub fn from_meters(x: f64, y: f64) -> Result<Self> {
        Ok(Point {
            x: snap(x)?,
            y: snap(y)?,
        })
    }

    pub fn x_m(self) -> f64 {
        self.x as f64 / MICROS_PER_METER as f64
    }

    pub fn y_m(self) -> f64 {
        self.y as f64 / MICROS_PER_METER as f64
    }

    pub fn to_coord(self) -> Coord {
        Coord {
            x: self.x_m(),
            y: self.y_m(),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", format_micros(self.x), format_micros(self.y))
    }
}

/// Rounds metres to the nearest micrometre.
pub fn snap(meters: f64) -> Result<i64> {
    if !meters.is_finite() {
        return Err(Error::NonFinite(meters));
    }
    if meters.abs() > MAX_COORD_METERS {
        return Err(Error::OutOfRange(meters));
    }
    Ok((meters * MICROS_PER_METER as f64).round() as i64)
}

/// Formats a micrometre quantity as decimal metres with at most six
/// fractional digits and no trailing zeros. Exact; no float round trip.
pub fn format_micros(v: i64) -> String {
    let sign = if v < 0 { "-" } else { "" };
    let a = v.unsigned_abs();
    let whole = a / MICROS_PER_METER as u64;
    let frac = a % MICROS_PER_METER as u64;
    if frac == 0 {
        format!("{sign}{whole}")
    } else {
        let digits = format!("{frac:06}");
        format!("{sign}{whole}.{}", digits.trim_end_matches('0'))
    }
}

/// An unsnapped location in metres (circumcentres, Voronoi vertices, rendering).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Coord {
    pub x: f64,
    pub y: f64,
}

impl Coord {
    pub fn new(x: f64, y: f64) -> Self {
        Coord { x, y }
    }

    pub fn dist(self, other: Coord) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Ccw,
    Cw,
    Collinear,
}

impl Orientation {
    fn from_sign<T: PartialOrd + Default>(v: T) -> Self {
        let zero = T::default();
        if v > zero {
            Orientation::Ccw
        } else if v < zero {
            Orientation::Cw
        } else {
            Orientation::Collinear
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Orientation::Ccw => Orientation::Cw,
            Orientation::Cw => Orientation::Ccw,
            Orientation::Collinear => Orientation::Collinear,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CirclePosition {
    Inside,
    Outside,
    Cocircular,
}

/// Twice the signed area of `abc`, exact.
#[inline]
pub fn orient_det(a: Point, b: Point, c: Point) -> i128 {
    let abx = (b.x - a.x) as i128;
    let aby = (b.y - a.y) as i128;
    let acx = (c.x - a.x) as i128;
    let acy = (c.y - a.y) as i128;
    abx * acy - aby * acx
}

#[inline]
pub fn orient2d(a: Point, b: Point, c: Point) -> Orientation {
    Orientation::from_sign(orient_det(a, b, c))
}

/// Sign of the lifted in-circle determinant for `abc` taken in the given
/// order: positive means `d` is inside when `abc` is counter-clockwise.
fn in_circle_sign(a: Point, b: Point, c: Point, d: Point) -> i32 {
    let adx = (a.x - d.x) as i128;
    let ady = (a.y - d.y) as i128;
    let bdx = (b.x - d.x) as i128;
    let bdy = (b.y - d.y) as i128;
    let cdx = (c.x - d.x) as i128;
    let cdy = (c.y - d.y) as i128;

    let alift = adx * adx + ady * ady;
    let blift = bdx * bdx + bdy * bdy;
    let clift = cdx * cdx + cdy * cdy;
    let bc = bdx * cdy - cdx * bdy;
    let ca = cdx * ady - adx * cdy;
    let ab = adx * bdy - bdx * ady;

    let fast = alift
        .checked_mul(bc)
        .zip(blift.checked_mul(ca))
        .zip(clift.checked_mul(ab))
        .and_then(|((t1, t2), t3)| t1.checked_add(t2)?.checked_add(t3));
    match fast {
        Some(det) => det.signum() as i32,
        None => {
            let det = I256::from(alift) * I256::from(bc)
                + I256::from(blift) * I256::from(ca)
                + I256::from(clift) * I256::from(ab);
            det.signum().as_i32()
        }
    }
}

/// Position of `d` relative to the circle through `a`, `b`, `c`.
///
/// The triple may be given in either orientation. Collinear triples have
/// no circumcircle and yield [`Error::Collinear`].
pub fn in_circle(a: Point, b: Point, c: Point, d: Point) -> Result<CirclePosition> {
    let s = match orient2d(a, b, c) {
        Orientation::Ccw => in_circle_sign(a, b, c, d),
        Orientation::Cw => in_circle_sign(a, c, b, d),
        Orientation::Collinear => return Err(Error::Collinear),
    };
    Ok(match s {
        1 => CirclePosition::Inside,
        -1 => CirclePosition::Outside,
        _ => CirclePosition::Cocircular,
    })
}

/// Strict in-circle test for a triple already known to be counter-clockwise.
#[inline]
pub(crate) fn strictly_inside_ccw(a: Point, b: Point, c: Point, d: Point) -> bool {
    in_circle_sign(a, b, c, d) > 0
}

/// Euclidean distance in metres.
pub fn dist(a: Point, b: Point) -> f64 {
    let dx = (a.x - b.x) as f64;
    let dy = (a.y - b.y) as f64;
    dx.hypot(dy) / MICROS_PER_METER as f64
}

/// Squared distance in square micrometres, exact.
#[inline]
pub fn dist2(a: Point, b: Point) -> i128 {
    let dx = (a.x - b.x) as i128;
    let dy = (a.y - b.y) as i128;
    dx * dx + dy * dy
}

/// Centre of the circle through three non-collinear points, in metres.
pub fn circumcenter(a: Point, b: Point, c: Point) -> Result<Coord> {
    let det = orient_det(a, b, c);
    if det == 0 {
        return Err(Error::Collinear);
    }
    let bx = (b.x - a.x) as i128;
    let by = (b.y - a.y) as i128;
    let cx = (c.x - a.x) as i128;
    let cy = (c.y - a.y) as i128;
    let bl = bx * bx + by * by;
    let cl = cx * cx + cy * cy;
    // Numerators are exact; only the final division rounds.
    let ux = cy * bl - by * cl;
    let uy = bx * cl - cx * bl;
    let den = 2.0 * det as f64;
    let m = MICROS_PER_METER as f64;
    Ok(Coord {
        x: (a.x as f64 + ux as f64 / den) / m,
        y: (a.y as f64 + uy as f64 / den) / m,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Self {
        debug_assert!(a != b, "degenerate segment");
        Segment { a, b }
    }

    pub fn length(&self) -> f64 {
        dist(self.a, self.b)
    }

    /// Whether `p`, known to be collinear with the segment, lies within it.
    fn covers_collinear(&self, p: Point) -> bool {
        p.x >= self.a.x.min(self.b.x)
            && p.x <= self.a.x.max(self.b.x)
            && p.y >= self.a.y.min(self.b.y)
            && p.y <= self.a.y.max(self.b.y)
    }
}

/// A point with rational coordinates `x/d, y/d` on the micrometre grid.
///
/// Crossings of snapped segments land here; ordering and equality are
/// exact (cross-multiplied in 256 bits).
#[derive(Debug, Clone, Copy)]
pub struct RatPoint {
    pub x: i128,
    pub y: i128,
    /// Always positive.
    pub d: i128,
}

impl RatPoint {
    pub fn to_coord(&self) -> Coord {
        let m = MICROS_PER_METER as f64;
        Coord {
            x: self.x as f64 / self.d as f64 / m,
            y: self.y as f64 / self.d as f64 / m,
        }
    }

    /// `Some(p)` if this point lies on the integer grid.
    pub fn as_point(&self) -> Option<Point> {
        if self.d == 1 || (self.x % self.d == 0 && self.y % self.d == 0) {
            Some(Point {
                x: (self.x / self.d) as i64,
                y: (self.y / self.d) as i64,
            })
        } else {
            None
        }
    }

    pub fn cmp_x(&self, other: &RatPoint) -> Ordering {
        if self.d == other.d {
            return self.x.cmp(&other.x);
        }
        (I256::from(self.x) * I256::from(other.d)).cmp(&(I256::from(other.x) * I256::from(self.d)))
    }

    pub fn cmp_y(&self, other: &RatPoint) -> Ordering {
        if self.d == other.d {
            return self.y.cmp(&other.y);
        }
        (I256::from(self.y) * I256::from(other.d)).cmp(&(I256::from(other.y) * I256::from(self.d)))
    }

    /// Sweep order: top to bottom, then left to right.
    pub fn sweep_cmp(&self, other: &RatPoint) -> Ordering {
        other.cmp_y(self).then_with(|| self.cmp_x(other))
    }

    /// Orientation of this point relative to the directed line `a -> b`.
    pub fn orient_from(&self, a: Point, b: Point) -> Orientation {
        if self.d == 1 {
            return orient2d(
                a,
                b,
                Point {
                    x: self.x as i64,
                    y: self.y as i64,
                },
            );
        }
        let abx = I256::from((b.x - a.x) as i128);
        let aby = I256::from((b.y - a.y) as i128);
        let d = I256::from(self.d);
        let px = I256::from(self.x) - I256::from(a.x as i128) * d;
        let py = I256::from(self.y) - I256::from(a.y as i128) * d;
        Orientation::from_sign(abx * py - aby * px)
    }
}

impl From<Point> for RatPoint {
    fn from(p: Point) -> Self {
        RatPoint {
            x: p.x as i128,
            y: p.y as i128,
            d: 1,
        }
    }
}

impl PartialEq for RatPoint {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_x(other) == Ordering::Equal && self.cmp_y(other) == Ordering::Equal
    }
}

impl Eq for RatPoint {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntersectionKind {
    /// Open interiors cross at exactly one point.
    Proper,
    /// The segments meet at a single point that is an endpoint of at least
    /// one of them.
    EndpointTouch,
    /// Collinear with a shared stretch of positive length.
    Overlap,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentIntersection {
    pub kind: IntersectionKind,
    /// The contact point for `Proper` and `EndpointTouch`.
    pub point: Option<RatPoint>,
}

impl SegmentIntersection {
    const NONE: SegmentIntersection = SegmentIntersection {
        kind: IntersectionKind::None,
        point: None,
    };
}

/// Classifies how two segments meet.
pub fn segment_intersection(s1: &Segment, s2: &Segment) -> SegmentIntersection {
    let o1 = orient2d(s1.a, s1.b, s2.a);
    let o2 = orient2d(s1.a, s1.b, s2.b);
    let o3 = orient2d(s2.a, s2.b, s1.a);
    let o4 = orient2d(s2.a, s2.b, s1.b);
    use Orientation::Collinear as Col;

    if o1 != Col && o2 != Col && o3 != Col && o4 != Col {
        if o1 != o2 && o3 != o4 {
            return SegmentIntersection {
                kind: IntersectionKind::Proper,
                point: Some(proper_crossing_point(s1, s2)),
            };
        }
        return SegmentIntersection::NONE;
    }

    if o1 == Col && o2 == Col {
        return collinear_contact(s1, s2);
    }

    // Exactly one endpoint can sit on the other segment here.
    let touch = if o1 == Col && s1.covers_collinear(s2.a) {
        Some(s2.a)
    } else if o2 == Col && s1.covers_collinear(s2.b) {
        Some(s2.b)
    } else if o3 == Col && s2.covers_collinear(s1.a) {
        Some(s1.a)
    } else if o4 == Col && s2.covers_collinear(s1.b) {
        Some(s1.b)
    } else {
        None
    };
    match touch {
        Some(p) => SegmentIntersection {
            kind: IntersectionKind::EndpointTouch,
            point: Some(p.into()),
        },
        None => SegmentIntersection::NONE,
    }
}

fn collinear_contact(s1: &Segment, s2: &Segment) -> SegmentIntersection {
    // Project onto the dominant axis of s1.
    let key = |p: Point| {
        if (s1.b.x - s1.a.x).abs() >= (s1.b.y - s1.a.y).abs() {
            p.x
        } else {
            p.y
        }
    };
    let (lo1, hi1) = minmax(key(s1.a), key(s1.b));
    let (lo2, hi2) = minmax(key(s2.a), key(s2.b));
    let lo = lo1.max(lo2);
    let hi = hi1.min(hi2);
    match lo.cmp(&hi) {
        Ordering::Less => SegmentIntersection {
            kind: IntersectionKind::Overlap,
            point: None,
        },
        Ordering::Equal => {
            let p = [s1.a, s1.b]
                .into_iter()
                .find(|&p| key(p) == lo)
                .expect("touching endpoint");
            SegmentIntersection {
                kind: IntersectionKind::EndpointTouch,
                point: Some(p.into()),
            }
        }
        Ordering::Greater => SegmentIntersection::NONE,
    }
}

fn minmax(a: i64, b: i64) -> (i64, i64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Crossing point of two properly crossing segments, exact.
fn proper_crossing_point(s1: &Segment, s2: &Segment) -> RatPoint {
    let rx = (s1.b.x - s1.a.x) as i128;
    let ry = (s1.b.y - s1.a.y) as i128;
    let sx = (s2.b.x - s2.a.x) as i128;
    let sy = (s2.b.y - s2.a.y) as i128;
    let qx = (s2.a.x - s1.a.x) as i128;
    let qy = (s2.a.y - s1.a.y) as i128;
    let mut den = rx * sy - ry * sx;
    let mut t = qx * sy - qy * sx;
    if den < 0 {
        den = -den;
        t = -t;
    }
    // |coord·den| < 2^123 and |r·t| < 2^124 for the supported range.
    let mut p = RatPoint {
        x: s1.a.x as i128 * den + rx * t,
        y: s1.a.y as i128 * den + ry * t,
        d: den,
    };
    let g = gcd(gcd(p.x.unsigned_abs(), p.y.unsigned_abs()), p.d.unsigned_abs()) as i128;
    if g > 1 {
        p.x /= g;
        p.y /= g;
        p.d /= g;
    }
    p
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
