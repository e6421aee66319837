use meshtopo_core::geom::{
    circumcenter, in_circle, orient2d, segment_intersection, CirclePosition, IntersectionKind, Orientation, Point,
    Segment,
};
use meshtopo_core::rng::MeshRng;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

const LIM: i64 = 1_000_000_000;

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

fn oracle_orient(a: Point, b: Point, c: Point) -> Orientation {
    let d = (big(b.x) - big(a.x)) * (big(c.y) - big(a.y)) - (big(b.y) - big(a.y)) * (big(c.x) - big(a.x));
    if d.is_positive() {
        Orientation::Ccw
    } else if d.is_negative() {
        Orientation::Cw
    } else {
        Orientation::Collinear
    }
}

/// Sign of the untranslated 4x4 lifted determinant, scaled by the
/// orientation of `abc`.
fn oracle_in_circle(a: Point, b: Point, c: Point, d: Point) -> Option<CirclePosition> {
    let o = oracle_orient(a, b, c);
    if o == Orientation::Collinear {
        return None;
    }
    let row = |p: Point| [big(p.x), big(p.y), big(p.x) * big(p.x) + big(p.y) * big(p.y), BigInt::from(1)];
    let m = [row(a), row(b), row(c), row(d)];
    let det3 = |r: [usize; 3], c: [usize; 3]| {
        let e = |i: usize, j: usize| &m[r[i]][c[j]];
        e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
            + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
    };
    // Expand along the last column (all ones).
    let cols = [0, 1, 2];
    let mut det = BigInt::zero();
    for i in 0..4 {
        let rows: Vec<usize> = (0..4).filter(|&k| k != i).collect();
        let minor = det3([rows[0], rows[1], rows[2]], cols);
        // Cofactor sign for entry (i, 3).
        if (i + 3) % 2 == 0 {
            det += minor;
        } else {
            det -= minor;
        }
    }
    // Positive for d inside a counter-clockwise circle.
    let inside = if o == Orientation::Ccw { det.is_positive() } else { det.is_negative() };
    Some(if det.is_zero() {
        CirclePosition::Cocircular
    } else if inside {
        CirclePosition::Inside
    } else {
        CirclePosition::Outside
    })
}

fn rand_point(rng: &mut MeshRng, lim: i64) -> Point {
    Point::new(rng.below(2 * lim as u64 + 1) as i64 - lim, rng.below(2 * lim as u64 + 1) as i64 - lim)
}

#[test]
fn orient2d_matches_exact_oracle_on_many_triples() {
    let mut rng = MeshRng::new(1);
    for i in 0..100_000 {
        // Every fourth triple is forced near-collinear.
        let a = rand_point(&mut rng, LIM);
        let b = rand_point(&mut rng, LIM);
        let c = if i % 4 == 0 {
            let t = rng.below(5) as i64 - 2;
            Point::new(
                (a.x + t * (b.x - a.x)).clamp(-LIM, LIM),
                (a.y + t * (b.y - a.y) + rng.below(3) as i64 - 1).clamp(-LIM, LIM),
            )
        } else {
            rand_point(&mut rng, LIM)
        };
        assert_eq!(orient2d(a, b, c), oracle_orient(a, b, c), "{a:?} {b:?} {c:?}");
    }
}

#[test]
fn oracle_sanity() {
    let p = |x, y| Point::new(x, y);
    assert_eq!(oracle_in_circle(p(0, 0), p(4, 0), p(0, 4), p(1, 1)), Some(CirclePosition::Inside));
    assert_eq!(oracle_in_circle(p(0, 0), p(0, 4), p(4, 0), p(1, 1)), Some(CirclePosition::Inside));
    assert_eq!(oracle_in_circle(p(0, 0), p(4, 0), p(0, 4), p(5, 5)), Some(CirclePosition::Outside));
    assert_eq!(oracle_in_circle(p(0, 0), p(4, 0), p(0, 4), p(4, 4)), Some(CirclePosition::Cocircular));
}

#[test]
fn in_circle_matches_exact_oracle_on_many_quadruples() {
    let mut rng = MeshRng::new(2);
    let mut cocircular = 0;
    for i in 0..100_000 {
        let (a, b, c, d) = if i % 3 == 0 {
            // Rectangle corners are exactly cocircular; nudge one sometimes.
            let x0 = rng.below(LIM as u64) as i64 - LIM / 2;
            let y0 = rng.below(LIM as u64) as i64 - LIM / 2;
            let w = rng.below(LIM as u64 / 2) as i64 + 1;
            let h = rng.below(LIM as u64 / 2) as i64 + 1;
            let nudge = rng.below(3) as i64 - 1;
            (
                Point::new(x0, y0),
                Point::new(x0 + w, y0),
                Point::new(x0 + w, y0 + h),
                Point::new(x0, y0 + h + nudge),
            )
        } else {
            (
                rand_point(&mut rng, LIM),
                rand_point(&mut rng, LIM),
                rand_point(&mut rng, LIM),
                rand_point(&mut rng, LIM),
            )
        };
        let got = in_circle(a, b, c, d).ok();
        let want = oracle_in_circle(a, b, c, d);
        assert_eq!(got, want, "{a:?} {b:?} {c:?} {d:?}");
        cocircular += (got == Some(CirclePosition::Cocircular)) as usize;
    }
    assert!(cocircular > 10_000);
}

#[test]
fn in_circle_examples() {
    let p = |x, y| Point::new(x, y);
    assert_eq!(in_circle(p(0, 0), p(4, 0), p(2, 3), p(2, 1)), Ok(CirclePosition::Inside));
    assert_eq!(in_circle(p(0, 0), p(1, 0), p(1, 1), p(0, 1)), Ok(CirclePosition::Cocircular));
    assert_eq!(in_circle(p(0, 0), p(4, 0), p(2, 3), p(100, 100)), Ok(CirclePosition::Outside));
    // Clockwise input is normalised.
    assert_eq!(in_circle(p(0, 0), p(2, 3), p(4, 0), p(2, 1)), Ok(CirclePosition::Inside));
    assert!(in_circle(p(0, 0), p(1, 1), p(2, 2), p(5, 0)).is_err());
}

#[test]
fn circumcentre_is_equidistant() {
    let mut rng = MeshRng::new(3);
    for _ in 0..1000 {
        let (a, b, c) = (rand_point(&mut rng, 1_000_000), rand_point(&mut rng, 1_000_000), rand_point(&mut rng, 1_000_000));
        let Ok(o) = circumcenter(a, b, c) else {
            assert_eq!(orient2d(a, b, c), Orientation::Collinear);
            continue;
        };
        let da = o.dist(a.to_coord());
        let db = o.dist(b.to_coord());
        let dc = o.dist(c.to_coord());
        let tol = 1e-9 * da.max(1.0);
        assert!((da - db).abs() < tol && (da - dc).abs() < tol);
    }
}

fn pt() -> impl Strategy<Value = Point> {
    (-LIM..=LIM, -LIM..=LIM).prop_map(|(x, y)| Point::new(x, y))
}

/// Small grid: collinear and cocircular configurations are common.
fn grid_pt() -> impl Strategy<Value = Point> {
    (0i64..6, 0i64..6).prop_map(|(x, y)| Point::new(x, y))
}

fn any_pt() -> impl Strategy<Value = Point> {
    prop_oneof![pt(), grid_pt()]
}

proptest! {
    #[test]
    fn orient2d_antisymmetric(a in any_pt(), b in any_pt(), c in any_pt()) {
        prop_assert_eq!(orient2d(a, b, c), orient2d(b, a, c).reversed());
        prop_assert_eq!(orient2d(a, b, c), orient2d(a, c, b).reversed());
        prop_assert_eq!(orient2d(a, b, c), oracle_orient(a, b, c));
    }

    #[test]
    fn in_circle_rotation_invariant(a in any_pt(), b in any_pt(), c in any_pt(), d in any_pt()) {
        let r = in_circle(a, b, c, d);
        prop_assert_eq!(&r, &in_circle(b, c, a, d));
        prop_assert_eq!(&r, &in_circle(c, a, b, d));
        prop_assert_eq!(r.ok(), oracle_in_circle(a, b, c, d));
    }

    #[test]
    fn intersection_symmetric(a in any_pt(), b in any_pt(), c in any_pt(), d in any_pt()) {
        prop_assume!(a != b && c != d);
        let s1 = Segment::new(a, b);
        let s2 = Segment::new(c, d);
        let r12 = segment_intersection(&s1, &s2);
        let r21 = segment_intersection(&s2, &s1);
        prop_assert_eq!(r12.kind, r21.kind);
        prop_assert_eq!(r12.point, r21.point);
        // Reversing a segment's direction changes nothing either.
        prop_assert_eq!(segment_intersection(&Segment::new(b, a), &s2).kind, r12.kind);
        if r12.kind == IntersectionKind::Proper {
            let p = r12.point.unwrap();
            prop_assert_eq!(p.orient_from(a, b), Orientation::Collinear);
            prop_assert_eq!(p.orient_from(c, d), Orientation::Collinear);
            prop_assert!(p.as_point().is_none_or(|q| q != a && q != b && q != c && q != d));
        }
    }
}
