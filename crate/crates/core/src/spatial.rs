//! Uniform-grid index for fixed-radius neighbour queries.

use crate::geom::{dist2, Point};

/// Buckets points into square cells so that a radius query touches only the
/// cells overlapping the query disc.
#[derive(Debug, Clone)]
pub struct GridIndex {
    pts: Vec<Point>,
    origin: Point,
    cell: i64,
    nx: usize,
    ny: usize,
    start: Vec<u32>,
    items: Vec<u32>,
}

impl GridIndex {
    /// Index with roughly two points per cell.
    pub fn new(pts: Vec<Point>) -> Self {
        let (x0, y0, x1, y1) = bbox(&pts);
        let w = (x1 - x0).max(1) as f64;
        let h = (y1 - y0).max(1) as f64;
        let cell = (w * h * 2.0 / pts.len().max(1) as f64).sqrt().ceil() as i64;
        Self::with_cell(pts, cell.max(1))
    }

    /// Index with the given cell side in micrometres.
    pub fn with_cell(pts: Vec<Point>, cell: i64) -> Self {
        assert!(cell > 0);
        let (x0, y0, x1, y1) = bbox(&pts);
        let nx = ((x1 - x0) / cell + 1) as usize;
        let ny = ((y1 - y0) / cell + 1) as usize;
        let origin = Point { x: x0, y: y0 };
        let key = |p: &Point| ((p.y - y0) / cell) as usize * nx + ((p.x - x0) / cell) as usize;
        let mut start = vec![0u32; nx * ny + 1];
        for p in &pts {
            start[key(p) + 1] += 1;
        }
        for i in 1..start.len() {
            start[i] += start[i - 1];
        }
        let mut fill = start.clone();
        let mut items = vec![0u32; pts.len()];
        for (i, p) in pts.iter().enumerate() {
            let k = key(p);
            items[fill[k] as usize] = i as u32;
            fill[k] += 1;
        }
        GridIndex { pts, origin, cell, nx, ny, start, items }
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    /// Calls `f` with every indexed point whose squared distance from
    /// `center` is at most `r2` (squared micrometres), in unspecified order.
    pub fn for_each_within(&self, center: Point, r2: i128, mut f: impl FnMut(usize)) {
        if self.pts.is_empty() || r2 < 0 {
            return;
        }
        let r = ((r2 as f64).sqrt().ceil() as i64).saturating_add(1);
        let cx = |x: i64| ((x - self.origin.x).div_euclid(self.cell)).clamp(0, self.nx as i64 - 1) as usize;
        let cy = |y: i64| ((y - self.origin.y).div_euclid(self.cell)).clamp(0, self.ny as i64 - 1) as usize;
        let (ix0, ix1) = (cx(center.x.saturating_sub(r)), cx(center.x.saturating_add(r)));
        let (iy0, iy1) = (cy(center.y.saturating_sub(r)), cy(center.y.saturating_add(r)));
        for iy in iy0..=iy1 {
            let row = iy * self.nx;
            let lo = self.start[row + ix0] as usize;
            let hi = self.start[row + ix1 + 1] as usize;
            for &i in &self.items[lo..hi] {
                if dist2(center, self.pts[i as usize]) <= r2 {
                    f(i as usize);
                }
            }
        }
    }

    /// Sorted indices within `r2` of `center`.
    pub fn within(&self, center: Point, r2: i128) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_within(center, r2, |i| out.push(i));
        out.sort_unstable();
        out
    }
}

fn bbox(pts: &[Point]) -> (i64, i64, i64, i64) {
    if pts.is_empty() {
        return (0, 0, 0, 0);
    }
    pts.iter().fold((i64::MAX, i64::MAX, i64::MIN, i64::MIN), |(a, b, c, d), p| {
        (a.min(p.x), b.min(p.y), c.max(p.x), d.max(p.y))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::MeshRng;

    #[test]
    fn matches_linear_scan() {
        let mut rng = MeshRng::new(3);
        let pts: Vec<Point> = (0..500)
            .map(|_| Point::new(rng.below(1_000_000) as i64 - 200_000, rng.below(700_000) as i64))
            .collect();
        let grid = GridIndex::new(pts.clone());
        for q in 0..50 {
            let c = pts[q * 7];
            let r2 = (rng.below(300_000) as i128).pow(2);
            let expect: Vec<usize> = (0..pts.len()).filter(|&i| dist2(c, pts[i]) <= r2).collect();
            assert_eq!(grid.within(c, r2), expect);
        }
        // Query centre outside the indexed box.
        let far = Point::new(5_000_000, 5_000_000);
        assert!(grid.within(far, 1_000_000).is_empty());
        assert_eq!(grid.within(far, i128::from(i64::MAX)).len(), 500);
    }

    #[test]
    fn boundary_distance_is_included() {
        let grid = GridIndex::with_cell(vec![Point::new(0, 0), Point::new(3, 4)], 1);
        assert_eq!(grid.within(Point::new(0, 0), 25), vec![0, 1]);
        assert_eq!(grid.within(Point::new(0, 0), 24), vec![0]);
    }

    #[test]
    fn empty_index() {
        let grid = GridIndex::new(Vec::new());
        assert!(grid.within(Point::new(0, 0), 100).is_empty());
    }
}
