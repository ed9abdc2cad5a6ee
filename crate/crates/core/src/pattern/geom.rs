//! Exact rational plane geometry.
//!
//! Everything the polygon enumerator does — intersections, orientation tests,
//! point-in-polygon queries — happens over arbitrary-precision rationals, so
//! there is no epsilon anywhere. Generator positions can be separated by
//! distances on the order of the station stagger, which is tiny compared to
//! the lattice scale; exactness is what makes those decisions reliable.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Q = BigRational;

/// Integer as a rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Ratio of integers as a rational.
pub fn qr(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Floor of a rational as `i64`.
pub fn qfloor_i64(x: &Q) -> i64 {
    x.floor()
        .to_integer()
        .to_i64()
        .expect("coordinate out of i64 range")
}

/// `x` reduced modulo the positive integer `p` into `[0, p)`.
pub fn qmod(x: &Q, p: i64) -> Q {
    let d = (x / qi(p)).floor();
    x - d * qi(p)
}

/// Is `x` an integer?
pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

/// Sign of a rational: -1, 0, or 1.
pub fn sgn(x: &Q) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// A point (or vector) in the exact plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pt {
    pub x: Q,
    pub y: Q,
}

impl Pt {
    pub fn new(x: Q, y: Q) -> Pt {
        Pt { x, y }
    }

    pub fn add(&self, o: &Pt) -> Pt {
        Pt::new(&self.x + &o.x, &self.y + &o.y)
    }

    pub fn sub(&self, o: &Pt) -> Pt {
        Pt::new(&self.x - &o.x, &self.y - &o.y)
    }

    /// L-infinity distance to another point.
    pub fn linf(&self, o: &Pt) -> Q {
        let dx = (&self.x - &o.x).abs();
        let dy = (&self.y - &o.y).abs();
        if dx >= dy {
            dx
        } else {
            dy
        }
    }
}

/// Cross product of vectors `a - o` and `b - o` (twice the signed area).
pub fn cross(o: &Pt, a: &Pt, b: &Pt) -> Q {
    let ax = &a.x - &o.x;
    let ay = &a.y - &o.y;
    let bx = &b.x - &o.x;
    let by = &b.y - &o.y;
    ax * by - ay * bx
}

/// Orientation sign of the triple (o, a, b): 1 = counterclockwise turn.
pub fn orient(o: &Pt, a: &Pt, b: &Pt) -> i32 {
    sgn(&cross(o, a, b))
}

/// Is `p` on the closed segment `[a, b]`?
pub fn on_segment(a: &Pt, b: &Pt, p: &Pt) -> bool {
    if orient(a, b, p) != 0 {
        return false;
    }
    let min_x = if a.x <= b.x { &a.x } else { &b.x };
    let max_x = if a.x <= b.x { &b.x } else { &a.x };
    let min_y = if a.y <= b.y { &a.y } else { &b.y };
    let max_y = if a.y <= b.y { &b.y } else { &a.y };
    *min_x <= p.x && p.x <= *max_x && *min_y <= p.y && p.y <= *max_y
}

/// Do the closed segments `[p1, p2]` and `[q1, q2]` share any point?
pub fn segments_touch(p1: &Pt, p2: &Pt, q1: &Pt, q2: &Pt) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if d1 != d2 && d3 != d4 && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0 {
        return true;
    }
    (d1 == 0 && on_segment(q1, q2, p1))
        || (d2 == 0 && on_segment(q1, q2, p2))
        || (d3 == 0 && on_segment(p1, p2, q1))
        || (d4 == 0 && on_segment(p1, p2, q2))
}

/// Twice the signed area of a closed polygon (positive = counterclockwise).
pub fn shoelace2(poly: &[Pt]) -> Q {
    let mut acc = Q::zero();
    let n = poly.len();
    for i in 0..n {
        let a = &poly[i];
        let b = &poly[(i + 1) % n];
        acc += &a.x * &b.y - &a.y * &b.x;
    }
    acc
}

/// Clean up a closed vertex cycle: drop consecutive duplicates and merge
/// collinear runs. Returns `None` if the boundary backtracks on itself
/// (a collinear vertex whose neighbors lie on the same side), which can
/// never happen on a valid polygon boundary.
pub fn compress_cycle(mut pts: Vec<Pt>) -> Option<Vec<Pt>> {
    if let Some(scaled) = scale_to_i128(&pts, &[]) {
        let kept = compress_cycle_indices(&scaled)?;
        return Some(kept.into_iter().map(|k| pts[k].clone()).collect());
    }
    // Remove consecutive duplicates (cyclically).
    let mut i = 0;
    while i < pts.len() && pts.len() > 1 {
        let j = (i + 1) % pts.len();
        if pts[i] == pts[j] {
            pts.remove(j);
            i = 0;
        } else {
            i += 1;
        }
    }
    // Merge collinear triples (cyclically) until stable.
    let mut changed = true;
    while changed && pts.len() > 2 {
        changed = false;
        let n = pts.len();
        for k in 0..n {
            let prev = &pts[(k + n - 1) % n];
            let cur = &pts[k];
            let next = &pts[(k + 1) % n];
            if orient(prev, cur, next) == 0 {
                // Collinear: forward continuation is fine, backtrack is not.
                let vx1 = &cur.x - &prev.x;
                let vy1 = &cur.y - &prev.y;
                let vx2 = &next.x - &cur.x;
                let vy2 = &next.y - &cur.y;
                let dot = vx1 * vx2 + vy1 * vy2;
                if !dot.is_positive() {
                    return None;
                }
                pts.remove(k);
                changed = true;
                break;
            }
        }
    }
    if pts.len() < 3 {
        return None;
    }
    Some(pts)
}

/// Integer-scaled `compress_cycle`: returns the indices of the surviving
/// vertices, in cycle order.
fn compress_cycle_indices(p: &[P128]) -> Option<Vec<usize>> {
    let mut idx: Vec<usize> = (0..p.len()).collect();
    let mut i = 0;
    while i < idx.len() && idx.len() > 1 {
        let j = (i + 1) % idx.len();
        if p[idx[i]] == p[idx[j]] {
            idx.remove(j);
            i = 0;
        } else {
            i += 1;
        }
    }
    let mut changed = true;
    while changed && idx.len() > 2 {
        changed = false;
        let n = idx.len();
        for k in 0..n {
            let prev = p[idx[(k + n - 1) % n]];
            let cur = p[idx[k]];
            let next = p[idx[(k + 1) % n]];
            if iorient(prev, cur, next) == 0 {
                let dot = (cur.0 - prev.0) * (next.0 - cur.0)
                    + (cur.1 - prev.1) * (next.1 - cur.1);
                if dot <= 0 {
                    return None;
                }
                idx.remove(k);
                changed = true;
                break;
            }
        }
    }
    if idx.len() < 3 {
        return None;
    }
    Some(idx)
}

/// Is the compressed closed polygon simple (no self-intersection)?
///
/// Assumes consecutive edges are non-collinear (guaranteed by
/// [`compress_cycle`]), so adjacent edges can only meet at their shared
/// vertex; all other pairs must be disjoint.
pub fn is_simple(poly: &[Pt]) -> bool {
    if let Some(scaled) = scale_to_i128(poly, &[]) {
        return is_simple_i128(&scaled);
    }
    let n = poly.len();
    for i in 0..n {
        let (a1, a2) = (&poly[i], &poly[(i + 1) % n]);
        for j in (i + 1)..n {
            // Skip the pair (i, j) when the edges are adjacent in the cycle.
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (b1, b2) = (&poly[j], &poly[(j + 1) % n]);
            if segments_touch(a1, a2, b1, b2) {
                return false;
            }
        }
    }
    true
}

/// Scale rational points to a common denominator, as exact `i128` pairs.
/// Returns `None` when a scaled coordinate could overflow downstream
/// arithmetic; callers then fall back to the rational path. `extra` points
/// are scaled with (and appended after) the polygon.
fn scale_to_i128(poly: &[Pt], extra: &[&Pt]) -> Option<Vec<(i128, i128)>> {
    use num::Integer;
    let mut l = BigInt::one();
    let all = || poly.iter().chain(extra.iter().copied());
    for pt in all() {
        l = l.lcm(pt.x.denom());
        l = l.lcm(pt.y.denom());
    }
    let mut out = Vec::with_capacity(poly.len() + extra.len());
    let cap: i128 = 1 << 60;
    for pt in all() {
        let sx = (pt.x.numer() * (&l / pt.x.denom())).to_i128()?;
        let sy = (pt.y.numer() * (&l / pt.y.denom())).to_i128()?;
        // Differences stay below 2^61 and their products below 2^122,
        // inside i128 range.
        if sx.abs() > cap || sy.abs() > cap {
            return None;
        }
        out.push((sx, sy));
    }
    Some(out)
}

type P128 = (i128, i128);

fn iorient(a: P128, b: P128, c: P128) -> i128 {
    ((b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)).signum()
}

fn ion_segment(a: P128, b: P128, p: P128) -> bool {
    iorient(a, b, p) == 0
        && a.0.min(b.0) <= p.0
        && p.0 <= a.0.max(b.0)
        && a.1.min(b.1) <= p.1
        && p.1 <= a.1.max(b.1)
}

fn isegments_touch(p1: P128, p2: P128, q1: P128, q2: P128) -> bool {
    let d1 = iorient(q1, q2, p1);
    let d2 = iorient(q1, q2, p2);
    let d3 = iorient(p1, p2, q1);
    let d4 = iorient(p1, p2, q2);
    if d1 != d2 && d3 != d4 && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0 {
        return true;
    }
    (d1 == 0 && ion_segment(q1, q2, p1))
        || (d2 == 0 && ion_segment(q1, q2, p2))
        || (d3 == 0 && ion_segment(p1, p2, q1))
        || (d4 == 0 && ion_segment(p1, p2, q2))
}

fn is_simple_i128(poly: &[P128]) -> bool {
    let n = poly.len();
    for i in 0..n {
        let (a1, a2) = (poly[i], poly[(i + 1) % n]);
        for j in (i + 1)..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            if isegments_touch(a1, a2, poly[j], poly[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

/// Exact point-in-polygon by ray casting (half-open rule).
///
/// Returns `None` if the point lies on the boundary — callers treat that as
/// an internal error since all query points are placed off every curve.
pub fn point_in_polygon(p: &Pt, poly: &[Pt]) -> Option<bool> {
    if let Some(scaled) = scale_to_i128(poly, &[p]) {
        let (&sp, spoly) = scaled.split_last().unwrap();
        return point_in_polygon_i128(sp, spoly);
    }
    let n = poly.len();
    let mut inside = false;
    for i in 0..n {
        let a = &poly[i];
        let b = &poly[(i + 1) % n];
        if on_segment(a, b, p) {
            return None;
        }
        let a_above = a.y > p.y;
        let b_above = b.y > p.y;
        if a_above != b_above {
            // Edge crosses the horizontal through p; x at the crossing:
            let t = (&p.y - &a.y) / (&b.y - &a.y);
            let xint = &a.x + t * (&b.x - &a.x);
            if xint == p.x {
                return None;
            }
            if xint > p.x {
                inside = !inside;
            }
        }
    }
    Some(inside)
}

fn point_in_polygon_i128(p: P128, poly: &[P128]) -> Option<bool> {
    let n = poly.len();
    let mut inside = false;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if ion_segment(a, b, p) {
            return None;
        }
        let a_above = a.1 > p.1;
        let b_above = b.1 > p.1;
        if a_above != b_above {
            // x at the crossing compared to p.0, division-free: the sign of
            // (xint - p.0) equals sign(cross) * sign(b.1 - a.1).
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross == 0 {
                return None;
            }
            if cross.signum() == (b.1 - a.1).signum() {
                inside = !inside;
            }
        }
    }
    Some(inside)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: i64, y: i64) -> Pt {
        Pt::new(qi(x), qi(y))
    }

    #[test]
    fn shoelace_orientation() {
        let sq = vec![p(0, 0), p(2, 0), p(2, 2), p(0, 2)];
        assert_eq!(shoelace2(&sq), qi(8));
        let cw: Vec<Pt> = sq.iter().rev().cloned().collect();
        assert_eq!(shoelace2(&cw), qi(-8));
    }

    #[test]
    fn compress_merges_and_rejects_backtracks() {
        let poly = vec![p(0, 0), p(1, 0), p(2, 0), p(2, 2), p(0, 2)];
        let c = compress_cycle(poly).unwrap();
        assert_eq!(c.len(), 4);
        // Backtracking boundary is rejected.
        let bad = vec![p(0, 0), p(3, 0), p(2, 0), p(2, 2), p(0, 2)];
        assert!(compress_cycle(bad).is_none());
    }

    #[test]
    fn simplicity() {
        let ok = vec![p(0, 0), p(2, 0), p(2, 2), p(0, 2)];
        assert!(is_simple(&ok));
        let bow = vec![p(0, 0), p(2, 2), p(2, 0), p(0, 2)];
        assert!(!is_simple(&bow));
    }

    #[test]
    fn ray_cast() {
        let sq = vec![p(0, 0), p(4, 0), p(4, 4), p(0, 4)];
        assert_eq!(point_in_polygon(&p(1, 1), &sq), Some(true));
        assert_eq!(point_in_polygon(&p(5, 1), &sq), Some(false));
        assert_eq!(point_in_polygon(&p(2, 0), &sq), None);
        // Vertex-level query point: half-open rule must not double count.
        let tri = vec![p(0, 0), p(4, 2), p(0, 4)];
        assert_eq!(point_in_polygon(&Pt::new(qi(1), qi(2)), &tri), Some(true));
        assert_eq!(point_in_polygon(&Pt::new(qi(-1), qi(2)), &tri), Some(false));
    }

    #[test]
    fn segment_touching() {
        assert!(segments_touch(&p(0, 0), &p(4, 4), &p(0, 4), &p(4, 0)));
        assert!(!segments_touch(&p(0, 0), &p(1, 1), &p(2, 2), &p(3, 3)));
        // Collinear overlap counts as touching.
        assert!(segments_touch(&p(0, 0), &p(2, 0), &p(1, 0), &p(3, 0)));
        // Shared endpoint counts as touching.
        assert!(segments_touch(&p(0, 0), &p(1, 0), &p(1, 0), &p(1, 5)));
    }
}
