//! Small helpers on closed polygons given as vertex lists.

use super::curve::Point;

pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        * 0.5
}

/// Even–odd crossing test.
pub fn contains(poly: &[Point], p: Point) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

pub fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let l2 = d[0] * d[0] + d[1] * d[1];
    let t = if l2 > 0.0 { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / l2).clamp(0.0, 1.0) } else { 0.0 };
    (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
}

pub fn boundary_distance(poly: &[Point], p: Point) -> f64 {
    let n = poly.len();
    (0..n).map(|i| segment_distance(p, poly[i], poly[(i + 1) % n])).fold(f64::INFINITY, f64::min)
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Proper or touching intersection of closed segments.
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let (d1, d2) = (orient(c, d, a), orient(c, d, b));
    let (d3, d4) = (orient(a, b, c), orient(a, b, d));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |p: Point, q: Point, r: Point, o: f64| {
        o == 0.0 && r[0] >= p[0].min(q[0]) && r[0] <= p[0].max(q[0]) && r[1] >= p[1].min(q[1]) && r[1] <= p[1].max(q[1])
    };
    on(c, d, a, d1) || on(c, d, b, d2) || on(a, b, c, d3) || on(a, b, d, d4)
}

/// First pair of non-adjacent intersecting edges, found by a sweep over x-sorted edges.
pub fn self_intersection(poly: &[Point]) -> Option<(usize, usize)> {
    let n = poly.len();
    let mut edges: Vec<(f64, f64, usize)> = (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            (a[0].min(b[0]), a[0].max(b[0]), i)
        })
        .collect();
    edges.sort_by(|x, y| x.0.total_cmp(&y.0));
    for (idx, &(_, xmax, i)) in edges.iter().enumerate() {
        for &(xmin2, _, j) in &edges[idx + 1..] {
            if xmin2 > xmax {
                break;
            }
            let adjacent = (i + 1) % n == j || (j + 1) % n == i;
            if adjacent {
                continue;
            }
            if segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]) {
                return Some((i.min(j), i.max(j)));
            }
        }
    }
    None
}

/// Any intersection between edges of two different polygons.
pub fn polygons_cross(p: &[Point], q: &[Point]) -> bool {
    let mut edges: Vec<(f64, f64, usize, bool)> = Vec::with_capacity(p.len() + q.len());
    for (poly, tag) in [(p, false), (q, true)] {
        let n = poly.len();
        for i in 0..n {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            edges.push((a[0].min(b[0]), a[0].max(b[0]), i, tag));
        }
    }
    edges.sort_by(|x, y| x.0.total_cmp(&y.0));
    let seg = |tag: bool, i: usize| {
        let poly = if tag { q } else { p };
        (poly[i], poly[(i + 1) % poly.len()])
    };
    for (idx, &(_, xmax, i, ti)) in edges.iter().enumerate() {
        for &(xmin2, _, j, tj) in &edges[idx + 1..] {
            if xmin2 > xmax {
                break;
            }
            if ti == tj {
                continue;
            }
            let (a, b) = seg(ti, i);
            let (c, d) = seg(tj, j);
            if segments_intersect(a, b, c, d) {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_area_and_containment() {
        let sq = [[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]];
        assert_eq!(signed_area(&sq), 4.0);
        assert!(contains(&sq, [1.0, 1.5]));
        assert!(!contains(&sq, [2.5, 1.0]));
        assert!((boundary_distance(&sq, [1.0, 1.5]) - 0.5).abs() < 1e-15);
        assert!(self_intersection(&sq).is_none());
    }

    #[test]
    fn bowtie_is_detected() {
        let bow = [[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(self_intersection(&bow).is_some());
    }
}
