//! Planar polygon utilities: convex hulls and half-plane clipping.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::Point;

fn cross(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise convex hull (Andrew's monotone chain); collinear points dropped.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Point> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Point> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Sutherland–Hodgman clip of a convex polygon by `⟨a, x⟩ ≤ c`.
pub fn clip(poly: &[Point], a: &[f64], c: f64) -> Vec<Point> {
    let m = poly.len();
    let mut out = Vec::with_capacity(m + 1);
    for i in 0..m {
        let p = &poly[i];
        let q = &poly[(i + 1) % m];
        let fp = a[0] * p[0] + a[1] * p[1] - c;
        let fq = a[0] * q[0] + a[1] * q[1] - c;
        if fp <= 0.0 {
            out.push(p.clone());
        }
        if (fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0) {
            let t = fp / (fp - fq);
            out.push(vec![p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

/// Square `[-l, l]²` in counter-clockwise order.
pub fn square(l: f64) -> Vec<Point> {
    vec![vec![-l, -l], vec![l, -l], vec![l, l], vec![-l, l]]
}

/// Signed area (positive for counter-clockwise order).
pub fn area(poly: &[Point]) -> f64 {
    let m = poly.len();
    (0..m)
        .map(|i| {
            let (p, q) = (&poly[i], &poly[(i + 1) % m]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
        * 0.5
}

/// Vertex average.
pub fn vertex_mean(poly: &[Point]) -> Option<Point> {
    if poly.is_empty() {
        return None;
    }
    let n = poly.len() as f64;
    Some(vec![poly.iter().map(|p| p[0]).sum::<f64>() / n, poly.iter().map(|p| p[1]).sum::<f64>() / n])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_of_square_with_interior() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![0.5, 0.5], vec![0.5, 0.0]];
        let h = convex_hull(&pts);
        assert_eq!(h.len(), 4);
        assert!((area(&h) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn clipping_halves_square() {
        let p = clip(&square(1.0), &[1.0, 0.0], 0.0);
        assert!((area(&p) - 2.0).abs() < 1e-15);
        assert!(clip(&square(1.0), &[1.0, 0.0], -2.0).is_empty());
    }
}
