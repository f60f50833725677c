//! Small vector helpers over `&[f64]` plus the float functions that `core`
//! does not provide.

use alloc::vec::Vec;

pub use core::f64::consts::{FRAC_PI_2, PI, TAU};
pub use libm::{atan2, ceil, cos, exp, fabs, floor, log, pow, sin, sqrt};

pub type Point = Vec<f64>;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    sqrt(dot(a, a))
}

pub fn add(a: &[f64], b: &[f64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scaled(a: &[f64], c: f64) -> Point {
    a.iter().map(|x| x * c).collect()
}

pub fn negated(a: &[f64]) -> Point {
    a.iter().map(|x| -x).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// `a + t (b - a)`.
pub fn lerp(a: &[f64], b: &[f64], t: f64) -> Point {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

pub fn normalized(a: &[f64]) -> Option<Point> {
    let n = norm(a);
    if n > 0.0 && n.is_finite() {
        Some(scaled(a, 1.0 / n))
    } else {
        None
    }
}

#[inline]
pub fn unit2(theta: f64) -> [f64; 2] {
    [cos(theta), sin(theta)]
}

/// `count` unit vectors at angles `offset + 2πm/count`.
pub fn equiangular(count: usize, offset: f64) -> Vec<Point> {
    (0..count)
        .map(|m| {
            let u = unit2(offset + TAU * m as f64 / count as f64);
            alloc::vec![u[0], u[1]]
        })
        .collect()
}

/// Angle of a planar vector in `[0, 2π)`.
pub fn angle_of_dir(a: &[f64]) -> f64 {
    let t = atan2(a[1], a[0]);
    if t < 0.0 {
        t + TAU
    } else {
        t
    }
}

/// Rotation of a planar vector by `theta`.
pub fn rotate2(a: &[f64], theta: f64) -> Point {
    let (s, c) = (sin(theta), cos(theta));
    alloc::vec![c * a[0] - s * a[1], s * a[0] + c * a[1]]
}

/// Volume of the Euclidean unit ball in dimension `n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => TAU / n as f64 * unit_ball_volume(n - 2),
    }
}

/// `count` log-spaced values from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return alloc::vec![lo];
    }
    let (a, b) = (log(lo), log(hi));
    (0..count)
        .map(|i| exp(a + (b - a) * i as f64 / (count - 1) as f64))
        .collect()
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
