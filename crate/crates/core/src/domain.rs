//! Convex bodies described by their support functions.
//!
//! A [`ConvexBody`] is a small constructor tree. Every node can evaluate its
//! support function `h(a) = sup ⟨x, a⟩` (possibly `+∞`) and a maximizing point
//! together with a flag telling whether that point is the whole face.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, invalid, Error, Result};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::math::{
    self, add, dist, dot, equiangular, fabs, golden_min, negated, norm, normalized,
    scaled, sqrt, sub, unit2, Point, FRAC_PI_2, PI, TAU,
};
use crate::polygon;

/// Relative tolerance used to decide that two support values tie.
pub const TIE_REL: f64 = 1e-14;
/// `|⟨u, a⟩| / |a|` below which a recession direction is orthogonal to `a`.
pub const RAY_ORTHO: f64 = 1e-12;
/// Relative boundary tolerance for membership queries.
pub const BOUNDARY_REL: f64 = 1e-9;
/// Relative point tolerance used for dedup and face widths.
pub const POINT_REL: f64 = 1e-7;

const GAP_SAMPLES: usize = 720;

/// A closed half-space `{x : ⟨x, a⟩ ≤ t}` with `|a| = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    normal: Point,
    offset: f64,
}

impl Hyperplane {
    /// Normalizes `(a, t)` to a unit normal.
    pub fn new(normal: Point, offset: f64) -> Result<Self> {
        let n = norm(&normal);
        if !(n > 0.0) || !n.is_finite() || !offset.is_finite() {
            return Err(invalid("hyperplane normal must be finite and nonzero"));
        }
        Ok(Hyperplane { normal: scaled(&normal, 1.0 / n), offset: offset / n })
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// `⟨x, a⟩ - t`; nonpositive on the half-space.
    pub fn excess(&self, x: &[f64]) -> f64 {
        dot(x, &self.normal) - self.offset
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Ball { center: Point, radius: f64 },
    HPolyhedron { halfspaces: Vec<Hyperplane>, generators: Option<Generators> },
    VPolytope { vertices: Vec<Point> },
    HullRays { points: Vec<Point>, rays: Vec<Point> },
    /// `{x : x_n ≥ c |x'|²}`.
    Paraboloid { coefficient: f64 },
    /// Solid circular cone `{x : |x'| ≤ x_n}`.
    LorentzCone,
    Sum(Box<ConvexBody>, Box<ConvexBody>),
    Negate(Box<ConvexBody>),
    Scale(Box<ConvexBody>, f64),
    /// Image under a square matrix stored row-major.
    Linear { body: Box<ConvexBody>, matrix: Vec<f64> },
    /// Closed convex hull of a union.
    Hull(Vec<ConvexBody>),
}

/// Points plus recession directions: `conv(points) + cone(rays)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Generators {
    pub points: Vec<Point>,
    pub rays: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexBody {
    shape: Shape,
    dim: usize,
    open: bool,
    extent: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exposure {
    /// The maximizer is the entire face.
    Unique,
    /// The face contains more than one point.
    NotUnique,
    /// Cannot be decided structurally; see [`ConvexBody::resolved_face`].
    Undetermined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub point: Point,
    pub value: f64,
    pub exposure: Exposure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Interior,
    Boundary,
    Exterior,
}

fn combine(a: Exposure, b: Exposure) -> Exposure {
    use Exposure::*;
    match (a, b) {
        (NotUnique, _) | (_, NotUnique) => NotUnique,
        (Undetermined, _) | (_, Undetermined) => Undetermined,
        _ => Unique,
    }
}

fn check_point(p: &[f64], dim: usize) -> Result<()> {
    check_dim(dim, p.len())?;
    if p.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(invalid("coordinates must be finite"))
    }
}

fn tie(v: f64, best: f64) -> bool {
    fabs(v - best) <= TIE_REL * (1.0 + fabs(best))
}

/// Max of `⟨p, a⟩` over points plus the uniqueness of the maximizer.
fn point_face(points: &[Point], a: &[f64], tol: f64) -> Face {
    let mut best = 0;
    let mut bv = f64::NEG_INFINITY;
    for (i, p) in points.iter().enumerate() {
        let v = dot(p, a);
        if v > bv {
            bv = v;
            best = i;
        }
    }
    let unique = points
        .iter()
        .all(|p| !tie(dot(p, a), bv) || dist(p, &points[best]) <= tol);
    Face {
        point: points[best].clone(),
        value: bv,
        exposure: if unique { Exposure::Unique } else { Exposure::NotUnique },
    }
}

/// `None` when some ray points into the open half-space of `a`.
fn ray_status(rays: &[Point], a: &[f64]) -> Option<bool> {
    let na = norm(a);
    let mut ortho = false;
    for u in rays {
        let s = dot(u, a);
        if s > RAY_ORTHO * na {
            return None;
        }
        if s >= -RAY_ORTHO * na {
            ortho = true;
        }
    }
    Some(ortho)
}

fn generators_face(g: &Generators, a: &[f64], tol: f64) -> Option<Face> {
    let ortho = ray_status(&g.rays, a)?;
    let mut f = point_face(&g.points, a, tol);
    if ortho {
        f.exposure = Exposure::NotUnique;
    }
    Some(f)
}

fn generators_h(g: &Generators, a: &[f64]) -> f64 {
    if ray_status(&g.rays, a).is_none() {
        return f64::INFINITY;
    }
    g.points.iter().map(|p| dot(p, a)).fold(f64::NEG_INFINITY, f64::max)
}

fn mat_vec(m: &[f64], n: usize, x: &[f64]) -> Point {
    (0..n).map(|i| dot(&m[i * n..(i + 1) * n], x)).collect()
}

fn mat_t_vec(m: &[f64], n: usize, x: &[f64]) -> Point {
    (0..n).map(|j| (0..n).map(|i| m[i * n + j] * x[i]).sum()).collect()
}

/// Determinant by Gaussian elimination with partial pivoting.
fn determinant(m: &[f64], n: usize) -> f64 {
    let mut a = m.to_vec();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| fabs(a[i * n + c]).total_cmp(&fabs(a[j * n + c]))).unwrap();
        if a[p * n + c] == 0.0 {
            return 0.0;
        }
        if p != c {
            for k in 0..n {
                a.swap(p * n + k, c * n + k);
            }
            det = -det;
        }
        det *= a[c * n + c];
        for r in c + 1..n {
            let f = a[r * n + c] / a[c * n + c];
            for k in c..n {
                a[r * n + k] -= f * a[c * n + k];
            }
        }
    }
    det
}

fn invert(m: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut a = m.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| fabs(a[i * n + c]).total_cmp(&fabs(a[j * n + c])))?;
        if fabs(a[p * n + c]) < 1e-300 {
            return None;
        }
        for k in 0..n {
            a.swap(p * n + k, c * n + k);
            inv.swap(p * n + k, c * n + k);
        }
        let d = a[c * n + c];
        for k in 0..n {
            a[c * n + k] /= d;
            inv[c * n + k] /= d;
        }
        for r in 0..n {
            if r != c {
                let f = a[r * n + c];
                for k in 0..n {
                    a[r * n + k] -= f * a[c * n + k];
                    inv[r * n + k] -= f * inv[c * n + k];
                }
            }
        }
    }
    Some(inv)
}

fn hpoly_lp(halfspaces: &[Hyperplane], objective: &[f64]) -> LpOutcome {
    let n = objective.len();
    let mut obj = objective.to_vec();
    obj.extend(objective.iter().map(|v| -v));
    let mut lp = LinearProgram::new(obj);
    for h in halfspaces {
        let mut row = h.normal.clone();
        row.extend(h.normal.iter().map(|v| -v));
        lp.push(row, Relation::Le, h.offset);
    }
    match lp.solve() {
        LpOutcome::Optimal { x, value } => {
            let p = (0..n).map(|i| x[i] - x[n + i]).collect();
            LpOutcome::Optimal { x: p, value }
        }
        other => other,
    }
}

/// Generators of a nonempty polyhedron in dimension one or two.
fn low_dim_generators(halfspaces: &[Hyperplane], dim: usize) -> Result<Generators> {
    if dim == 1 {
        let mut hi = f64::INFINITY;
        let mut lo = f64::NEG_INFINITY;
        for h in halfspaces {
            if h.normal[0] > 0.0 {
                hi = hi.min(h.offset);
            } else {
                lo = lo.max(-h.offset);
            }
        }
        let mut points = Vec::new();
        let mut rays = Vec::new();
        if lo.is_finite() {
            points.push(vec![lo]);
        }
        if hi.is_finite() && !(lo.is_finite() && fabs(hi - lo) <= 1e-15 * (1.0 + fabs(lo))) {
            points.push(vec![hi]);
        }
        if !hi.is_finite() {
            rays.push(vec![1.0]);
        }
        if !lo.is_finite() {
            rays.push(vec![-1.0]);
        }
        if points.is_empty() {
            points.push(vec![0.0]);
        }
        return Ok(Generators { points, rays });
    }
    let feasible = |p: &[f64]| {
        halfspaces
            .iter()
            .all(|h| h.excess(p) <= 1e-9 * (1.0 + fabs(h.offset)))
    };
    let scale = halfspaces.iter().map(|h| fabs(h.offset)).fold(1.0, f64::max);
    let mut points: Vec<Point> = Vec::new();
    for i in 0..halfspaces.len() {
        for j in i + 1..halfspaces.len() {
            let (a, b) = (&halfspaces[i], &halfspaces[j]);
            let det = a.normal[0] * b.normal[1] - a.normal[1] * b.normal[0];
            if fabs(det) < 1e-12 {
                continue;
            }
            let x = (a.offset * b.normal[1] - b.offset * a.normal[1]) / det;
            let y = (a.normal[0] * b.offset - b.normal[0] * a.offset) / det;
            let p = vec![x, y];
            if feasible(&p) && !points.iter().any(|q| dist(q, &p) <= 1e-12 * scale) {
                points.push(p);
            }
        }
    }
    let mut rays: Vec<Point> = Vec::new();
    let mut candidates: Vec<Point> = Vec::new();
    for h in halfspaces {
        let (u, v) = (h.normal[0], h.normal[1]);
        candidates.push(vec![-v, u]);
        candidates.push(vec![v, -u]);
        candidates.push(vec![-u, -v]);
    }
    if halfspaces.is_empty() {
        candidates = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
    }
    for d in candidates {
        if halfspaces.iter().all(|h| dot(&h.normal, &d) <= 1e-12)
            && !rays.iter().any(|r| dist(r, &d) <= 1e-12)
        {
            rays.push(d);
        }
    }
    if points.is_empty() {
        // No vertices: every boundary line is parallel, keep one point per tight line.
        for h in halfspaces {
            let p = scaled(&h.normal, h.offset);
            if feasible(&p) && !points.iter().any(|q| dist(q, &p) <= 1e-12 * scale) {
                points.push(p);
            }
        }
    }
    if points.is_empty() {
        match hpoly_lp(halfspaces, &[0.0, 0.0]) {
            LpOutcome::Optimal { x, .. } => points.push(x),
            _ => return Err(invalid("polyhedron is empty")),
        }
    }
    Ok(Generators { points, rays })
}

impl ConvexBody {
    fn build(shape: Shape, dim: usize) -> Self {
        let mut body = ConvexBody { shape, dim, open: false, extent: 1.0 };
        body.extent = body.compute_extent();
        body
    }

    /// Closed Euclidean ball; a zero radius gives a single point.
    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        let dim = center.len();
        if dim == 0 {
            return Err(invalid("ball center must have at least one coordinate"));
        }
        check_point(&center, dim)?;
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(invalid(format!("ball radius must be finite and nonnegative, got {radius}")));
        }
        Ok(Self::build(Shape::Ball { center, radius }, dim))
    }

    /// Intersection of half-spaces; must be nonempty.
    pub fn hpolyhedron(halfspaces: Vec<Hyperplane>) -> Result<Self> {
        let dim = halfspaces
            .first()
            .map(Hyperplane::dim)
            .ok_or_else(|| invalid("polyhedron needs at least one half-space"))?;
        for h in &halfspaces {
            check_dim(dim, h.dim())?;
        }
        let generators = if dim <= 2 {
            Some(low_dim_generators(&halfspaces, dim)?)
        } else {
            if hpoly_lp(&halfspaces, &vec![0.0; dim]) == LpOutcome::Infeasible {
                return Err(invalid("polyhedron is empty"));
            }
            None
        };
        Ok(Self::build(Shape::HPolyhedron { halfspaces, generators }, dim))
    }

    /// Convenience: `{x : lo ≤ x ≤ hi}` as a polyhedron.
    pub fn axis_box(lo: &[f64], hi: &[f64]) -> Result<Self> {
        check_dim(lo.len(), hi.len())?;
        let n = lo.len();
        let mut hs = Vec::with_capacity(2 * n);
        for i in 0..n {
            if !(lo[i] <= hi[i]) {
                return Err(invalid("box bounds must satisfy lo ≤ hi"));
            }
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            hs.push(Hyperplane::new(e.clone(), hi[i])?);
            e[i] = -1.0;
            hs.push(Hyperplane::new(e, -lo[i])?);
        }
        Self::hpolyhedron(hs)
    }

    pub fn vpolytope(vertices: Vec<Point>) -> Result<Self> {
        let dim = vertices
            .first()
            .map(Vec::len)
            .ok_or_else(|| invalid("polytope needs at least one vertex"))?;
        for v in &vertices {
            check_point(v, dim)?;
        }
        Ok(Self::build(Shape::VPolytope { vertices }, dim))
    }

    /// `conv(points) + cone(rays)`; rays are normalized.
    pub fn hull_rays(points: Vec<Point>, rays: Vec<Point>) -> Result<Self> {
        let dim = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| invalid("hull-plus-rays needs at least one point"))?;
        for p in &points {
            check_point(p, dim)?;
        }
        let mut unit = Vec::with_capacity(rays.len());
        for r in &rays {
            check_point(r, dim)?;
            unit.push(normalized(r).ok_or_else(|| invalid("ray direction must be nonzero"))?);
        }
        Ok(Self::build(Shape::HullRays { points, rays: unit }, dim))
    }

    /// Epigraph `{x : x_n ≥ c |x'|²}` in dimension `dim ≥ 2`.
    pub fn paraboloid(dim: usize, coefficient: f64) -> Result<Self> {
        if dim < 2 {
            return Err(invalid("paraboloid needs dimension at least 2"));
        }
        if !(coefficient > 0.0) || !coefficient.is_finite() {
            return Err(invalid("paraboloid coefficient must be positive"));
        }
        Ok(Self::build(Shape::Paraboloid { coefficient }, dim))
    }

    /// Solid cone `{x : |x'| ≤ x_n}` with apex at the origin, `dim ≥ 2`.
    pub fn lorentz_cone(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(invalid("cone needs dimension at least 2"));
        }
        Ok(Self::build(Shape::LorentzCone, dim))
    }

    pub fn sum(a: ConvexBody, b: ConvexBody) -> Result<Self> {
        check_dim(a.dim, b.dim)?;
        let dim = a.dim;
        Ok(Self::build(Shape::Sum(Box::new(a), Box::new(b)), dim))
    }

    pub fn negate(a: ConvexBody) -> Self {
        let dim = a.dim;
        Self::build(Shape::Negate(Box::new(a)), dim)
    }

    pub fn scale(a: ConvexBody, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(invalid("scale factor must be positive"));
        }
        let dim = a.dim;
        Ok(Self::build(Shape::Scale(Box::new(a), factor), dim))
    }

    /// Image of `a` under a square matrix given row-major.
    pub fn linear(a: ConvexBody, matrix: Vec<f64>) -> Result<Self> {
        let n = a.dim;
        if matrix.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: matrix.len() });
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(invalid("matrix entries must be finite"));
        }
        Ok(Self::build(Shape::Linear { body: Box::new(a), matrix }, n))
    }

    /// Closed convex hull of the union of `members`.
    pub fn hull(members: Vec<ConvexBody>) -> Result<Self> {
        let dim = members
            .first()
            .map(|m| m.dim)
            .ok_or_else(|| invalid("hull needs at least one member"))?;
        for m in &members {
            check_dim(dim, m.dim)?;
        }
        Ok(Self::build(Shape::Hull(members), dim))
    }

    /// Marks the body as open: membership becomes strict interior.
    pub fn with_open(mut self, open: bool) -> Self {
        self.open = open;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_open(&self) -> bool {
        self.open
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Rough diameter from axis and diagonal widths, `1` when unbounded everywhere.
    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn point_tolerance(&self) -> f64 {
        POINT_REL * self.extent.max(1.0)
    }

    pub fn boundary_tolerance(&self) -> f64 {
        BOUNDARY_REL * self.extent.max(1.0)
    }

    fn compute_extent(&self) -> f64 {
        let n = self.dim;
        let mut dirs: Vec<Point> = Vec::new();
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            dirs.push(e);
        }
        if n == 2 {
            let s = core::f64::consts::FRAC_1_SQRT_2;
            dirs.push(vec![s, s]);
            dirs.push(vec![s, -s]);
        }
        let mut best: f64 = 0.0;
        let mut any = false;
        for d in &dirs {
            let w = self.h(d) + self.h(&negated(d));
            if w.is_finite() {
                best = best.max(w);
                any = true;
            }
        }
        if any && best > 0.0 {
            best
        } else if any {
            0.0
        } else {
            1.0
        }
    }

    /// Support function; `a` must be nonzero and of matching dimension.
    pub fn support(&self, a: &[f64]) -> Result<f64> {
        check_point(a, self.dim)?;
        if norm(a) == 0.0 {
            return Err(invalid("support direction must be nonzero"));
        }
        Ok(self.h(a))
    }

    /// Unchecked support function; `+∞` when unbounded in direction `a`.
    pub fn h(&self, a: &[f64]) -> f64 {
        match &self.shape {
            Shape::Ball { center, radius } => dot(center, a) + radius * norm(a),
            Shape::HPolyhedron { halfspaces, generators } => match generators {
                Some(g) => generators_h(g, a),
                None => match hpoly_lp(halfspaces, a) {
                    LpOutcome::Optimal { value, .. } => value,
                    LpOutcome::Unbounded => f64::INFINITY,
                    LpOutcome::Infeasible => f64::NEG_INFINITY,
                },
            },
            Shape::VPolytope { vertices } => {
                vertices.iter().map(|v| dot(v, a)).fold(f64::NEG_INFINITY, f64::max)
            }
            Shape::HullRays { points, rays } => {
                if ray_status(rays, a).is_none() {
                    f64::INFINITY
                } else {
                    points.iter().map(|p| dot(p, a)).fold(f64::NEG_INFINITY, f64::max)
                }
            }
            Shape::Paraboloid { coefficient } => {
                let n = self.dim;
                let an = a[n - 1];
                if an < 0.0 {
                    let s: f64 = a[..n - 1].iter().map(|v| v * v).sum();
                    s / (-4.0 * an * coefficient)
                } else if an == 0.0 && a[..n - 1].iter().all(|v| *v == 0.0) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Shape::LorentzCone => {
                let n = self.dim;
                if a[n - 1] + norm(&a[..n - 1]) <= 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Shape::Sum(x, y) => x.h(a) + y.h(a),
            Shape::Negate(x) => x.h(&negated(a)),
            Shape::Scale(x, c) => c * x.h(a),
            Shape::Linear { body, matrix } => body.h(&mat_t_vec(matrix, self.dim, a)),
            Shape::Hull(ms) => ms.iter().map(|m| m.h(a)).fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// A maximizer of `⟨x, a⟩`, `None` when the support is infinite.
    pub fn face(&self, a: &[f64]) -> Option<Face> {
        let tol = self.point_tolerance();
        match &self.shape {
            Shape::Ball { center, radius } => {
                let na = norm(a);
                if na == 0.0 {
                    let exposure = if *radius > 0.0 { Exposure::NotUnique } else { Exposure::Unique };
                    return Some(Face { point: center.clone(), value: 0.0, exposure });
                }
                Some(Face {
                    point: add(center, &scaled(a, radius / na)),
                    value: dot(center, a) + radius * na,
                    exposure: Exposure::Unique,
                })
            }
            Shape::HPolyhedron { halfspaces, generators } => match generators {
                Some(g) => generators_face(g, a, tol),
                None => match hpoly_lp(halfspaces, a) {
                    LpOutcome::Optimal { x, value } => {
                        Some(Face { point: x, value, exposure: Exposure::Undetermined })
                    }
                    _ => None,
                },
            },
            Shape::VPolytope { vertices } => Some(point_face(vertices, a, tol)),
            Shape::HullRays { points, rays } => {
                let ortho = ray_status(rays, a)?;
                let mut f = point_face(points, a, tol);
                if ortho {
                    f.exposure = Exposure::NotUnique;
                }
                Some(f)
            }
            Shape::Paraboloid { coefficient } => {
                let n = self.dim;
                let an = a[n - 1];
                if !(an < 0.0) {
                    return None;
                }
                let mut p: Point = a[..n - 1].iter().map(|v| v / (-2.0 * an * coefficient)).collect();
                let s: f64 = p.iter().map(|v| v * v).sum();
                p.push(coefficient * s);
                let value = dot(&p, a);
                Some(Face { point: p, value, exposure: Exposure::Unique })
            }
            Shape::LorentzCone => {
                let n = self.dim;
                let slack = a[n - 1] + norm(&a[..n - 1]);
                if slack > 0.0 {
                    return None;
                }
                let exposure = if slack < -RAY_ORTHO * norm(a) { Exposure::Unique } else { Exposure::NotUnique };
                Some(Face { point: vec![0.0; n], value: 0.0, exposure })
            }
            Shape::Sum(x, y) => {
                let (fx, fy) = (x.face(a)?, y.face(a)?);
                Some(Face {
                    point: add(&fx.point, &fy.point),
                    value: fx.value + fy.value,
                    exposure: combine(fx.exposure, fy.exposure),
                })
            }
            Shape::Negate(x) => {
                let f = x.face(&negated(a))?;
                Some(Face { point: negated(&f.point), ..f })
            }
            Shape::Scale(x, c) => {
                let f = x.face(a)?;
                Some(Face { point: scaled(&f.point, *c), value: c * f.value, exposure: f.exposure })
            }
            Shape::Linear { body, matrix } => {
                let n = self.dim;
                let f = body.face(&mat_t_vec(matrix, n, a))?;
                let exposure = if fabs(determinant(matrix, n)) > 1e-12 {
                    f.exposure
                } else {
                    Exposure::Undetermined
                };
                Some(Face { point: mat_vec(matrix, n, &f.point), value: f.value, exposure })
            }
            Shape::Hull(ms) => {
                let mut faces = Vec::with_capacity(ms.len());
                for m in ms {
                    faces.push(m.face(a)?);
                }
                let mut best = 0;
                for (i, f) in faces.iter().enumerate() {
                    if f.value > faces[best].value {
                        best = i;
                    }
                }
                let bv = faces[best].value;
                let mut exposure = faces[best].exposure;
                for (i, f) in faces.iter().enumerate() {
                    if i != best && tie(f.value, bv) {
                        if dist(&f.point, &faces[best].point) > tol {
                            exposure = Exposure::NotUnique;
                        } else {
                            exposure = combine(exposure, f.exposure);
                        }
                    }
                }
                let f = faces.swap_remove(best);
                Some(Face { exposure, ..f })
            }
        }
    }

    /// Like [`face`](Self::face) but resolves `Undetermined` with a
    /// face-width test under small perturbations of `a`.
    pub fn resolved_face(&self, a: &[f64]) -> Option<Face> {
        let mut f = self.face(a)?;
        if f.exposure == Exposure::Undetermined {
            f.exposure = if self.face_width(a, &f.point) <= self.point_tolerance() {
                Exposure::Unique
            } else {
                Exposure::NotUnique
            };
        }
        Some(f)
    }

    fn face_width(&self, a: &[f64], p0: &[f64]) -> f64 {
        const DELTA: f64 = 1e-9;
        let u = match normalized(a) {
            Some(u) => u,
            None => return f64::INFINITY,
        };
        let mut width: f64 = 0.0;
        for t in orthonormal_complement(&u) {
            for sgn in [1.0, -1.0] {
                let d = add(&u, &scaled(&t, sgn * DELTA));
                match self.face(&d) {
                    Some(f) => width = width.max(dist(&f.point, p0)),
                    None => return f64::INFINITY,
                }
            }
        }
        width
    }

    /// `min_{|a|=1} h(a) - ⟨x, a⟩`: depth when inside, minus the distance when outside.
    pub fn signed_gap(&self, x: &[f64]) -> Result<f64> {
        check_point(x, self.dim)?;
        Ok(self.gap(x))
    }

    fn gap(&self, x: &[f64]) -> f64 {
        match &self.shape {
            Shape::Ball { center, radius } => return radius - dist(x, center),
            Shape::HPolyhedron { halfspaces, .. } => {
                let g = halfspaces.iter().map(|h| -h.excess(x)).fold(f64::INFINITY, f64::min);
                if g < 0.0 && self.dim <= 2 {
                    return self.direction_gap(x);
                }
                return g;
            }
            Shape::Paraboloid { coefficient } => {
                let n = self.dim;
                let s: f64 = x[..n - 1].iter().map(|v| v * v).sum();
                return (x[n - 1] - coefficient * s) / sqrt(1.0 + 4.0 * coefficient * coefficient * s);
            }
            Shape::LorentzCone => {
                let n = self.dim;
                return (x[n - 1] - norm(&x[..n - 1])) * core::f64::consts::FRAC_1_SQRT_2;
            }
            _ => {}
        }
        self.direction_gap(x)
    }

    fn direction_gap(&self, x: &[f64]) -> f64 {
        let g = |a: &[f64]| self.h(a) - dot(x, a);
        match self.dim {
            1 => g(&[1.0]).min(g(&[-1.0])),
            2 => {
                let step = TAU / GAP_SAMPLES as f64;
                let mut bi = 0;
                let mut bv = f64::INFINITY;
                for i in 0..GAP_SAMPLES {
                    let u = unit2(i as f64 * step);
                    let v = g(&u);
                    if v < bv {
                        bv = v;
                        bi = i;
                    }
                }
                if !bv.is_finite() {
                    return bv;
                }
                let c = bi as f64 * step;
                let (_, v) = golden_min(|t| g(&unit2(t)), c - step, c + step, 64);
                v.min(bv)
            }
            n => {
                let dirs = sphere_directions(n, 4096);
                let mut best = f64::INFINITY;
                let mut arg = dirs[0].clone();
                for d in dirs {
                    let v = g(&d);
                    if v < best {
                        best = v;
                        arg = d;
                    }
                }
                let mut step = 0.05;
                for _ in 0..60 {
                    let mut improved = false;
                    for t in orthonormal_complement(&arg) {
                        for s in [step, -step] {
                            let cand = normalized(&add(&arg, &scaled(&t, s))).unwrap_or(arg.clone());
                            let v = g(&cand);
                            if v < best {
                                best = v;
                                arg = cand;
                                improved = true;
                            }
                        }
                    }
                    if !improved {
                        step *= 0.5;
                    }
                }
                best
            }
        }
    }

    /// Position of `x` relative to the closure, with the default boundary tolerance.
    pub fn locate(&self, x: &[f64]) -> Result<Location> {
        self.locate_with(x, self.boundary_tolerance())
    }

    /// Position of `x` relative to the closure with an explicit tolerance.
    pub fn locate_with(&self, x: &[f64], tol: f64) -> Result<Location> {
        if !(tol >= 0.0) {
            return Err(invalid("tolerance must be nonnegative"));
        }
        let g = self.signed_gap(x)?;
        Ok(if g > tol {
            Location::Interior
        } else if g >= -tol {
            Location::Boundary
        } else {
            Location::Exterior
        })
    }

    /// Membership honouring the open flag.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        let loc = self.locate(x)?;
        Ok(match loc {
            Location::Interior => true,
            Location::Boundary => !self.open,
            Location::Exterior => false,
        })
    }

    /// Membership in the closure.
    pub fn contains_closure(&self, x: &[f64]) -> Result<bool> {
        Ok(self.locate(x)? != Location::Exterior)
    }

    /// Axis-aligned bounding box, `None` when unbounded.
    pub fn bounding_box(&self) -> Option<(Point, Point)> {
        let n = self.dim;
        let mut lo = vec![0.0; n];
        let mut hi = vec![0.0; n];
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            hi[i] = self.h(&e);
            e[i] = -1.0;
            lo[i] = -self.h(&e);
            if !hi[i].is_finite() || !lo[i].is_finite() {
                return None;
            }
        }
        Some((lo, hi))
    }

    pub fn is_bounded(&self) -> bool {
        self.bounding_box().is_some()
    }

    /// Outward facet normals visible in the constructor tree (planar only).
    pub fn facet_normals(&self) -> Vec<Point> {
        if self.dim != 2 {
            return Vec::new();
        }
        match &self.shape {
            Shape::Ball { .. } | Shape::Paraboloid { .. } | Shape::LorentzCone => Vec::new(),
            Shape::HPolyhedron { halfspaces, .. } => halfspaces.iter().map(|h| h.normal.clone()).collect(),
            Shape::VPolytope { vertices } => polygon_normals(vertices),
            Shape::HullRays { points, rays } => {
                let mut out = polygon_normals(points);
                for r in rays {
                    out.push(vec![-r[1], r[0]]);
                    out.push(vec![r[1], -r[0]]);
                }
                out
            }
            Shape::Sum(x, y) => {
                let mut out = x.facet_normals();
                out.extend(y.facet_normals());
                out
            }
            Shape::Negate(x) => x.facet_normals().iter().map(|v| negated(v)).collect(),
            Shape::Scale(x, _) => x.facet_normals(),
            Shape::Linear { body, matrix } => match invert(matrix, 2) {
                Some(inv) => body
                    .facet_normals()
                    .iter()
                    .filter_map(|v| normalized(&mat_t_vec(&inv, 2, v)))
                    .collect(),
                None => Vec::new(),
            },
            Shape::Hull(ms) => ms.iter().flat_map(|m| m.facet_normals()).collect(),
        }
    }

    /// Folds ball arithmetic and pushes negation/scaling into explicit representations.
    pub fn simplified(&self) -> ConvexBody {
        let shape = match &self.shape {
            Shape::Sum(x, y) => {
                let (x, y) = (x.simplified(), y.simplified());
                match (&x.shape, &y.shape) {
                    (Shape::Ball { center: c1, radius: r1 }, Shape::Ball { center: c2, radius: r2 }) => {
                        Shape::Ball { center: add(c1, c2), radius: r1 + r2 }
                    }
                    (Shape::VPolytope { vertices: v1 }, Shape::VPolytope { vertices: v2 })
                        if v1.len() * v2.len() <= 4096 =>
                    {
                        let mut vs = Vec::with_capacity(v1.len() * v2.len());
                        for p in v1 {
                            for q in v2 {
                                vs.push(add(p, q));
                            }
                        }
                        Shape::VPolytope { vertices: vs }
                    }
                    _ => Shape::Sum(Box::new(x), Box::new(y)),
                }
            }
            Shape::Negate(x) => {
                let x = x.simplified();
                match x.shape {
                    Shape::Ball { center, radius } => Shape::Ball { center: negated(&center), radius },
                    Shape::VPolytope { vertices } => {
                        Shape::VPolytope { vertices: vertices.iter().map(|v| negated(v)).collect() }
                    }
                    Shape::HullRays { points, rays } => Shape::HullRays {
                        points: points.iter().map(|v| negated(v)).collect(),
                        rays: rays.iter().map(|v| negated(v)).collect(),
                    },
                    Shape::HPolyhedron { halfspaces, generators } => Shape::HPolyhedron {
                        halfspaces: halfspaces
                            .into_iter()
                            .map(|h| Hyperplane { normal: negated(&h.normal), offset: h.offset })
                            .collect(),
                        generators: generators.map(|g| Generators {
                            points: g.points.iter().map(|v| negated(v)).collect(),
                            rays: g.rays.iter().map(|v| negated(v)).collect(),
                        }),
                    },
                    Shape::Negate(inner) => inner.shape,
                    other => Shape::Negate(Box::new(ConvexBody { shape: other, ..x })),
                }
            }
            Shape::Scale(x, c) => {
                let c = *c;
                let x = x.simplified();
                match x.shape {
                    Shape::Ball { center, radius } => Shape::Ball { center: scaled(&center, c), radius: c * radius },
                    Shape::VPolytope { vertices } => {
                        Shape::VPolytope { vertices: vertices.iter().map(|v| scaled(v, c)).collect() }
                    }
                    Shape::HullRays { points, rays } => Shape::HullRays {
                        points: points.iter().map(|v| scaled(v, c)).collect(),
                        rays,
                    },
                    Shape::HPolyhedron { halfspaces, generators } => Shape::HPolyhedron {
                        halfspaces: halfspaces
                            .into_iter()
                            .map(|h| Hyperplane { offset: c * h.offset, normal: h.normal })
                            .collect(),
                        generators: generators.map(|g| Generators {
                            points: g.points.iter().map(|v| scaled(v, c)).collect(),
                            rays: g.rays,
                        }),
                    },
                    other => Shape::Scale(Box::new(ConvexBody { shape: other, ..x }), c),
                }
            }
            Shape::Linear { body, matrix } => Shape::Linear { body: Box::new(body.simplified()), matrix: matrix.clone() },
            Shape::Hull(ms) => Shape::Hull(ms.iter().map(ConvexBody::simplified).collect()),
            other => other.clone(),
        };
        let mut out = Self::build(shape, self.dim);
        out.open = self.open;
        out
    }

    /// Generators when the body is an explicit polyhedral representation.
    pub fn generators(&self) -> Option<Generators> {
        match &self.shape {
            Shape::VPolytope { vertices } => Some(Generators { points: vertices.clone(), rays: Vec::new() }),
            Shape::HullRays { points, rays } => Some(Generators { points: points.clone(), rays: rays.clone() }),
            Shape::HPolyhedron { generators, .. } => generators.clone(),
            _ => None,
        }
    }
}

fn polygon_normals(points: &[Point]) -> Vec<Point> {
    if points.len() < 2 || points[0].len() != 2 {
        return Vec::new();
    }
    let hull = polygon::convex_hull(points);
    let m = hull.len();
    if m < 2 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for i in 0..m {
        let (p, q) = (&hull[i], &hull[(i + 1) % m]);
        let e = [q[0] - p[0], q[1] - p[1]];
        if let Some(n) = normalized(&[e[1], -e[0]]) {
            out.push(n);
        }
        if m == 2 {
            break;
        }
    }
    if m == 2 {
        let n = out[0].clone();
        out.push(negated(&n));
    }
    out
}

/// Orthonormal basis of `u⊥` for a unit vector `u`.
pub fn orthonormal_complement(u: &[f64]) -> Vec<Point> {
    let n = u.len();
    let mut basis: Vec<Point> = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        let mut v = sub(&e, &scaled(u, u[i]));
        for b in &basis {
            let c = dot(&v, b);
            v = sub(&v, &scaled(b, c));
        }
        if let Some(v) = normalized(&v) {
            if norm(&v) > 0.5 && basis.len() < n - 1 {
                let c = dot(&v, u);
                if fabs(c) < 1e-6 {
                    basis.push(v);
                }
            }
        }
    }
    basis
}

/// Deterministic quasi-uniform unit vectors in `ℝⁿ`.
pub fn sphere_directions(n: usize, count: usize) -> Vec<Point> {
    match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => equiangular(count, 0.0),
        3 => {
            let golden = PI * (3.0 - sqrt(5.0));
            (0..count)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                    let r = sqrt((1.0 - z * z).max(0.0));
                    let t = golden * i as f64;
                    vec![r * math::cos(t), r * math::sin(t), z]
                })
                .collect()
        }
        _ => {
            use rand_chacha::rand_core::{RngCore, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5EED);
            let mut out = Vec::with_capacity(count);
            while out.len() < count {
                let v: Point = (0..n)
                    .map(|_| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0)
                    .collect();
                let r = norm(&v);
                if r > 0.1 && r <= 1.0 {
                    out.push(scaled(&v, 1.0 / r));
                }
            }
            out
        }
    }
}

/// Normal `a` and offset `t = h(a)` of a supporting half-space through a boundary point.
pub fn supporting_hyperplane(body: &ConvexBody, x: &[f64]) -> Result<Hyperplane> {
    check_point(x, body.dim)?;
    if body.locate(x)? != Location::Boundary {
        return Err(invalid("point is not on the boundary"));
    }
    let tol = body.boundary_tolerance();
    let normal: Point = match body.shape() {
        Shape::Ball { center, radius } if *radius > 0.0 => {
            normalized(&sub(x, center)).ok_or_else(|| invalid("degenerate ball"))?
        }
        Shape::HPolyhedron { halfspaces, .. } => {
            let mut acc = vec![0.0; body.dim];
            let mut first = None;
            for h in halfspaces {
                if fabs(h.excess(x)) <= tol {
                    acc = add(&acc, &h.normal);
                    first.get_or_insert(h.normal.clone());
                }
            }
            match normalized(&acc) {
                Some(n) if norm(&acc) > 1e-9 => n,
                _ => first.ok_or_else(|| Error::Internal("no active constraint on boundary".into()))?,
            }
        }
        _ => match body.dim {
            1 => {
                if fabs(body.h(&[1.0]) - x[0]) <= tol {
                    vec![1.0]
                } else {
                    vec![-1.0]
                }
            }
            2 => normal_cone_bisector(body, x)?,
            _ => return Err(Error::Unsupported("supporting hyperplanes beyond the plane need an explicit representation".into())),
        },
    };
    let offset = body.h(&normal);
    Ok(Hyperplane { normal, offset })
}

fn angle_gap(body: &ConvexBody, x: &[f64], t: f64) -> f64 {
    let u = unit2(t);
    body.h(&u) - dot(x, &u)
}

fn argmin_angle(body: &ConvexBody, x: &[f64]) -> f64 {
    let step = TAU / GAP_SAMPLES as f64;
    let (mut bi, mut bv) = (0, f64::INFINITY);
    for i in 0..GAP_SAMPLES {
        let v = angle_gap(body, x, i as f64 * step);
        if v < bv {
            bv = v;
            bi = i;
        }
    }
    let c = bi as f64 * step;
    golden_min(|t| angle_gap(body, x, t), c - step, c + step, 80).0
}

/// Bisector of the arc of directions where `h(a) - ⟨x, a⟩` stays within tolerance.
fn normal_cone_bisector(body: &ConvexBody, x: &[f64]) -> Result<Point> {
    let tol = body.boundary_tolerance();
    let t0 = argmin_angle(body, x);
    if angle_gap(body, x, t0) > tol {
        return Err(invalid("point is not on the boundary"));
    }
    let step = TAU / GAP_SAMPLES as f64;
    let edge = |sgn: f64| {
        let mut inside = 0.0;
        let mut outside = step;
        while angle_gap(body, x, t0 + sgn * outside) <= tol {
            inside = outside;
            outside += step;
            if outside >= PI {
                return PI;
            }
        }
        for _ in 0..60 {
            let mid = 0.5 * (inside + outside);
            if angle_gap(body, x, t0 + sgn * mid) <= tol {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    };
    let (right, left) = (edge(1.0), edge(-1.0));
    let t = t0 + 0.5 * (right - left);
    let u = unit2(t);
    Ok(vec![u[0], u[1]])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointKind {
    Exposed,
    Extreme,
}

/// Distinct points (pairwise distance above a tolerance) tagged by kind.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub points: Vec<Point>,
    pub kind: PointKind,
    pub tolerance: f64,
}

impl PointSet {
    pub fn new(kind: PointKind, tolerance: f64) -> Self {
        PointSet { points: Vec::new(), kind, tolerance }
    }

    /// Inserts unless within tolerance of an existing point; returns the index.
    pub fn insert(&mut self, p: Point) -> usize {
        if let Some(i) = self.points.iter().position(|q| dist(q, &p) <= self.tolerance) {
            return i;
        }
        self.points.push(p);
        self.points.len() - 1
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Minimum pairwise distance (`+∞` for fewer than two points).
    pub fn separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                best = best.min(dist(&self.points[i], &self.points[j]));
            }
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExposedPoints {
    pub set: PointSet,
    /// Index into `set` for each input direction that produced a singleton face.
    pub witness: Vec<Option<usize>>,
    /// Directions along which the support is infinite.
    pub unbounded: Vec<usize>,
    /// Directions whose face is not a single point.
    pub non_unique: Vec<usize>,
}

/// Exposed points along the given directions.
pub fn exposed_points(body: &ConvexBody, directions: &[Point]) -> Result<ExposedPoints> {
    let mut set = PointSet::new(PointKind::Exposed, body.point_tolerance());
    let mut witness = Vec::with_capacity(directions.len());
    let mut unbounded = Vec::new();
    let mut non_unique = Vec::new();
    for (i, a) in directions.iter().enumerate() {
        check_point(a, body.dim)?;
        if norm(a) == 0.0 {
            return Err(invalid("direction must be nonzero"));
        }
        match body.resolved_face(a) {
            None => {
                unbounded.push(i);
                witness.push(None);
            }
            Some(f) if f.exposure == Exposure::Unique => witness.push(Some(set.insert(f.point))),
            Some(_) => {
                non_unique.push(i);
                witness.push(None);
            }
        }
    }
    Ok(ExposedPoints { set, witness, unbounded, non_unique })
}

/// Extreme points of an explicit finite representation.
pub fn extreme_points(body: &ConvexBody) -> Result<PointSet> {
    let (points, rays) = match body.shape() {
        Shape::VPolytope { vertices } => (vertices.clone(), Vec::new()),
        Shape::HullRays { points, rays } => (points.clone(), rays.clone()),
        _ => return Err(invalid("extreme points need a vertex or hull-plus-rays representation")),
    };
    let tol = body.point_tolerance();
    let mut distinct = PointSet::new(PointKind::Extreme, tol);
    for p in points {
        distinct.insert(p);
    }
    let mut out = PointSet::new(PointKind::Extreme, tol);
    for i in 0..distinct.len() {
        if is_extreme(&distinct.points, &rays, i) {
            out.points.push(distinct.points[i].clone());
        }
    }
    Ok(out)
}

/// True when `points[i]` is not in `conv(others) + cone(rays)`.
pub fn is_extreme(points: &[Point], rays: &[Point], i: usize) -> bool {
    let n = points[i].len();
    let others: Vec<&Point> = points.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p).collect();
    let nv = others.len() + rays.len();
    if others.is_empty() {
        return true;
    }
    let mut lp = LinearProgram::new(vec![0.0; nv]);
    let mut row = vec![0.0; nv];
    for r in row.iter_mut().take(others.len()) {
        *r = 1.0;
    }
    lp.push(row, Relation::Eq, 1.0);
    for k in 0..n {
        let mut row: Vec<f64> = others.iter().map(|p| p[k]).collect();
        row.extend(rays.iter().map(|u| u[k]));
        lp.push(row, Relation::Eq, points[i][k]);
    }
    lp.solve() == LpOutcome::Infeasible
}

/// Finds an exposed point within `eps` of the extreme point `x` by rotating
/// directions around the best supporting normal at `x` (planar bodies).
pub fn straszewicz_probe(body: &ConvexBody, x: &[f64], eps: f64, budget: usize) -> Result<Point> {
    check_point(x, body.dim)?;
    if body.dim != 2 {
        return Err(Error::Unsupported("the exposure probe is planar".into()));
    }
    if !(eps > 0.0) {
        return Err(invalid("eps must be positive"));
    }
    if body.locate(x)? != Location::Boundary {
        return Err(invalid("point is not on the boundary"));
    }
    let t0 = argmin_angle(body, x);
    let try_angle = |t: f64| -> Option<Point> {
        let a = unit2(t);
        let f = body.resolved_face(&a)?;
        let stable = body.face_width(&a, &f.point) <= body.point_tolerance();
        (f.exposure == Exposure::Unique && stable && dist(&f.point, x) <= eps).then_some(f.point)
    };
    if let Some(p) = try_angle(t0) {
        return Ok(p);
    }
    let mut delta = FRAC_PI_2 / 2.0;
    for _ in 0..budget {
        for m in 1..=8 {
            for sgn in [1.0, -1.0] {
                if let Some(p) = try_angle(t0 + sgn * m as f64 * delta) {
                    return Ok(p);
                }
            }
        }
        delta *= 0.5;
    }
    Err(Error::Precondition(format!("no exposed point within {eps} found after {budget} refinements")))
}
