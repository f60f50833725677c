//! Structure of planar convex sets: extreme half-lines, the
//! `conv{x_i} + cone{u_j}` decomposition, and polytope / polyhedron /
//! non-polyhedral classification.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::domain::{exposed_points, sphere_directions, ConvexBody, Generators, Shape, RAY_ORTHO};
use crate::error::{check_dim, invalid, Error, Result};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::math::{add, dist, dot, equiangular, fabs, negated, norm, normalized, scaled, Point, PI};

/// Exposed-point count each probe level must exceed.
pub const PROBE_THRESHOLD: usize = 16;
pub const PROBE_LEVELS: [usize; 2] = [64, 256];
pub const VALIDATION_DIRECTIONS: usize = 256;
pub const VALIDATION_TOL: f64 = 1e-9;
const SUM_CAP: usize = 4096;
const PARALLEL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct RaySpec {
    /// Index into the point list.
    pub origin: usize,
    pub dir: Point,
}

/// `conv{x_1, …, x_m, ℓ_1, …, ℓ_k}` where `ℓ_i` starts at a listed point.
#[derive(Debug, Clone, PartialEq)]
pub struct HullRaysRep {
    pub points: Vec<Point>,
    pub rays: Vec<RaySpec>,
    pub line_flag: bool,
}

impl HullRaysRep {
    pub fn new(points: Vec<Point>, rays: Vec<(usize, Point)>) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("a hull-plus-rays representation needs at least one point"));
        }
        for p in &points {
            check_dim(2, p.len())?;
            if p.iter().any(|v| !v.is_finite()) {
                return Err(invalid("points must be finite"));
            }
        }
        let mut specs = Vec::with_capacity(rays.len());
        for (origin, d) in rays {
            check_dim(2, d.len())?;
            if origin >= points.len() {
                return Err(invalid(format!("ray origin {origin} is not a listed point")));
            }
            let dir = normalized(&d).ok_or_else(|| invalid("ray direction must be nonzero"))?;
            specs.push(RaySpec { origin, dir });
        }
        let dirs: Vec<Point> = specs.iter().map(|r| r.dir.clone()).collect();
        let line_flag = line_direction(&dirs).is_some();
        Ok(HullRaysRep { points, rays: specs, line_flag })
    }

    /// Rays without stored origins are attached to the first point.
    pub fn from_generators(g: Generators) -> Result<Self> {
        let rays = g.rays.into_iter().map(|d| (0, d)).collect();
        Self::new(g.points, rays)
    }

    pub fn directions(&self) -> Vec<Point> {
        self.rays.iter().map(|r| r.dir.clone()).collect()
    }

    pub fn to_body(&self) -> Result<ConvexBody> {
        ConvexBody::hull_rays(self.points.clone(), self.directions())
    }

    /// Support function of the represented set.
    pub fn h(&self, a: &[f64]) -> f64 {
        support_of(&self.points, &self.directions(), a)
    }
}

fn support_of(points: &[Point], rays: &[Point], a: &[f64]) -> f64 {
    let na = norm(a);
    if rays.iter().any(|u| dot(u, a) > RAY_ORTHO * na) {
        return f64::INFINITY;
    }
    points.iter().map(|p| dot(p, a)).fold(f64::NEG_INFINITY, f64::max)
}

fn rot90(u: &[f64]) -> Point {
    vec![-u[1], u[0]]
}

/// A direction `u` with `±u` in `cone(dirs)`, if any.
fn line_direction(dirs: &[Point]) -> Option<Point> {
    if dirs.len() < 2 {
        return None;
    }
    let m = dirs.len();
    let mut lp = LinearProgram::new(vec![0.0; m]);
    lp.push(vec![1.0; m], Relation::Eq, 1.0);
    for k in 0..2 {
        lp.push(dirs.iter().map(|u| u[k]).collect(), Relation::Eq, 0.0);
    }
    match lp.solve() {
        LpOutcome::Optimal { x, .. } => {
            let j = (0..m).max_by(|&a, &b| x[a].total_cmp(&x[b]))?;
            Some(dirs[j].clone())
        }
        _ => None,
    }
}

fn dedup_dirs(dirs: &[Point]) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::new();
    for d in dirs {
        if !out.iter().any(|u| dist(u, d) <= PARALLEL_TOL) {
            out.push(d.clone());
        }
    }
    out
}

/// Extreme rays of a pointed planar cone (at most two).
pub fn extreme_rays(dirs: &[Point]) -> Vec<Point> {
    let u = dedup_dirs(dirs);
    let mut out = Vec::new();
    for i in 0..u.len() {
        let others: Vec<&Point> = u.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| v).collect();
        if others.is_empty() {
            out.push(u[i].clone());
            continue;
        }
        let mut lp = LinearProgram::new(vec![0.0; others.len()]);
        for k in 0..2 {
            lp.push(others.iter().map(|v| v[k]).collect(), Relation::Eq, u[i][k]);
        }
        if lp.solve() == LpOutcome::Infeasible {
            out.push(u[i].clone());
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremeHalfline {
    pub origin: Point,
    pub direction: Point,
    /// Outer normal of the supporting line containing the half-line.
    pub normal: Point,
    /// Input ray realizing this half-line, when one matches.
    pub ray: Option<usize>,
}

/// Maximal boundary half-lines that are faces of the set; never more than two.
pub fn extreme_halflines(rep: &HullRaysRep) -> Result<Vec<ExtremeHalfline>> {
    if rep.line_flag {
        return Err(invalid("the set contains a line"));
    }
    let dirs = rep.directions();
    let scale = rep.points.iter().flat_map(|p| p.iter().map(|v| fabs(*v))).fold(1.0, f64::max);
    let tol = 1e-9 * scale;
    let mut out: Vec<ExtremeHalfline> = Vec::new();
    for u in extreme_rays(&dirs) {
        for a in [rot90(&u), negated(&rot90(&u))] {
            if dirs.iter().any(|v| dot(v, &a) > RAY_ORTHO) {
                continue;
            }
            let top = rep.points.iter().map(|p| dot(p, &a)).fold(f64::NEG_INFINITY, f64::max);
            let origin = rep
                .points
                .iter()
                .filter(|p| dot(p, &a) >= top - tol)
                .min_by(|p, q| dot(p, &u).total_cmp(&dot(q, &u)))
                .cloned()
                .ok_or_else(|| Error::Internal("empty face".into()))?;
            if out.iter().any(|e| dist(&e.origin, &origin) <= tol && dist(&e.direction, &u) <= PARALLEL_TOL) {
                continue;
            }
            let ray = rep
                .rays
                .iter()
                .position(|r| dist(&r.dir, &u) <= PARALLEL_TOL && dist(&rep.points[r.origin], &origin) <= tol);
            out.push(ExtremeHalfline { origin, direction: u.clone(), normal: a, ray });
        }
    }
    if out.len() > 2 {
        return Err(Error::Internal(format!("{} extreme half-lines in the plane", out.len())));
    }
    Ok(out)
}

/// `K = conv(polytope_vertices) + cone(cone_generators)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub polytope_vertices: Vec<Point>,
    pub cone_generators: Vec<Point>,
}

impl Decomposition {
    pub fn h(&self, a: &[f64]) -> f64 {
        support_of(&self.polytope_vertices, &self.cone_generators, a)
    }

    /// Random nonnegative combination `Σ p_i x_i + Σ μ_j u_j` with `Σ p_i = 1`.
    pub fn combination(&self, weights: &[f64], mu: &[f64]) -> Result<Point> {
        check_dim(self.polytope_vertices.len(), weights.len())?;
        check_dim(self.cone_generators.len(), mu.len())?;
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().chain(mu).any(|w| *w < 0.0) {
            return Err(invalid("weights must be nonnegative with a positive sum"));
        }
        let mut x = vec![0.0; 2];
        for (p, w) in self.polytope_vertices.iter().zip(weights) {
            x = add(&x, &scaled(p, w / total));
        }
        for (u, m) in self.cone_generators.iter().zip(mu) {
            x = add(&x, &scaled(u, *m));
        }
        Ok(x)
    }
}

fn check_support_identity(rep: &HullRaysRep, dec: &Decomposition) -> Result<()> {
    for a in equiangular(VALIDATION_DIRECTIONS, PI / VALIDATION_DIRECTIONS as f64) {
        let (hr, hd) = (rep.h(&a), dec.h(&a));
        let ok = match (hr.is_finite(), hd.is_finite()) {
            (true, true) => fabs(hr - hd) <= VALIDATION_TOL * (1.0 + fabs(hr)),
            (false, false) => true,
            _ => false,
        };
        if !ok {
            return Err(Error::Internal(format!("support identity fails at ({:.6}, {:.6}): {hr} vs {hd}", a[0], a[1])));
        }
    }
    Ok(())
}

/// Extreme points plus extreme recession rays, validated on a direction sweep.
pub fn decompose(rep: &HullRaysRep) -> Result<Decomposition> {
    if rep.line_flag {
        return Err(invalid("the set contains a line"));
    }
    let dirs = rep.directions();
    let cone_generators = extreme_rays(&dirs);
    let scale = rep.points.iter().flat_map(|p| p.iter().map(|v| fabs(*v))).fold(1.0, f64::max);
    let mut distinct: Vec<Point> = Vec::new();
    for p in &rep.points {
        if !distinct.iter().any(|q| dist(q, p) <= 1e-7 * scale) {
            distinct.push(p.clone());
        }
    }
    let polytope_vertices = (0..distinct.len())
        .filter(|&i| crate::domain::is_extreme(&distinct, &cone_generators, i))
        .map(|i| distinct[i].clone())
        .collect();
    let dec = Decomposition { polytope_vertices, cone_generators };
    check_support_identity(rep, &dec)?;
    Ok(dec)
}

/// Exposed-point counts at two direction resolutions.
#[derive(Debug, Clone, PartialEq)]
pub struct ExposureEvidence {
    /// `(directions, distinct exposed points, unbounded directions)` per level.
    pub levels: Vec<(usize, usize, usize)>,
    pub threshold: usize,
    pub growing: bool,
}

impl ExposureEvidence {
    pub fn supports_infinitely_many(&self) -> bool {
        self.growing && self.levels.iter().all(|l| l.1 > self.threshold)
    }

    pub fn transcript(&self) -> String {
        let mut s = String::new();
        for (d, c, u) in &self.levels {
            s.push_str(&format!("{d} directions: {c} exposed points, {u} unbounded; "));
        }
        s.push_str(&format!("threshold {}, heuristic", self.threshold));
        s
    }
}

pub fn exposure_evidence(body: &ConvexBody) -> Result<ExposureEvidence> {
    let mut levels = Vec::new();
    for m in PROBE_LEVELS {
        let dirs = if body.dim() == 2 { equiangular(m, PI / m as f64) } else { sphere_directions(body.dim(), m) };
        let e = exposed_points(body, &dirs)?;
        levels.push((m, e.set.len(), e.unbounded.len()));
    }
    let growing = levels.windows(2).all(|w| w[1].1 > w[0].1);
    Ok(ExposureEvidence { levels, threshold: PROBE_THRESHOLD, growing })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Classification {
    Polytope { vertices: Vec<Point> },
    Polyhedron { decomposition: Decomposition, halflines: Vec<ExtremeHalfline> },
    /// Evidence-based: exposed-point counts keep growing.
    NonPolyhedral(ExposureEvidence),
    /// `{x : β ≤ ⟨x, w⟩ ≤ α}` with `w` the direction rotated by a quarter turn.
    LineStrip { beta: f64, alpha: f64, direction: Point },
    Inconclusive(ExposureEvidence),
}

impl Classification {
    pub fn name(&self) -> &'static str {
        match self {
            Classification::Polytope { .. } => "POLYTOPE",
            Classification::Polyhedron { .. } => "POLYHEDRON",
            Classification::NonPolyhedral(_) => "NON_POLYHEDRAL",
            Classification::LineStrip { .. } => "LINE_STRIP",
            Classification::Inconclusive(_) => "INCONCLUSIVE",
        }
    }
}

/// Exact generators for bodies built from polyhedral pieces.
pub fn polyhedral_generators(body: &ConvexBody) -> Option<Generators> {
    let n = body.dim();
    match body.shape() {
        Shape::Ball { center, radius } if *radius == 0.0 => Some(Generators { points: vec![center.clone()], rays: Vec::new() }),
        Shape::Ball { .. } | Shape::Paraboloid { .. } | Shape::LorentzCone => None,
        Shape::VPolytope { .. } | Shape::HullRays { .. } | Shape::HPolyhedron { .. } => body.generators(),
        Shape::Sum(x, y) => {
            let (gx, gy) = (polyhedral_generators(x)?, polyhedral_generators(y)?);
            if gx.points.len() * gy.points.len() > SUM_CAP {
                return None;
            }
            let points = gx.points.iter().flat_map(|p| gy.points.iter().map(move |q| add(p, q))).collect();
            let mut rays = gx.rays;
            rays.extend(gy.rays);
            Some(Generators { points, rays })
        }
        Shape::Negate(x) => {
            let g = polyhedral_generators(x)?;
            Some(Generators { points: g.points.iter().map(|p| negated(p)).collect(), rays: g.rays.iter().map(|u| negated(u)).collect() })
        }
        Shape::Scale(x, c) => {
            let g = polyhedral_generators(x)?;
            Some(Generators { points: g.points.iter().map(|p| scaled(p, *c)).collect(), rays: g.rays })
        }
        Shape::Linear { body, matrix } => {
            let g = polyhedral_generators(body)?;
            let apply = |v: &Point| -> Point { (0..n).map(|i| (0..n).map(|j| matrix[i * n + j] * v[j]).sum()).collect() };
            Some(Generators {
                points: g.points.iter().map(apply).collect(),
                rays: g.rays.iter().filter_map(|u| normalized(&apply(u))).collect(),
            })
        }
        Shape::Hull(ms) => {
            let mut points = Vec::new();
            let mut rays = Vec::new();
            for m in ms {
                let g = polyhedral_generators(m)?;
                points.extend(g.points);
                rays.extend(g.rays);
            }
            Some(Generators { points, rays })
        }
    }
}

fn line_strip(rep: &HullRaysRep) -> Result<Classification> {
    let mut u = line_direction(&rep.directions()).ok_or_else(|| Error::Internal("line flag without a line".into()))?;
    if u[0] < 0.0 || (u[0] == 0.0 && u[1] < 0.0) {
        u = negated(&u);
    }
    let w = rot90(&u);
    Ok(Classification::LineStrip { beta: -rep.h(&negated(&w)), alpha: rep.h(&w), direction: u })
}

pub fn classify_rep(rep: &HullRaysRep) -> Result<Classification> {
    if rep.line_flag {
        return line_strip(rep);
    }
    let decomposition = decompose(rep)?;
    if decomposition.cone_generators.is_empty() {
        return Ok(Classification::Polytope { vertices: decomposition.polytope_vertices });
    }
    let halflines = extreme_halflines(rep)?;
    Ok(Classification::Polyhedron { decomposition, halflines })
}

/// Exact path for polyhedral constructions, exposed-point probe otherwise.
pub fn classify(body: &ConvexBody) -> Result<Classification> {
    if body.dim() != 2 {
        return Err(Error::Unsupported(format!("classification is planar, got dimension {}", body.dim())));
    }
    if let Some(g) = polyhedral_generators(body) {
        return classify_rep(&HullRaysRep::from_generators(g)?);
    }
    let evidence = exposure_evidence(body)?;
    if evidence.supports_infinitely_many() {
        Ok(Classification::NonPolyhedral(evidence))
    } else {
        Ok(Classification::Inconclusive(evidence))
    }
}
