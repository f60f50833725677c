//! Certified set computations on intersections of planar convex bodies:
//! outer polygons, Farkas emptiness certificates, interaction-region
//! disjointness and witness search near exposed points.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::domain::{exposed_points, ConvexBody, Exposure};
use crate::error::{check_dim, invalid, Error, Result};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::math::{angle_of_dir, dist, dot, equiangular, fabs, lerp, norm, scaled, unit2, Point};
use crate::polygon;

pub const DEFAULT_DIRECTIONS: usize = 256;
const LP_TOL: f64 = 1e-9;

/// Intersection of convex bodies.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionSpec {
    pub members: Vec<ConvexBody>,
    pub label: String,
}

impl RegionSpec {
    pub fn new(members: Vec<ConvexBody>, label: impl Into<String>) -> Result<Self> {
        let dim = members.first().map(ConvexBody::dim).ok_or_else(|| invalid("region needs at least one member"))?;
        for m in &members {
            check_dim(dim, m.dim())?;
        }
        Ok(RegionSpec { members, label: label.into() })
    }

    pub fn dim(&self) -> usize {
        self.members[0].dim()
    }

    /// Membership in the closure of every member.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        for m in &self.members {
            if !m.contains_closure(x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Membership with an explicit (possibly negative) slack on the signed gap.
    pub fn contains_with(&self, x: &[f64], slack: f64) -> Result<bool> {
        for m in &self.members {
            if m.signed_gap(x)? < -slack {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Support of the members' pointwise minimum, an upper bound for the region.
    pub fn support_bound(&self, a: &[f64]) -> f64 {
        self.members.iter().map(|m| m.h(a)).fold(f64::INFINITY, f64::min)
    }
}

/// `(supp − Ω) ∩ Ω`, the interaction region of a symbol supported on `supp_hat`.
pub fn d_region(omega: &ConvexBody, supp_hat: &ConvexBody) -> Result<RegionSpec> {
    check_dim(omega.dim(), supp_hat.dim())?;
    let shifted = ConvexBody::sum(supp_hat.clone(), ConvexBody::negate(omega.clone()))?.simplified();
    RegionSpec::new(vec![shifted, omega.clone()], "interaction region")
}

/// Nonnegative multipliers `y` with `Σ y_m a_m ≈ 0` and `Σ y_m c_m < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarkasCertificate {
    /// One weight per constraint of the owning polygon (zero for dropped ones).
    pub weights: Vec<f64>,
    /// `-Σ y_m c_m`, strictly positive.
    pub margin: f64,
    /// `|Σ y_m a_m|`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PolygonOutcome {
    /// The region is empty.
    Empty(FarkasCertificate),
    /// Counter-clockwise vertices of a bounded outer polygon.
    Bounded(Vec<Point>),
    /// Finite constraints do not bound the region; vertices of the clip
    /// against a large window are retained.
    Unbounded(Vec<Point>),
    /// Numerically empty without a verified certificate.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OuterPolygon {
    pub directions: Vec<Point>,
    /// `min_member h(a_m)`, possibly `+∞`.
    pub offsets: Vec<f64>,
    pub outcome: PolygonOutcome,
}

impl OuterPolygon {
    pub fn is_empty(&self) -> bool {
        matches!(self.outcome, PolygonOutcome::Empty(_))
    }

    pub fn vertices(&self) -> &[Point] {
        match &self.outcome {
            PolygonOutcome::Bounded(v) | PolygonOutcome::Unbounded(v) => v,
            _ => &[],
        }
    }

    /// Support of the polygon, `+∞` when unbounded.
    pub fn support(&self, a: &[f64]) -> f64 {
        match &self.outcome {
            PolygonOutcome::Bounded(v) => v.iter().map(|p| dot(p, a)).fold(f64::NEG_INFINITY, f64::max),
            PolygonOutcome::Unbounded(_) => f64::INFINITY,
            _ => f64::NEG_INFINITY,
        }
    }

    /// Human-readable certificate listing.
    pub fn certificate_text(&self) -> String {
        let mut s = String::new();
        s.push_str("directions offsets\n");
        for (a, c) in self.directions.iter().zip(&self.offsets) {
            s.push_str(&format!("{:.17e} {:.17e} {:.17e}\n", a[0], a[1], c));
        }
        match &self.outcome {
            PolygonOutcome::Empty(cert) => {
                s.push_str(&format!("status EMPTY margin {:.6e} residual {:.3e}\nmultipliers\n", cert.margin, cert.residual));
                for (m, w) in cert.weights.iter().enumerate() {
                    if *w > 0.0 {
                        s.push_str(&format!("{m} {w:.17e}\n"));
                    }
                }
            }
            PolygonOutcome::Bounded(v) | PolygonOutcome::Unbounded(v) => {
                let tag = if matches!(self.outcome, PolygonOutcome::Bounded(_)) { "BOUNDED" } else { "UNBOUNDED" };
                s.push_str(&format!("status {tag}\nvertices\n"));
                for p in v {
                    s.push_str(&format!("{:.17e} {:.17e}\n", p[0], p[1]));
                }
            }
            PolygonOutcome::Degenerate => s.push_str("status DEGENERATE\n"),
        }
        s
    }
}

/// Equiangular directions merged with the members' facet normals.
pub fn probe_directions(members: &[&ConvexBody], count: usize) -> Vec<Point> {
    let mut dirs = equiangular(count, 0.0);
    let mut angles: Vec<f64> = dirs.iter().map(|d| angle_of_dir(d)).collect();
    for m in members {
        for n in m.facet_normals() {
            let t = angle_of_dir(&n);
            if !angles.iter().any(|s| fabs(s - t) < 1e-12 || fabs(fabs(s - t) - core::f64::consts::TAU) < 1e-12) {
                angles.push(t);
                dirs.push(n);
            }
        }
    }
    dirs
}

/// Outer polygon of a planar region from `n_directions` equiangular
/// directions plus facet normals; certified EMPTY when the half-planes are
/// jointly infeasible.
pub fn outer_polygon(region: &RegionSpec, n_directions: usize) -> Result<OuterPolygon> {
    if region.dim() != 2 {
        return Err(Error::Unsupported("outer polygons are planar".into()));
    }
    if n_directions < 3 {
        return Err(invalid("need at least 3 directions"));
    }
    let refs: Vec<&ConvexBody> = region.members.iter().collect();
    let directions = probe_directions(&refs, n_directions);
    polygon_from_directions(region, directions)
}

/// Outer polygon for an explicit direction list (unit vectors).
pub fn polygon_from_directions(region: &RegionSpec, directions: Vec<Point>) -> Result<OuterPolygon> {
    let offsets: Vec<f64> = directions.iter().map(|a| region.support_bound(a)).collect();
    let finite: Vec<usize> = (0..directions.len()).filter(|&m| offsets[m].is_finite()).collect();
    let radius = region
        .members
        .iter()
        .filter_map(|m| m.bounding_box())
        .map(|(lo, hi)| lo.iter().chain(&hi).map(|v| fabs(*v)).fold(0.0, f64::max) * core::f64::consts::SQRT_2)
        .fold(f64::INFINITY, f64::min);
    if let Some(cert) = farkas(&directions, &offsets, &finite, radius) {
        return Ok(OuterPolygon { directions, offsets, outcome: PolygonOutcome::Empty(cert) });
    }
    let scale = finite.iter().map(|&m| fabs(offsets[m])).fold(1.0, f64::max);
    let window = 1e3 * scale;
    let mut poly = polygon::square(window);
    for &m in &finite {
        poly = polygon::clip(&poly, &directions[m], offsets[m]);
        if poly.is_empty() {
            break;
        }
    }
    let outcome = if poly.is_empty() {
        PolygonOutcome::Degenerate
    } else if poly.iter().any(|p| fabs(p[0]) >= 0.999 * window || fabs(p[1]) >= 0.999 * window) {
        PolygonOutcome::Unbounded(poly)
    } else {
        PolygonOutcome::Bounded(poly)
    };
    Ok(OuterPolygon { directions, offsets, outcome })
}

/// Solves `min Σ y c` over `y ≥ 0, Σ y a = 0, Σ y = 1`; a negative optimum
/// that survives residual validation is an emptiness certificate.
fn farkas(directions: &[Point], offsets: &[f64], finite: &[usize], radius: f64) -> Option<FarkasCertificate> {
    if finite.len() < 2 {
        return None;
    }
    let obj: Vec<f64> = finite.iter().map(|&m| -offsets[m]).collect();
    let mut lp = LinearProgram::new(obj);
    lp.push(finite.iter().map(|&m| directions[m][0]).collect(), Relation::Eq, 0.0);
    lp.push(finite.iter().map(|&m| directions[m][1]).collect(), Relation::Eq, 0.0);
    lp.push(vec![1.0; finite.len()], Relation::Eq, 1.0);
    let LpOutcome::Optimal { x, .. } = lp.solve() else {
        return None;
    };
    let scale = finite.iter().map(|&m| fabs(offsets[m])).fold(1.0, f64::max);
    let mut weights = vec![0.0; directions.len()];
    let (mut rx, mut ry, mut cy) = (0.0, 0.0, 0.0);
    for (k, &m) in finite.iter().enumerate() {
        let y = x[k].max(0.0);
        weights[m] = y;
        rx += y * directions[m][0];
        ry += y * directions[m][1];
        cy += y * offsets[m];
    }
    let margin = -cy;
    let residual = norm(&[rx, ry]);
    // For x in the region, Σ y ⟨a, x⟩ ≤ Σ y c; the left side is ≥ -residual·|x|.
    let slack = if residual == 0.0 { 0.0 } else { residual * radius };
    if margin > LP_TOL * scale && margin > slack {
        Some(FarkasCertificate { weights, margin, residual })
    } else {
        None
    }
}

/// Largest inscribed disc of the constraint polygon: `(center, radius)`.
pub fn chebyshev_center(poly: &OuterPolygon) -> Result<(Point, f64)> {
    let finite: Vec<usize> = (0..poly.directions.len()).filter(|&m| poly.offsets[m].is_finite()).collect();
    let mut lp = LinearProgram::new(vec![0.0, 0.0, 0.0, 0.0, 1.0]);
    for &m in &finite {
        let a = &poly.directions[m];
        lp.push(vec![a[0], a[1], -a[0], -a[1], 1.0], Relation::Le, poly.offsets[m]);
    }
    let cap = finite.iter().map(|&m| fabs(poly.offsets[m])).fold(1.0, f64::max);
    lp.push(vec![0.0, 0.0, 0.0, 0.0, 1.0], Relation::Le, cap);
    match lp.solve() {
        LpOutcome::Optimal { x, .. } => Ok((vec![x[0] - x[2], x[1] - x[3]], x[4])),
        _ => Err(Error::Precondition("region has no interior".into())),
    }
}

/// Interior anchor of `omega`: the Chebyshev center of its outer polygon.
pub fn interior_anchor(omega: &ConvexBody, n_directions: usize) -> Result<Point> {
    let region = RegionSpec::new(vec![omega.clone()], "omega")?;
    let poly = outer_polygon(&region, n_directions)?;
    let (c, r) = chebyshev_center(&poly)?;
    if !(r > 0.0) {
        return Err(Error::Precondition("domain has empty interior".into()));
    }
    Ok(c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairCertificate {
    pub pair: (usize, usize),
    pub certificate: FarkasCertificate,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Disjointness {
    Certified(Vec<PairCertificate>),
    Inconclusive { pair: (usize, usize) },
}

impl Disjointness {
    pub fn is_certified(&self) -> bool {
        matches!(self, Disjointness::Certified(_))
    }
}

/// Checks `B̄(y, r) ⊂ 2Ω` on the probe directions.
pub fn ball_in_double(omega: &ConvexBody, y: &[f64], r: f64, directions: &[Point]) -> bool {
    directions
        .iter()
        .all(|a| dot(y, a) + r * norm(a) <= 2.0 * omega.h(a) + 1e-12 * (1.0 + fabs(omega.h(a))))
}

/// Certifies that the interaction regions of the balls `B̄(y_i, r)` are
/// pairwise disjoint. Centers may be arbitrary points of `2Ω`.
pub fn check_pairwise_disjoint(
    omega: &ConvexBody,
    centers: &[Point],
    r: f64,
    n_directions: usize,
) -> Result<Disjointness> {
    if omega.dim() != 2 {
        return Err(Error::Unsupported("disjointness certificates are planar".into()));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(invalid("radius must be positive"));
    }
    let dirs = probe_directions(&[omega], n_directions);
    let mut balls = Vec::with_capacity(centers.len());
    for (i, y) in centers.iter().enumerate() {
        check_dim(2, y.len())?;
        if !ball_in_double(omega, y, r, &dirs) {
            return Err(Error::Precondition(format!("ball {i} is not contained in the doubled domain")));
        }
        let ball = ConvexBody::ball(y.clone(), r)?;
        balls.push(ConvexBody::sum(ball, ConvexBody::negate(omega.clone()))?.simplified());
    }
    let mut certs = Vec::new();
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            let region = RegionSpec::new(vec![balls[i].clone(), balls[j].clone(), omega.clone()], format!("pair {i}-{j}"))?;
            let poly = outer_polygon(&region, n_directions)?;
            match poly.outcome {
                PolygonOutcome::Empty(certificate) => certs.push(PairCertificate { pair: (i, j), certificate }),
                _ => return Ok(Disjointness::Inconclusive { pair: (i, j) }),
            }
        }
    }
    Ok(Disjointness::Certified(certs))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessBudget {
    /// Number of halvings of `t`.
    pub rounds: usize,
    /// `s` runs over `t/2, t/4, …` with this many entries.
    pub s_steps: usize,
    /// Extra halvings after the first acceptance, keeping the tightest certificate.
    pub refine_rounds: usize,
    pub directions: usize,
}

impl Default for WitnessBudget {
    fn default() -> Self {
        WitnessBudget { rounds: 40, s_steps: 3, refine_rounds: 4, directions: DEFAULT_DIRECTIONS }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessCertificate {
    pub y: Point,
    pub rho: f64,
    pub z: Point,
    pub s: f64,
    pub t: f64,
    /// Largest distance from `y` to a vertex of the outer polygon.
    pub max_dist: f64,
    /// Round (1-based) of the first accepted candidate and its bound.
    pub first_accepted_round: usize,
    pub first_accepted_max_dist: f64,
    pub polygon: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WitnessOutcome {
    Found(WitnessCertificate),
    NotFound { best_max_dist: f64, rounds: usize },
}

/// Searches `z = y + t (x₀ − y)` and `s` such that the outer polygon of
/// `(B̄(2z, s) − Ω) ∩ Ω` lies in `B̄(y, ρ)`.
pub fn find_witness(omega: &ConvexBody, y: &[f64], rho: f64, budget: WitnessBudget) -> Result<WitnessOutcome> {
    check_dim(omega.dim(), y.len())?;
    if omega.dim() != 2 {
        return Err(Error::Unsupported("witness search is planar".into()));
    }
    if !(rho > 0.0) {
        return Err(invalid("rho must be positive"));
    }
    let x0 = interior_anchor(omega, budget.directions)?;
    let dirs = probe_directions(&[omega], budget.directions);
    let neg = ConvexBody::negate(omega.clone());
    let mut best = f64::INFINITY;
    let mut found: Option<WitnessCertificate> = None;
    let mut first: Option<(usize, f64)> = None;
    let mut t = 1.0;
    for round in 1..=budget.rounds {
        t *= 0.5;
        if let Some((r0, _)) = first {
            if round > r0 + budget.refine_rounds {
                break;
            }
        }
        let z = lerp(y, &x0, t);
        let center = scaled(&z, 2.0);
        let mut s = t;
        for _ in 0..budget.s_steps {
            s *= 0.5;
            if !ball_in_double(omega, &center, s, &dirs) {
                continue;
            }
            let ball = ConvexBody::ball(center.clone(), s)?;
            let region = RegionSpec::new(vec![ConvexBody::sum(ball, neg.clone())?.simplified(), omega.clone()], "witness")?;
            let poly = outer_polygon(&region, budget.directions)?;
            let PolygonOutcome::Bounded(vertices) = poly.outcome else { continue };
            let md = vertices.iter().map(|p| dist(p, y)).fold(0.0, f64::max);
            best = best.min(md);
            if md <= rho {
                if first.is_none() {
                    first = Some((round, md));
                }
                if found.as_ref().is_none_or(|f| md < f.max_dist) {
                    found = Some(WitnessCertificate {
                        y: y.to_vec(),
                        rho,
                        z: z.clone(),
                        s,
                        t,
                        max_dist: md,
                        first_accepted_round: 0,
                        first_accepted_max_dist: 0.0,
                        polygon: vertices,
                    });
                }
            }
        }
    }
    Ok(match (found, first) {
        (Some(mut c), Some((r0, md0))) => {
            c.first_accepted_round = r0;
            c.first_accepted_max_dist = md0;
            WitnessOutcome::Found(c)
        }
        _ => WitnessOutcome::NotFound { best_max_dist: best, rounds: budget.rounds },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationBudget {
    /// Equiangular directions used to harvest exposed-point candidates.
    pub candidates: usize,
    pub r_start: f64,
    pub shrink: f64,
    pub r_floor: f64,
    pub directions: usize,
}

impl Default for SeparationBudget {
    fn default() -> Self {
        SeparationBudget { candidates: 256, r_start: 0.5, shrink: 0.5, r_floor: 1e-4, directions: DEFAULT_DIRECTIONS }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparatedConfiguration {
    /// Chosen boundary points `y_i`.
    pub points: Vec<Point>,
    /// Whether each `y_i` is a certified exposed point.
    pub exposed: Vec<bool>,
    /// Ball centers `2 z_i` in `2Ω`.
    pub centers: Vec<Point>,
    pub r: f64,
    pub anchor: Point,
    pub certificates: Vec<PairCertificate>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeparationOutcome {
    Certified(SeparatedConfiguration),
    NotFound {
        points: Vec<Point>,
        exposed: Vec<bool>,
        blocking_pair: Option<(usize, usize)>,
        involves_non_exposed: bool,
        smallest_r: f64,
        reason: String,
    },
}

struct Candidate {
    point: Point,
    exposed: bool,
}

fn face_midpoint(omega: &ConvexBody, a: &[f64]) -> Option<Point> {
    const DELTA: f64 = 1e-9;
    let t = angle_of_dir(a);
    let p = omega.face(&unit2(t + DELTA))?;
    let q = omega.face(&unit2(t - DELTA))?;
    Some(lerp(&p.point, &q.point, 0.5))
}

fn harvest(omega: &ConvexBody, count: usize) -> Result<Vec<Candidate>> {
    let dirs = equiangular(count, 0.0);
    let exp = exposed_points(omega, &dirs)?;
    let tol = omega.point_tolerance();
    let mut out: Vec<Candidate> = exp.set.points.into_iter().map(|point| Candidate { point, exposed: true }).collect();
    for &m in &exp.non_unique {
        if let Some(p) = face_midpoint(omega, &dirs[m]) {
            if !out.iter().any(|c| dist(&c.point, &p) <= tol) {
                out.push(Candidate { point: p, exposed: false });
            }
        }
    }
    Ok(out)
}

/// Greedy farthest-point choice: exposed candidates first, then fallbacks.
fn choose(cands: &[Candidate], k: usize, tol: f64) -> Option<Vec<usize>> {
    if cands.is_empty() {
        return None;
    }
    let mut chosen = vec![0usize];
    while chosen.len() < k {
        let mut pick: Option<(usize, f64)> = None;
        for pass_exposed in [true, false] {
            for (i, c) in cands.iter().enumerate() {
                if c.exposed != pass_exposed || chosen.contains(&i) {
                    continue;
                }
                let d = chosen.iter().map(|&j| dist(&cands[j].point, &c.point)).fold(f64::INFINITY, f64::min);
                if d > tol && pick.is_none_or(|(_, bd)| d > bd) {
                    pick = Some((i, d));
                }
            }
            if pick.is_some() {
                break;
            }
        }
        chosen.push(pick?.0);
    }
    Some(chosen)
}

/// Smallest `t ∈ (0, 1)` with `B̄(2(y + t(x₀ − y)), r) ⊂ 2Ω` on the probe
/// directions, using a relative margin of `1e-3` on `r`.
pub fn center_parameter(omega: &ConvexBody, y: &[f64], x0: &[f64], r: f64, dirs: &[Point]) -> Option<f64> {
    let rr = r * (1.0 + 1e-3);
    let (mut lo, mut hi): (f64, f64) = (0.0, 1.0);
    for a in dirs {
        let h = omega.h(a);
        if !h.is_finite() {
            continue;
        }
        let gy = h - dot(y, a);
        let g0 = h - dot(x0, a);
        // Need 2(1 − t) gy + 2t g0 ≥ rr.
        let base = 2.0 * gy - rr;
        let slope = 2.0 * (g0 - gy);
        if slope > 0.0 {
            lo = lo.max(-base / slope);
        } else if slope < 0.0 {
            hi = hi.min(-base / slope);
        } else if base < 0.0 {
            return None;
        }
    }
    (lo <= hi && lo < 1.0).then_some(lo.max(0.0))
}

/// Picks `k` well-separated boundary points and shrinks `r` until the
/// interaction regions of `B̄(2z_i, r)` are certified pairwise disjoint.
pub fn select_separated_points(omega: &ConvexBody, k: usize, budget: SeparationBudget) -> Result<SeparationOutcome> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    if omega.dim() != 2 {
        return Err(Error::Unsupported("point selection is planar".into()));
    }
    if !(budget.r_start > 0.0 && budget.shrink > 0.0 && budget.shrink < 1.0 && budget.r_floor > 0.0) {
        return Err(invalid("separation budget needs r_start > 0, 0 < shrink < 1, r_floor > 0"));
    }
    let cands = harvest(omega, budget.candidates)?;
    let Some(idx) = choose(&cands, k, omega.point_tolerance()) else {
        return Ok(SeparationOutcome::NotFound {
            points: cands.iter().map(|c| c.point.clone()).collect(),
            exposed: cands.iter().map(|c| c.exposed).collect(),
            blocking_pair: None,
            involves_non_exposed: false,
            smallest_r: budget.r_start,
            reason: format!("only {} distinct boundary candidates for k = {k}", cands.len()),
        });
    };
    let points: Vec<Point> = idx.iter().map(|&i| cands[i].point.clone()).collect();
    let exposed: Vec<bool> = idx.iter().map(|&i| cands[i].exposed).collect();
    let x0 = interior_anchor(omega, budget.directions)?;
    let dirs = probe_directions(&[omega], budget.directions);
    let mut r = budget.r_start;
    let mut last_pair = None;
    let mut smallest = r;
    while r >= budget.r_floor {
        smallest = r;
        let ts: Option<Vec<f64>> = points.iter().map(|y| center_parameter(omega, y, &x0, r, &dirs)).collect();
        if let Some(ts) = ts {
            let centers: Vec<Point> = points.iter().zip(&ts).map(|(y, &t)| scaled(&lerp(y, &x0, t), 2.0)).collect();
            match check_pairwise_disjoint(omega, &centers, r, budget.directions)? {
                Disjointness::Certified(certificates) => {
                    return Ok(SeparationOutcome::Certified(SeparatedConfiguration {
                        points,
                        exposed,
                        centers,
                        r,
                        anchor: x0,
                        certificates,
                    }))
                }
                Disjointness::Inconclusive { pair } => last_pair = Some(pair),
            }
        }
        r *= budget.shrink;
    }
    let involves_non_exposed = last_pair.is_some_and(|(i, j)| !exposed[i] || !exposed[j]);
    Ok(SeparationOutcome::NotFound {
        points,
        exposed,
        blocking_pair: last_pair,
        involves_non_exposed,
        smallest_r: smallest,
        reason: String::from("no radius down to the floor certified every pair"),
    })
}

/// Exposure flag of a face along `a`, resolving numerically when needed.
pub fn exposure_along(omega: &ConvexBody, a: &[f64]) -> Option<Exposure> {
    omega.resolved_face(a).map(|f| f.exposure)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc() -> ConvexBody {
        ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap()
    }

    fn square() -> ConvexBody {
        ConvexBody::vpolytope(vec![vec![-1.0, -1.0], vec![1.0, -1.0], vec![1.0, 1.0], vec![-1.0, 1.0]]).unwrap()
    }

    #[test]
    fn far_disc_region_is_empty() {
        let supp = ConvexBody::ball(vec![3.5, 0.0], 0.1).unwrap();
        let p = outer_polygon(&d_region(&disc(), &supp).unwrap(), 128).unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn square_polygon_is_exact() {
        let r = RegionSpec::new(vec![square()], "square").unwrap();
        let p = outer_polygon(&r, 4).unwrap();
        let v = p.vertices();
        assert_eq!(v.len(), 4);
        assert!((polygon::area(v) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn lens_tip_distance() {
        let supp = ConvexBody::ball(vec![1.98, 0.0], 0.01).unwrap();
        let p = outer_polygon(&d_region(&disc(), &supp).unwrap(), 256).unwrap();
        let md = p.vertices().iter().map(|q| dist(q, &[1.0, 0.0])).fold(0.0, f64::max);
        assert!(md < 0.2 && md > 0.17, "{md}");
    }

    #[test]
    fn singleton_support_gives_disc() {
        let supp = ConvexBody::ball(vec![0.0, 0.0], 0.0).unwrap();
        let p = outer_polygon(&d_region(&disc(), &supp).unwrap(), 256).unwrap();
        let a = polygon::area(p.vertices());
        assert!((a - core::f64::consts::PI).abs() < 1e-3, "{a}");
    }

    #[test]
    fn opposite_balls_certify_duplicates_do_not() {
        let c = check_pairwise_disjoint(&disc(), &[vec![1.8, 0.0], vec![-1.8, 0.0]], 0.1, 256).unwrap();
        assert!(c.is_certified());
        let c = check_pairwise_disjoint(&disc(), &[vec![1.8, 0.0], vec![1.8, 0.0]], 0.1, 256).unwrap();
        assert_eq!(c, Disjointness::Inconclusive { pair: (0, 1) });
        assert!(check_pairwise_disjoint(&disc(), &[vec![2.5, 0.0]], 0.1, 256).is_err());
    }

    #[test]
    fn square_midpoints_block() {
        for r in [0.2, 0.05, 0.01] {
            let c = check_pairwise_disjoint(&square(), &[vec![2.0 - r, 0.0], vec![0.0, 2.0 - r]], r / 2.0, 256).unwrap();
            assert!(!c.is_certified());
        }
    }

    #[test]
    fn witness_on_disc() {
        let w = find_witness(&disc(), &[1.0, 0.0], 0.5, WitnessBudget::default()).unwrap();
        let WitnessOutcome::Found(c) = w else { panic!("{w:?}") };
        assert!(c.max_dist <= 0.2, "{}", c.max_dist);
        let w = find_witness(&disc(), &[1.0, 0.0], 2.5, WitnessBudget::default()).unwrap();
        let WitnessOutcome::Found(c) = w else { panic!() };
        assert_eq!(c.first_accepted_round, 1);
    }

    #[test]
    fn witness_fails_at_edge_midpoint() {
        let w = find_witness(&square(), &[1.0, 0.0], 0.3, WitnessBudget::default()).unwrap();
        let WitnessOutcome::NotFound { best_max_dist, .. } = w else { panic!() };
        assert!(best_max_dist >= 1.0);
    }

    #[test]
    fn disc_four_points_certify() {
        let out = select_separated_points(&disc(), 4, SeparationBudget::default()).unwrap();
        let SeparationOutcome::Certified(c) = out else { panic!("{out:?}") };
        assert_eq!(c.centers.len(), 4);
        assert!(c.exposed.iter().all(|e| *e));
        let one = select_separated_points(&disc(), 1, SeparationBudget::default()).unwrap();
        assert!(matches!(one, SeparationOutcome::Certified(_)));
    }

    #[test]
    fn square_five_points_blocked() {
        let out = select_separated_points(&square(), 5, SeparationBudget::default()).unwrap();
        let SeparationOutcome::NotFound { involves_non_exposed, blocking_pair, .. } = out else { panic!() };
        assert!(blocking_pair.is_some());
        assert!(involves_non_exposed);
    }
}
