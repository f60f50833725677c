//! Smooth radial bumps, sampled grid functions, norm bookkeeping and the
//! time-side quadrature of bump sums.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{check_dim, invalid, Error, Result};
use crate::math::{cos, dist, exp, floor, log, pow, sqrt, unit_ball_volume, Point, TAU};

fn g(u: f64) -> f64 {
    if u > 0.0 {
        exp(-1.0 / u)
    } else {
        0.0
    }
}

/// `S(u) = g(u) / (g(u) + g(1 − u))` with `g(u) = e^{−1/u}`; 0 below 0, 1 above 1.
pub fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let (a, b) = (g(u), g(1.0 - u));
        a / (a + b)
    }
}

/// Radial profile `ψ`: 1 on `[0, ½]`, 0 on `[1, ∞)`, `S(2 − 2t)` between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpProfile {
    pub dim: usize,
}

impl BumpProfile {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("profile dimension must be positive"));
        }
        Ok(BumpProfile { dim })
    }

    pub fn radial(&self, t: f64) -> f64 {
        if t <= 0.5 {
            1.0
        } else if t >= 1.0 {
            0.0
        } else {
            smooth_step(2.0 - 2.0 * t)
        }
    }

    /// `b̂(x) = ψ(|x|)`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.radial(sqrt(x.iter().map(|v| v * v).sum()))
    }
}

/// One translated and dilated bump `b̂((x − center)/radius)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpSpec {
    pub center: Point,
    pub radius: f64,
}

impl BumpSpec {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid("bump radius must be positive"));
        }
        Ok(BumpSpec { center, radius })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridDomain {
    Fourier,
    Time,
    Matrix,
}

impl GridDomain {
    pub fn tag(self) -> u32 {
        match self {
            GridDomain::Fourier => 0,
            GridDomain::Time => 1,
            GridDomain::Matrix => 2,
        }
    }

    pub fn from_tag(tag: u32) -> Option<Self> {
        match tag {
            0 => Some(GridDomain::Fourier),
            1 => Some(GridDomain::Time),
            2 => Some(GridDomain::Matrix),
            _ => None,
        }
    }
}

/// Complex samples on the nodes `lo + i h`, `i = 0..N`, `h = (hi − lo)/N`
/// of a box; the last axis varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    lo: Vec<f64>,
    hi: Vec<f64>,
    n: Vec<usize>,
    samples: Vec<Complex64>,
    domain: GridDomain,
}

impl GridFunction {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, n: Vec<usize>, samples: Vec<Complex64>, domain: GridDomain) -> Result<Self> {
        check_dim(lo.len(), hi.len())?;
        check_dim(lo.len(), n.len())?;
        if lo.is_empty() {
            return Err(invalid("grid needs at least one axis"));
        }
        for i in 0..lo.len() {
            if !(lo[i] < hi[i]) || n[i] == 0 || !lo[i].is_finite() || !hi[i].is_finite() {
                return Err(invalid(format!("bad grid axis {i}")));
            }
        }
        let total = n.iter().try_fold(1usize, |acc, &v| acc.checked_mul(v)).ok_or_else(|| Error::Capacity("grid size overflows".into()))?;
        check_dim(total, samples.len())?;
        Ok(GridFunction { lo, hi, n, samples, domain })
    }

    pub fn zeros(lo: Vec<f64>, hi: Vec<f64>, n: Vec<usize>, domain: GridDomain) -> Result<Self> {
        let total = n.iter().try_fold(1usize, |acc, &v| acc.checked_mul(v)).ok_or_else(|| Error::Capacity("grid size overflows".into()))?;
        Self::new(lo, hi, n, vec![Complex64::new(0.0, 0.0); total], domain)
    }

    /// Samples a function at every node.
    pub fn from_fn<F: FnMut(&[f64]) -> Complex64>(lo: Vec<f64>, hi: Vec<f64>, n: Vec<usize>, domain: GridDomain, mut f: F) -> Result<Self> {
        let mut out = Self::zeros(lo, hi, n, domain)?;
        let mut x = vec![0.0; out.ndim()];
        for idx in 0..out.samples.len() {
            out.node_into(idx, &mut x);
            out.samples[idx] = f(&x);
        }
        Ok(out)
    }

    pub fn ndim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn shape(&self) -> &[usize] {
        &self.n
    }

    pub fn domain(&self) -> GridDomain {
        self.domain
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / self.n[axis] as f64
    }

    /// Product of the axis spacings.
    pub fn cell_volume(&self) -> f64 {
        (0..self.ndim()).map(|a| self.spacing(a)).product()
    }

    pub fn node_into(&self, mut idx: usize, x: &mut [f64]) {
        for a in (0..self.ndim()).rev() {
            let i = idx % self.n[a];
            idx /= self.n[a];
            x[a] = self.lo[a] + i as f64 * self.spacing(a);
        }
    }

    pub fn node(&self, idx: usize) -> Point {
        let mut x = vec![0.0; self.ndim()];
        self.node_into(idx, &mut x);
        x
    }

    fn flat(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.n).fold(0, |acc, (i, n)| acc * n + i)
    }

    /// Multilinear interpolation; zero outside the node range.
    pub fn interpolate(&self, x: &[f64]) -> Complex64 {
        let d = self.ndim();
        let mut base = [0usize; 8];
        let mut frac = [0.0f64; 8];
        if d > 8 {
            return Complex64::new(0.0, 0.0);
        }
        for a in 0..d {
            let u = (x[a] - self.lo[a]) / self.spacing(a);
            let f = floor(u);
            if !(f >= 0.0) || f > (self.n[a] - 1) as f64 {
                if f == -1.0 {
                    // Between the virtual node -1 (zero) and node 0.
                    base[a] = usize::MAX;
                    frac[a] = u - f;
                    continue;
                }
                return Complex64::new(0.0, 0.0);
            }
            base[a] = f as usize;
            frac[a] = u - f;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        let mut multi = [0usize; 8];
        'corner: for c in 0..(1usize << d) {
            let mut w = 1.0;
            for a in 0..d {
                let bit = (c >> a) & 1;
                let i = if base[a] == usize::MAX {
                    if bit == 0 {
                        continue 'corner;
                    }
                    0
                } else {
                    base[a] + bit
                };
                if i >= self.n[a] {
                    continue 'corner;
                }
                multi[a] = i;
                w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
            }
            if w != 0.0 {
                acc += self.samples[self.flat(&multi[..d])] * w;
            }
        }
        acc
    }

    /// `Σ |f| hⁿ`.
    pub fn l1(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).sum::<f64>() * self.cell_volume()
    }

    /// `Σ |f|² hⁿ`.
    pub fn l2sq(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.cell_volume()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        self.lo == other.lo && self.hi == other.hi && self.n == other.n
    }

    /// Pointwise sum of grid functions on identical grids.
    pub fn sum_of(parts: &[GridFunction]) -> Result<GridFunction> {
        let first = parts.first().ok_or_else(|| invalid("nothing to sum"))?;
        let mut out = first.clone();
        for p in &parts[1..] {
            if !p.same_grid(first) {
                return Err(invalid("grid functions live on different grids"));
            }
            for (a, b) in out.samples.iter_mut().zip(&p.samples) {
                *a += b;
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, c: f64) -> GridFunction {
        let mut out = self.clone();
        for z in &mut out.samples {
            *z *= c;
        }
        out
    }
}

/// Samples `Σ_j ψ(|x − y_j| / r_j)` on the box grid.
pub fn assemble_phi_hat(profile: &BumpProfile, bumps: &[BumpSpec], lo: Vec<f64>, hi: Vec<f64>, n: Vec<usize>) -> Result<GridFunction> {
    let d = profile.dim;
    check_dim(d, lo.len())?;
    let mut out = GridFunction::zeros(lo, hi, n, GridDomain::Fourier)?;
    for (j, b) in bumps.iter().enumerate() {
        check_dim(d, b.center.len())?;
        let mut range = Vec::with_capacity(d);
        for a in 0..d {
            let h = out.spacing(a);
            if 2.0 * b.radius / h < 16.0 {
                return Err(Error::Resolution(format!(
                    "bump {j}: {:.2} samples across the diameter on axis {a}, need 16",
                    2.0 * b.radius / h
                )));
            }
            if b.center[a] - b.radius < out.lo[a] || b.center[a] + b.radius > out.hi[a] - h {
                return Err(invalid(format!("bump {j} is not covered by the grid box")));
            }
            let i0 = floor((b.center[a] - b.radius - out.lo[a]) / h).max(0.0) as usize;
            let i1 = ((floor((b.center[a] + b.radius - out.lo[a]) / h) as usize) + 1).min(out.n[a] - 1);
            range.push((i0, i1));
        }
        let mut multi: Vec<usize> = range.iter().map(|r| r.0).collect();
        let mut x = vec![0.0; d];
        'cells: loop {
            for a in 0..d {
                x[a] = out.lo[a] + multi[a] as f64 * out.spacing(a);
            }
            let v = profile.radial(dist(&x, &b.center) / b.radius);
            if v != 0.0 {
                let k = out.flat(&multi);
                out.samples[k] += v;
            }
            let mut a = d;
            loop {
                if a == 0 {
                    break 'cells;
                }
                a -= 1;
                if multi[a] < range[a].1 {
                    multi[a] += 1;
                    continue 'cells;
                }
                multi[a] = range[a].0;
            }
        }
    }
    Ok(out)
}

/// Two-level Richardson estimate for a quantity converging like `h^p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub coarse: f64,
    pub fine: f64,
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn richardson(coarse: f64, fine: f64, order: f64) -> Self {
        let f = pow(2.0, order) - 1.0;
        let diff = fine - coarse;
        let error = (diff.abs() / f).max(1e-13 * fine.abs());
        Estimate { coarse, fine, value: fine + diff / f, error }
    }

    pub fn exact(v: f64) -> Self {
        Estimate { coarse: v, fine: v, value: v, error: 0.0 }
    }

    /// The two levels differ by at most four error estimates.
    pub fn self_consistent(&self) -> bool {
        (self.fine - self.coarse).abs() <= 4.0 * self.error
    }

    /// Error below the magnitude of the value.
    pub fn reliable(&self) -> bool {
        self.value.is_finite() && self.error <= self.value.abs()
    }
}

/// Envelope `|b(ρ)| ≤ A e^{−λρ}` fitted on the outer shells of a box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub amplitude: f64,
    pub rate: f64,
    /// Radius from which the envelope is used.
    pub radius: f64,
}

impl DecayFit {
    /// Least-squares slope of `ln max|b|` over the given shells, then the
    /// amplitude is raised until the envelope dominates every shell.
    pub fn fit(shell_radius: &[f64], shell_max: &[f64], radius: f64) -> Result<Self> {
        let pts: Vec<(f64, f64)> = shell_radius
            .iter()
            .zip(shell_max)
            .filter(|(_, m)| **m > 0.0)
            .map(|(r, m)| (*r, log(*m)))
            .collect();
        if pts.len() < 2 {
            return Err(Error::Unreliable("too few nonzero shells for a decay fit".into()));
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        let rate = (-slope).max(1.0 / radius);
        let amplitude = pts.iter().map(|p| exp(p.1 + rate * p.0)).fold(0.0, f64::max);
        Ok(DecayFit { amplitude, rate, radius })
    }

    /// Envelope bound on `∫_{|x| > R} |x|^m |b|` in dimension `n ∈ {1, 2}`, `m ∈ {0, 1}`.
    pub fn tail(&self, n: usize, moment: u32) -> f64 {
        let (a, l, r) = (self.amplitude, self.rate, self.radius);
        let e = a * exp(-l * r);
        // ∫_R^∞ ρ^j e^{−λρ} dρ for j = 0, 1, 2.
        let i0 = e / l;
        let i1 = e * (r / l + 1.0 / (l * l));
        let i2 = e * (r * r / l + 2.0 * r / (l * l) + 2.0 / (l * l * l));
        match (n, moment) {
            (1, 0) => 2.0 * i0,
            (1, _) => 2.0 * i1,
            (_, 0) => TAU * i1,
            _ => TAU * i2,
        }
    }
}

/// Norms of the reference bump and its inverse transform.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpNorms {
    pub dim: usize,
    /// `‖b̂‖₁`.
    pub l1_hat: Estimate,
    /// `‖b̂‖₂²`.
    pub l2sq_hat: Estimate,
    /// `‖b‖₂²`.
    pub l2sq_time: Estimate,
    /// `‖|x| b‖₁`, tail included.
    pub l1_weighted: Estimate,
    /// `‖b‖₁`, tail included.
    pub l1_time: Estimate,
    /// `b(0)`.
    pub b0: Estimate,
    /// Tail added to the weighted norm at the fine level.
    pub tail_bound: f64,
    pub decay: DecayFit,
    /// Fourier samples across `[−1, 1]` and padding factor per level.
    pub resolutions: [(usize, usize); 2],
}

impl BumpNorms {
    pub fn estimates(&self) -> [(&'static str, &Estimate); 6] {
        [
            ("l1_hat", &self.l1_hat),
            ("l2sq_hat", &self.l2sq_hat),
            ("l2sq_time", &self.l2sq_time),
            ("l1_weighted", &self.l1_weighted),
            ("l1_time", &self.l1_time),
            ("b0", &self.b0),
        ]
    }

    pub fn ensure_reliable(&self) -> Result<()> {
        for (name, e) in self.estimates() {
            if !e.reliable() {
                return Err(Error::Unreliable(format!("{name}: value {:.3e} error {:.3e}", e.value, e.error)));
            }
        }
        Ok(())
    }
}

/// Bounds on `‖φ_k‖₁` split at `|x| = R / r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeNormBounds {
    pub i1: f64,
    pub i2: f64,
    pub l1_upper: f64,
}

/// `I₁ ≤ c_n R^{n/2} √(k ‖b‖₂²)`, `I₂ ≤ (k/R) ‖|x| b‖₁`.
pub fn phi_time_norms(bumps: &[BumpSpec], norms: &BumpNorms, cutoff: f64) -> Result<TimeNormBounds> {
    if !(cutoff > 0.0) {
        return Err(invalid("cutoff must be positive"));
    }
    let r0 = bumps.first().map(|b| b.radius).ok_or_else(|| invalid("no bumps"))?;
    if bumps.iter().any(|b| b.radius != r0) {
        return Err(invalid("all bumps must share one radius"));
    }
    let k = bumps.len() as f64;
    let n = norms.dim;
    let cn = sqrt(unit_ball_volume(n));
    let i1 = cn * pow(cutoff, n as f64 / 2.0) * sqrt(k * norms.l2sq_time.value);
    let i2 = k / cutoff * norms.l1_weighted.value;
    Ok(TimeNormBounds { i1, i2, l1_upper: i1 + i2 })
}

/// Radial samples of `b = 𝓕⁻¹ b̂` for `n ∈ {1, 2}` with Catmull–Rom lookup.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialTable {
    step: f64,
    values: Vec<f64>,
}

impl RadialTable {
    /// `b(ρ) = ∫ P(ξ) cos(2πρξ) dξ` with `P` the marginal of `b̂` along one
    /// axis, both integrals by midpoint rules of `samples` points on `[−1, 1]`.
    pub fn new(profile: &BumpProfile, samples: usize, rho_max: f64, step: f64) -> Result<Self> {
        if profile.dim > 2 {
            return Err(Error::Unsupported("radial tables cover dimensions 1 and 2".into()));
        }
        if samples < 16 || !(step > 0.0) || !(rho_max > 0.0) {
            return Err(invalid("bad radial table parameters"));
        }
        let dxi = 2.0 / samples as f64;
        let half = samples / 2;
        // Nodes ξ_i = (i + ½) dξ for i ≥ 0; P is even.
        let marginal: Vec<f64> = (0..half)
            .map(|i| {
                let xi = (i as f64 + 0.5) * dxi;
                if profile.dim == 1 {
                    profile.radial(xi)
                } else {
                    (0..samples)
                        .map(|j| {
                            let s = -1.0 + (j as f64 + 0.5) * dxi;
                            profile.radial(sqrt(xi * xi + s * s))
                        })
                        .sum::<f64>()
                        * dxi
                }
            })
            .collect();
        let m = (rho_max / step) as usize + 3;
        let values = (0..m)
            .map(|k| {
                let rho = k as f64 * step;
                2.0 * dxi
                    * marginal
                        .iter()
                        .enumerate()
                        .map(|(i, p)| p * cos(TAU * rho * (i as f64 + 0.5) * dxi))
                        .sum::<f64>()
            })
            .collect();
        Ok(RadialTable { step, values })
    }

    pub fn rho_max(&self) -> f64 {
        (self.values.len() - 3) as f64 * self.step
    }

    pub fn eval(&self, rho: f64) -> f64 {
        let u = rho / self.step;
        let i = floor(u) as usize;
        if i + 2 >= self.values.len() {
            return 0.0;
        }
        let t = u - i as f64;
        let p1 = self.values[i];
        let p2 = self.values[i + 1];
        let p0 = if i == 0 { self.values[1] } else { self.values[i - 1] };
        let p3 = self.values[i + 2];
        0.5 * (2.0 * p1 + (-p0 + p2) * t + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t * t + (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t * t * t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1Options {
    /// Quadrature radius in units of `1/r`.
    pub u_max: f64,
    /// Points per oscillation period at the fine level (coarse uses half).
    pub samples_per_period: f64,
}

impl Default for L1Options {
    fn default() -> Self {
        L1Options { u_max: 16.0, samples_per_period: 8.0 }
    }
}

/// Quadrature of `‖φ‖₁` for `φ(x) = Σ_j rⁿ e^{2πi⟨x, y_j⟩} b(r x)` (planar,
/// common radius) in the variable `u = r x`, with the envelope tail added.
pub fn phi_l1(table: &RadialTable, bumps: &[BumpSpec], decay: &DecayFit, opts: L1Options) -> Result<Estimate> {
    let r = bumps.first().map(|b| b.radius).ok_or_else(|| invalid("no bumps"))?;
    if bumps.iter().any(|b| b.radius != r || b.center.len() != 2) {
        return Err(invalid("planar bumps with one shared radius are required"));
    }
    if opts.u_max > table.rho_max() {
        return Err(invalid("radial table is shorter than the quadrature radius"));
    }
    let k = bumps.len();
    let cx = bumps.iter().map(|b| b.center[0]).sum::<f64>() / k as f64;
    let cy = bumps.iter().map(|b| b.center[1]).sum::<f64>() / k as f64;
    let freqs: Vec<(f64, f64)> = bumps.iter().map(|b| ((b.center[0] - cx) / r, (b.center[1] - cy) / r)).collect();
    let fmax = freqs.iter().map(|f| sqrt(f.0 * f.0 + f.1 * f.1)).fold(0.0, f64::max);
    let level = |s: f64| -> f64 {
        let du = 1.0 / (s * (fmax + 2.0));
        let m = (opts.u_max / du) as i64 + 1;
        let umax2 = opts.u_max * opts.u_max;
        let mut total = 0.0;
        let mut acc = vec![Complex64::new(0.0, 0.0); k];
        let mut steps = vec![Complex64::new(0.0, 0.0); k];
        for (j, f) in freqs.iter().enumerate() {
            steps[j] = Complex64::from_polar(1.0, TAU * f.0 * du);
        }
        // Rows u₂ ≥ 0; the row u₂ = 0 is counted once, others twice by symmetry.
        for iy in 0..=m {
            let u2 = iy as f64 * du;
            if u2 * u2 > umax2 {
                break;
            }
            let w = if iy == 0 { 1.0 } else { 2.0 };
            let span = sqrt(umax2 - u2 * u2);
            let i0 = -((span / du) as i64);
            let u1_0 = i0 as f64 * du;
            for (j, f) in freqs.iter().enumerate() {
                acc[j] = Complex64::from_polar(1.0, TAU * (f.0 * u1_0 + f.1 * u2));
            }
            let mut row = 0.0;
            let mut ix = i0;
            while ix <= -i0 {
                let u1 = ix as f64 * du;
                let rho = sqrt(u1 * u1 + u2 * u2);
                let b = table.eval(rho).abs();
                let s: Complex64 = acc.iter().sum();
                row += b * s.norm();
                for j in 0..k {
                    acc[j] *= steps[j];
                }
                if (ix - i0) % 256 == 255 {
                    // Renormalize against drift of the phase recurrence.
                    for (j, f) in freqs.iter().enumerate() {
                        let un = (ix + 1) as f64 * du;
                        acc[j] = Complex64::from_polar(1.0, TAU * (f.0 * un + f.1 * u2));
                    }
                }
                ix += 1;
            }
            total += w * row;
        }
        total * du * du
    };
    // Beyond u_max, |φ| ≤ k|b|: the table covers the annulus out to its end,
    // the envelope covers the rest.
    let rho_end = table.rho_max().max(opts.u_max);
    let dr = table.step;
    let steps_out = ((rho_end - opts.u_max) / dr) as usize;
    let annulus: f64 = (0..steps_out)
        .map(|i| {
            let rho = opts.u_max + (i as f64 + 0.5) * dr;
            TAU * rho * table.eval(rho).abs() * dr
        })
        .sum();
    let tail = k as f64 * (annulus + DecayFit { radius: decay.radius.max(rho_end), ..*decay }.tail(2, 0));
    let coarse = level(opts.samples_per_period / 2.0) + tail;
    let fine = level(opts.samples_per_period) + tail;
    Ok(Estimate::richardson(coarse, fine, 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::PI;

    #[test]
    fn profile_values() {
        let p = BumpProfile::new(2).unwrap();
        assert_eq!(p.eval(&[0.0, 0.0]), 1.0);
        assert_eq!(p.eval(&[1.2, 0.0]), 0.0);
        assert!((p.radial(0.75) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for i in 0..=100 {
            let v = p.radial(0.5 + 0.005 * i as f64);
            assert!(v <= prev && (0.0..=1.0).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn assembly_support_and_linearity() {
        let p = BumpProfile::new(2).unwrap();
        let b = BumpSpec::new(vec![0.0, 0.0], 0.5).unwrap();
        let g = assemble_phi_hat(&p, core::slice::from_ref(&b), vec![-1.0, -1.0], vec![1.0, 1.0], vec![64, 64]).unwrap();
        assert!((g.interpolate(&[0.0, 0.0]).re - 1.0).abs() < 1e-15);
        for idx in 0..g.samples().len() {
            let x = g.node(idx);
            if dist(&x, &b.center) >= 0.5 {
                assert_eq!(g.samples()[idx], Complex64::new(0.0, 0.0));
            }
        }
        let g2 = assemble_phi_hat(&p, &[b.clone(), b.clone()], vec![-1.0, -1.0], vec![1.0, 1.0], vec![64, 64]).unwrap();
        assert!((g2.max_abs() - 2.0).abs() < 1e-15);
        let coarse = assemble_phi_hat(&p, &[b], vec![-1.0, -1.0], vec![1.0, 1.0], vec![8, 8]);
        assert!(matches!(coarse, Err(Error::Resolution(_))));
    }

    #[test]
    fn interpolation_is_exact_on_nodes_and_zero_outside() {
        let g = GridFunction::from_fn(vec![0.0], vec![1.0], vec![4], GridDomain::Fourier, |x| Complex64::new(x[0], 0.0)).unwrap();
        assert_eq!(g.interpolate(&[0.5]).re, 0.5);
        assert!((g.interpolate(&[0.375]).re - 0.375).abs() < 1e-15);
        assert_eq!(g.interpolate(&[2.0]).re, 0.0);
        assert_eq!(g.interpolate(&[-0.5]).re, 0.0);
        // Between the last node and the implicit zero node beyond it.
        assert!((g.interpolate(&[0.8]).re - 0.6).abs() < 1e-15);
    }

    #[test]
    fn richardson_bookkeeping() {
        let e = Estimate::richardson(1.0, 1.03, 2.0);
        assert!((e.value - 1.04).abs() < 1e-12);
        assert!((e.error - 0.01).abs() < 1e-12);
        assert!(e.self_consistent() && e.reliable());
    }

    #[test]
    fn decay_fit_dominates() {
        let r: Vec<f64> = (0..10).map(|i| 10.0 + i as f64).collect();
        let m: Vec<f64> = r.iter().map(|x| 3.0 * exp(-0.5 * x) * (1.0 + 0.1 * cos(*x))).collect();
        let f = DecayFit::fit(&r, &m, 19.0).unwrap();
        for (x, v) in r.iter().zip(&m) {
            assert!(f.amplitude * exp(-f.rate * x) >= v * (1.0 - 1e-12));
        }
        assert!((f.rate - 0.5).abs() < 0.05);
    }

    #[test]
    fn radial_table_origin_is_l1() {
        let p = BumpProfile::new(2).unwrap();
        let t = RadialTable::new(&p, 512, 4.0, 1.0 / 256.0).unwrap();
        let l1: f64 = {
            let n = 512;
            let h = 2.0 / n as f64;
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += p.eval(&[-1.0 + (i as f64 + 0.5) * h, -1.0 + (j as f64 + 0.5) * h]);
                }
            }
            s * h * h
        };
        assert!((t.eval(0.0) - l1).abs() < 1e-9, "{} {}", t.eval(0.0), l1);
        assert!(l1 > PI / 4.0 && l1 < PI);
    }

    #[test]
    fn time_bounds_shape() {
        let norms = BumpNorms {
            dim: 2,
            l1_hat: Estimate::exact(1.0),
            l2sq_hat: Estimate::exact(1.0),
            l2sq_time: Estimate::exact(1.0),
            l1_weighted: Estimate::exact(2.0),
            l1_time: Estimate::exact(1.0),
            b0: Estimate::exact(1.0),
            tail_bound: 0.0,
            decay: DecayFit { amplitude: 1.0, rate: 1.0, radius: 1.0 },
            resolutions: [(1, 1), (2, 2)],
        };
        let b = [BumpSpec::new(vec![0.0, 0.0], 0.1).unwrap()];
        let t = phi_time_norms(&b, &norms, 4.0).unwrap();
        assert!((t.i1 - sqrt(PI) * 4.0).abs() < 1e-12);
        assert!((t.i2 - 0.5).abs() < 1e-15);
        let mixed = [BumpSpec::new(vec![0.0, 0.0], 0.1).unwrap(), BumpSpec::new(vec![1.0, 0.0], 0.2).unwrap()];
        assert!(phi_time_norms(&mixed, &norms, 1.0).is_err());
    }
}
