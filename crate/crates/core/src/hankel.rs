//! Discretized Hankel operators `f ↦ ∫_Ω f(y) φ̂(x + y) dy` on lattice
//! points of a domain, and their spectral norms.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bump::GridFunction;
use crate::domain::ConvexBody;
use crate::error::{check_dim, invalid, Error, Result};
use crate::math::{ceil, floor, pow, sqrt, Point};
use crate::region::RegionSpec;

pub const DEFAULT_CAPACITY: usize = 4096;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const SEED: u64 = 0x5EED;
const BLOCK: usize = 4;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        check_dim(rows * cols, data.len())?;
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    /// `y = M x`.
    pub fn mul_vec(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// `y = Mᴴ x`.
    pub fn mul_adj_vec(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (l, xl) in x.iter().enumerate() {
            let row = &self.data[l * self.cols..(l + 1) * self.cols];
            for (yi, a) in y.iter_mut().zip(row) {
                *yi += a.conj() * xl;
            }
        }
    }

    pub fn frobenius(&self) -> f64 {
        sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    /// Entrywise `M = Mᵀ` (complex symmetric, no conjugation).
    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMethod {
    /// Block power iteration on `MᴴM` with Rayleigh–Ritz extraction.
    SubspaceIteration,
    Trivial,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormEstimate {
    pub sigma_max: f64,
    pub iterations: usize,
    /// `|σ_prev − σ| / σ` at the last step.
    pub residual: f64,
    pub hs_norm: f64,
    pub method: NormMethod,
    pub converged: bool,
}

fn cdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn cnorm(a: &[Complex64]) -> f64 {
    sqrt(a.iter().map(|z| z.norm_sqr()).sum())
}

/// Modified Gram–Schmidt with one reorthogonalization pass; drops null columns.
fn orthonormalize(cols: &mut Vec<Vec<Complex64>>) {
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(cols.len());
    for mut v in cols.drain(..) {
        let n0 = cnorm(&v);
        for _ in 0..2 {
            for q in &out {
                let c = cdot(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let n = cnorm(&v);
        if n > 1e-13 * n0 && n > 0.0 {
            v.iter_mut().for_each(|z| *z /= n);
            out.push(v);
        }
    }
    *cols = out;
}

/// Eigenpairs of a real symmetric matrix by cyclic Jacobi, descending.
fn jacobi(mut a: Vec<f64>, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i * n + j] * a[i * n + j]).sum();
        let diag: f64 = (0..n).map(|i| a[i * n + i] * a[i * n + i]).sum();
        if off <= 1e-30 * diag.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]));
    let vals = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vecs = vec![0.0; n * n];
    for (c, &i) in order.iter().enumerate() {
        for k in 0..n {
            vecs[k * n + c] = v[k * n + i];
        }
    }
    (vals, vecs)
}

/// Eigenpairs of a `p × p` Hermitian matrix via its real `2p × 2p` embedding.
/// Returns descending eigenvalues and column eigenvectors (one per pair).
fn hermitian_eigen(g: &[Complex64], p: usize) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let m = 2 * p;
    let mut a = vec![0.0; m * m];
    for i in 0..p {
        for j in 0..p {
            let z = g[i * p + j];
            a[i * m + j] = z.re;
            a[(i + p) * m + (j + p)] = z.re;
            a[i * m + (j + p)] = -z.im;
            a[(i + p) * m + j] = z.im;
        }
    }
    let (vals, vecs) = jacobi(a, m);
    let mut out_vals = Vec::with_capacity(p);
    let mut out_vecs: Vec<Vec<Complex64>> = Vec::with_capacity(p);
    for c in 0..m {
        if out_vals.len() == p {
            break;
        }
        let v: Vec<Complex64> = (0..p).map(|k| Complex64::new(vecs[k * m + c], vecs[(k + p) * m + c])).collect();
        let mut cols = out_vecs.clone();
        cols.push(v);
        orthonormalize(&mut cols);
        if cols.len() > out_vecs.len() {
            out_vecs = cols;
            out_vals.push(vals[c]);
        }
    }
    (out_vals, out_vecs)
}

fn start_block(n: usize, p: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut unit = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
    let mut cols = vec![vec![Complex64::new(1.0, 0.0); n]];
    for _ in 1..p {
        cols.push((0..n).map(|_| Complex64::new(unit(), unit())).collect());
    }
    cols
}

/// Largest singular value by subspace iteration on `MᴴM` (block of four:
/// the constant vector plus seeded pseudo-random vectors).
pub fn op_norm(m: &ComplexMatrix, tol: f64, max_iter: usize) -> Result<NormEstimate> {
    op_norm_seeded(m, tol, max_iter, SEED)
}

/// [`op_norm`] with an explicit seed for the pseudo-random start vectors.
pub fn op_norm_seeded(m: &ComplexMatrix, tol: f64, max_iter: usize, seed: u64) -> Result<NormEstimate> {
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let hs = m.frobenius();
    let n = m.cols();
    if hs == 0.0 || n == 0 || m.rows() == 0 {
        return Ok(NormEstimate { sigma_max: 0.0, iterations: 0, residual: 0.0, hs_norm: hs, method: NormMethod::Trivial, converged: true });
    }
    let p = BLOCK.min(n);
    let mut v = start_block(n, p, seed);
    orthonormalize(&mut v);
    let mut sigma_prev = 0.0;
    let mut sigma = 0.0;
    let mut residual = f64::INFINITY;
    let mut w: Vec<Vec<Complex64>> = Vec::new();
    for it in 1..=max_iter {
        w = v
            .iter()
            .map(|col| {
                let mut y = vec![Complex64::new(0.0, 0.0); m.rows()];
                m.mul_vec(col, &mut y);
                y
            })
            .collect();
        let q = w.len();
        let mut g = vec![Complex64::new(0.0, 0.0); q * q];
        for i in 0..q {
            for j in 0..q {
                g[i * q + j] = cdot(&w[i], &w[j]);
            }
        }
        let (vals, vecs) = hermitian_eigen(&g, q);
        sigma = sqrt(vals.first().copied().unwrap_or(0.0).max(0.0));
        residual = if sigma > 0.0 { (sigma - sigma_prev).abs() / sigma } else { 0.0 };
        if sigma == 0.0 || (it >= 3 && residual < tol) {
            return Ok(NormEstimate { sigma_max: sigma.min(hs), iterations: it, residual, hs_norm: hs, method: NormMethod::SubspaceIteration, converged: true });
        }
        sigma_prev = sigma;
        // Next block: Mᴴ (W C), i.e. MᴴM applied to the Ritz vectors.
        let mut next = Vec::with_capacity(vecs.len());
        for c in &vecs {
            let mut wc = vec![Complex64::new(0.0, 0.0); m.rows()];
            for (wi, ci) in w.iter().zip(c) {
                for (a, b) in wc.iter_mut().zip(wi) {
                    *a += b * ci;
                }
            }
            let mut y = vec![Complex64::new(0.0, 0.0); n];
            m.mul_adj_vec(&wc, &mut y);
            next.push(y);
        }
        orthonormalize(&mut next);
        if next.is_empty() {
            break;
        }
        v = next;
    }
    let _ = w;
    Ok(NormEstimate { sigma_max: sigma.min(hs), iterations: max_iter, residual, hs_norm: hs, method: NormMethod::SubspaceIteration, converged: false })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HankelOptions {
    pub spacing: f64,
    pub capacity: usize,
    /// Permit more rows than `capacity`.
    pub allow_large: bool,
    /// Smallest feature radius of the symbol; requires `radius / spacing ≥ 8`.
    pub feature_radius: Option<f64>,
}

impl HankelOptions {
    pub fn new(spacing: f64) -> Self {
        HankelOptions { spacing, capacity: DEFAULT_CAPACITY, allow_large: false, feature_radius: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HankelMatrix {
    pub points: Vec<Point>,
    pub spacing: f64,
    pub weight: f64,
    pub matrix: ComplexMatrix,
    pub label: String,
}

/// Midpoint lattice `(i + ½) h` inside the domain (and the region when given).
pub fn lattice_points(omega: &ConvexBody, region: Option<&RegionSpec>, spacing: f64) -> Result<Vec<Point>> {
    if !(spacing > 0.0) {
        return Err(invalid("spacing must be positive"));
    }
    let (lo, hi) = omega
        .bounding_box()
        .ok_or_else(|| Error::Unsupported("unbounded domains need a truncation window".into()))?;
    let d = omega.dim();
    if let Some(r) = region {
        check_dim(d, r.dim())?;
    }
    let ranges: Vec<(i64, i64)> = (0..d)
        .map(|a| ((floor(lo[a] / spacing - 0.5)) as i64, (ceil(hi[a] / spacing - 0.5)) as i64))
        .collect();
    let fast = omega.simplified();
    let mut out = Vec::new();
    let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    let mut x = vec![0.0; d];
    'cells: loop {
        for a in 0..d {
            x[a] = (idx[a] as f64 + 0.5) * spacing;
        }
        if fast.contains(&x)? && region.map_or(Ok(true), |r| r.contains(&x))? {
            out.push(x.clone());
        }
        let mut a = d;
        loop {
            if a == 0 {
                break 'cells;
            }
            a -= 1;
            if idx[a] < ranges[a].1 {
                idx[a] += 1;
                continue 'cells;
            }
            idx[a] = ranges[a].0;
        }
    }
    Ok(out)
}

/// `M[i][j] = hⁿ φ̂(x_i + x_j)` on the lattice of the domain (restricted to
/// `region` when given), `φ̂` by multilinear interpolation.
pub fn build_hankel(phi_hat: &GridFunction, omega: &ConvexBody, region: Option<&RegionSpec>, opts: HankelOptions) -> Result<HankelMatrix> {
    check_dim(omega.dim(), phi_hat.ndim())?;
    if let Some(r) = opts.feature_radius {
        if r / opts.spacing < 8.0 {
            return Err(Error::Resolution(format!("{:.2} lattice samples per feature radius, need 8", r / opts.spacing)));
        }
    }
    let points = lattice_points(omega, region, opts.spacing)?;
    let n = points.len();
    if n == 0 {
        return Err(invalid("the lattice misses the region"));
    }
    if n > opts.capacity && !opts.allow_large {
        return Err(Error::Capacity(format!("{n} rows exceed the cap of {}", opts.capacity)));
    }
    let weight = pow(opts.spacing, omega.dim() as f64);
    let mut matrix = ComplexMatrix::zeros(n, n);
    let mut s = vec![0.0; omega.dim()];
    for i in 0..n {
        for j in i..n {
            for (k, v) in s.iter_mut().enumerate() {
                *v = points[i][k] + points[j][k];
            }
            let v = phi_hat.interpolate(&s) * weight;
            matrix.set(i, j, v);
            matrix.set(j, i, v);
        }
    }
    let label = region.map_or_else(|| String::from("full domain"), |r| r.label.clone());
    Ok(HankelMatrix { points, spacing: opts.spacing, weight, matrix, label })
}

#[derive(Debug, Clone, PartialEq)]
pub enum BlockMaxStatus {
    Checked { relative_gap: f64, pass: bool },
    /// Regions were not certified disjoint; nothing asserted.
    Unchecked,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockMaxReport {
    pub whole: Option<NormEstimate>,
    pub parts: Vec<NormEstimate>,
    pub whole_rows: usize,
    pub part_rows: Vec<usize>,
    pub status: BlockMaxStatus,
}

/// Compares the norm of the summed symbol on the full lattice with the
/// largest norm of the parts on their own regions.
pub fn verify_block_max(
    parts: &[GridFunction],
    omega: &ConvexBody,
    regions: &[RegionSpec],
    certified: bool,
    opts: HankelOptions,
    tol: f64,
) -> Result<BlockMaxReport> {
    check_dim(parts.len(), regions.len())?;
    if !certified {
        return Ok(BlockMaxReport { whole: None, parts: Vec::new(), whole_rows: 0, part_rows: Vec::new(), status: BlockMaxStatus::Unchecked });
    }
    let total = GridFunction::sum_of(parts)?;
    let whole_m = build_hankel(&total, omega, None, opts)?;
    let whole = op_norm(&whole_m.matrix, DEFAULT_TOLERANCE * 1e-2, 5000)?;
    let mut estimates = Vec::with_capacity(parts.len());
    let mut rows = Vec::with_capacity(parts.len());
    for (p, r) in parts.iter().zip(regions) {
        let m = build_hankel(p, omega, Some(r), opts)?;
        rows.push(m.points.len());
        estimates.push(op_norm(&m.matrix, DEFAULT_TOLERANCE * 1e-2, 5000)?);
    }
    let best = estimates.iter().map(|e| e.sigma_max).fold(0.0, f64::max);
    let gap = (whole.sigma_max - best).abs();
    let relative_gap = if best > 0.0 { gap / best } else { gap };
    Ok(BlockMaxReport {
        whole_rows: whole_m.points.len(),
        whole: Some(whole),
        parts: estimates,
        part_rows: rows,
        status: BlockMaxStatus::Checked { relative_gap, pass: relative_gap <= tol },
    })
}

/// `‖φ̂‖₂² / ‖φ‖₁`.
pub fn symbol_lower_bound(phi_hat: &GridFunction, phi_l1: f64) -> Result<f64> {
    let num = phi_hat.l2sq();
    if num == 0.0 {
        return Ok(0.0);
    }
    if !(phi_l1 > 0.0) {
        return Err(invalid("the time-side L1 norm must be positive"));
    }
    Ok(num / phi_l1)
}
