//! Time-domain synthesis of the reference bump by inverse FFT, and the
//! two-resolution norm table derived from it.

use std::f64::consts::TAU;

use nehari_core::bump::{BumpNorms, BumpProfile, DecayFit, Estimate, GridDomain, GridFunction};
use nehari_core::Error;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::Result;

/// Largest number of samples a synthesis grid may hold.
pub const SAMPLE_CAP: usize = 1 << 24;
pub const DEFAULT_RESOLUTIONS: [(usize, usize); 2] = [(128, 4), (256, 8)];
const SHELLS: usize = 16;
const RICHARDSON_ORDER: f64 = 2.0;

/// Fourier samples of `b̂` on `[−pad, pad)ⁿ` with spacing `2 / n_samples`.
pub fn sample_bump_hat(profile: &BumpProfile, n_samples: usize, pad: usize) -> Result<GridFunction> {
    check_grid(profile, n_samples, pad)?;
    let m = n_samples * pad;
    let d = profile.dim;
    let lo = vec![-(pad as f64); d];
    let hi = vec![pad as f64; d];
    Ok(GridFunction::from_fn(lo, hi, vec![m; d], GridDomain::Fourier, |x| Complex64::new(profile.eval(x), 0.0))?)
}

fn check_grid(profile: &BumpProfile, n_samples: usize, pad: usize) -> Result<()> {
    if !n_samples.is_power_of_two() || n_samples < 16 {
        return Err(Error::InvalidArgument(format!("sample count {n_samples} must be a power of two, at least 16")).into());
    }
    if pad < 4 {
        return Err(Error::InvalidArgument(format!("padding factor {pad} is below 4")).into());
    }
    if profile.dim == 0 || profile.dim > 2 {
        return Err(Error::Unsupported(format!("synthesis covers dimensions 1 and 2, got {}", profile.dim)).into());
    }
    let total = (n_samples * pad).checked_pow(profile.dim as u32).unwrap_or(usize::MAX);
    if total > SAMPLE_CAP {
        return Err(Error::Capacity(format!("{total} samples exceed the cap of {SAMPLE_CAP}")).into());
    }
    Ok(())
}

/// `b(x) = ∫ b̂(ξ) e^{2πi⟨x, ξ⟩} dξ` on the dual grid `x = k / (2·pad)`,
/// `|x_i| ≤ n_samples / 4`, centered so the origin is a node.
pub fn synthesize_time_domain(profile: &BumpProfile, n_samples: usize, pad: usize) -> Result<GridFunction> {
    let hat = sample_bump_hat(profile, n_samples, pad)?;
    inverse_transform(&hat)
}

/// Continuous-normalized inverse transform of a Fourier grid with a square
/// sample count per axis.
pub fn inverse_transform(hat: &GridFunction) -> Result<GridFunction> {
    let d = hat.ndim();
    let m = hat.shape()[0];
    if hat.shape().iter().any(|&s| s != m) || !m.is_multiple_of(2) {
        return Err(Error::InvalidArgument("inverse transform needs an even, equal sample count per axis".into()).into());
    }
    let hxi = hat.spacing(0);
    let hx = 1.0 / (m as f64 * hxi);
    let mut data = hat.samples().to_vec();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_inverse(m);
    match d {
        1 => fft.process(&mut data),
        2 => {
            fft.process(&mut data);
            let mut col = vec![Complex64::new(0.0, 0.0); m];
            for c in 0..m {
                for r in 0..m {
                    col[r] = data[r * m + c];
                }
                fft.process(&mut col);
                for r in 0..m {
                    data[r * m + c] = col[r];
                }
            }
        }
        _ => return Err(Error::Unsupported("inverse transform covers dimensions 1 and 2".into()).into()),
    }
    let weight = hxi.powi(d as i32);
    let half = m / 2;
    // Node i of the output sits at x = (i − m/2)·hx, i.e. FFT bin (i + m/2) mod m.
    let bin = |i: usize| (i + half) % m;
    let coord = |i: usize| (i as f64 - half as f64) * hx;
    let lo_xi: Vec<f64> = hat.lo().to_vec();
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    match d {
        1 => {
            for i in 0..m {
                let x = coord(i);
                out[i] = data[bin(i)] * weight * Complex64::from_polar(1.0, TAU * lo_xi[0] * x);
            }
        }
        _ => {
            for i in 0..m {
                for j in 0..m {
                    let (x, y) = (coord(i), coord(j));
                    let phase = Complex64::from_polar(1.0, TAU * (lo_xi[0] * x + lo_xi[1] * y));
                    out[i * m + j] = data[bin(i) * m + bin(j)] * weight * phase;
                }
            }
        }
    }
    let lo = vec![-(half as f64) * hx; d];
    let hi = vec![half as f64 * hx; d];
    Ok(GridFunction::new(lo, hi, vec![m; d], out, GridDomain::Time)?)
}

/// Norms at one resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelNorms {
    pub n_samples: usize,
    pub pad: usize,
    pub l1_hat: f64,
    pub l2sq_hat: f64,
    pub l2sq_time: f64,
    pub l1_time: f64,
    pub l1_weighted: f64,
    pub b0: f64,
    pub decay: DecayFit,
    /// Envelope tails added to `l1_time` and `l1_weighted`.
    pub tails: (f64, f64),
}

pub fn level_norms(profile: &BumpProfile, n_samples: usize, pad: usize) -> Result<LevelNorms> {
    let hat = sample_bump_hat(profile, n_samples, pad)?;
    let time = inverse_transform(&hat)?;
    let d = profile.dim;
    let radius = time.hi()[0];
    let inner = 0.75 * radius;
    let mut shell_max = vec![0.0f64; SHELLS];
    let (mut l1, mut l1w, mut l2) = (0.0, 0.0, 0.0);
    let mut b0 = 0.0;
    let mut x = vec![0.0; d];
    for (idx, v) in time.samples().iter().enumerate() {
        time.node_into(idx, &mut x);
        let rho = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        let a = v.norm();
        l1 += a;
        l1w += rho * a;
        l2 += a * a;
        if rho == 0.0 {
            b0 = v.re;
        }
        if rho >= inner && rho < radius {
            let s = (((rho - inner) / (radius - inner)) * SHELLS as f64) as usize;
            shell_max[s.min(SHELLS - 1)] = shell_max[s.min(SHELLS - 1)].max(a);
        }
    }
    let cell = time.cell_volume();
    let centers: Vec<f64> = (0..SHELLS).map(|s| inner + (s as f64 + 0.5) * (radius - inner) / SHELLS as f64).collect();
    let decay = DecayFit::fit(&centers, &shell_max, radius)?;
    let tails = (decay.tail(d, 0), decay.tail(d, 1));
    Ok(LevelNorms {
        n_samples,
        pad,
        l1_hat: hat.l1(),
        l2sq_hat: hat.l2sq(),
        l2sq_time: l2 * cell,
        l1_time: l1 * cell + tails.0,
        l1_weighted: l1w * cell + tails.1,
        b0,
        decay,
        tails,
    })
}

/// Norm table with Richardson extrapolation across two resolutions.
pub fn bump_norms(profile: &BumpProfile, resolutions: [(usize, usize); 2]) -> Result<BumpNorms> {
    let [(n0, p0), (n1, p1)] = resolutions;
    if !(n1 >= n0 && p1 >= p0 && (n1, p1) != (n0, p0)) {
        return Err(Error::InvalidArgument("resolutions must be strictly increasing".into()).into());
    }
    let c = level_norms(profile, n0, p0)?;
    let f = level_norms(profile, n1, p1)?;
    let r = |a: f64, b: f64| Estimate::richardson(a, b, RICHARDSON_ORDER);
    Ok(BumpNorms {
        dim: profile.dim,
        l1_hat: r(c.l1_hat, f.l1_hat),
        l2sq_hat: r(c.l2sq_hat, f.l2sq_hat),
        l2sq_time: r(c.l2sq_time, f.l2sq_time),
        l1_weighted: r(c.l1_weighted, f.l1_weighted),
        l1_time: r(c.l1_time, f.l1_time),
        b0: r(c.b0, f.b0),
        tail_bound: f.tails.1,
        decay: f.decay,
        resolutions,
    })
}
