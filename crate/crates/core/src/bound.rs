//! Closed-form lower bound on the Nehari constant from the bump norms.

use alloc::vec::Vec;

use crate::bump::BumpNorms;
use crate::error::{check_dim, invalid, Result};
use crate::math::{log_space, pow, sqrt, unit_ball_volume};

pub const CUTOFF_SWEEP: (f64, f64, usize) = (0.1, 100.0, 32);

/// `k ‖b̂‖₂² / (‖b̂‖₁ (c_n R^{n/2} √(k ‖b‖₂²) + (k/R) ‖|x| b‖₁))`
/// with `c_n = √vol(B_n)`.
pub fn analytic_bound(norms: &BumpNorms, n: usize, k: f64, cutoff: f64) -> Result<f64> {
    check_dim(norms.dim, n)?;
    norms.ensure_reliable()?;
    if !(k >= 1.0) || !k.is_finite() {
        return Err(invalid("k must be a finite count of at least one"));
    }
    if !(cutoff > 0.0) || !cutoff.is_finite() {
        return Err(invalid("cutoff must be positive"));
    }
    let cn = sqrt(unit_ball_volume(n));
    let i1 = cn * pow(cutoff, n as f64 / 2.0) * sqrt(k * norms.l2sq_time.value);
    let i2 = k / cutoff * norms.l1_weighted.value;
    Ok(k * norms.l2sq_hat.value / (norms.l1_hat.value * (i1 + i2)))
}

/// Limit of [`analytic_bound`] as `k → ∞`: `R ‖b̂‖₂² / (‖b̂‖₁ ‖|x| b‖₁)`.
pub fn analytic_limit(norms: &BumpNorms, cutoff: f64) -> Result<f64> {
    norms.ensure_reliable()?;
    if !(cutoff > 0.0) {
        return Err(invalid("cutoff must be positive"));
    }
    Ok(cutoff * norms.l2sq_hat.value / (norms.l1_hat.value * norms.l1_weighted.value))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestBound {
    pub value: f64,
    pub cutoff: f64,
}

pub fn default_cutoffs() -> Vec<f64> {
    let (lo, hi, m) = CUTOFF_SWEEP;
    log_space(lo, hi, m)
}

/// Maximum of [`analytic_bound`] over the given cutoffs.
pub fn best_bound(norms: &BumpNorms, n: usize, k: f64, cutoffs: &[f64]) -> Result<BestBound> {
    if cutoffs.is_empty() {
        return Err(invalid("empty cutoff sweep"));
    }
    let mut best = BestBound { value: f64::NEG_INFINITY, cutoff: cutoffs[0] };
    for &c in cutoffs {
        let v = analytic_bound(norms, n, k, c)?;
        if v > best.value {
            best = BestBound { value: v, cutoff: c };
        }
    }
    Ok(best)
}
