//! The ratio sweep: certified bump configurations on a planar domain, the
//! measured Nehari ratio per `k`, and the closed-form lower bound beside it.

use std::path::Path;
use std::thread;

use nehari_core::bound::best_bound;
use nehari_core::bump::{
    assemble_phi_hat, phi_l1, BumpNorms, BumpProfile, BumpSpec, Estimate, GridFunction, L1Options, RadialTable,
};
use nehari_core::domain::ConvexBody;
use nehari_core::hankel::{build_hankel, op_norm_seeded, HankelMatrix, HankelOptions, NormEstimate, SEED};
use nehari_core::math::log_space;
use nehari_core::region::{d_region, select_separated_points, SeparationBudget, SeparationOutcome};
use nehari_core::Error;
use serde::{Deserialize, Serialize};

use crate::error::{NehariError, Result};
use crate::formats::{write_atomic, BodyDesc};
use crate::synthesis::{bump_norms, DEFAULT_RESOLUTIONS};

pub const SCHEMA_VERSION: u32 = 1;
/// Global slack on dominance and monotonicity.
pub const GLOBAL_SLACK: f64 = 0.02;
pub const CSV_COLUMNS: [&str; 9] =
    ["k", "r", "l2sq_hat", "l1_time", "hankel_norm", "ratio", "analytic_bound", "certificates_ok", "status"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Fourier samples per bump radius for `φ̂`.
    pub fourier_per_radius: usize,
    /// Lattice points per bump radius for the Hankel matrix.
    pub lattice_per_radius: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { fourier_per_radius: 32, lattice_per_radius: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CutoffSweep {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Default for CutoffSweep {
    fn default() -> Self {
        let (lo, hi, count) = nehari_core::bound::CUTOFF_SWEEP;
        CutoffSweep { lo, hi, count }
    }
}

impl CutoffSweep {
    pub fn values(&self) -> Vec<f64> {
        log_space(self.lo, self.hi, self.count)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Budgets {
    pub candidates: usize,
    pub r_start: f64,
    pub shrink: f64,
    pub r_floor: f64,
    pub directions: usize,
    pub hankel_capacity: usize,
    pub allow_large: bool,
    pub norm_tolerance: f64,
    pub max_iterations: usize,
    pub l1_u_max: f64,
    pub l1_samples_per_period: f64,
    pub radial_samples: usize,
    pub radial_step: f64,
}

impl Default for Budgets {
    fn default() -> Self {
        let s = SeparationBudget::default();
        let l = L1Options::default();
        Budgets {
            candidates: s.candidates,
            r_start: s.r_start,
            shrink: s.shrink,
            r_floor: s.r_floor,
            directions: s.directions,
            hankel_capacity: nehari_core::hankel::DEFAULT_CAPACITY,
            allow_large: false,
            norm_tolerance: nehari_core::hankel::DEFAULT_TOLERANCE,
            max_iterations: 20_000,
            l1_u_max: l.u_max,
            l1_samples_per_period: l.samples_per_period,
            radial_samples: 512,
            radial_step: 1.0 / 128.0,
        }
    }
}

impl Budgets {
    pub fn separation(&self) -> SeparationBudget {
        SeparationBudget {
            candidates: self.candidates,
            r_start: self.r_start,
            shrink: self.shrink,
            r_floor: self.r_floor,
            directions: self.directions,
        }
    }

    pub fn l1(&self) -> L1Options {
        L1Options { u_max: self.l1_u_max, samples_per_period: self.l1_samples_per_period }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub omega: BodyDesc,
    pub k_sweep: Vec<usize>,
    pub grid: GridConfig,
    /// `(samples across [−1, 1], padding factor)` for the two norm levels.
    pub resolutions: [(usize, usize); 2],
    pub r_sweep: CutoffSweep,
    pub budgets: Budgets,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            omega: BodyDesc::Open { body: Box::new(BodyDesc::Ball { center: vec![0.0, 0.0], radius: 1.0 }) },
            k_sweep: vec![1, 2, 4, 8],
            grid: GridConfig::default(),
            resolutions: DEFAULT_RESOLUTIONS,
            r_sweep: CutoffSweep::default(),
            budgets: Budgets::default(),
            seed: SEED,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(NehariError::schema("schema_version", format!("expected {SCHEMA_VERSION}, got {}", self.schema_version)));
        }
        if self.k_sweep.contains(&0) {
            return Err(NehariError::schema("k_sweep", "counts must be positive"));
        }
        if self.k_sweep.windows(2).any(|w| w[1] <= w[0]) {
            return Err(NehariError::schema("k_sweep", "must be strictly increasing"));
        }
        if self.grid.lattice_per_radius < 8 {
            return Err(NehariError::schema("grid.lattice_per_radius", "at least 8 lattice points per radius are required"));
        }
        if self.grid.fourier_per_radius < 8 {
            return Err(NehariError::schema("grid.fourier_per_radius", "at least 8 Fourier samples per radius are required"));
        }
        if !(self.r_sweep.lo > 0.0 && self.r_sweep.hi >= self.r_sweep.lo && self.r_sweep.count > 0) {
            return Err(NehariError::schema("r_sweep", "need 0 < lo ≤ hi and a positive count"));
        }
        Ok(())
    }
}

/// Norm table entry with its two-level error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub error: f64,
}

impl From<&Estimate> for Measured {
    fn from(e: &Estimate) -> Self {
        Measured { value: e.value, error: e.error }
    }
}

impl Measured {
    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            0.0
        } else {
            self.error / self.value.abs()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormSummary {
    pub l1_hat: Measured,
    pub l2sq_hat: Measured,
    pub l2sq_time: Measured,
    pub l1_weighted: Measured,
    pub l1_time: Measured,
    pub b0: Measured,
    pub tail_bound: f64,
    pub resolutions: [(usize, usize); 2],
}

impl From<&BumpNorms> for NormSummary {
    fn from(n: &BumpNorms) -> Self {
        NormSummary {
            l1_hat: (&n.l1_hat).into(),
            l2sq_hat: (&n.l2sq_hat).into(),
            l2sq_time: (&n.l2sq_time).into(),
            l1_weighted: (&n.l1_weighted).into(),
            l1_time: (&n.l1_time).into(),
            b0: (&n.b0).into(),
            tail_bound: n.tail_bound,
            resolutions: n.resolutions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub center: Vec<f64>,
    pub rows: usize,
    pub sigma_max: f64,
    pub hs_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `σ ≤ r² ‖b̂‖₁ (1 + 2%)` and `σ ≤ ‖·‖_HS`.
    pub upper_bound_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowData {
    /// Certified radius of the balls around `2z_i`.
    pub r_certified: f64,
    /// Bump radius after the interpolation margin.
    pub r: f64,
    pub points: Vec<Vec<f64>>,
    pub centers: Vec<Vec<f64>>,
    pub l2sq_hat: f64,
    pub l1_time: Measured,
    pub hankel_norm: f64,
    pub ratio: f64,
    pub analytic_bound: f64,
    pub best_cutoff: f64,
    /// Composed slack for the dominance check.
    pub tolerance: f64,
    pub dominates: bool,
    pub blocks: Vec<BlockRecord>,
    pub lattice_spacing: f64,
    pub fourier_spacing: f64,
    pub certificates: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RowStatus {
    Completed(RowData),
    Blocked { reason: String, blocking_pair: Option<(usize, usize)>, involves_non_exposed: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub k: usize,
    pub certificates_ok: bool,
    pub outcome: RowStatus,
}

impl ExperimentRow {
    pub fn data(&self) -> Option<&RowData> {
        match &self.outcome {
            RowStatus::Completed(d) => Some(d),
            RowStatus::Blocked { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub norms: NormSummary,
    pub rows: Vec<ExperimentRow>,
    /// Largest measured ratio over completed rows, a lower bound for the constant.
    pub largest_lower_bound: Option<f64>,
}

/// Interpolation widens the support of a sampled bump by at most `√n` cells.
pub fn bump_radius(r_certified: f64, fourier_per_radius: usize) -> f64 {
    r_certified / (1.0 + std::f64::consts::SQRT_2 / fourier_per_radius as f64)
}

/// `φ̂` of one bump on its own box, `fourier_per_radius` samples per radius.
pub fn bump_grid(profile: &BumpProfile, bump: &BumpSpec, fourier_per_radius: usize) -> Result<GridFunction> {
    let r = bump.radius;
    let lo: Vec<f64> = bump.center.iter().map(|c| c - r).collect();
    let h = r / fourier_per_radius as f64;
    let hi: Vec<f64> = bump.center.iter().map(|c| c + r + 2.0 * h).collect();
    let n = vec![2 * fourier_per_radius + 2; bump.center.len()];
    Ok(assemble_phi_hat(profile, std::slice::from_ref(bump), lo, hi, n)?)
}

pub struct Block {
    pub phi_hat: GridFunction,
    pub matrix: HankelMatrix,
    pub estimate: NormEstimate,
}

/// Hankel block of one bump restricted to the interaction region of the
/// certified ball `B̄(center, r_certified)`.
pub fn bump_block(
    omega: &ConvexBody,
    profile: &BumpProfile,
    center: &[f64],
    r_certified: f64,
    grid: &GridConfig,
    budgets: &Budgets,
    seed: u64,
) -> Result<Block> {
    let r = bump_radius(r_certified, grid.fourier_per_radius);
    let bump = BumpSpec::new(center.to_vec(), r)?;
    let phi_hat = bump_grid(profile, &bump, grid.fourier_per_radius)?;
    let region = d_region(omega, &ConvexBody::ball(center.to_vec(), r_certified)?)?;
    let spacing = r / grid.lattice_per_radius as f64;
    let opts = HankelOptions {
        spacing,
        capacity: budgets.hankel_capacity,
        allow_large: budgets.allow_large,
        feature_radius: Some(r),
    };
    let matrix = build_hankel(&phi_hat, omega, Some(&region), opts)?;
    let estimate = op_norm_seeded(&matrix.matrix, budgets.norm_tolerance, budgets.max_iterations, seed)?;
    Ok(Block { phi_hat, matrix, estimate })
}

struct Shared<'a> {
    omega: &'a ConvexBody,
    profile: &'a BumpProfile,
    norms: &'a BumpNorms,
    table: &'a RadialTable,
    cutoffs: &'a [f64],
    config: &'a ExperimentConfig,
}

fn run_row(sh: &Shared<'_>, k: usize) -> Result<ExperimentRow> {
    let cfg = sh.config;
    let conf = match select_separated_points(sh.omega, k, cfg.budgets.separation())? {
        SeparationOutcome::Certified(c) => c,
        SeparationOutcome::NotFound { blocking_pair, involves_non_exposed, reason, smallest_r, .. } => {
            return Ok(ExperimentRow {
                k,
                certificates_ok: false,
                outcome: RowStatus::Blocked {
                    reason: format!("{reason} (smallest radius tried {smallest_r:.3e})"),
                    blocking_pair,
                    involves_non_exposed,
                },
            })
        }
    };
    let r = bump_radius(conf.r, cfg.grid.fourier_per_radius);
    let mut blocks = Vec::with_capacity(k);
    let mut l2sq = 0.0;
    let mut sigma: f64 = 0.0;
    let mut lattice_spacing = 0.0;
    let mut fourier_spacing = 0.0;
    let bound_cap = r * r * sh.norms.l1_hat.value * (1.0 + GLOBAL_SLACK);
    for c in &conf.centers {
        let b = bump_block(sh.omega, sh.profile, c, conf.r, &cfg.grid, &cfg.budgets, cfg.seed)?;
        if !b.estimate.converged {
            return Err(Error::Unreliable(format!("norm estimate for the block at {c:?} did not converge")).into());
        }
        l2sq += b.phi_hat.l2sq();
        sigma = sigma.max(b.estimate.sigma_max);
        lattice_spacing = b.matrix.spacing;
        fourier_spacing = b.phi_hat.spacing(0);
        blocks.push(BlockRecord {
            center: c.clone(),
            rows: b.matrix.points.len(),
            sigma_max: b.estimate.sigma_max,
            hs_norm: b.estimate.hs_norm,
            iterations: b.estimate.iterations,
            converged: b.estimate.converged,
            upper_bound_ok: b.estimate.sigma_max <= bound_cap && b.estimate.sigma_max <= b.estimate.hs_norm,
        });
    }
    let bumps: Vec<BumpSpec> = conf.centers.iter().map(|c| BumpSpec::new(c.clone(), r)).collect::<nehari_core::Result<_>>()?;
    let l1 = phi_l1(sh.table, &bumps, &sh.norms.decay, cfg.budgets.l1())?;
    let ratio = l2sq / (l1.value * sigma);
    let best = best_bound(sh.norms, 2, k as f64, sh.cutoffs)?;
    let rel: f64 = [&sh.norms.l1_hat, &sh.norms.l2sq_hat, &sh.norms.l2sq_time, &sh.norms.l1_weighted]
        .iter()
        .map(|e| Measured::from(*e).relative_error())
        .sum::<f64>()
        + Measured::from(&l1).relative_error();
    let tolerance = best.value * (GLOBAL_SLACK + rel);
    let certificates = conf
        .certificates
        .iter()
        .map(|c| format!("pair {}-{} EMPTY margin {:.6e} residual {:.3e}", c.pair.0, c.pair.1, c.certificate.margin, c.certificate.residual))
        .collect();
    Ok(ExperimentRow {
        k,
        certificates_ok: true,
        outcome: RowStatus::Completed(RowData {
            r_certified: conf.r,
            r,
            points: conf.points,
            centers: conf.centers,
            l2sq_hat: l2sq,
            l1_time: (&l1).into(),
            hankel_norm: sigma,
            ratio,
            analytic_bound: best.value,
            best_cutoff: best.cutoff,
            tolerance,
            dominates: ratio >= best.value - tolerance,
            blocks,
            lattice_spacing,
            fourier_spacing,
            certificates,
        }),
    })
}

/// Runs every `k` of the sweep (rows in parallel) and assembles the report in `k` order.
pub fn run_ratio_sweep(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let omega = config.omega.to_body()?;
    if omega.dim() != 2 {
        return Err(Error::Unsupported("the ratio sweep is planar".into()).into());
    }
    let profile = BumpProfile::new(2)?;
    let norms = bump_norms(&profile, config.resolutions)?;
    norms.ensure_reliable()?;
    let rho_max = norms.decay.radius.max(config.budgets.l1_u_max);
    let table = RadialTable::new(&profile, config.budgets.radial_samples, rho_max, config.budgets.radial_step)?;
    let cutoffs = config.r_sweep.values();
    let shared = Shared { omega: &omega, profile: &profile, norms: &norms, table: &table, cutoffs: &cutoffs, config };
    let results: Vec<Result<ExperimentRow>> = thread::scope(|s| {
        let handles: Vec<_> = config.k_sweep.iter().map(|&k| s.spawn({
            let sh = &shared;
            move || run_row(sh, k)
        })).collect();
        handles.into_iter().map(|h| h.join().expect("row worker panicked")).collect()
    });
    let rows = results.into_iter().collect::<Result<Vec<_>>>()?;
    let largest_lower_bound = rows.iter().filter_map(|r| r.data().map(|d| d.ratio)).reduce(f64::max);
    Ok(ExperimentReport { schema_version: SCHEMA_VERSION, config: config.clone(), norms: (&norms).into(), rows, largest_lower_bound })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

/// One CSV line; empty numeric fields on blocked rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub k: usize,
    pub r: Option<f64>,
    pub l2sq_hat: Option<f64>,
    pub l1_time: Option<f64>,
    pub hankel_norm: Option<f64>,
    pub ratio: Option<f64>,
    pub analytic_bound: Option<f64>,
    pub certificates_ok: bool,
    pub status: String,
}

impl From<&ExperimentRow> for CsvRow {
    fn from(row: &ExperimentRow) -> Self {
        let d = row.data();
        CsvRow {
            k: row.k,
            r: d.map(|d| d.r),
            l2sq_hat: d.map(|d| d.l2sq_hat),
            l1_time: d.map(|d| d.l1_time.value),
            hankel_norm: d.map(|d| d.hankel_norm),
            ratio: d.map(|d| d.ratio),
            analytic_bound: d.map(|d| d.analytic_bound),
            certificates_ok: row.certificates_ok,
            status: if d.is_some() { "COMPLETED" } else { "BLOCKED" }.to_string(),
        }
    }
}

pub fn render_csv(report: &ExperimentReport) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(CSV_COLUMNS)?;
    for row in &report.rows {
        w.serialize(CsvRow::from(row))?;
    }
    w.into_inner().map_err(|e| NehariError::Format(e.to_string()))
}

pub fn render_json(report: &ExperimentReport) -> Result<Vec<u8>> {
    serde_json::to_vec_pretty(report).map_err(|e| NehariError::Format(e.to_string()))
}

pub fn emit_report(report: &ExperimentReport, format: ReportFormat, path: &Path) -> Result<()> {
    let bytes = match format {
        ReportFormat::Csv => render_csv(report)?,
        ReportFormat::Json => render_json(report)?,
    };
    write_atomic(path, &bytes)
}

pub fn parse_csv(bytes: &[u8]) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(bytes);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_COLUMNS {
        return Err(NehariError::Format(format!("unexpected CSV header {header:?}")));
    }
    Ok(r.deserialize().collect::<std::result::Result<Vec<CsvRow>, _>>()?)
}
