//! Command-line front end. `main.rs` parses, prints and maps the exit code.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nehari_core::bump::BumpProfile;
use nehari_core::classify::{classify, classify_rep, Classification};
use nehari_core::domain::{exposed_points, supporting_hyperplane, ConvexBody, Location};
use nehari_core::region::{
    check_pairwise_disjoint, d_region, find_witness, outer_polygon, select_separated_points, Disjointness,
    SeparationBudget, SeparationOutcome, WitnessBudget, WitnessOutcome, DEFAULT_DIRECTIONS,
};
use nehari_core::verdict::{nehari_verdict, Verdict};
use serde::Serialize;

use crate::error::{NehariError, Result};
use crate::experiment::{bump_block, emit_report, run_ratio_sweep, ExperimentConfig, ReportFormat};
use crate::formats::{matrix_grid, parse_json, read_body, read_text, write_atomic, write_grid, BodyDesc};
use crate::synthesis::{bump_norms, synthesize_time_domain, DEFAULT_RESOLUTIONS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Comma-separated coordinates, e.g. `1,0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coords(pub Vec<f64>);

impl FromStr for Coords {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| format!("bad coordinate `{t}`: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Coords)
    }
}

#[derive(Debug, Parser, Serialize)]
#[command(name = "nehari", version, about = "Bump-sum Hankel experiments on Paley-Wiener spaces of convex domains")]
pub struct Cli {
    /// Print the resolved invocation and progress to stderr.
    #[arg(long, short, global = true)]
    pub verbose: bool,
    /// Seed for the norm estimator's random start vectors.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Support value, location and supporting hyperplane queries on a body.
    Domain(DomainArgs),
    /// Outer polygon of an interaction region, or pairwise disjointness of bump balls.
    Region(RegionArgs),
    /// Exposed-point witness search.
    Witness(WitnessArgs),
    /// Norm table of the reference bump; optionally dumps the synthesized time-domain grid.
    Bump(BumpArgs),
    /// Hankel block of a single bump and its operator norm.
    Hankel(HankelArgs),
    /// Full ratio sweep from a config file.
    Experiment(ExperimentArgs),
    /// Polytope / polyhedron / line strip / non-polyhedral classification.
    Classify(BodyArg),
    /// Status of the Nehari theorem for the domain.
    Verdict(BodyArg),
    /// Certified separated configuration for `k` bumps.
    Separate(SeparateArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct BodyArg {
    /// Body description file (JSON).
    #[arg(long)]
    pub body: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct DomainArgs {
    #[arg(long)]
    pub body: PathBuf,
    /// Direction for a support value query.
    #[arg(long, allow_hyphen_values = true)]
    pub direction: Option<Coords>,
    /// Point for a location and supporting hyperplane query.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<Coords>,
    /// Number of equiangular directions for exposed-point enumeration.
    #[arg(long)]
    pub exposed: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct RegionArgs {
    #[arg(long)]
    pub body: PathBuf,
    /// Fourier support body; prints the outer polygon of its interaction region.
    #[arg(long, conflicts_with = "center")]
    pub supp: Option<PathBuf>,
    /// Bump ball centers in the doubled domain (repeatable).
    #[arg(long, allow_hyphen_values = true)]
    pub center: Vec<Coords>,
    #[arg(long, requires = "center")]
    pub radius: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_DIRECTIONS)]
    pub directions: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct WitnessArgs {
    #[arg(long)]
    pub body: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub point: Coords,
    #[arg(long)]
    pub rho: f64,
    #[arg(long, default_value_t = 40)]
    pub rounds: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct BumpArgs {
    /// Dump the coarse-level time-domain samples as an NHGF grid.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct HankelArgs {
    #[arg(long)]
    pub body: PathBuf,
    /// Bump center in the doubled domain.
    #[arg(long, allow_hyphen_values = true)]
    pub center: Coords,
    /// Certified ball radius around the center.
    #[arg(long)]
    pub radius: f64,
    /// Dump the matrix as an NHGF grid.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args, Serialize)]
pub struct ExperimentArgs {
    /// Config file; defaults apply to every missing field.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Output format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Args, Serialize)]
pub struct SeparateArgs {
    #[arg(long)]
    pub body: PathBuf,
    #[arg(long)]
    pub k: usize,
}

/// Exit status for an error.
pub fn exit_code(e: &NehariError) -> i32 {
    match e {
        NehariError::Schema { .. } => EXIT_USAGE,
        _ => EXIT_DOMAIN,
    }
}

fn load_body(path: &Path) -> Result<(BodyDesc, ConvexBody)> {
    let desc = read_body(path)?;
    let body = desc.to_body()?;
    Ok((desc, body))
}

fn fmt_point(p: &[f64]) -> String {
    let parts: Vec<String> = p.iter().map(|x| format!("{x:.12}")).collect();
    format!("({})", parts.join(", "))
}

fn log(verbose: bool, msg: impl AsRef<str>) {
    if verbose {
        eprintln!("{}", msg.as_ref());
    }
}

fn equiangular(m: usize) -> Vec<Vec<f64>> {
    (0..m)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / m as f64;
            vec![t.cos(), t.sin()]
        })
        .collect()
}

/// Runs one invocation and returns its standard output.
pub fn dispatch(cli: &Cli) -> Result<String> {
    eprintln!("nehari: {}", serde_json::to_string(cli).unwrap_or_default());
    let mut out = String::new();
    match &cli.command {
        Command::Domain(a) => {
            let (_, body) = load_body(&a.body)?;
            writeln!(out, "dim {} bounded {} open {}", body.dim(), body.is_bounded(), body.is_open()).ok();
            if let Some(d) = &a.direction {
                writeln!(out, "support {:.15}", body.support(&d.0)?).ok();
            }
            if let Some(p) = &a.point {
                let loc = body.locate(&p.0)?;
                writeln!(out, "location {}", location_name(loc)).ok();
                if loc == Location::Boundary {
                    let h = supporting_hyperplane(&body, &p.0)?;
                    writeln!(out, "hyperplane normal {} offset {:.15}", fmt_point(h.normal()), h.offset()).ok();
                }
            }
            if let Some(m) = a.exposed {
                let e = exposed_points(&body, &equiangular(m))?;
                writeln!(out, "exposed {} (unbounded directions {}, non-unique {})", e.set.len(), e.unbounded.len(), e.non_unique.len()).ok();
                for p in &e.set.points {
                    writeln!(out, "{}", fmt_point(p)).ok();
                }
            }
        }
        Command::Region(a) => {
            let (_, omega) = load_body(&a.body)?;
            let text = if let Some(s) = &a.supp {
                let (_, supp) = load_body(s)?;
                let region = d_region(&omega, &supp)?;
                outer_polygon(&region, a.directions)?.certificate_text()
            } else {
                let r = a.radius.ok_or_else(|| NehariError::schema("radius", "required with --center"))?;
                let centers: Vec<Vec<f64>> = a.center.iter().map(|c| c.0.clone()).collect();
                match check_pairwise_disjoint(&omega, &centers, r, a.directions)? {
                    Disjointness::Certified(certs) => {
                        let mut s = String::from("CERTIFIED\n");
                        for c in certs {
                            writeln!(s, "pair {}-{} margin {:.6e} residual {:.3e}", c.pair.0, c.pair.1, c.certificate.margin, c.certificate.residual).ok();
                        }
                        s
                    }
                    Disjointness::Inconclusive { pair } => format!("INCONCLUSIVE pair {}-{}\n", pair.0, pair.1),
                }
            };
            match &a.out {
                Some(p) => write_atomic(p, text.as_bytes())?,
                None => out = text,
            }
        }
        Command::Witness(a) => {
            let (_, omega) = load_body(&a.body)?;
            let budget = WitnessBudget { rounds: a.rounds, ..Default::default() };
            match find_witness(&omega, &a.point.0, a.rho, budget)? {
                WitnessOutcome::Found(c) => {
                    writeln!(out, "FOUND y {} rho {}", fmt_point(&c.y), c.rho).ok();
                    writeln!(out, "z {} s {:.6e} t {:.6e}", fmt_point(&c.z), c.s, c.t).ok();
                    writeln!(out, "max_dist {:.6}", c.max_dist).ok();
                    writeln!(out, "first accepted round {} max_dist {:.6}", c.first_accepted_round, c.first_accepted_max_dist).ok();
                    writeln!(out, "polygon {}", c.polygon.len()).ok();
                    for p in &c.polygon {
                        writeln!(out, "{}", fmt_point(p)).ok();
                    }
                }
                WitnessOutcome::NotFound { best_max_dist, rounds } => {
                    writeln!(out, "NOT-FOUND after {rounds} rounds, best max_dist {best_max_dist:.6}").ok();
                }
            }
        }
        Command::Bump(a) => {
            let profile = BumpProfile::new(2)?;
            log(cli.verbose, format!("resolutions {DEFAULT_RESOLUTIONS:?}"));
            let norms = bump_norms(&profile, DEFAULT_RESOLUTIONS)?;
            if a.json {
                let summary = crate::experiment::NormSummary::from(&norms);
                out = serde_json::to_string_pretty(&summary).map_err(|e| NehariError::Format(e.to_string()))? + "\n";
            } else {
                for (name, e) in [
                    ("l1_hat", &norms.l1_hat),
                    ("l2sq_hat", &norms.l2sq_hat),
                    ("l2sq_time", &norms.l2sq_time),
                    ("l1_weighted", &norms.l1_weighted),
                    ("l1_time", &norms.l1_time),
                    ("b0", &norms.b0),
                ] {
                    writeln!(out, "{name:<12} {:.10} ± {:.2e} (levels {:.10} {:.10})", e.value, e.error, e.coarse, e.fine).ok();
                }
                writeln!(out, "decay amplitude {:.4e} rate {:.4} from radius {:.3}", norms.decay.amplitude, norms.decay.rate, norms.decay.radius).ok();
            }
            if let Some(p) = &a.out {
                let (n, pad) = DEFAULT_RESOLUTIONS[0];
                write_grid(p, &synthesize_time_domain(&profile, n, pad)?)?;
            }
        }
        Command::Hankel(a) => {
            let (_, omega) = load_body(&a.body)?;
            let profile = BumpProfile::new(omega.dim())?;
            let cfg = ExperimentConfig::default();
            let seed = cli.seed.unwrap_or(cfg.seed);
            let b = bump_block(&omega, &profile, &a.center.0, a.radius, &cfg.grid, &cfg.budgets, seed)?;
            writeln!(out, "rows {} spacing {:.6e}", b.matrix.points.len(), b.matrix.spacing).ok();
            writeln!(
                out,
                "sigma_max {:.12} hs_norm {:.12} iterations {} residual {:.3e} converged {}",
                b.estimate.sigma_max, b.estimate.hs_norm, b.estimate.iterations, b.estimate.residual, b.estimate.converged
            )
            .ok();
            if let Some(p) = &a.out {
                write_grid(p, &matrix_grid(&b.matrix.matrix)?)?;
            }
        }
        Command::Experiment(a) => {
            let mut config: ExperimentConfig = match &a.config {
                Some(p) => parse_json(&read_text(p)?)?,
                None => ExperimentConfig::default(),
            };
            if let Some(s) = cli.seed {
                config.seed = s;
            }
            config.validate()?;
            eprintln!("nehari: resolved config {}", serde_json::to_string(&config).unwrap_or_default());
            let format = match a.format {
                Some(FormatArg::Csv) => ReportFormat::Csv,
                Some(FormatArg::Json) => ReportFormat::Json,
                None if a.out.extension().is_some_and(|e| e == "json") => ReportFormat::Json,
                None => ReportFormat::Csv,
            };
            let report = run_ratio_sweep(&config)?;
            emit_report(&report, format, &a.out)?;
            for row in &report.rows {
                match row.data() {
                    Some(d) => writeln!(out, "k={} ratio {:.6} bound {:.6} dominates {}", row.k, d.ratio, d.analytic_bound, d.dominates),
                    None => writeln!(out, "k={} BLOCKED", row.k),
                }
                .ok();
            }
            if let Some(b) = report.largest_lower_bound {
                writeln!(out, "largest lower bound {b:.6}").ok();
            }
        }
        Command::Classify(a) => {
            let desc = read_body(&a.body)?;
            let c = match desc.to_rep() {
                Some(rep) if desc.to_body()?.dim() == 2 => classify_rep(&rep?)?,
                _ => classify(&desc.to_body()?)?,
            };
            out = describe_classification(&c);
        }
        Command::Verdict(a) => {
            let (_, body) = load_body(&a.body)?;
            let v = nehari_verdict(&body)?;
            writeln!(out, "{}", v.name()).ok();
            match &v {
                Verdict::FailsByTheorem1 { evidence } => writeln!(out, "evidence: {}", evidence.transcript()).map(|_| ()),
                Verdict::Unknown { reason, notes } => {
                    writeln!(out, "reason: {reason}").ok();
                    notes.iter().try_for_each(|n| writeln!(out, "note: {n}"))
                }
                _ => Ok(()),
            }
            .ok();
        }
        Command::Separate(a) => {
            let (_, omega) = load_body(&a.body)?;
            match select_separated_points(&omega, a.k, SeparationBudget::default())? {
                SeparationOutcome::Certified(c) => {
                    writeln!(out, "CERTIFIED r {:.6e}", c.r).ok();
                    for (y, z) in c.points.iter().zip(&c.centers) {
                        writeln!(out, "y {} center {}", fmt_point(y), fmt_point(z)).ok();
                    }
                }
                SeparationOutcome::NotFound { blocking_pair, involves_non_exposed, smallest_r, reason, .. } => {
                    writeln!(out, "NOT-FOUND {reason}").ok();
                    writeln!(out, "blocking pair {blocking_pair:?} non-exposed {involves_non_exposed} smallest r {smallest_r:.3e}").ok();
                }
            }
        }
    }
    Ok(out)
}

fn location_name(l: Location) -> &'static str {
    match l {
        Location::Interior => "INSIDE",
        Location::Boundary => "BOUNDARY",
        Location::Exterior => "OUTSIDE",
    }
}

pub fn describe_classification(c: &Classification) -> String {
    let mut s = format!("{}\n", c.name());
    match c {
        Classification::Polytope { vertices } => {
            for v in vertices {
                writeln!(s, "vertex {}", fmt_point(v)).ok();
            }
        }
        Classification::Polyhedron { decomposition, halflines } => {
            for v in &decomposition.polytope_vertices {
                writeln!(s, "vertex {}", fmt_point(v)).ok();
            }
            for u in &decomposition.cone_generators {
                writeln!(s, "cone generator {}", fmt_point(u)).ok();
            }
            writeln!(s, "extreme half-lines {}", halflines.len()).ok();
            for h in halflines {
                writeln!(s, "half-line origin {} direction {}", fmt_point(&h.origin), fmt_point(&h.direction)).ok();
            }
        }
        Classification::NonPolyhedral(e) | Classification::Inconclusive(e) => {
            writeln!(s, "evidence: {}", e.transcript()).ok();
        }
        Classification::LineStrip { beta, alpha, direction } => {
            writeln!(s, "beta {beta:.12} alpha {alpha:.12} direction {}", fmt_point(direction)).ok();
        }
    }
    s
}
