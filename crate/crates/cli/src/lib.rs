//! `robinc`: batch experiments on point configurations over planar compact
//! sets, written as CSV or JSON.
//!
//! Exit status is 0 when every checked invariant holds, 1 when some do not
//! (the violations go to stderr as JSON), 2 for usage errors and 3 when a
//! numerical routine fails.

pub mod config;

use std::io::Write;
use std::path::Path;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use robinc_core::audit::{run_audit, AuditOptions, DEFAULT_AUDIT_SEED};
use robinc_core::discrepancy::{
    moment_discrepancy, polynomial_growth_check, DiscrepancyEngine, GrowthCheck, NORM_LOWER_TOLERANCE,
};
use robinc_core::discrete_energy::{bss_chain_check, log_sup_norm, BssChain, EnergyReport};
use robinc_core::integer_poly::{sharpness_report, schur_csv, SchurReport, ENERGY_TOLERANCE};
use robinc_core::point_generation::{GeneratedPoints, GeneratorOptions, GeneratorRegistry, DEFAULT_MAX_SWEEPS};
use robinc_core::report::{emit_plotdata, fmt_f64, RatePoint, Table};
use robinc_core::test_functions::TestFunctionRegistry;
use robinc_core::{CompactSetModel, Error, PointConfiguration};
use serde::Serialize;

use config::{load_config, parse_range, resolve_experiment, resolve_output, Experiment, ExperimentArgs, Format, Output, OutputArgs};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;

const THREADS_ENV: &str = "ROBINC_THREADS";
const DISCREPANCY_TOLERANCE: f64 = 1e-6;
const SLACK_TOLERANCE: f64 = 1e-8;

#[derive(Parser, Debug)]
#[command(name = "robinc", version, about = "Energy, discrepancy and growth experiments on planar compact sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate configurations and their energy certificates (JSON by default).
    Points {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Log-Vandermonde, discrete energy and m_E for each n.
    Energy {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Discrepancy certificates and smoothed energies.
    Discrepancy {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Growth of the monic polynomial with the configuration as zeros.
    Growth {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Prime-product cyclotomic family, one row per k.
    Schur {
        /// Inclusive range `a..b` with optional `:step`.
        #[arg(long)]
        k: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// The full invariant battery (JSON by default).
    Audit {
        #[arg(long)]
        seed: Option<u64>,
        /// Largest n in the Fekete sweeps.
        #[arg(long = "max-n")]
        max_n: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(Error::InvalidArgument(_)) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        }
    }
}

/// A failed invariant, reported on stderr.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub n: Option<usize>,
    pub case: String,
    pub check: String,
    pub detail: String,
}

impl Violation {
    fn new(n: impl Into<Option<usize>>, case: &str, check: &str, detail: String) -> Self {
        Self { n: n.into(), case: case.to_owned(), check: check.to_owned(), detail }
    }
}

/// What a subcommand produced: the main document, optional plot data and
/// any invariant violations.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub body: String,
    pub plot: Vec<RatePoint>,
    pub violations: Vec<Violation>,
}

pub fn run(cli: Cli) -> i32 {
    let pool = match thread_pool() {
        Ok(pool) => pool,
        Err(e) => return report_error(&e),
    };
    match pool.install(|| execute(&cli.command)) {
        Ok(violations) if violations.is_empty() => EXIT_OK,
        Ok(violations) => {
            eprintln!("{}", violation_report(&violations));
            EXIT_VIOLATION
        }
        Err(e) => report_error(&e),
    }
}

/// `{"violations": [...]}` on one line.
pub fn violation_report(violations: &[Violation]) -> String {
    serde_json::json!({ "violations": violations }).to_string()
}

fn report_error(e: &CliError) -> i32 {
    match e {
        CliError::Core(Error::SolverFailure { message, sweeps, best }) => {
            let doc = serde_json::json!({
                "error": "solver_failure",
                "message": message,
                "sweeps": sweeps,
                "best_log_vandermonde": best.as_ref().map(|b| b.achieved_log_vandermonde),
            });
            eprintln!("{doc}");
        }
        other => eprintln!("robinc: {other}"),
    }
    e.exit_code()
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let threads: usize = v
            .parse()
            .ok()
            .filter(|t| *t > 0)
            .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
        builder = builder.num_threads(threads);
    }
    builder.build().map_err(|e| CliError::Usage(e.to_string()))
}

/// Runs one subcommand, writes its outputs and returns the violations.
pub fn execute(command: &Command) -> Result<Vec<Violation>, CliError> {
    let (artifacts, output) = match command {
        Command::Points { exp, output } => with_experiment(exp, output, Format::Json, points)?,
        Command::Energy { exp, output } => with_experiment(exp, output, Format::Csv, energy)?,
        Command::Discrepancy { exp, output } => with_experiment(exp, output, Format::Csv, discrepancy)?,
        Command::Growth { exp, output } => with_experiment(exp, output, Format::Csv, growth)?,
        Command::Schur { k, output } => {
            let file = load_config(output)?;
            let out = resolve_output(output, &file, Format::Csv);
            let spec = k.clone().or(file.k).unwrap_or_else(|| "2..30".into());
            (schur(&parse_range(&spec, "k")?, out.format)?, out)
        }
        Command::Audit { seed, max_n, output } => {
            let file = load_config(output)?;
            let out = resolve_output(output, &file, Format::Json);
            let opts = AuditOptions {
                seed: seed.or(file.seed).unwrap_or(DEFAULT_AUDIT_SEED),
                max_n: max_n.or(file.max_n).unwrap_or(AuditOptions::default().max_n),
            };
            if !(config::MIN_N..=config::MAX_N).contains(&opts.max_n) {
                return Err(CliError::Usage(format!("--max-n must be in {}..={}", config::MIN_N, config::MAX_N)));
            }
            (audit(&opts, out.format)?, out)
        }
    };
    write_output(&output, &artifacts)?;
    Ok(artifacts.violations)
}

fn with_experiment(
    args: &ExperimentArgs,
    output: &OutputArgs,
    default: Format,
    body: fn(&Experiment, Format) -> Result<Artifacts, CliError>,
) -> Result<(Artifacts, Output), CliError> {
    let file = load_config(output)?;
    let exp = resolve_experiment(args, &file)?;
    let out = resolve_output(output, &file, default);
    Ok((body(&exp, out.format)?, out))
}

fn write_output(output: &Output, artifacts: &Artifacts) -> Result<(), CliError> {
    match &output.out {
        Some(path) => std::fs::write(path, &artifacts.body)?,
        None => std::io::stdout().lock().write_all(artifacts.body.as_bytes())?,
    }
    if let Some(path) = &output.plotdata {
        write_plotdata(path, &artifacts.plot)?;
    }
    Ok(())
}

fn write_plotdata(path: &Path, plot: &[RatePoint]) -> Result<(), CliError> {
    std::fs::write(path, emit_plotdata(plot)?)?;
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

fn log_rate(n: usize) -> f64 {
    let n = n as f64;
    n.ln() / n
}

/// Configurations for every requested `n`, built in parallel and returned in
/// ascending order of `n`.
fn generate_all(exp: &Experiment) -> Result<Vec<GeneratedPoints>, CliError> {
    let registry = GeneratorRegistry::with_builtins();
    let generator = registry.get(&exp.generator)?;
    let opts = GeneratorOptions {
        mesh_resolution: exp.mesh,
        max_sweeps: exp.max_iters.unwrap_or(DEFAULT_MAX_SWEEPS),
        seed_point: exp.seed_point,
        input_path: exp.input.clone(),
    };
    if exp.ns.is_empty() {
        return Ok(vec![generator.generate(&exp.set, 0, &opts)?]);
    }
    let mut runs: Vec<GeneratedPoints> = exp
        .ns
        .par_iter()
        .map(|&n| generator.generate(&exp.set, n, &opts))
        .collect::<Result<_, _>>()?;
    runs.sort_by_key(|r| r.config.len());
    Ok(runs)
}

fn certificate_violations(runs: &[GeneratedPoints], generator: &str) -> Vec<Violation> {
    runs.iter()
        .filter_map(|r| {
            let c = r.certificates.as_ref()?;
            (!c.all_hold).then(|| {
                Violation::new(r.config.len(), generator, "energy_certificates", serde_json::to_string(c).unwrap())
            })
        })
        .collect()
}

fn inside(cfg: &PointConfiguration, set: &CompactSetModel) -> bool {
    cfg.points().iter().all(|z| set.green(*z).is_ok_and(|g| g <= robinc_core::set_catalog::MEMBERSHIP_EPS))
}

#[derive(Serialize)]
struct PointsRun<'a> {
    n: usize,
    points: &'a PointConfiguration,
    certificates: &'a Option<robinc_core::point_generation::EnergyCertificates>,
}

#[derive(Serialize)]
struct PointsDoc<'a> {
    set: &'a CompactSetModel,
    generator: &'a str,
    runs: Vec<PointsRun<'a>>,
}

fn points(exp: &Experiment, format: Format) -> Result<Artifacts, CliError> {
    let runs = generate_all(exp)?;
    let body = match format {
        Format::Json => to_json(&PointsDoc {
            set: &exp.set,
            generator: &exp.generator,
            runs: runs
                .iter()
                .map(|r| PointsRun { n: r.config.len(), points: &r.config, certificates: &r.certificates })
                .collect(),
        }),
        Format::Csv => {
            let mut table = Table::new(&["n", "index", "re", "im"]);
            for r in &runs {
                for (i, z) in r.config.points().iter().enumerate() {
                    table.push(vec![r.config.len().to_string(), i.to_string(), fmt_f64(z.re), fmt_f64(z.im)]);
                }
            }
            table.to_csv()
        }
    };
    Ok(Artifacts { body, plot: Vec::new(), violations: certificate_violations(&runs, &exp.generator) })
}

#[derive(Serialize)]
struct EnergyRow {
    #[serde(flatten)]
    report: EnergyReport,
    bss_chain: BssChain,
}

fn energy(exp: &Experiment, format: Format) -> Result<Artifacts, CliError> {
    let runs = generate_all(exp)?;
    let set = &exp.set;
    let rows: Vec<EnergyRow> = runs
        .par_iter()
        .map(|r| {
            Ok(EnergyRow {
                report: EnergyReport::new(&r.config, set, set.bounding_radius())?,
                bss_chain: bss_chain_check(&r.config, set)?,
            })
        })
        .collect::<Result<_, Error>>()?;
    let mut violations = certificate_violations(&runs, &exp.generator);
    for row in &rows {
        if !row.bss_chain.inequalities_hold {
            violations.push(Violation::new(
                row.report.n,
                &exp.generator,
                "bss_chain",
                serde_json::to_string(&row.bss_chain).unwrap(),
            ));
        }
    }
    let v = set.robin_constant();
    let plot = rows
        .iter()
        .map(|r| RatePoint { n: r.report.n, quantity: (r.report.discrete_energy - v).abs(), rate: log_rate(r.report.n) })
        .collect();
    let body = match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut out = EnergyReport::CSV_HEADER.to_owned();
            out.push('\n');
            for r in &rows {
                out.push_str(&r.report.csv_row());
                out.push('\n');
            }
            out
        }
    };
    Ok(Artifacts { body, plot, violations })
}

#[derive(Serialize)]
struct DiscrepancyRow {
    n: usize,
    case: String,
    certificate: robinc_core::discrepancy::DiscrepancyCertificate,
    smoothed: robinc_core::discrepancy::SmoothedEnergy,
}

fn discrepancy(exp: &Experiment, format: Format) -> Result<Artifacts, CliError> {
    let runs = generate_all(exp)?;
    let set = &exp.set;
    let engine = DiscrepancyEngine::new(set)?;
    let registry = TestFunctionRegistry::with_builtins();
    let phis = exp
        .phis
        .iter()
        .map(|spec| Ok((spec.clone(), registry.build(spec, set)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    if phis.is_empty() {
        return Err(CliError::Usage("--phi names no test function".into()));
    }
    let cases: Vec<(usize, usize)> = (0..runs.len()).flat_map(|r| (0..phis.len()).map(move |p| (r, p))).collect();
    let mut rows: Vec<DiscrepancyRow> = cases
        .par_iter()
        .map(|&(r, p)| {
            let cfg = &runs[r].config;
            let certificate = engine.certificate(phis[p].1.as_ref(), cfg, exp.radius)?;
            let smoothed = engine.smoothed_energy(cfg, certificate.r_used)?;
            Ok(DiscrepancyRow { n: cfg.len(), case: phis[p].0.clone(), certificate, smoothed })
        })
        .collect::<Result<_, Error>>()?;
    rows.sort_by(|a, b| a.n.cmp(&b.n).then_with(|| a.case.cmp(&b.case)));

    let mut violations = Vec::new();
    for row in &rows {
        if !row.certificate.holds(DISCREPANCY_TOLERANCE) {
            let detail = format!("lhs {} > rhs {}", fmt_f64(row.certificate.lhs), fmt_f64(row.certificate.rhs));
            violations.push(Violation::new(row.n, &row.case, "discrepancy_bound", detail));
        }
        let s = &row.smoothed;
        if s.i_sigma < -DISCREPANCY_TOLERANCE || s.slack < -DISCREPANCY_TOLERANCE {
            let detail = format!("I_sigma {} vs bound {}", fmt_f64(s.i_sigma), fmt_f64(s.bound_22));
            violations.push(Violation::new(row.n, &row.case, "smoothed_energy", detail));
        }
    }

    let mut plot = Vec::new();
    for r in &runs {
        if inside(&r.config, set) {
            let m = moment_discrepancy(&r.config, set, 1)?;
            plot.push(RatePoint { n: m.n, quantity: m.value, rate: m.bound_29_shape });
        }
    }

    let body = match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut table = Table::new(&[
                "n", "case", "r_used", "lhs", "rhs", "I_total", "I_clamped", "omega", "dirichlet", "i_sigma", "bound_22",
            ]);
            for row in &rows {
                let c = &row.certificate;
                table.push(vec![
                    row.n.to_string(),
                    row.case.clone(),
                    fmt_f64(c.r_used),
                    fmt_f64(c.lhs),
                    fmt_f64(c.rhs),
                    fmt_f64(c.i_terms.total()),
                    c.i_clamped.to_string(),
                    fmt_f64(c.omega),
                    fmt_f64(c.dirichlet),
                    fmt_f64(row.smoothed.i_sigma),
                    fmt_f64(row.smoothed.bound_22),
                ]);
            }
            table.to_csv()
        }
    };
    Ok(Artifacts { body, plot, violations })
}

#[derive(Serialize)]
struct GrowthRow {
    #[serde(flatten)]
    check: GrowthCheck,
    norm_root: f64,
    capacity: f64,
}

fn growth(exp: &Experiment, format: Format) -> Result<Artifacts, CliError> {
    let runs = generate_all(exp)?;
    let set = &exp.set;
    let rows: Vec<GrowthRow> = runs
        .par_iter()
        .map(|r| {
            let check = polynomial_growth_check(&r.config, set)?;
            let norm_root = (log_sup_norm(r.config.points(), set)? / check.n as f64).exp();
            Ok(GrowthRow { check, norm_root, capacity: set.capacity() })
        })
        .collect::<Result<_, Error>>()?;

    let mut violations = Vec::new();
    for row in &rows {
        let n = row.check.n;
        if row.norm_root < row.capacity - NORM_LOWER_TOLERANCE {
            let detail = format!("norm root {} below capacity {}", fmt_f64(row.norm_root), fmt_f64(row.capacity));
            violations.push(Violation::new(n, &exp.generator, "norm_lower_bound", detail));
        }
        if row.check.energy_lower_slack < -SLACK_TOLERANCE {
            let detail = format!("slack {}", fmt_f64(row.check.energy_lower_slack));
            violations.push(Violation::new(n, &exp.generator, "energy_lower_bound", detail));
        }
    }
    let plot = rows
        .iter()
        .map(|r| {
            let n = r.check.n as f64;
            RatePoint { n: r.check.n, quantity: r.check.max_abs_defect_on_gamma_n, rate: n.ln() / n.sqrt() }
        })
        .collect();

    let body = match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut table = Table::new(&[
                "n",
                "max_abs_defect_on_gamma_n",
                "defect_c2",
                "supnorm_log_excess",
                "supnorm_c2",
                "energy_deficit",
                "energy_c3",
                "energy_lower_slack",
                "rho_n",
                "rho_holder_bound",
                "near_fekete_c1",
                "norm_root",
                "capacity",
            ]);
            for r in &rows {
                let c = &r.check;
                let mut cells = vec![c.n.to_string()];
                cells.extend(
                    [
                        c.max_abs_defect_on_gamma_n,
                        c.defect_c2,
                        c.supnorm_log_excess,
                        c.supnorm_c2,
                        c.energy_deficit,
                        c.energy_c3,
                        c.energy_lower_slack,
                        c.rho_n,
                        c.rho_holder_bound,
                        c.near_fekete_c1,
                        r.norm_root,
                        r.capacity,
                    ]
                    .map(fmt_f64),
                );
                table.push(cells);
            }
            table.to_csv()
        }
    };
    Ok(Artifacts { body, plot, violations })
}

fn schur(ks: &[usize], format: Format) -> Result<Artifacts, CliError> {
    let rows: Vec<SchurReport> = sharpness_report(ks.iter().copied())?;
    let mut violations = Vec::new();
    for r in &rows {
        let case = format!("k={}", r.k);
        if (r.root_mean_numeric - r.root_mean).abs() > 1e-10 {
            let detail = format!("numeric {} vs k/n {}", fmt_f64(r.root_mean_numeric), fmt_f64(r.root_mean));
            violations.push(Violation::new(r.n, &case, "root_mean", detail));
        }
        if r.energy > ENERGY_TOLERANCE {
            violations.push(Violation::new(r.n, &case, "energy_below_robin", fmt_f64(r.energy)));
        }
    }
    let plot = rows
        .iter()
        .map(|r| RatePoint { n: r.n, quantity: r.log_supnorm, rate: r.sqrt_n_log_n })
        .collect();
    let body = match format {
        Format::Json => to_json(&rows),
        Format::Csv => schur_csv(&rows),
    };
    Ok(Artifacts { body, plot, violations })
}

fn audit(opts: &AuditOptions, format: Format) -> Result<Artifacts, CliError> {
    let report = run_audit(opts)?;
    let violations = report
        .violations()
        .into_iter()
        .map(|c| Violation::new(None, c.module, &c.name, c.detail.clone()))
        .collect();
    let body = match format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut table = Table::new(&["module", "check", "passed", "detail"]);
            for c in &report.checks {
                table.push(vec![c.module.to_owned(), csv_field(&c.name), c.passed.to_string(), csv_field(&c.detail)]);
            }
            table.to_csv()
        }
    };
    Ok(Artifacts { body, plot: Vec::new(), violations })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}
