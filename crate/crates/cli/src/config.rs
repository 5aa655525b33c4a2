//! Experiment configuration: command-line flags layered over an optional
//! strict JSON file.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use num_complex::Complex64;
use robinc_core::discrepancy::RadiusPolicy;
use robinc_core::CompactSetModel;
use serde::Deserialize;

use crate::CliError;

pub const MIN_N: usize = 2;
pub const MAX_N: usize = 512;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Flags shared by every subcommand that works on point configurations.
#[derive(Args, Clone, Debug, Default)]
pub struct ExperimentArgs {
    /// Preset name (disk, segment, lemniscate, lemniscate2), inline JSON or a JSON file.
    #[arg(long)]
    pub set: Option<String>,
    /// fekete, leja, roots_of_unity or file.
    #[arg(long)]
    pub generator: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Inclusive range `a..b` with optional `:step`.
    #[arg(long = "n-sweep")]
    pub n_sweep: Option<String>,
    /// Comma-separated test functions: zero, re:m, im:m, abs2.
    #[arg(long)]
    pub phi: Option<String>,
    /// `auto` or a positive radius.
    #[arg(long)]
    pub radius: Option<String>,
    /// Candidate mesh resolution for the point generators.
    #[arg(long)]
    pub mesh: Option<usize>,
    /// Seed for audit sampling.
    #[arg(long)]
    pub seed: Option<u64>,
    /// First Leja point, `re` or `re,im`.
    #[arg(long = "seed-point", allow_hyphen_values = true)]
    pub seed_point: Option<String>,
    /// Sweep budget of the Fekete exchange.
    #[arg(long = "max-iters")]
    pub max_iters: Option<usize>,
    /// Points file for the `file` generator: a JSON array of `[re, im]`.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Default)]
pub struct OutputArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Also write `(n, quantity, paper_rate, fitted_constant)` rows here.
    #[arg(long)]
    pub plotdata: Option<PathBuf>,
    /// Strict JSON experiment file; flags given on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Keys accepted in a `--config` file. Unknown keys are rejected.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub set: Option<serde_json::Value>,
    pub generator: Option<String>,
    pub n: Option<usize>,
    pub n_sweep: Option<String>,
    pub phi: Option<String>,
    pub radius: Option<String>,
    pub mesh: Option<usize>,
    pub seed: Option<u64>,
    pub seed_point: Option<[f64; 2]>,
    pub max_iters: Option<usize>,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub plotdata: Option<PathBuf>,
    pub k: Option<String>,
    pub max_n: Option<usize>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("reading config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

/// Fully resolved settings for one run.
#[derive(Debug)]
pub struct Experiment {
    pub set: CompactSetModel,
    pub generator: String,
    pub ns: Vec<usize>,
    pub phis: Vec<String>,
    pub radius: RadiusPolicy,
    pub mesh: Option<usize>,
    pub seed: Option<u64>,
    pub seed_point: Option<Complex64>,
    pub max_iters: Option<usize>,
    pub input: Option<PathBuf>,
}

#[derive(Debug)]
pub struct Output {
    pub out: Option<PathBuf>,
    pub format: Format,
    pub plotdata: Option<PathBuf>,
}

pub fn load_config(args: &OutputArgs) -> Result<ExperimentConfig, CliError> {
    args.config.as_deref().map_or(Ok(ExperimentConfig::default()), ExperimentConfig::load)
}

pub fn resolve_output(args: &OutputArgs, file: &ExperimentConfig, default: Format) -> Output {
    Output {
        out: args.out.clone().or_else(|| file.out.clone()),
        format: args.format.or(file.format).unwrap_or(default),
        plotdata: args.plotdata.clone().or_else(|| file.plotdata.clone()),
    }
}

pub fn resolve_experiment(args: &ExperimentArgs, file: &ExperimentConfig) -> Result<Experiment, CliError> {
    let set = match (&args.set, &file.set) {
        (Some(s), _) => parse_set(s)?,
        (None, Some(serde_json::Value::String(s))) => parse_set(s)?,
        (None, Some(v)) => serde_json::from_value(v.clone()).map_err(|e| CliError::Usage(format!("set: {e}")))?,
        (None, None) => CompactSetModel::unit_disk(),
    };
    let generator = args.generator.clone().or_else(|| file.generator.clone()).unwrap_or_else(|| "fekete".into());

    let n = args.n.or(file.n);
    let sweep = args.n_sweep.as_deref().or(file.n_sweep.as_deref());
    let ns = match (n, sweep) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --n or --n-sweep, not both".into())),
        (Some(n), None) => vec![n],
        (None, Some(s)) => parse_range(s, "n-sweep")?,
        (None, None) if generator == "file" => Vec::new(),
        (None, None) => return Err(CliError::Usage("--n or --n-sweep is required".into())),
    };
    if let Some(bad) = ns.iter().find(|n| !(MIN_N..=MAX_N).contains(*n)) {
        return Err(CliError::Usage(format!("n = {bad} is outside {MIN_N}..={MAX_N}")));
    }

    let phis = args
        .phi
        .as_deref()
        .or(file.phi.as_deref())
        .unwrap_or("re:1")
        .split(',')
        .map(|s| s.trim().to_owned())
        .filter(|s| !s.is_empty())
        .collect();
    let radius = args
        .radius
        .as_deref()
        .or(file.radius.as_deref())
        .unwrap_or("auto")
        .parse()
        .map_err(|e: robinc_core::Error| CliError::Usage(e.to_string()))?;
    let seed_point = match (&args.seed_point, file.seed_point) {
        (Some(s), _) => Some(parse_point(s)?),
        (None, Some([re, im])) => Some(Complex64::new(re, im)),
        (None, None) => None,
    };
    Ok(Experiment {
        set,
        generator,
        ns,
        phis,
        radius,
        mesh: args.mesh.or(file.mesh),
        seed: args.seed.or(file.seed),
        seed_point,
        max_iters: args.max_iters.or(file.max_iters),
        input: args.input.clone().or_else(|| file.input.clone()),
    })
}

/// Preset name, inline JSON object, or path to a JSON file.
pub fn parse_set(spec: &str) -> Result<CompactSetModel, CliError> {
    if let Some(set) = CompactSetModel::preset(spec) {
        return Ok(set);
    }
    let text = if spec.trim_start().starts_with('{') {
        spec.to_owned()
    } else {
        std::fs::read_to_string(spec).map_err(|_| {
            CliError::Usage(format!("--set '{spec}' is not a preset, a JSON object or a readable file"))
        })?
    };
    CompactSetModel::from_json(&text).map_err(|e| CliError::Usage(format!("set: {e}")))
}

/// `a..b` or `a..b:step`, both ends included.
pub fn parse_range(spec: &str, what: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("{what} must look like a..b or a..b:step, got '{spec}'"));
    let (range, step) = match spec.split_once(':') {
        Some((r, s)) => (r, s.trim().parse::<usize>().map_err(|_| bad())?),
        None => (spec, 1),
    };
    let (a, b) = range.split_once("..").ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if step == 0 || a > b {
        return Err(bad());
    }
    Ok((a..=b).step_by(step).collect())
}

fn parse_point(spec: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Usage(format!("--seed-point must be 're' or 're,im', got '{spec}'"));
    let parts: Vec<f64> = spec
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    match parts[..] {
        [re] => Ok(Complex64::new(re, 0.0)),
        [re, im] => Ok(Complex64::new(re, im)),
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..5", "k").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_range("8..32:8", "n").unwrap(), vec![8, 16, 24, 32]);
        assert!(parse_range("5..2", "n").is_err());
        assert!(parse_range("2..8:0", "n").is_err());
        assert!(parse_range("2-8", "n").is_err());
    }

    #[test]
    fn points() {
        assert_eq!(parse_point("1").unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(parse_point("-0.5, 2").unwrap(), Complex64::new(-0.5, 2.0));
        assert!(parse_point("1,2,3").is_err());
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let err = serde_json::from_str::<ExperimentConfig>(r#"{"n": 8, "sets": "disk"}"#).unwrap_err();
        assert!(err.to_string().contains("unknown field"));
    }

    #[test]
    fn sweep_bounds_enforced() {
        let file = ExperimentConfig { n_sweep: Some("2..602:100".into()), ..Default::default() };
        assert!(resolve_experiment(&ExperimentArgs::default(), &file).is_err());
        let args = ExperimentArgs { n: Some(1), ..Default::default() };
        assert!(resolve_experiment(&args, &ExperimentConfig::default()).is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = ExperimentConfig { set: Some("segment".into()), n: Some(4), ..Default::default() };
        let args = ExperimentArgs { n: Some(9), ..Default::default() };
        let exp = resolve_experiment(&args, &file).unwrap();
        assert_eq!(exp.ns, vec![9]);
        assert_eq!(exp.set.label(), CompactSetModel::unit_segment().label());
    }
}
