//! Vandermonde determinants, discrete energies and related configuration
//! functionals, all evaluated in log space.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numerics::golden_max;
use crate::report::serialize_lossless;
use crate::set_catalog::{CompactSetModel, MEMBERSHIP_EPS};

/// An ordered list of `n >= 2` points.
#[derive(Clone, Debug, PartialEq)]
pub struct PointConfiguration {
    points: Vec<Complex64>,
    label: String,
}

impl PointConfiguration {
    pub fn new(points: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid(format!(
                "a configuration needs at least 2 points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|z| !z.is_finite()) {
            return Err(Error::invalid("configuration contains non-finite points"));
        }
        Ok(Self { points, label: label.into() })
    }

    /// The `n`-th roots of unity.
    pub fn roots_of_unity(n: usize) -> Result<Self> {
        let pts = (0..n)
            .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
            .collect();
        Self::new(pts, format!("roots_of_unity_{n}"))
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn has_duplicates(&self) -> bool {
        let sorted = self.canonical();
        sorted.windows(2).any(|w| w[0] == w[1])
    }

    /// Points in lexicographic `(re, im)` order; fixes the summation order so
    /// that results do not depend on the input ordering.
    fn canonical(&self) -> Vec<Complex64> {
        let mut sorted = self.points.clone();
        sorted.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        sorted
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("configuration serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl Serialize for PointConfiguration {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.points.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PointConfiguration {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(deserializer)?;
        let points = pairs.into_iter().map(|p| Complex64::new(p[0], p[1])).collect();
        PointConfiguration::new(points, "").map_err(serde::de::Error::custom)
    }
}

/// `log |V(Z_n)| = sum_{j<k} log |z_j - z_k|`; `-inf` exactly when two points coincide.
pub fn log_vandermonde(cfg: &PointConfiguration) -> f64 {
    let pts = cfg.canonical();
    let mut total = 0.0;
    for (j, a) in pts.iter().enumerate() {
        for b in &pts[j + 1..] {
            total += (a - b).norm().ln();
        }
    }
    total
}

pub fn discrete_energy(cfg: &PointConfiguration) -> f64 {
    energy_from_log_vandermonde(log_vandermonde(cfg), cfg.len())
}

pub(crate) fn energy_from_log_vandermonde(log_v: f64, n: usize) -> f64 {
    if log_v == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    -2.0 * log_v / (n * (n - 1)) as f64
}

/// `(1/n) sum g(z_k)` over the points with `g > 0`; zero when all points lie in `E`.
pub fn m_e(cfg: &PointConfiguration, set: &CompactSetModel) -> f64 {
    let total: f64 = cfg
        .points
        .iter()
        .map(|z| set.g(*z))
        .filter(|g| *g > MEMBERSHIP_EPS)
        .fold(0.0, |acc, g| acc + g);
    total / cfg.len() as f64
}

/// Arithmetic mean of the `m`-th powers.
pub fn moment(cfg: &PointConfiguration, m: u32) -> Complex64 {
    cfg.points.iter().map(|z| z.powu(m)).sum::<Complex64>() / cfg.len() as f64
}

/// `(1/n) sum_{|z_k| >= R} log |z_k|`.
pub fn tail_log_moment(cfg: &PointConfiguration, radius: f64) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(Error::invalid("tail radius must be positive"));
    }
    let total: f64 = cfg
        .points
        .iter()
        .filter(|z| z.norm() >= radius)
        .map(|z| z.norm().ln())
        .sum();
    Ok(total / cfg.len() as f64)
}

/// `log |P_n(z)|` for the monic polynomial with the configuration's zeros.
pub fn log_abs_poly(points: &[Complex64], z: Complex64) -> f64 {
    points.iter().map(|p| (z - p).norm().ln()).sum()
}

/// `log ||P_n||_E` from a boundary mesh of at least `max(res, 64 n)` nodes
/// with local golden-section refinement around the best nodes.
pub fn log_sup_norm(points: &[Complex64], set: &CompactSetModel) -> Result<f64> {
    let resolution = set.mesh_resolution().max(64 * points.len());
    let mesh = set.candidate_mesh(resolution)?;
    let values: Vec<f64> = mesh.nodes.iter().map(|t| log_abs_poly(points, *t)).collect();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|a, b| values[*b].total_cmp(&values[*a]).then(a.cmp(b)));
    let mut best = values[order[0]];
    for &idx in order.iter().take(8) {
        let (_, v) = golden_max(
            |s| match mesh.local_point(idx, s) {
                Some(t) => log_abs_poly(points, t),
                None => f64::NEG_INFINITY,
            },
            -1.0,
            1.0,
            1e-12,
        );
        best = best.max(v);
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyReport {
    pub n: usize,
    #[serde(serialize_with = "serialize_lossless")]
    pub log_vandermonde: f64,
    #[serde(serialize_with = "serialize_lossless")]
    pub discrete_energy: f64,
    pub nth_diameter_from_config: f64,
    pub m_e: f64,
    pub tail_radius: f64,
    pub tail_log_moment: f64,
}

impl EnergyReport {
    pub fn new(cfg: &PointConfiguration, set: &CompactSetModel, tail_radius: f64) -> Result<Self> {
        let log_v = log_vandermonde(cfg);
        let energy = energy_from_log_vandermonde(log_v, cfg.len());
        Ok(Self {
            n: cfg.len(),
            log_vandermonde: log_v,
            discrete_energy: energy,
            nth_diameter_from_config: (-energy).exp(),
            m_e: m_e(cfg, set),
            tail_radius,
            tail_log_moment: tail_log_moment(cfg, tail_radius)?,
        })
    }

    pub const CSV_HEADER: &'static str = "n,log_vandermonde,discrete_energy,m_E";

    pub fn csv_row(&self) -> String {
        use crate::report::fmt_f64;
        format!(
            "{},{},{},{}",
            self.n,
            fmt_f64(self.log_vandermonde),
            fmt_f64(self.discrete_energy),
            fmt_f64(self.m_e)
        )
    }
}

/// Terms of the inequality chain
/// `m_E <= (1/n) sum g(z_k) = int log|P_n|^{1/n} dmu_E - log cap <= log ||P_n||^{1/n} - log cap`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BssChain {
    pub m_e: f64,
    /// `int log |P_n|^{1/n} dmu_E`.
    pub mean_log_pn_dmu: f64,
    /// `(1/n) log ||P_n||_E`.
    pub log_supnorm_scaled: f64,
    /// Middle term of the chain, `mean_log_pn_dmu - log cap`.
    pub middle: f64,
    /// Right end of the chain, `log_supnorm_scaled - log cap`.
    pub right: f64,
    pub inequalities_hold: bool,
}

pub const CHAIN_TOLERANCE: f64 = 1e-6;

pub fn bss_chain_check(cfg: &PointConfiguration, set: &CompactSetModel) -> Result<BssChain> {
    let n = cfg.len() as f64;
    let m = m_e(cfg, set);
    let mean_log = cfg.points.iter().map(|z| set.log_potential(*z)).sum::<f64>() / n;
    let sup = log_sup_norm(&cfg.points, set)? / n;
    let log_cap = set.capacity().ln();
    let middle = mean_log - log_cap;
    let right = sup - log_cap;
    let holds = m <= middle + CHAIN_TOLERANCE && middle <= right + CHAIN_TOLERANCE;
    Ok(BssChain {
        m_e: m,
        mean_log_pn_dmu: mean_log,
        log_supnorm_scaled: sup,
        middle,
        right,
        inequalities_hold: holds,
    })
}
