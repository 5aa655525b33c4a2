//! Discrepancy certificates between a configuration's counting measure and
//! the equilibrium measure, the smoothed-measure energy behind them, and
//! rate diagnostics for polynomials whose zeros are the configuration.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Mutex;

use num_complex::Complex64;
use serde::Serialize;

use crate::discrete_energy::{discrete_energy, log_abs_poly, log_sup_norm, m_e, moment, PointConfiguration};
use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, golden_max};
use crate::report::{fmt_f64, serialize_lossless, Table};
use crate::set_catalog::{CompactSetModel, EquilibriumQuadrature, SetShape, MEMBERSHIP_EPS};
use crate::test_functions::TestFunction;

pub const QUADRATURE_NODES: usize = 4096;
pub const QUADRATURE_TOLERANCE: f64 = 1e-6;
pub const AUTO_RADII: usize = 64;
pub const AUTO_MIN_RADIUS: f64 = 1e-6;
const BAND_DIRECTIONS: usize = 16;
const CIRCLE_SAMPLES: usize = 4096;
const ARC_ORDER: usize = 48;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum RadiusPolicy {
    /// Minimize the right-hand side over a log-spaced grid of radii.
    #[default]
    Auto,
    Fixed(f64),
}

impl std::str::FromStr for RadiusPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(Self::Auto);
        }
        match s.parse::<f64>() {
            Ok(r) if r > 0.0 && r.is_finite() => Ok(Self::Fixed(r)),
            _ => Err(Error::invalid(format!("radius must be 'auto' or a positive number, got '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ITerms {
    pub two_m_e: f64,
    /// `((n-1)/n) I_hat - V_E`.
    #[serde(serialize_with = "serialize_lossless")]
    pub energy_excess: f64,
    pub minus_log_r_over_n: f64,
    /// `2 max_{d_E <= 2r} g`.
    pub green_band_term: f64,
}

impl ITerms {
    pub fn total(&self) -> f64 {
        self.two_m_e + self.energy_excess + self.minus_log_r_over_n + self.green_band_term
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyCertificate {
    pub test_function: String,
    pub n: usize,
    pub lhs: f64,
    #[serde(serialize_with = "serialize_lossless")]
    pub rhs: f64,
    pub r_used: f64,
    #[serde(rename = "I_terms")]
    pub i_terms: ITerms,
    #[serde(rename = "I_clamped")]
    pub i_clamped: bool,
    pub omega: f64,
    pub dirichlet: f64,
}

impl DiscrepancyCertificate {
    pub fn holds(&self, tolerance: f64) -> bool {
        self.lhs <= self.rhs + tolerance
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SmoothedEnergy {
    pub r: f64,
    /// Energy of `tau_n^r - mu_E`, where `tau_n^r` spreads each point
    /// uniformly over the circle of radius `r` around it.
    pub i_sigma: f64,
    pub bound_22: f64,
    pub slack: f64,
}

/// Evaluates certificates against one set, caching the green-band maxima
/// per radius so radius sweeps over many configurations stay cheap.
pub struct DiscrepancyEngine<'a> {
    set: &'a CompactSetModel,
    quadrature: EquilibriumQuadrature,
    fine: EquilibriumQuadrature,
    band_cache: Mutex<BTreeMap<u64, f64>>,
}

impl<'a> DiscrepancyEngine<'a> {
    pub fn new(set: &'a CompactSetModel) -> Result<Self> {
        Ok(Self {
            set,
            quadrature: set.equilibrium_quadrature(QUADRATURE_NODES)?,
            fine: set.equilibrium_quadrature(2 * QUADRATURE_NODES)?,
            band_cache: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn set(&self) -> &CompactSetModel {
        self.set
    }

    /// `int phi dmu_E`, checked against the rule with twice the nodes.
    pub fn integral(&self, phi: &dyn TestFunction) -> Result<f64> {
        let coarse = self.quadrature.integrate(|z| phi.eval(z));
        let fine = self.fine.integrate(|z| phi.eval(z));
        if (coarse - fine).abs() >= QUADRATURE_TOLERANCE {
            return Err(Error::Quadrature(format!(
                "int {} dmu_E: {} nodes give {coarse}, {} give {fine}",
                phi.name(),
                self.quadrature.nodes.len(),
                self.fine.nodes.len()
            )));
        }
        Ok(fine)
    }

    /// `|(1/n) sum phi(z_k) - int phi dmu_E|`.
    pub fn lhs(&self, phi: &dyn TestFunction, cfg: &PointConfiguration) -> Result<f64> {
        let mean = cfg.points().iter().map(|z| phi.eval(*z)).sum::<f64>() / cfg.len() as f64;
        Ok((mean - self.integral(phi)?).abs())
    }

    /// `max g` over `{d_E <= 2r}`.
    pub fn band_max(&self, r: f64) -> f64 {
        let key = r.to_bits();
        if let Some(v) = self.band_cache.lock().expect("band cache poisoned").get(&key) {
            return *v;
        }
        let v = green_band_max(self.set, r);
        self.band_cache.lock().expect("band cache poisoned").insert(key, v);
        v
    }

    /// The log-spaced radii tried by [`RadiusPolicy::Auto`].
    pub fn radius_grid(&self) -> Vec<f64> {
        let hi = self.set.diameter();
        (0..AUTO_RADII)
            .map(|j| AUTO_MIN_RADIUS * (hi / AUTO_MIN_RADIUS).powf(j as f64 / (AUTO_RADII - 1) as f64))
            .collect()
    }

    pub fn i_terms(&self, cfg: &PointConfiguration, r: f64) -> ITerms {
        let n = cfg.len() as f64;
        let energy = discrete_energy(cfg);
        ITerms {
            two_m_e: 2.0 * m_e(cfg, self.set),
            energy_excess: (n - 1.0) / n * energy - self.set.robin_constant(),
            minus_log_r_over_n: -r.ln() / n,
            green_band_term: 2.0 * self.band_max(r),
        }
    }

    pub fn certificate(
        &self,
        phi: &dyn TestFunction,
        cfg: &PointConfiguration,
        policy: RadiusPolicy,
    ) -> Result<DiscrepancyCertificate> {
        let lhs = self.lhs(phi, cfg)?;
        let radii = match policy {
            RadiusPolicy::Fixed(r) if r > 0.0 && r.is_finite() => vec![r],
            RadiusPolicy::Fixed(r) => return Err(Error::invalid(format!("radius must be positive, got {r}"))),
            RadiusPolicy::Auto => self.radius_grid(),
        };
        let mut best: Option<DiscrepancyCertificate> = None;
        for r in radii {
            let cert = self.certificate_at(phi, cfg, lhs, r);
            if best.as_ref().is_none_or(|b| cert.rhs < b.rhs) {
                best = Some(cert);
            }
        }
        Ok(best.expect("at least one radius"))
    }

    fn certificate_at(&self, phi: &dyn TestFunction, cfg: &PointConfiguration, lhs: f64, r: f64) -> DiscrepancyCertificate {
        let terms = self.i_terms(cfg, r);
        let i = terms.total();
        let omega = phi.modulus_bound(r);
        let dirichlet = phi.dirichlet_bound();
        let i_clamped = i < 0.0;
        let rhs = if i.is_infinite() {
            f64::INFINITY
        } else {
            omega + (dirichlet / (2.0 * PI)).sqrt() * i.max(0.0).sqrt()
        };
        DiscrepancyCertificate {
            test_function: phi.name(),
            n: cfg.len(),
            lhs,
            rhs,
            r_used: r,
            i_terms: terms,
            i_clamped,
            omega,
            dirichlet,
        }
    }

    pub fn smoothed_energy(&self, cfg: &PointConfiguration, r: f64) -> Result<SmoothedEnergy> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::invalid(format!("smoothing radius must be positive, got {r}")));
        }
        if cfg.has_duplicates() {
            return Err(Error::invalid("smoothed energy needs distinct points"));
        }
        let pts = cfg.points();
        let n = pts.len() as f64;
        let (gl_x, gl_w) = gauss_legendre(ARC_ORDER);
        let mut pair_sum = 0.0;
        for (j, a) in pts.iter().enumerate() {
            for b in &pts[j + 1..] {
                pair_sum += 2.0 * circle_pair_energy((a - b).norm(), r, &gl_x, &gl_w);
            }
        }
        let self_term = (n * -r.ln() + pair_sum) / (n * n);
        let v = self.set.robin_constant();
        let cross = pts.iter().map(|z| v - self.circle_mean_green(*z, r)).sum::<f64>() / n;
        let i_sigma = self_term - 2.0 * cross + v;
        let bound_22 = self.i_terms(cfg, r).total();
        Ok(SmoothedEnergy { r, i_sigma, bound_22, slack: bound_22 - i_sigma })
    }

    fn circle_mean_green(&self, z: Complex64, r: f64) -> f64 {
        (0..CIRCLE_SAMPLES)
            .map(|j| self.set.g(z + Complex64::from_polar(r, 2.0 * PI * j as f64 / CIRCLE_SAMPLES as f64)))
            .sum::<f64>()
            / CIRCLE_SAMPLES as f64
    }
}

/// Mutual energy `-int int log|s - t|` of uniform measures on two circles of
/// radius `r` whose centres are `d` apart. The potential of one circle is
/// `-log max(r, |z - c|)`; averaged over the other circle this is `-log d`
/// once the circles are disjoint (`d >= 2r`), and otherwise splits into the
/// arc outside the first disk (`|s| <= s0`) and the arc inside it.
fn circle_pair_energy(d: f64, r: f64, gl_x: &[f64], gl_w: &[f64]) -> f64 {
    if d >= 2.0 * r {
        return -d.ln();
    }
    let s0 = (-d / (2.0 * r)).clamp(-1.0, 1.0).acos();
    let half = 0.5 * s0;
    let outside: f64 = gl_x
        .iter()
        .zip(gl_w)
        .map(|(x, w)| {
            let s = half * (x + 1.0);
            w * half * 0.5 * (d * d + r * r + 2.0 * d * r * s.cos()).ln()
        })
        .sum();
    -(2.0 * outside + (2.0 * PI - 2.0 * s0) * r.ln()) / (2.0 * PI)
}

/// `max g` over the band `{d_E <= 2r}`. The maximum sits on the outer ring
/// `{d_E = 2r}`, which is swept as `b + 2r u` over boundary nodes `b` and a
/// fan of unit directions `u`, then refined in the angle of `u`.
pub fn green_band_max(set: &CompactSetModel, r: f64) -> f64 {
    let reach = 2.0 * r;
    if let SetShape::Disk { radius, .. } = set.shape() {
        return (1.0 + reach / radius).ln();
    }
    let mesh = set.boundary_mesh();
    let mut samples: Vec<(f64, Complex64, f64)> = Vec::with_capacity(mesh.len() * (BAND_DIRECTIONS + 1));
    for b in mesh {
        let normal = set.outward_direction(*b);
        let angles = std::iter::once(normal.arg())
            .chain((0..BAND_DIRECTIONS).map(|k| 2.0 * PI * k as f64 / BAND_DIRECTIONS as f64));
        for a in angles {
            samples.push((set.g(b + Complex64::from_polar(reach, a)), *b, a));
        }
    }
    samples.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut best = samples.first().map_or(0.0, |s| s.0);
    let width = PI / BAND_DIRECTIONS as f64;
    for (_, b, a) in samples.iter().take(8) {
        let (_, v) = golden_max(|t| set.g(b + Complex64::from_polar(reach, t)), a - width, a + width, 1e-10);
        best = best.max(v);
    }
    best
}

pub fn certificate(
    phi: &dyn TestFunction,
    cfg: &PointConfiguration,
    set: &CompactSetModel,
    policy: RadiusPolicy,
) -> Result<DiscrepancyCertificate> {
    DiscrepancyEngine::new(set)?.certificate(phi, cfg, policy)
}

pub fn smoothed_energy(cfg: &PointConfiguration, set: &CompactSetModel, r: f64) -> Result<SmoothedEnergy> {
    DiscrepancyEngine::new(set)?.smoothed_energy(cfg, r)
}

fn log_rate(n: usize) -> f64 {
    let n = n as f64;
    n.ln() / n
}

fn ensure_inside(cfg: &PointConfiguration, set: &CompactSetModel, what: &str) -> Result<()> {
    if cfg.points().iter().any(|z| set.g(*z) > MEMBERSHIP_EPS) {
        return Err(Error::invalid(format!("{what} needs a configuration inside the set")));
    }
    Ok(())
}

/// `(I_hat - V_E) n / log n`, the smallest `C1` passing the near-Fekete test.
pub fn near_fekete_constant(cfg: &PointConfiguration, set: &CompactSetModel) -> f64 {
    (discrete_energy(cfg) - set.robin_constant()) / log_rate(cfg.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LipschitzDiscrepancy {
    pub n: usize,
    pub lhs: f64,
    /// `sqrt(max(log n / n, m_E))`.
    pub bound_28: f64,
    pub c4_fitted: f64,
    pub near_fekete_c1: f64,
}

pub fn lipschitz_discrepancy(
    phi: &dyn TestFunction,
    cfg: &PointConfiguration,
    engine: &DiscrepancyEngine<'_>,
) -> Result<LipschitzDiscrepancy> {
    if phi.lipschitz().is_none() {
        return Err(Error::invalid(format!("{} has no Lipschitz constant", phi.name())));
    }
    let set = engine.set();
    let lhs = engine.lhs(phi, cfg)?;
    let shape = log_rate(cfg.len()).max(m_e(cfg, set)).sqrt();
    Ok(LipschitzDiscrepancy {
        n: cfg.len(),
        lhs,
        bound_28: shape,
        c4_fitted: lhs / shape,
        near_fekete_c1: near_fekete_constant(cfg, set),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentDiscrepancy {
    pub n: usize,
    pub m: u32,
    pub value: f64,
    /// `sqrt(log n / n)`.
    pub bound_29_shape: f64,
    pub c5_fitted: f64,
}

pub fn moment_discrepancy(cfg: &PointConfiguration, set: &CompactSetModel, m: u32) -> Result<MomentDiscrepancy> {
    ensure_inside(cfg, set, "moment discrepancy")?;
    let value = (moment(cfg, m) - set.equilibrium_moment(m)?).norm();
    let shape = log_rate(cfg.len()).sqrt();
    Ok(MomentDiscrepancy { n: cfg.len(), m, value, bound_29_shape: shape, c5_fitted: value / shape })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthCheck {
    pub n: usize,
    /// `max |(1/n) log |P_n| + V_E - g|` over the level curve `g = 1/n`.
    pub max_abs_defect_on_gamma_n: f64,
    pub defect_c2: f64,
    /// `log ||P_n||_E + n V_E`.
    pub supnorm_log_excess: f64,
    pub supnorm_c2: f64,
    /// `max(V_E - I_hat, 0)`.
    pub energy_deficit: f64,
    pub energy_c3: f64,
    /// `I_hat` minus the lower bound `(log rho_n - log ||P_n||_{Gamma_n}) / (n - 1)`.
    pub energy_lower_slack: f64,
    pub rho_n: f64,
    /// `(C n)^(-1/s)` from the set's Hölder pair; `rho_n` should not fall below it.
    pub rho_holder_bound: f64,
    pub near_fekete_c1: f64,
}

pub fn polynomial_growth_check(cfg: &PointConfiguration, set: &CompactSetModel) -> Result<GrowthCheck> {
    ensure_inside(cfg, set, "polynomial growth check")?;
    let pts = cfg.points();
    let n = pts.len();
    let nf = n as f64;
    let v = set.robin_constant();
    let curve = set.level_curve(n, set.mesh_resolution().max(64 * n))?;
    let mut defect = 0.0_f64;
    let mut log_norm_gamma = f64::NEG_INFINITY;
    for z in &curve.points {
        let lp = log_abs_poly(pts, *z);
        defect = defect.max((lp / nf + v - set.g(*z)).abs());
        log_norm_gamma = log_norm_gamma.max(lp);
    }
    let log_norm = log_sup_norm(pts, set)?;
    let energy = discrete_energy(cfg);
    let rate = nf.ln() / nf.sqrt();
    let holder = set.holder_params()?;
    let excess = log_norm + nf * v;
    let deficit = (v - energy).max(0.0);
    Ok(GrowthCheck {
        n,
        max_abs_defect_on_gamma_n: defect,
        defect_c2: defect / rate,
        supnorm_log_excess: excess,
        supnorm_c2: excess / (nf.sqrt() * nf.ln()),
        energy_deficit: deficit,
        energy_c3: deficit / rate,
        energy_lower_slack: energy - (curve.rho.ln() - log_norm_gamma) / (nf - 1.0),
        rho_n: curve.rho,
        rho_holder_bound: (holder.c * nf).powf(-1.0 / holder.s),
        near_fekete_c1: near_fekete_constant(cfg, set),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormRow {
    pub n: usize,
    /// `||P_n||_E^(1/n)`.
    pub norm_root: f64,
    pub capacity: f64,
    pub gap: f64,
    /// `||P_n||^(1/n) >= cap(E) - 1e-8`.
    pub lower_bound_ok: bool,
}

pub const NORM_LOWER_TOLERANCE: f64 = 1e-8;

/// One row per configuration, ordered by `n`.
pub fn norm_asymptotics(sweep: &[PointConfiguration], set: &CompactSetModel) -> Result<Vec<NormRow>> {
    let cap = set.capacity();
    let mut rows = sweep
        .iter()
        .map(|cfg| {
            let root = (log_sup_norm(cfg.points(), set)? / cfg.len() as f64).exp();
            Ok(NormRow {
                n: cfg.len(),
                norm_root: root,
                capacity: cap,
                gap: root - cap,
                lower_bound_ok: root >= cap - NORM_LOWER_TOLERANCE,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| r.n);
    Ok(rows)
}

/// One line of a rate sweep: the measured quantity, its bound (or rate
/// shape) and their ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub lhs: f64,
    #[serde(serialize_with = "serialize_lossless")]
    pub rhs: f64,
    pub fitted_constant: f64,
    pub rate_normalizer: f64,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut sorted = rows.to_vec();
    sorted.sort_by_key(|r| r.n);
    let mut table = Table::new(&["n", "lhs", "rhs", "fitted_constant", "rate_normalizer"]);
    for r in sorted {
        table.push(vec![
            r.n.to_string(),
            fmt_f64(r.lhs),
            fmt_f64(r.rhs),
            fmt_f64(r.fitted_constant),
            fmt_f64(r.rate_normalizer),
        ]);
    }
    table.to_csv()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point_generation::{leja_points, LejaSeed};
    use crate::test_functions::{Core, RadialCutoff, Scaled, TestFunctionRegistry, ZeroFunction};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn leja(set: &CompactSetModel, n: usize) -> PointConfiguration {
        leja_points(set, n, LejaSeed::Default, None).unwrap().config()
    }

    #[test]
    fn zero_function_certificate_is_trivial() {
        let disk = CompactSetModel::unit_disk();
        let cfg = PointConfiguration::roots_of_unity(8).unwrap();
        let cert = certificate(&ZeroFunction, &cfg, &disk, RadiusPolicy::Fixed(0.1)).unwrap();
        assert_eq!(cert.lhs, 0.0);
        assert_eq!(cert.rhs, 0.0);
    }

    #[test]
    fn roots_of_unity_have_zero_lhs_for_re_z() {
        let disk = CompactSetModel::unit_disk();
        let phi = RadialCutoff::around(Core::RePow(1), &disk).unwrap();
        let cfg = PointConfiguration::roots_of_unity(16).unwrap();
        let cert = certificate(&phi, &cfg, &disk, RadiusPolicy::Auto).unwrap();
        assert!(cert.lhs < 1e-14);
        assert!(cert.rhs > 0.0);
    }

    #[test]
    fn terms_reconstruct_rhs() {
        let disk = CompactSetModel::unit_disk();
        let phi = RadialCutoff::around(Core::AbsSquared, &disk).unwrap();
        let cfg = leja(&disk, 20);
        let r = 0.05;
        let cert = certificate(&phi, &cfg, &disk, RadiusPolicy::Fixed(r)).unwrap();
        let t = cert.i_terms;
        assert_abs_diff_eq!(t.green_band_term, 2.0 * (1.1f64).ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(t.minus_log_r_over_n, -(r.ln()) / 20.0, epsilon = 1e-15);
        let rhs = phi.modulus_bound(r) + (phi.dirichlet_bound() / (2.0 * PI)).sqrt() * t.total().max(0.0).sqrt();
        assert_eq!(cert.rhs, rhs);
        assert!(cert.holds(0.0));
    }

    #[test]
    fn auto_radius_is_the_grid_minimum() {
        let set = CompactSetModel::unit_segment();
        let engine = DiscrepancyEngine::new(&set).unwrap();
        let phi = RadialCutoff::around(Core::RePow(2), &set).unwrap();
        let cfg = leja(&set, 32);
        let auto = engine.certificate(&phi, &cfg, RadiusPolicy::Auto).unwrap();
        for r in engine.radius_grid() {
            let fixed = engine.certificate(&phi, &cfg, RadiusPolicy::Fixed(r)).unwrap();
            assert!(auto.rhs <= fixed.rhs);
        }
    }

    #[test]
    fn duplicate_points_give_infinite_rhs() {
        let disk = CompactSetModel::unit_disk();
        let phi = RadialCutoff::around(Core::RePow(1), &disk).unwrap();
        let cfg = PointConfiguration::new(vec![c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)], "dup").unwrap();
        let cert = certificate(&phi, &cfg, &disk, RadiusPolicy::Fixed(0.1)).unwrap();
        assert_eq!(cert.rhs, f64::INFINITY);
        assert!(smoothed_energy(&cfg, &disk, 0.1).is_err());
    }

    #[test]
    fn scaling_phi_scales_both_sides() {
        let disk = CompactSetModel::unit_disk();
        let phi = RadialCutoff::around(Core::ImPow(1), &disk).unwrap();
        let cfg = leja(&disk, 9);
        let a = certificate(&phi, &cfg, &disk, RadiusPolicy::Fixed(0.01)).unwrap();
        let scaled = Scaled { inner: phi, factor: -2.5 };
        let b = certificate(&scaled, &cfg, &disk, RadiusPolicy::Fixed(0.01)).unwrap();
        assert_abs_diff_eq!(b.lhs, 2.5 * a.lhs, epsilon = 1e-14);
        assert_abs_diff_eq!(b.rhs, 2.5 * a.rhs, epsilon = 1e-12);
    }

    #[test]
    fn band_max_on_segment_is_at_the_tips() {
        let set = CompactSetModel::unit_segment();
        for r in [1e-4, 1e-2, 0.1] {
            // at distance 2r the largest value is straight out from an endpoint
            let tip = set.green(c(1.0 + 2.0 * r, 0.0)).unwrap();
            assert_abs_diff_eq!(green_band_max(&set, r), tip, epsilon = 1e-9);
        }
    }

    #[test]
    fn circle_pair_energy_limits() {
        let (x, w) = gauss_legendre(ARC_ORDER);
        // concentric circles: potential is -log r everywhere on the circle
        assert_abs_diff_eq!(circle_pair_energy(0.0, 0.5, &x, &w), -(0.5f64).ln(), epsilon = 1e-13);
        // continuity at d = 2r
        let r = 0.3;
        let inside = circle_pair_energy(2.0 * r - 1e-12, r, &x, &w);
        assert_abs_diff_eq!(inside, -(2.0 * r).ln(), epsilon = 1e-9);
    }

    #[test]
    fn circle_pair_energy_matches_brute_force() {
        let (x, w) = gauss_legendre(ARC_ORDER);
        let (d, r) = (0.37, 0.25);
        let m = 20_000;
        let brute = (0..m)
            .map(|j| {
                let s = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                let p = c(d, 0.0) + Complex64::from_polar(r, s);
                -(p.norm().max(r)).ln()
            })
            .sum::<f64>()
            / m as f64;
        assert_abs_diff_eq!(circle_pair_energy(d, r, &x, &w), brute, epsilon = 1e-7);
    }

    #[test]
    fn smoothed_energy_two_points() {
        let disk = CompactSetModel::unit_disk();
        let cfg = PointConfiguration::new(vec![c(1.0, 0.0), c(-1.0, 0.0)], "pair").unwrap();
        for r in [0.1, 1.0] {
            let s = smoothed_energy(&cfg, &disk, r).unwrap();
            assert!(s.i_sigma >= -1e-6, "{s:?}");
            assert!(s.slack >= -1e-6, "{s:?}");
        }
    }

    #[test]
    fn smoothed_energy_of_roots_of_unity_decays() {
        let disk = CompactSetModel::unit_disk();
        let mut last = f64::INFINITY;
        for n in [8, 16, 32, 64] {
            let cfg = PointConfiguration::roots_of_unity(n).unwrap();
            let r = 1.0 / (n * n) as f64;
            let s = smoothed_energy(&cfg, &disk, r).unwrap();
            assert!(s.i_sigma >= -1e-6 && s.slack >= -1e-6);
            assert!(s.i_sigma < last);
            last = s.i_sigma;
        }
    }

    #[test]
    fn moment_discrepancy_examples() {
        let disk = CompactSetModel::unit_disk();
        let cfg = PointConfiguration::roots_of_unity(12).unwrap();
        for m in 1..12 {
            assert!(moment_discrepancy(&cfg, &disk, m).unwrap().value < 1e-12);
        }
        let outside = PointConfiguration::new(vec![c(2.0, 0.0), c(0.0, 0.0)], "x").unwrap();
        assert!(moment_discrepancy(&outside, &disk, 1).is_err());
        let seg = CompactSetModel::unit_segment();
        let md = moment_discrepancy(&leja(&seg, 64), &seg, 2).unwrap();
        assert!(md.value < 0.05);
    }

    #[test]
    fn lipschitz_discrepancy_branches() {
        let disk = CompactSetModel::unit_disk();
        let engine = DiscrepancyEngine::new(&disk).unwrap();
        let phi = TestFunctionRegistry::with_builtins().build("re:1", &disk).unwrap();
        let roots = PointConfiguration::roots_of_unity(10).unwrap();
        let ld = lipschitz_discrepancy(phi.as_ref(), &roots, &engine).unwrap();
        assert!(ld.lhs < 1e-14);
        // a far exterior point makes the m_E branch win: log 10 / 3 > log 3 / 3
        let cfg = PointConfiguration::new(vec![c(10.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0)], "x").unwrap();
        let ld = lipschitz_discrepancy(phi.as_ref(), &cfg, &engine).unwrap();
        assert_abs_diff_eq!(ld.bound_28, ((10f64).ln() / 3.0).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn growth_check_roots_of_unity() {
        let disk = CompactSetModel::unit_disk();
        for n in [8usize, 32] {
            let cfg = PointConfiguration::roots_of_unity(n).unwrap();
            let g = polynomial_growth_check(&cfg, &disk).unwrap();
            // |z^n - 1| on |z| = e^{1/n} lies between e - 1 and e + 1
            assert!(g.max_abs_defect_on_gamma_n <= 0.7 / n as f64);
            assert_abs_diff_eq!(g.supnorm_log_excess, 2f64.ln(), epsilon = 1e-9);
            assert!(g.energy_lower_slack >= -1e-8);
            assert!(g.rho_n >= g.rho_holder_bound);
        }
    }

    #[test]
    fn norm_rows_roots_of_unity() {
        let disk = CompactSetModel::unit_disk();
        let sweep: Vec<_> = [4usize, 2, 16].iter().map(|&n| PointConfiguration::roots_of_unity(n).unwrap()).collect();
        let rows = norm_asymptotics(&sweep, &disk).unwrap();
        assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![2, 4, 16]);
        for r in &rows {
            assert_abs_diff_eq!(r.norm_root, 2f64.powf(1.0 / r.n as f64), epsilon = 1e-9);
            assert!(r.lower_bound_ok);
        }
    }

    #[test]
    fn radius_policy_parsing() {
        assert_eq!("auto".parse::<RadiusPolicy>().unwrap(), RadiusPolicy::Auto);
        assert_eq!("0.25".parse::<RadiusPolicy>().unwrap(), RadiusPolicy::Fixed(0.25));
        assert!("-1".parse::<RadiusPolicy>().is_err());
        assert!("big".parse::<RadiusPolicy>().is_err());
    }

    #[test]
    fn sweep_csv_is_sorted() {
        let rows = [
            SweepRow { n: 16, lhs: 0.1, rhs: 1.0, fitted_constant: 0.1, rate_normalizer: 1.0 },
            SweepRow { n: 8, lhs: 0.2, rhs: f64::INFINITY, fitted_constant: 0.0, rate_normalizer: 1.0 },
        ];
        let csv = sweep_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,lhs,rhs,fitted_constant,rate_normalizer");
        assert_eq!(lines[1], "8,0.2,inf,0.0,1.0");
    }
}
