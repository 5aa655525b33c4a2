//! Compactly supported test functions with certified continuity and
//! Dirichlet-integral bounds, and a registry that builds them by name.
//!
//! The built-in family multiplies a harmonic or polynomial core `h` by a
//! radial cutoff
//!
//! ```text
//! chi(rho) = 1                                     rho <= R0
//!          = (1 + cos(pi (rho - R0) / (R1 - R0))) / 2   R0 < rho < R1
//!          = 0                                     rho >= R1
//! ```
//!
//! with `|chi'| <= c = pi / (2 (R1 - R0))`. For every core `|h| <= rho^m`
//! and `|grad h| = m rho^(m-1)` (`|z|^2` counts as `m = 2`), so on the
//! support
//!
//! ```text
//! |grad phi| <= chi |grad h| + |chi'| |h| <= m R1^(m-1) + c R1^m =: A
//! ```
//!
//! which gives `omega(r) <= min(A r, 2 R1^m)`. For the Dirichlet integral
//! the inner disk is exact, `int_{rho<=R0} m^2 rho^(2m-2) = pi m R0^(2m)`,
//! and on the ramp annulus the same pointwise gradient bound with `rho` in
//! place of `R1` is integrated in closed form.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::set_catalog::CompactSetModel;

/// Gap between the set and the start of the cutoff ramp.
pub const DEFAULT_RAMP_OFFSET: f64 = 0.2;
pub const DEFAULT_RAMP_WIDTH: f64 = 0.8;

pub trait TestFunction: Send + Sync {
    fn name(&self) -> String;
    fn eval(&self, z: Complex64) -> f64;
    /// `eval` vanishes for `|z| > support_radius`.
    fn support_radius(&self) -> f64;
    /// Certified upper bound for the modulus of continuity at `r`.
    fn modulus_bound(&self, r: f64) -> f64;
    /// Certified upper bound for `int |grad phi|^2`.
    fn dirichlet_bound(&self) -> f64;
    fn lipschitz(&self) -> Option<f64>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Core {
    RePow(u32),
    ImPow(u32),
    AbsSquared,
}

impl Core {
    fn degree(self) -> u32 {
        match self {
            Core::RePow(m) | Core::ImPow(m) => m,
            Core::AbsSquared => 2,
        }
    }

    fn eval(self, z: Complex64) -> f64 {
        match self {
            Core::RePow(m) => z.powu(m).re,
            Core::ImPow(m) => z.powu(m).im,
            Core::AbsSquared => z.norm_sqr(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadialCutoff {
    core: Core,
    r0: f64,
    r1: f64,
}

impl RadialCutoff {
    pub fn new(core: Core, r0: f64, r1: f64) -> Result<Self> {
        if core.degree() == 0 {
            return Err(Error::invalid("test function power must be >= 1"));
        }
        if !(r0 > 0.0 && r1 > r0 && r1.is_finite()) {
            return Err(Error::invalid(format!("cutoff radii need 0 < R0 < R1, got {r0}, {r1}")));
        }
        Ok(Self { core, r0, r1 })
    }

    /// Cutoff equal to the core on a neighbourhood of `set`.
    pub fn around(core: Core, set: &CompactSetModel) -> Result<Self> {
        let r0 = set.bounding_radius() + DEFAULT_RAMP_OFFSET;
        Self::new(core, r0, r0 + DEFAULT_RAMP_WIDTH)
    }

    pub fn radii(&self) -> (f64, f64) {
        (self.r0, self.r1)
    }

    fn cutoff(&self, rho: f64) -> f64 {
        if rho <= self.r0 {
            1.0
        } else if rho >= self.r1 {
            0.0
        } else {
            0.5 * (1.0 + (PI * (rho - self.r0) / (self.r1 - self.r0)).cos())
        }
    }

    fn slope_bound(&self) -> f64 {
        PI / (2.0 * (self.r1 - self.r0))
    }

    fn lipschitz_constant(&self) -> f64 {
        let m = self.core.degree() as i32;
        m as f64 * self.r1.powi(m - 1) + self.slope_bound() * self.r1.powi(m)
    }
}

impl TestFunction for RadialCutoff {
    fn name(&self) -> String {
        match self.core {
            Core::RePow(m) => format!("re:{m}"),
            Core::ImPow(m) => format!("im:{m}"),
            Core::AbsSquared => "abs2".to_owned(),
        }
    }

    fn eval(&self, z: Complex64) -> f64 {
        let chi = self.cutoff(z.norm());
        if chi == 0.0 {
            0.0
        } else {
            chi * self.core.eval(z)
        }
    }

    fn support_radius(&self) -> f64 {
        self.r1
    }

    fn modulus_bound(&self, r: f64) -> f64 {
        let m = self.core.degree() as i32;
        (self.lipschitz_constant() * r).min(2.0 * self.r1.powi(m))
    }

    fn dirichlet_bound(&self) -> f64 {
        let m = self.core.degree() as i32;
        let inner = PI * m as f64 * self.r0.powi(2 * m);
        // 2 pi int_{R0}^{R1} (m rho^(m-1) + c rho^m)^2 rho d rho, expanded
        let c = self.slope_bound();
        let mf = m as f64;
        let span = |k: i32| (self.r1.powi(k) - self.r0.powi(k)) / k as f64;
        let ramp = 2.0 * PI * (mf * mf * span(2 * m) + 2.0 * mf * c * span(2 * m + 1) + c * c * span(2 * m + 2));
        inner + ramp
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(self.lipschitz_constant())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ZeroFunction;

impl TestFunction for ZeroFunction {
    fn name(&self) -> String {
        "zero".to_owned()
    }

    fn eval(&self, _z: Complex64) -> f64 {
        0.0
    }

    fn support_radius(&self) -> f64 {
        1.0
    }

    fn modulus_bound(&self, _r: f64) -> f64 {
        0.0
    }

    fn dirichlet_bound(&self) -> f64 {
        0.0
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// `c * phi`; every bound scales with `|c|` (the Dirichlet bound with `c^2`).
pub struct Scaled<T> {
    pub inner: T,
    pub factor: f64,
}

impl<T: TestFunction> TestFunction for Scaled<T> {
    fn name(&self) -> String {
        format!("{}*{}", self.factor, self.inner.name())
    }

    fn eval(&self, z: Complex64) -> f64 {
        self.factor * self.inner.eval(z)
    }

    fn support_radius(&self) -> f64 {
        self.inner.support_radius()
    }

    fn modulus_bound(&self, r: f64) -> f64 {
        self.factor.abs() * self.inner.modulus_bound(r)
    }

    fn dirichlet_bound(&self) -> f64 {
        self.factor * self.factor * self.inner.dirichlet_bound()
    }

    fn lipschitz(&self) -> Option<f64> {
        self.inner.lipschitz().map(|a| self.factor.abs() * a)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModulusAudit {
    pub pairs: usize,
    /// Largest `|phi(z) - phi(w)| / omega(|z - w|)` seen.
    pub max_ratio: f64,
    pub max_support_violation: f64,
    pub passed: bool,
}

/// Checks the modulus bound on random pairs in the support disk (pairs at
/// every scale from `1e-6` up to the support diameter) and that `phi`
/// vanishes outside the support.
pub fn audit_test_function(phi: &dyn TestFunction, pairs: usize, seed: u64) -> ModulusAudit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = phi.support_radius();
    let mut max_ratio = 0.0_f64;
    let mut max_outside = 0.0_f64;
    for _ in 0..pairs {
        let z = Complex64::from_polar(1.1 * radius * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI));
        let dist = 10f64.powf(rng.gen_range(-6.0..(2.0 * radius).log10()));
        let w = z + Complex64::from_polar(dist, rng.gen_range(0.0..2.0 * PI));
        let diff = (phi.eval(z) - phi.eval(w)).abs();
        let bound = phi.modulus_bound((z - w).norm());
        if diff > 0.0 {
            max_ratio = max_ratio.max(if bound > 0.0 { diff / bound } else { f64::INFINITY });
        }
        if z.norm() > radius {
            max_outside = max_outside.max(phi.eval(z).abs());
        }
    }
    ModulusAudit {
        pairs,
        max_ratio,
        max_support_violation: max_outside,
        passed: max_ratio <= 1.0 + 1e-9 && max_outside == 0.0,
    }
}

type Factory = fn(Option<u32>, &CompactSetModel) -> Result<Box<dyn TestFunction>>;

/// Test functions selectable as `zero`, `re:m`, `im:m` or `abs2`.
pub struct TestFunctionRegistry {
    factories: BTreeMap<&'static str, Factory>,
}

impl TestFunctionRegistry {
    pub fn empty() -> Self {
        Self { factories: BTreeMap::new() }
    }

    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        reg.register("zero", |_, _| Ok(Box::new(ZeroFunction)));
        reg.register("re", |m, set| Ok(Box::new(RadialCutoff::around(Core::RePow(m.unwrap_or(1)), set)?)));
        reg.register("im", |m, set| Ok(Box::new(RadialCutoff::around(Core::ImPow(m.unwrap_or(1)), set)?)));
        reg.register("abs2", |_, set| Ok(Box::new(RadialCutoff::around(Core::AbsSquared, set)?)));
        reg
    }

    pub fn register(&mut self, name: &'static str, factory: Factory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.factories.keys().copied().collect()
    }

    /// Builds `spec` (`name` or `name:power`) with its cutoff sized for `set`.
    pub fn build(&self, spec: &str, set: &CompactSetModel) -> Result<Box<dyn TestFunction>> {
        let (name, power) = match spec.split_once(':') {
            Some((name, p)) => {
                let p = p
                    .parse::<u32>()
                    .map_err(|_| Error::invalid(format!("bad power in test function '{spec}'")))?;
                (name, Some(p))
            }
            None => (spec, None),
        };
        let factory = self.factories.get(name).ok_or_else(|| {
            Error::invalid(format!("unknown test function '{spec}' (known: {})", self.names().join(", ")))
        })?;
        factory(power, set)
    }
}

impl Default for TestFunctionRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Midpoint-rule Dirichlet integral from central differences.
    fn numeric_dirichlet(phi: &dyn TestFunction, cells: usize) -> f64 {
        let r = phi.support_radius();
        let h = 2.0 * r / cells as f64;
        let e = 1e-6;
        let mut total = 0.0;
        for i in 0..cells {
            for j in 0..cells {
                let z = c(-r + h * (i as f64 + 0.5), -r + h * (j as f64 + 0.5));
                let dx = (phi.eval(z + e) - phi.eval(z - e)) / (2.0 * e);
                let dy = (phi.eval(z + c(0.0, e)) - phi.eval(z - c(0.0, e))) / (2.0 * e);
                total += (dx * dx + dy * dy) * h * h;
            }
        }
        total
    }

    #[test]
    fn unit_disk_defaults() {
        let phi = RadialCutoff::around(Core::RePow(1), &CompactSetModel::unit_disk()).unwrap();
        let (r0, r1) = phi.radii();
        assert_abs_diff_eq!(r0, 1.2, epsilon = 1e-15);
        assert_abs_diff_eq!(r1, 2.0, epsilon = 1e-15);
        assert_eq!(phi.eval(c(0.7, -0.3)), 0.7);
        assert_eq!(phi.eval(c(2.5, 0.0)), 0.0);
        // half-way down the ramp
        assert_abs_diff_eq!(phi.eval(c(1.6, 0.0)), 0.8, epsilon = 1e-15);
    }

    #[test]
    fn dirichlet_bounds_dominate_numeric_integrals() {
        let disk = CompactSetModel::unit_disk();
        for spec in ["re:1", "im:2", "abs2", "re:3"] {
            let phi = TestFunctionRegistry::with_builtins().build(spec, &disk).unwrap();
            let numeric = numeric_dirichlet(phi.as_ref(), 400);
            assert!(numeric <= phi.dirichlet_bound(), "{spec}: {numeric} > {}", phi.dirichlet_bound());
            // not absurdly loose either
            assert!(phi.dirichlet_bound() < 20.0 * numeric, "{spec}: {numeric} vs {}", phi.dirichlet_bound());
        }
    }

    #[test]
    fn inner_dirichlet_part_is_exact() {
        // int_{|z|<=R0} |grad Re z^2|^2 = 2 pi R0^4; the ramp adds a positive amount
        let phi = RadialCutoff::new(Core::RePow(2), 1.0, 2.0).unwrap();
        let numeric = numeric_dirichlet(&phi, 400);
        assert!(numeric > 2.0 * PI);
        assert!(phi.dirichlet_bound() > 2.0 * PI + 1e-9);
    }

    #[test]
    fn modulus_audits_pass() {
        let reg = TestFunctionRegistry::with_builtins();
        for set in [CompactSetModel::unit_disk(), CompactSetModel::unit_segment(), CompactSetModel::preset("lemniscate").unwrap()] {
            for spec in ["zero", "re:1", "im:2", "abs2"] {
                let phi = reg.build(spec, &set).unwrap();
                let audit = audit_test_function(phi.as_ref(), 10_000, 7);
                assert!(audit.passed, "{spec} on {}: {audit:?}", set.label());
                if let Some(a) = phi.lipschitz() {
                    for r in [1e-3, 0.1, 1.0] {
                        assert!(phi.modulus_bound(r) <= a * r + 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn scaling_is_linear() {
        let phi = RadialCutoff::around(Core::RePow(2), &CompactSetModel::unit_disk()).unwrap();
        let scaled = Scaled { inner: phi.clone(), factor: -3.0 };
        assert_eq!(scaled.eval(c(0.5, 0.5)), -3.0 * phi.eval(c(0.5, 0.5)));
        assert_eq!(scaled.modulus_bound(0.1), 3.0 * phi.modulus_bound(0.1));
        assert_eq!(scaled.dirichlet_bound(), 9.0 * phi.dirichlet_bound());
    }

    #[test]
    fn registry_parsing() {
        let reg = TestFunctionRegistry::with_builtins();
        let disk = CompactSetModel::unit_disk();
        assert_eq!(reg.build("re:3", &disk).unwrap().name(), "re:3");
        assert_eq!(reg.build("re", &disk).unwrap().name(), "re:1");
        assert!(reg.build("re:x", &disk).is_err());
        assert!(reg.build("re:0", &disk).is_err());
        assert!(reg.build("sin", &disk).is_err());
        assert_eq!(reg.build("zero", &disk).unwrap().dirichlet_bound(), 0.0);
    }
}
