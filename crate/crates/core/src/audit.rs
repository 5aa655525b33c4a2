//! The invariant battery behind the `audit` command. Each check is cheap
//! enough to run on every build and reports a one-line detail.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::discrepancy::{moment_discrepancy, DiscrepancyEngine, RadiusPolicy};
use crate::discrete_energy::{
    bss_chain_check, discrete_energy, log_vandermonde, m_e, tail_log_moment, PointConfiguration,
};
use crate::error::Result;
use crate::integer_poly::{build_example_poly, example_energy, is_exact_product, PrimeTable, SchurReport};
use crate::point_generation::{
    fekete_points, interior_audit, leja_points, verify_energy_certificates, CertificateInput, LejaSeed,
    DEFAULT_MAX_SWEEPS,
};
use crate::set_catalog::{CompactSetModel, SetKind, MEMBERSHIP_EPS};
use crate::test_functions::{audit_test_function, Core, RadialCutoff, Scaled, TestFunctionRegistry};

pub const DEFAULT_AUDIT_SEED: u64 = 0x5eed_401d;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub module: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AuditReport {
    pub checks: Vec<Check>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn violations(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    fn push(&mut self, module: &'static str, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { module, name: name.into(), passed, detail: detail.into() });
    }
}

#[derive(Clone, Copy, Debug)]
pub struct AuditOptions {
    pub seed: u64,
    /// Largest `n` used by the point-generation sweeps.
    pub max_n: usize,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self { seed: DEFAULT_AUDIT_SEED, max_n: 64 }
    }
}

pub fn catalog_sets() -> Vec<CompactSetModel> {
    ["disk", "segment", "lemniscate", "lemniscate2"]
        .iter()
        .map(|name| CompactSetModel::preset(name).expect("preset exists"))
        .collect()
}

pub fn run_audit(opts: &AuditOptions) -> Result<AuditReport> {
    let mut report = AuditReport::default();
    audit_set_catalog(&mut report, opts)?;
    audit_discrete_energy(&mut report, opts)?;
    audit_point_generation(&mut report, opts)?;
    audit_discrepancy(&mut report, opts)?;
    audit_integer_poly(&mut report)?;
    Ok(report)
}

fn random_exterior(set: &CompactSetModel, rng: &mut ChaCha8Rng, min_dist: f64) -> Complex64 {
    let reach = set.bounding_radius() + 2.0;
    loop {
        let z = Complex64::new(rng.gen_range(-reach..reach), rng.gen_range(-reach..reach));
        if set.dist_to_set(z) >= min_dist && set.green(z).is_ok_and(|g| g > 0.0) {
            return z;
        }
    }
}

fn audit_set_catalog(report: &mut AuditReport, opts: &AuditOptions) -> Result<()> {
    const M: &str = "set_catalog";
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for set in catalog_sets() {
        let label = set.label();

        let worst = (0..8)
            .map(|k| {
                let z = Complex64::from_polar(1e6, k as f64 * PI / 4.0);
                (set.g(z) - z.norm().ln() - set.robin_constant()).abs()
            })
            .fold(0.0, f64::max);
        report.push(M, format!("robin_asymptote[{label}]"), worst < 1e-4, format!("max defect {worst:e}"));

        let on_mesh = set.boundary_mesh().iter().map(|z| set.g(*z)).fold(0.0, f64::max);
        report.push(M, format!("green_zero_on_boundary[{label}]"), on_mesh <= MEMBERSHIP_EPS, format!("max g {on_mesh:e}"));

        // raw 5-point stencil, i.e. h^2 times the discrete Laplacian
        let h = 1e-3;
        let mut lap = 0.0_f64;
        for _ in 0..1000 {
            let z = random_exterior(&set, &mut rng, 1e-2);
            let i = Complex64::new(0.0, h);
            let s = set.g(z + h) + set.g(z - h) + set.g(z + i) + set.g(z - i) - 4.0 * set.g(z);
            lap = lap.max(s.abs());
        }
        report.push(M, format!("green_harmonic[{label}]"), lap <= 1e-4, format!("max stencil {lap:e}"));

        let mut lip = 0.0_f64;
        for _ in 0..1000 {
            let z = random_exterior(&set, &mut rng, 0.0) * rng.gen_range(0.0..1.0);
            let w = z + Complex64::from_polar(rng.gen_range(0.0..0.5), rng.gen_range(0.0..2.0 * PI));
            lip = lip.max((set.dist_to_set(z) - set.dist_to_set(w)).abs() - (z - w).norm());
        }
        report.push(M, format!("dist_lipschitz[{label}]"), lip <= 1e-12, format!("max excess {lip:e}"));

        let q = set.equilibrium_quadrature(4096)?;
        let wsum: f64 = q.weights.iter().sum();
        let off = q.nodes.iter().map(|z| set.g(*z)).fold(0.0, f64::max);
        report.push(
            M,
            format!("quadrature_weights_and_nodes[{label}]"),
            (wsum - 1.0).abs() < 1e-12 && off <= MEMBERSHIP_EPS,
            format!("sum-1 = {:e}, max g at nodes {off:e}", wsum - 1.0),
        );

        if matches!(set.kind(), SetKind::Disk | SetKind::Segment) {
            let pts: Vec<Complex64> = match set.kind() {
                SetKind::Disk => (0..100).map(|k| Complex64::from_polar(0.9 * k as f64 / 100.0, 2.4 * k as f64)).collect(),
                _ => (0..100).map(|k| Complex64::new(-0.9 + 1.8 * k as f64 / 99.0, 0.0)).collect(),
            };
            let err = pts.iter().map(|z| (q.potential(*z) - set.robin_constant()).abs()).fold(0.0, f64::max);
            report.push(M, format!("frostman_constancy[{label}]"), err <= 1e-3, format!("max |U - V_E| {err:e}"));
        }

        match set.holder_params() {
            Ok(hp) => report.push(
                M,
                format!("holder_audit[{label}]"),
                hp.audit_max_ratio <= 1.0,
                format!("C = {}, s = {}, max g/(C d^s) = {}", hp.c, hp.s, hp.audit_max_ratio),
            ),
            Err(e) => report.push(M, format!("holder_audit[{label}]"), false, e.to_string()),
        }

        let back = CompactSetModel::from_json(&set.to_json())?;
        report.push(M, format!("json_round_trip[{label}]"), back.to_json() == set.to_json(), set.to_json());
    }

    let center = Complex64::new(0.3, -0.2);
    let lem = CompactSetModel::lemniscate(vec![-center, Complex64::new(1.0, 0.0)], 1.7)?;
    let disk = CompactSetModel::disk(center, 1.7)?;
    let mut diff = (lem.capacity() - disk.capacity()).abs();
    for _ in 0..100 {
        let z = Complex64::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
        diff = diff.max((lem.g(z) - disk.g(z)).abs());
    }
    report.push(M, "degree_one_lemniscate_is_disk", diff <= 1e-12, format!("max difference {diff:e}"));
    Ok(())
}

fn audit_discrete_energy(report: &mut AuditReport, opts: &AuditOptions) -> Result<()> {
    const M: &str = "discrete_energy";
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 1);
    let (mut perm, mut scale, mut brute) = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..200 {
        let n = rng.gen_range(2..=8);
        let pts: Vec<Complex64> =
            (0..n).map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
        let cfg = PointConfiguration::new(pts.clone(), "r")?;
        let mut shuffled = pts.clone();
        shuffled.reverse();
        shuffled.rotate_left(n / 2);
        let other = PointConfiguration::new(shuffled, "r")?;
        if log_vandermonde(&cfg).to_bits() != log_vandermonde(&other).to_bits() {
            perm = perm.max(1.0);
        }
        let alpha = Complex64::from_polar(rng.gen_range(0.1..10.0), rng.gen_range(0.0..2.0 * PI));
        let scaled = PointConfiguration::new(pts.iter().map(|z| z * alpha).collect(), "s")?;
        scale = scale.max((discrete_energy(&scaled) - (discrete_energy(&cfg) - alpha.norm().ln())).abs());
        let mut prod = 1.0;
        for j in 0..n {
            for k in j + 1..n {
                prod *= (pts[j] - pts[k]).norm();
            }
        }
        brute = brute.max((prod.ln() - log_vandermonde(&cfg)).abs());
    }
    report.push(M, "permutation_invariance", perm == 0.0, "bitwise equal under reordering");
    report.push(M, "scaling_law", scale <= 1e-10, format!("max defect {scale:e}"));
    report.push(M, "brute_force_equivalence", brute <= 1e-8, format!("max defect {brute:e}"));

    let disk = CompactSetModel::unit_disk();
    let mut chain_ok = true;
    for pts in [
        vec![Complex64::new(2.0, 0.0), Complex64::new(2.0, 0.0)],
        vec![Complex64::new(0.5, 0.0), Complex64::new(-0.2, 0.3), Complex64::new(1.5, -1.0)],
    ] {
        chain_ok &= bss_chain_check(&PointConfiguration::new(pts, "c")?, &disk)?.inequalities_hold;
    }
    report.push(M, "bss_chain_examples", chain_ok, "fixed configurations on the unit disk");
    Ok(())
}

fn audit_point_generation(report: &mut AuditReport, opts: &AuditOptions) -> Result<()> {
    const M: &str = "point_generation";
    for name in ["disk", "segment"] {
        let set = CompactSetModel::preset(name).expect("preset");
        let mut deltas = Vec::new();
        let mut monotone_history = true;
        let mut fekete_ok = true;
        for n in 2..=opts.max_n {
            let sol = fekete_points(&set, n, None, DEFAULT_MAX_SWEEPS)?;
            monotone_history &= sol.history.windows(2).all(|w| w[1] >= w[0]);
            fekete_ok &= verify_energy_certificates(CertificateInput::Fekete(&sol), &set).all_hold;
            deltas.push(sol.delta_n);
        }
        let rises = deltas.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
        report.push(M, format!("fekete_certificates[{name}]"), fekete_ok, format!("n = 2..={}", opts.max_n));
        report.push(M, format!("exchange_monotone[{name}]"), monotone_history, "log |V| never drops across sweeps");
        report.push(M, format!("delta_n_non_increasing[{name}]"), rises <= 1e-4, format!("largest rise {rises:e}"));

        let n = opts.max_n.min(64);
        let coarse = fekete_points(&set, n, Some(64 * n), DEFAULT_MAX_SWEEPS)?;
        let fine = fekete_points(&set, n, Some(128 * n), DEFAULT_MAX_SWEEPS)?;
        let change = (coarse.achieved_log_vandermonde - fine.achieved_log_vandermonde).abs();
        report.push(M, format!("mesh_refinement_stability[{name}]"), change < 1e-3, format!("n = {n}: {change:e}"));

        let a = leja_points(&set, 40, LejaSeed::Default, None)?;
        let b = leja_points(&set, 40, LejaSeed::Default, None)?;
        report.push(M, format!("leja_deterministic[{name}]"), a == b, "two runs compared bitwise");
    }
    for set in catalog_sets() {
        let label = set.label();
        let mut ok = true;
        let mut worst = 0.0_f64;
        for n in [8usize, 32, 100] {
            let seq = leja_points(&set, n, LejaSeed::Default, None)?;
            let cert = verify_energy_certificates(CertificateInput::Leja(&seq), &set);
            ok &= cert.all_hold;
            worst = worst.max(cert.leja_identity_residual.unwrap_or(0.0) / (n * n) as f64);
        }
        report.push(M, format!("leja_certificates[{label}]"), ok, format!("max residual / n^2 {worst:e}"));
        let seq = leja_points(&set, 16, LejaSeed::Default, None)?;
        let interior = interior_audit(&set, &seq.points, 60)?;
        report.push(
            M,
            format!("interior_candidates[{label}]"),
            interior.passed,
            format!("{} interior points, best {} vs boundary {}", interior.interior_points, interior.max_interior, interior.max_boundary),
        );
    }
    Ok(())
}

fn audit_discrepancy(report: &mut AuditReport, opts: &AuditOptions) -> Result<()> {
    const M: &str = "discrepancy";
    let registry = TestFunctionRegistry::with_builtins();
    for set in catalog_sets() {
        let label = set.label();
        let engine = DiscrepancyEngine::new(&set)?;
        let mut sound = true;
        let mut smoothed = true;
        let mut auto_min = true;
        let mut worst = f64::NEG_INFINITY;
        let mut tails = true;
        for n in [8usize, 16, 32] {
            let configs = [
                fekete_points(&set, n, None, DEFAULT_MAX_SWEEPS)?.config,
                leja_points(&set, n, LejaSeed::Default, None)?.config(),
            ];
            for cfg in &configs {
                tails &= m_e(cfg, &set) == 0.0 && tail_log_moment(cfg, set.bounding_radius() * 1.01 + 1e-9)? == 0.0;
                for spec in ["re:1", "im:2", "abs2"] {
                    let phi = registry.build(spec, &set)?;
                    let auto = engine.certificate(phi.as_ref(), cfg, RadiusPolicy::Auto)?;
                    sound &= auto.holds(1e-6);
                    worst = worst.max(auto.lhs - auto.rhs);
                    for r in [1e-4, 1e-2] {
                        let fixed = engine.certificate(phi.as_ref(), cfg, RadiusPolicy::Fixed(r))?;
                        sound &= fixed.holds(1e-6);
                        worst = worst.max(fixed.lhs - fixed.rhs);
                    }
                    for r in engine.radius_grid().into_iter().step_by(9) {
                        auto_min &= auto.rhs <= engine.certificate(phi.as_ref(), cfg, RadiusPolicy::Fixed(r))?.rhs;
                    }
                }
                for r in [1e-3, 0.1] {
                    let s = engine.smoothed_energy(cfg, r)?;
                    smoothed &= s.i_sigma >= -1e-6 && s.slack >= -1e-6;
                }
            }
        }
        report.push(M, format!("certificate_soundness[{label}]"), sound, format!("max lhs - rhs {worst:e}"));
        report.push(M, format!("smoothed_energy_dominance[{label}]"), smoothed, "I_sigma in [-1e-6, bound + 1e-6]");
        report.push(M, format!("auto_radius_minimal[{label}]"), auto_min, "auto rhs <= every grid rhs");
        report.push(M, format!("limit_hypotheses[{label}]"), tails, "m_E = 0 and no tail beyond the set");

        let phi = registry.build("re:2", &set)?;
        let cfg = leja_points(&set, 24, LejaSeed::Default, None)?.config();
        let a = engine.certificate(phi.as_ref(), &cfg, RadiusPolicy::Fixed(0.01))?;
        let scaled = Scaled { inner: RadialCutoff::around(Core::RePow(2), &set)?, factor: -3.0 };
        let b = engine.certificate(&scaled, &cfg, RadiusPolicy::Fixed(0.01))?;
        let dev = (b.lhs - 3.0 * a.lhs).abs().max((b.rhs - 3.0 * a.rhs).abs() / a.rhs.max(1.0));
        report.push(M, format!("scaling_consistency[{label}]"), dev < 1e-12, format!("deviation {dev:e}"));

        for spec in ["zero", "re:1", "im:2", "abs2"] {
            let phi = registry.build(spec, &set)?;
            let audit = audit_test_function(phi.as_ref(), 10_000, opts.seed);
            report.push(
                M,
                format!("modulus_bound[{spec},{label}]"),
                audit.passed,
                format!("max ratio {}", audit.max_ratio),
            );
        }
    }
    let seg = CompactSetModel::unit_segment();
    let mut values = Vec::new();
    for n in [16usize, 32, 64] {
        let cfg = fekete_points(&seg, n, None, DEFAULT_MAX_SWEEPS)?.config;
        values.push(moment_discrepancy(&cfg, &seg, 2)?.value);
    }
    let decays = values.windows(2).all(|w| w[1] < w[0]);
    report.push(M, "moment_decay[segment]", decays, format!("{values:?}"));
    Ok(())
}

fn audit_integer_poly(report: &mut AuditReport) -> Result<()> {
    const M: &str = "integer_poly";
    let table = PrimeTable::sieve(1_000_000)?;
    report.push(M, "prime_sieve_audit", table.audit(), format!("{} primes up to 10^6", table.primes.len()));
    let mut exact = true;
    let mut circle = true;
    let mut energy = true;
    let mut mean = 0.0_f64;
    for k in 2..=30 {
        let poly = build_example_poly(k)?;
        exact &= poly.degree as u64 == poly.primes.iter().sum::<u64>() - k as u64
            && is_exact_product(&poly.supnorm_exact, &poly.primes)
            && (poly.log_supnorm() - poly.log_supnorm_exact()).abs() < 1e-12;
        circle &= poly.sampled_log_circle_max(4096) <= poly.log_supnorm_exact() + (1e-6f64).ln_1p();
        energy &= example_energy(&poly)? <= 1e-9;
        let r = SchurReport::new(&poly);
        mean = mean.max((r.root_mean_numeric - r.root_mean).abs());
    }
    report.push(M, "degree_and_norm_exact", exact, "k = 2..=30, big-integer products");
    report.push(M, "norm_attained_at_one", circle, "4096-point circle mesh");
    report.push(M, "energies_below_robin", energy, "I_hat <= 1e-9");
    report.push(M, "root_mean_identity", mean <= 1e-10, format!("max deviation {mean:e}"));
    Ok(())
}
