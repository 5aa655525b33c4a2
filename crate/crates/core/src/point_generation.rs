//! Leja sequences, Fekete configurations and the energy certificates attached
//! to them, plus a name-keyed registry of point generators.
//!
//! Both algorithms work on a candidate mesh of the outer boundary. Every
//! greedy or exchange step scores all mesh nodes, takes the best one (lowest
//! index among values equal up to `TIE_TOLERANCE`) and then refines it by a
//! golden-section search along the boundary parameter.

use std::collections::BTreeMap;
use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::discrete_energy::{discrete_energy, energy_from_log_vandermonde, log_vandermonde, PointConfiguration};
use crate::error::{Error, Result};
use crate::numerics::golden_max;
use crate::set_catalog::{CandidateMesh, CompactSetModel, SetShape, MEMBERSHIP_EPS};

pub const DEFAULT_MAX_SWEEPS: usize = 200;
pub const EXCHANGE_TOLERANCE: f64 = 1e-12;
pub const CERTIFICATE_TOLERANCE: f64 = 1e-8;
const TIE_TOLERANCE: f64 = 1e-12;
const POLISH_TOLERANCE: f64 = 1e-10;
const NEWTON_STEPS: usize = 30;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum LejaSeed {
    /// Boundary node of maximal real part.
    #[default]
    Default,
    Point(Complex64),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LejaSequence {
    pub seed: Complex64,
    pub points: Vec<Complex64>,
    /// `log ||L_k||_E` for `k = 1..n-1`, as attained at `xi_k`.
    pub log_step_norms: Vec<f64>,
    pub resolution: usize,
}

impl LejaSequence {
    pub fn config(&self) -> PointConfiguration {
        PointConfiguration::new(self.points.clone(), format!("leja_{}", self.points.len()))
            .expect("leja sequences have n >= 2")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyCertificate {
    pub energy: f64,
    pub robin_constant: f64,
    /// `V_E - I_hat`; the certificate holds when this is `>= -1e-8`.
    pub slack: f64,
    pub energy_le_robin: bool,
}

impl EnergyCertificate {
    fn new(energy: f64, robin_constant: f64) -> Self {
        let slack = robin_constant - energy;
        Self { energy, robin_constant, slack, energy_le_robin: slack >= -CERTIFICATE_TOLERANCE }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeketeSolution {
    pub config: PointConfiguration,
    pub achieved_log_vandermonde: f64,
    pub certificate: EnergyCertificate,
    /// `exp(-I_hat)`, the configuration's estimate of the `n`-th diameter.
    pub delta_n: f64,
    pub sweeps: usize,
    /// `log |V|` after initialization and after every sweep.
    pub history: Vec<f64>,
    pub resolution: usize,
}

/// Scores of the greedy objective `sum_k log |z - z_k|` on mesh nodes.
struct MeshScores<'a> {
    mesh: &'a CandidateMesh,
    values: Vec<f64>,
}

impl<'a> MeshScores<'a> {
    fn new(mesh: &'a CandidateMesh) -> Self {
        Self { mesh, values: vec![0.0; mesh.nodes.len()] }
    }

    fn add(&mut self, p: Complex64) {
        for (v, t) in self.values.iter_mut().zip(&self.mesh.nodes) {
            *v += (t - p).norm().ln();
        }
    }

    fn rebuild(&mut self, points: &[Complex64]) {
        self.values.iter_mut().for_each(|v| *v = 0.0);
        for p in points {
            self.add(*p);
        }
    }
}

/// Lowest index whose value is within the tie tolerance of the maximum.
fn tie_broken_argmax(values: impl Iterator<Item = f64> + Clone) -> Option<(usize, f64)> {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return None;
    }
    let tol = TIE_TOLERANCE * max.abs().max(1.0);
    values
        .enumerate()
        .find(|(_, v)| *v >= max - tol)
}

fn objective(points: &[Complex64], skip: Option<usize>, z: Complex64) -> f64 {
    points
        .iter()
        .enumerate()
        .filter(|(k, _)| Some(*k) != skip)
        .map(|(_, p)| (z - p).norm().ln())
        .sum()
}

/// Refines the mesh choice `idx` (value `node_value`) along the boundary and
/// returns the better of the node and the polished point.
fn polish(
    mesh: &CandidateMesh,
    idx: usize,
    node_value: f64,
    eval: impl Fn(Complex64) -> f64,
) -> (Complex64, f64) {
    let (s, v) = golden_max(
        |s| mesh.local_point(idx, s).map(&eval).unwrap_or(f64::NEG_INFINITY),
        -1.0,
        1.0,
        POLISH_TOLERANCE,
    );
    if v > node_value + 1e-13 * node_value.abs().max(1.0) {
        if let Some(z) = mesh.local_point(idx, s) {
            return (z, v);
        }
    }
    (mesh.nodes[idx], node_value)
}

fn resolve_resolution(set: &CompactSetModel, n: usize, requested: Option<usize>) -> Result<usize> {
    let minimum = 64 * n;
    match requested {
        Some(r) if r < minimum => Err(Error::invalid(format!(
            "mesh resolution {r} is below the required 64*n = {minimum}"
        ))),
        Some(r) => Ok(r),
        None => Ok(set.mesh_resolution().max(minimum)),
    }
}

/// Greedy Leja sequence `xi_0 .. xi_{n-1}` on the set.
pub fn leja_points(
    set: &CompactSetModel,
    n: usize,
    seed: LejaSeed,
    resolution: Option<usize>,
) -> Result<LejaSequence> {
    if n < 2 {
        return Err(Error::invalid("leja_points needs n >= 2"));
    }
    let resolution = resolve_resolution(set, n, resolution)?;
    let mesh = set.candidate_mesh(resolution)?;
    let seed = match seed {
        LejaSeed::Point(z) => {
            if !z.is_finite() || set.g(z) > MEMBERSHIP_EPS {
                return Err(Error::invalid(format!("Leja seed {z} is not in the set")));
            }
            z
        }
        LejaSeed::Default => default_seed(&mesh),
    };
    let mut points = vec![seed];
    let mut log_norms = Vec::with_capacity(n - 1);
    let mut scores = MeshScores::new(&mesh);
    scores.add(seed);
    while points.len() < n {
        let (idx, node_value) = tie_broken_argmax(scores.values.iter().copied())
            .ok_or_else(|| Error::geometry("Leja step found no admissible mesh node"))?;
        let (z, value) = polish(&mesh, idx, node_value, |z| objective(&points, None, z));
        points.push(z);
        log_norms.push(value);
        scores.add(z);
    }
    Ok(LejaSequence { seed, points, log_step_norms: log_norms, resolution: mesh.resolution })
}

fn default_seed(mesh: &CandidateMesh) -> Complex64 {
    let (idx, _) = tie_broken_argmax(mesh.nodes.iter().map(|z| z.re)).expect("mesh is non-empty");
    mesh.nodes[idx]
}

/// Local maximizer of `|V|` by Leja initialization followed by cyclic
/// single-point exchange until no move improves `log |V|` by more than
/// `1e-12`.
pub fn fekete_points(
    set: &CompactSetModel,
    n: usize,
    resolution: Option<usize>,
    max_sweeps: usize,
) -> Result<FeketeSolution> {
    let leja = leja_points(set, n, LejaSeed::Default, resolution)?;
    let mesh = set.candidate_mesh(leja.resolution)?;
    let mut points = leja.points;
    let mut scores = MeshScores::new(&mesh);
    let mut history = vec![log_vandermonde_of(&points)];
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < max_sweeps {
        sweeps += 1;
        scores.rebuild(&points);
        let mut moved = false;
        for i in 0..n {
            let current = objective(&points, Some(i), points[i]);
            let zi = points[i];
            let candidate_values = mesh.nodes.iter().zip(&scores.values).map(|(t, v)| {
                let own = (t - zi).norm().ln();
                if own == f64::NEG_INFINITY || *v == f64::NEG_INFINITY {
                    objective(&points, Some(i), *t)
                } else {
                    v - own
                }
            });
            let Some((idx, node_value)) = tie_broken_argmax(candidate_values) else {
                continue;
            };
            let (z, value) = polish(&mesh, idx, node_value, |z| objective(&points, Some(i), z));
            if value > current + EXCHANGE_TOLERANCE {
                for (v, t) in scores.values.iter_mut().zip(&mesh.nodes) {
                    *v += (t - z).norm().ln() - (t - zi).norm().ln();
                }
                points[i] = z;
                moved = true;
            }
        }
        if moved {
            newton_ascent(set, &mut points);
        }
        history.push(log_vandermonde_of(&points));
        if !moved {
            converged = true;
            break;
        }
    }
    let solution = build_fekete(set, points, sweeps, history, mesh.resolution);
    if !converged {
        return Err(Error::SolverFailure {
            message: format!("Fekete exchange for n={n} still moving after {max_sweeps} sweeps"),
            sweeps,
            best: Some(Box::new(solution)),
        });
    }
    Ok(solution)
}

/// Damped Newton ascent of `log |V|` with every point moving along the
/// boundary at once. Cyclic exchange converges linearly and crawls along
/// collective modes; a few joint steps finish the job. Segment endpoints
/// stay fixed.
fn newton_ascent(set: &CompactSetModel, points: &mut [Complex64]) {
    const H: f64 = 1e-5;
    let n = points.len();
    let mut value = log_vandermonde_of(points);
    let mut lambda = 1e-8;
    for _ in 0..NEWTON_STEPS {
        // path t -> P(z + t tau) through each point, with first and second derivatives
        let mut free = Vec::with_capacity(n);
        let mut tangents = Vec::with_capacity(n);
        let mut d1 = Vec::with_capacity(n);
        let mut d2 = Vec::with_capacity(n);
        for (i, z) in points.iter().enumerate() {
            let tau = set.outward_direction(*z) * Complex64::i();
            let (Some(fwd), Some(back)) = (set.project_to_boundary(z + tau * H), set.project_to_boundary(z - tau * H))
            else {
                continue;
            };
            // clamped at a segment end
            if (fwd - z).norm() < 0.5 * H || (back - z).norm() < 0.5 * H {
                continue;
            }
            free.push(i);
            tangents.push(tau);
            d1.push((fwd - back) / (2.0 * H));
            d2.push((fwd + back - z * 2.0) / (H * H));
        }
        let m = free.len();
        if m == 0 {
            return;
        }
        let mut grad = DVector::zeros(m);
        let mut hess = DMatrix::zeros(m, m);
        for (a, &i) in free.iter().enumerate() {
            let mut g = 0.0;
            let mut diag = 0.0;
            for k in 0..n {
                if k == i {
                    continue;
                }
                let inv = (points[i] - points[k]).inv();
                g += (d1[a] * inv).re;
                diag += (d2[a] * inv - d1[a] * d1[a] * inv * inv).re;
            }
            grad[a] = g;
            hess[(a, a)] = diag;
            for (b, &k) in free.iter().enumerate().skip(a + 1) {
                let inv = (points[i] - points[k]).inv();
                let h = (d1[a] * d1[b] * inv * inv).re;
                hess[(a, b)] = h;
                hess[(b, a)] = h;
            }
        }
        if grad.amax() < 1e-11 {
            return;
        }
        let mut improved = false;
        while lambda < 1e8 {
            let mut system = -&hess;
            for a in 0..m {
                system[(a, a)] += lambda * (1.0 + hess[(a, a)].abs());
            }
            let Some(chol) = system.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let step = chol.solve(&grad);
            let mut trial = points.to_vec();
            let mut ok = true;
            for (a, &i) in free.iter().enumerate() {
                match set.project_to_boundary(points[i] + tangents[a] * step[a]) {
                    Some(z) => trial[i] = z,
                    None => ok = false,
                }
            }
            let v = if ok { log_vandermonde_of(&trial) } else { f64::NEG_INFINITY };
            if v > value {
                improved = v - value > 1e-15 * value.abs().max(1.0);
                points.copy_from_slice(&trial);
                value = v;
                lambda = (lambda * 0.1).max(1e-12);
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            return;
        }
    }
}

fn log_vandermonde_of(points: &[Complex64]) -> f64 {
    log_vandermonde(&PointConfiguration::new(points.to_vec(), "").expect("n >= 2"))
}

fn build_fekete(
    set: &CompactSetModel,
    points: Vec<Complex64>,
    sweeps: usize,
    history: Vec<f64>,
    resolution: usize,
) -> FeketeSolution {
    let n = points.len();
    let config = PointConfiguration::new(points, format!("fekete_{n}")).expect("n >= 2");
    let log_v = log_vandermonde(&config);
    let energy = energy_from_log_vandermonde(log_v, n);
    FeketeSolution {
        config,
        achieved_log_vandermonde: log_v,
        certificate: EnergyCertificate::new(energy, set.robin_constant()),
        delta_n: (-energy).exp(),
        sweeps,
        history,
        resolution,
    }
}

pub enum CertificateInput<'a> {
    Fekete(&'a FeketeSolution),
    Leja(&'a LejaSequence),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyCertificates {
    pub fekete_cert: Option<EnergyCertificate>,
    pub leja_cert: Option<EnergyCertificate>,
    /// `|log |V(L_n)| - sum_k log ||L_k||_E|`.
    pub leja_identity_residual: Option<f64>,
    /// `log |V(L_n)| - (n(n-1)/2) log cap(E)`, non-negative up to 1e-8.
    pub leja_lower_bound_slack: Option<f64>,
    pub all_hold: bool,
}

pub fn verify_energy_certificates(input: CertificateInput<'_>, set: &CompactSetModel) -> EnergyCertificates {
    let v = set.robin_constant();
    match input {
        CertificateInput::Fekete(sol) => {
            let cert = EnergyCertificate::new(discrete_energy(&sol.config), v);
            EnergyCertificates {
                all_hold: cert.energy_le_robin,
                fekete_cert: Some(cert),
                leja_cert: None,
                leja_identity_residual: None,
                leja_lower_bound_slack: None,
            }
        }
        CertificateInput::Leja(seq) => {
            let n = seq.points.len();
            let log_v = log_vandermonde(&seq.config());
            let norm_sum: f64 = seq.log_step_norms.iter().sum();
            let residual = (log_v - norm_sum).abs();
            let cert = EnergyCertificate::new(energy_from_log_vandermonde(log_v, n), v);
            let pairs = (n * (n - 1) / 2) as f64;
            let lower_slack = log_v - pairs * set.capacity().ln();
            let all_hold = cert.energy_le_robin
                && residual < 1e-9 * (n * n) as f64
                && lower_slack >= -CERTIFICATE_TOLERANCE;
            EnergyCertificates {
                fekete_cert: None,
                leja_cert: Some(cert),
                leja_identity_residual: Some(residual),
                leja_lower_bound_slack: Some(lower_slack),
                all_hold,
            }
        }
    }
}

/// Whether `I_hat - V_E <= c1 log n / n`. Requires the configuration to lie in the set.
pub fn near_fekete_check(cfg: &PointConfiguration, set: &CompactSetModel, c1: f64) -> Result<bool> {
    if cfg.points().iter().any(|z| set.g(*z) > MEMBERSHIP_EPS) {
        return Err(Error::invalid("near-Fekete check needs a configuration inside the set"));
    }
    let n = cfg.len() as f64;
    Ok(discrete_energy(cfg) - set.robin_constant() <= c1 * n.ln() / n)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InteriorAudit {
    pub interior_points: usize,
    pub max_interior: f64,
    pub max_boundary: f64,
    pub passed: bool,
}

/// Confirms on an interior grid that no interior candidate beats the
/// boundary mesh for the greedy objective `sum log |z - p|`.
pub fn interior_audit(set: &CompactSetModel, points: &[Complex64], grid: usize) -> Result<InteriorAudit> {
    let mesh = set.candidate_mesh(set.mesh_resolution())?;
    let max_boundary = mesh
        .nodes
        .iter()
        .map(|t| objective(points, None, *t))
        .fold(f64::NEG_INFINITY, f64::max);
    let radius = set.bounding_radius();
    let mut max_interior = f64::NEG_INFINITY;
    let mut count = 0;
    if !matches!(set.shape(), SetShape::Segment { .. }) {
        for i in 0..grid {
            for j in 0..grid {
                let x = -radius + 2.0 * radius * (i as f64 + 0.5) / grid as f64;
                let y = -radius + 2.0 * radius * (j as f64 + 0.5) / grid as f64;
                let z = Complex64::new(x, y);
                // strictly inside: keep a grid cell away from the boundary
                if !deep_inside(set, z, 2.0 * radius / grid as f64) {
                    continue;
                }
                count += 1;
                max_interior = max_interior.max(objective(points, None, z));
            }
        }
    }
    Ok(InteriorAudit {
        interior_points: count,
        max_interior,
        max_boundary,
        passed: max_interior <= max_boundary + 1e-12 * max_boundary.abs().max(1.0),
    })
}

fn deep_inside(set: &CompactSetModel, z: Complex64, margin: f64) -> bool {
    (0..8).all(|k| {
        let w = z + Complex64::from_polar(margin, std::f64::consts::PI * k as f64 / 4.0);
        set.g(w) == 0.0
    })
}

// ---------------------------------------------------------------------------
// Generator registry

#[derive(Clone, Debug)]
pub struct GeneratorOptions {
    pub mesh_resolution: Option<usize>,
    pub max_sweeps: usize,
    pub seed_point: Option<Complex64>,
    /// Source for the `file` generator: a JSON array of `[re, im]` pairs.
    pub input_path: Option<PathBuf>,
}

impl Default for GeneratorOptions {
    fn default() -> Self {
        Self { mesh_resolution: None, max_sweeps: DEFAULT_MAX_SWEEPS, seed_point: None, input_path: None }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratedPoints {
    pub config: PointConfiguration,
    pub certificates: Option<EnergyCertificates>,
}

/// A named way of producing an `n`-point configuration on a catalog set.
pub trait PointGenerator: Send + Sync {
    fn name(&self) -> &'static str;
    fn generate(&self, set: &CompactSetModel, n: usize, opts: &GeneratorOptions) -> Result<GeneratedPoints>;
}

pub struct LejaGenerator;

impl PointGenerator for LejaGenerator {
    fn name(&self) -> &'static str {
        "leja"
    }

    fn generate(&self, set: &CompactSetModel, n: usize, opts: &GeneratorOptions) -> Result<GeneratedPoints> {
        let seed = opts.seed_point.map_or(LejaSeed::Default, LejaSeed::Point);
        let seq = leja_points(set, n, seed, opts.mesh_resolution)?;
        let certs = verify_energy_certificates(CertificateInput::Leja(&seq), set);
        Ok(GeneratedPoints { config: seq.config(), certificates: Some(certs) })
    }
}

pub struct FeketeGenerator;

impl PointGenerator for FeketeGenerator {
    fn name(&self) -> &'static str {
        "fekete"
    }

    fn generate(&self, set: &CompactSetModel, n: usize, opts: &GeneratorOptions) -> Result<GeneratedPoints> {
        let sol = fekete_points(set, n, opts.mesh_resolution, opts.max_sweeps)?;
        let certs = verify_energy_certificates(CertificateInput::Fekete(&sol), set);
        Ok(GeneratedPoints { config: sol.config, certificates: Some(certs) })
    }
}

/// Nodes of the `n`-node equilibrium quadrature: roots of unity on a disk,
/// Chebyshev points on a segment, pulled-back roots of unity on a lemniscate
/// (truncated to `n` when `n` is not a multiple of the degree).
pub struct RootsOfUnityGenerator;

impl PointGenerator for RootsOfUnityGenerator {
    fn name(&self) -> &'static str {
        "roots_of_unity"
    }

    fn generate(&self, set: &CompactSetModel, n: usize, _opts: &GeneratorOptions) -> Result<GeneratedPoints> {
        let degree = match set.shape() {
            SetShape::Lemniscate { coefficients, .. } => coefficients.len() - 1,
            _ => 1,
        };
        let quad = set.equilibrium_quadrature(n.div_ceil(degree))?;
        let mut points = quad.nodes;
        points.truncate(n);
        let config = PointConfiguration::new(points, format!("roots_of_unity_{n}"))?;
        Ok(GeneratedPoints { config, certificates: None })
    }
}

pub struct FileGenerator;

impl PointGenerator for FileGenerator {
    fn name(&self) -> &'static str {
        "file"
    }

    fn generate(&self, _set: &CompactSetModel, n: usize, opts: &GeneratorOptions) -> Result<GeneratedPoints> {
        let path = opts
            .input_path
            .as_ref()
            .ok_or_else(|| Error::invalid("the file generator needs an input path"))?;
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("reading {}: {e}", path.display())))?;
        let config = PointConfiguration::from_json(&text)?.with_label(path.display().to_string());
        if n != 0 && config.len() != n {
            return Err(Error::invalid(format!(
                "file holds {} points but n = {n} was requested",
                config.len()
            )));
        }
        Ok(GeneratedPoints { config, certificates: None })
    }
}

/// Generators selectable by name at runtime.
pub struct GeneratorRegistry {
    generators: BTreeMap<&'static str, Box<dyn PointGenerator>>,
}

impl GeneratorRegistry {
    pub fn empty() -> Self {
        Self { generators: BTreeMap::new() }
    }

    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        reg.register(Box::new(FeketeGenerator));
        reg.register(Box::new(LejaGenerator));
        reg.register(Box::new(RootsOfUnityGenerator));
        reg.register(Box::new(FileGenerator));
        reg
    }

    pub fn register(&mut self, generator: Box<dyn PointGenerator>) {
        self.generators.insert(generator.name(), generator);
    }

    pub fn get(&self, name: &str) -> Result<&dyn PointGenerator> {
        self.generators
            .get(name)
            .map(|g| g.as_ref())
            .ok_or_else(|| Error::invalid(format!("unknown generator '{name}' (known: {})", self.names().join(", "))))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.generators.keys().copied().collect()
    }
}

impl Default for GeneratorRegistry {
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

    /// Brute-force argmax of `prod |z - p|` over an `m`-point circle mesh.
    fn brute_next_on_circle(points: &[Complex64], m: usize) -> Vec<Complex64> {
        let cands: Vec<Complex64> = (0..m)
            .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / m as f64))
            .collect();
        let vals: Vec<f64> = cands.iter().map(|z| points.iter().map(|p| (z - p).norm()).product()).collect();
        let max = vals.iter().cloned().fold(0.0, f64::max);
        cands.into_iter().zip(vals).filter(|(_, v)| *v > max * (1.0 - 1e-12)).map(|(z, _)| z).collect()
    }

    #[test]
    fn leja_disk_small_cases() {
        let disk = CompactSetModel::unit_disk();
        let seq = leja_points(&disk, 2, LejaSeed::Point(c(1.0, 0.0)), None).unwrap();
        assert_eq!(seq.points[1], c(-1.0, 0.0));
        let brute = brute_next_on_circle(&[c(1.0, 0.0)], 4096);
        assert_eq!(brute.len(), 1);
        assert_abs_diff_eq!((brute[0] - seq.points[1]).norm(), 0.0, epsilon = 1e-12);

        let seq = leja_points(&disk, 3, LejaSeed::Point(c(1.0, 0.0)), None).unwrap();
        let brute = brute_next_on_circle(&seq.points[..2], 4096);
        assert_eq!(brute.len(), 2, "both i and -i maximize");
        // tie broken to the smaller mesh index, i.e. +i
        assert_eq!(seq.points[2], c(0.0, 1.0));
    }

    #[test]
    fn leja_segment_second_point() {
        let seg = CompactSetModel::unit_segment();
        let seq = leja_points(&seg, 2, LejaSeed::Point(c(1.0, 0.0)), None).unwrap();
        assert_eq!(seq.points[1], c(-1.0, 0.0));
    }

    #[test]
    fn leja_rejects_exterior_seed_and_coarse_mesh() {
        let disk = CompactSetModel::unit_disk();
        assert!(matches!(
            leja_points(&disk, 4, LejaSeed::Point(c(2.0, 0.0)), None),
            Err(Error::InvalidArgument(_))
        ));
        assert!(leja_points(&disk, 4, LejaSeed::Default, Some(100)).is_err());
        assert!(leja_points(&disk, 1, LejaSeed::Default, None).is_err());
    }

    #[test]
    fn leja_identity_hand_example() {
        let disk = CompactSetModel::unit_disk();
        let seq = leja_points(&disk, 3, LejaSeed::Point(c(1.0, 0.0)), None).unwrap();
        // |V| = |1-(-1)| |1-i| |-1-i| = 2 * sqrt2 * sqrt2 = 4, step norms 2 and 2
        assert_abs_diff_eq!(seq.log_step_norms[0], 2f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(seq.log_step_norms[1], 2f64.ln(), epsilon = 1e-15);
        let certs = verify_energy_certificates(CertificateInput::Leja(&seq), &disk);
        assert_abs_diff_eq!(log_vandermonde(&seq.config()), 4f64.ln(), epsilon = 1e-15);
        assert!(certs.leja_identity_residual.unwrap() < 1e-14);
        assert!(certs.all_hold);
    }

    #[test]
    fn leja_is_deterministic() {
        let seg = CompactSetModel::unit_segment();
        let a = leja_points(&seg, 20, LejaSeed::Default, None).unwrap();
        let b = leja_points(&seg, 20, LejaSeed::Default, None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fekete_two_points_is_the_diameter() {
        let seg = CompactSetModel::unit_segment();
        let sol = fekete_points(&seg, 2, None, DEFAULT_MAX_SWEEPS).unwrap();
        assert_abs_diff_eq!(sol.delta_n, 2.0, epsilon = 1e-12);
        let disk = CompactSetModel::unit_disk();
        let sol = fekete_points(&disk, 2, None, DEFAULT_MAX_SWEEPS).unwrap();
        assert_abs_diff_eq!(sol.delta_n, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn fekete_disk_matches_roots_of_unity() {
        let disk = CompactSetModel::unit_disk();
        for n in [3usize, 5, 10, 17] {
            let sol = fekete_points(&disk, n, None, DEFAULT_MAX_SWEEPS).unwrap();
            let optimum = n as f64 / 2.0 * (n as f64).ln();
            assert!(sol.achieved_log_vandermonde >= optimum - 1e-6, "n={n}");
            assert!(sol.certificate.energy_le_robin);
            // exchange never lowers |V|
            assert!(sol.history.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn fekete_segment_matches_lobatto_nodes() {
        // Fekete points of [-1,1] are the zeros of (1 - x^2) P'_{n-1}(x)
        let n = 7;
        let seg = CompactSetModel::unit_segment();
        let sol = fekete_points(&seg, n, None, DEFAULT_MAX_SWEEPS).unwrap();
        let lobatto = [-1.0, -0.830223896278567, -0.468848793470714, 0.0, 0.468848793470714, 0.830223896278567, 1.0];
        let mut xs: Vec<f64> = sol.config.points().iter().map(|z| z.re).collect();
        xs.sort_by(f64::total_cmp);
        for (x, l) in xs.iter().zip(lobatto) {
            assert_abs_diff_eq!(*x, l, epsilon = 1e-6);
        }
    }

    #[test]
    fn fekete_reports_solver_failure_with_best_iterate() {
        let disk = CompactSetModel::unit_disk();
        match fekete_points(&disk, 12, None, 1) {
            Err(Error::SolverFailure { best: Some(best), sweeps, .. }) => {
                assert_eq!(sweeps, 1);
                assert_eq!(best.config.len(), 12);
            }
            other => panic!("expected solver failure, got {other:?}"),
        }
    }

    #[test]
    fn near_fekete_examples() {
        let disk = CompactSetModel::unit_disk();
        let roots = PointConfiguration::roots_of_unity(9).unwrap();
        assert!(near_fekete_check(&roots, &disk, 1e-6).unwrap());
        let cluster = PointConfiguration::new(vec![c(1.0, 0.0), c(1.0, 1e-15), c(-1.0, 0.0)], "x").unwrap();
        assert!(!near_fekete_check(&cluster, &disk, 0.1).unwrap());
        let outside = PointConfiguration::new(vec![c(2.0, 0.0), c(0.0, 0.0)], "x").unwrap();
        assert!(near_fekete_check(&outside, &disk, 1.0).is_err());
    }

    #[test]
    fn interior_candidates_never_win() {
        for set in [CompactSetModel::unit_disk(), CompactSetModel::preset("lemniscate").unwrap()] {
            let seq = leja_points(&set, 12, LejaSeed::Default, None).unwrap();
            let audit = interior_audit(&set, &seq.points, 60).unwrap();
            assert!(audit.interior_points > 100);
            assert!(audit.passed, "{}: {audit:?}", set.label());
        }
    }

    #[test]
    fn registry_resolves_builtins() {
        let reg = GeneratorRegistry::with_builtins();
        assert_eq!(reg.names(), vec!["fekete", "file", "leja", "roots_of_unity"]);
        let disk = CompactSetModel::unit_disk();
        let out = reg.get("roots_of_unity").unwrap().generate(&disk, 6, &GeneratorOptions::default()).unwrap();
        assert_abs_diff_eq!(
            discrete_energy(&out.config),
            -(6f64).ln() / 5.0,
            epsilon = 1e-12
        );
        assert!(reg.get("nope").is_err());
    }

    #[test]
    fn file_generator_reads_pairs() {
        let dir = std::env::temp_dir().join(format!("robinc-gen-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("pts.json");
        std::fs::write(&path, "[[1,0],[0,1],[-1,0]]").unwrap();
        let opts = GeneratorOptions { input_path: Some(path), ..Default::default() };
        let out = FileGenerator.generate(&CompactSetModel::unit_disk(), 3, &opts).unwrap();
        assert_eq!(out.config.len(), 3);
        assert!(FileGenerator.generate(&CompactSetModel::unit_disk(), 4, &opts).is_err());
    }
}
