//! Compact planar sets with closed-form potential-theoretic data.
//!
//! Three families are catalogued: closed disks, real segments and polynomial
//! lemniscates `{z : |p(z)| <= r^m}` with `p` monic of degree `m`. For each of
//! them the Green function with pole at infinity, the capacity and the
//! equilibrium measure are known exactly, which lets every other module test
//! its output against trusted values.
//!
//! Green functions use the extended convention: `g = 0` on the set and in
//! bounded components of its complement.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{golden_max, horner, newton_polish, polynomial_roots};

pub const DEFAULT_MESH_RESOLUTION: usize = 4096;

/// Values of `g` at or below this threshold count as "inside the set".
pub const MEMBERSHIP_EPS: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetKind {
    Disk,
    Segment,
    Lemniscate,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SetShape {
    Disk { center: Complex64, radius: f64 },
    Segment { a: f64, b: f64 },
    /// `coefficients` are ascending and monic (`coefficients[m] == 1`).
    Lemniscate { coefficients: Vec<Complex64>, r: f64 },
}

/// A catalog entry. Immutable after construction; boundary data used by the
/// numerical routines is computed lazily and cached.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "SetDescription", into = "SetDescription")]
pub struct CompactSetModel {
    shape: SetShape,
    mesh_resolution: usize,
    boundary_cache: OnceLock<Vec<Complex64>>,
    diameter_cache: OnceLock<f64>,
}

impl PartialEq for CompactSetModel {
    fn eq(&self, other: &Self) -> bool {
        self.shape == other.shape && self.mesh_resolution == other.mesh_resolution
    }
}

/// Result of sampling-certified Hölder constants for `g <= C d^s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HolderParams {
    pub c: f64,
    pub s: f64,
    /// Largest `g / (C d^s)` seen by the audit; `<= 1` on success.
    pub audit_max_ratio: f64,
    /// Always true: these constants come from sampling, not from a proof.
    pub sampled: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquilibriumQuadrature {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<f64>,
}

impl EquilibriumQuadrature {
    pub fn integrate<F: Fn(Complex64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(z, w)| w * f(*z))
            .sum()
    }

    pub fn integrate_complex<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(z, w)| f(*z) * *w)
            .sum()
    }

    /// Quadrature value of the logarithmic potential `U(z) = -int log|z - t| dmu(t)`.
    pub fn potential(&self, z: Complex64) -> f64 {
        -self.integrate(|t| (z - t).norm().ln())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelCurve {
    pub level: f64,
    pub points: Vec<Complex64>,
    /// Minimum distance from the sampled curve to the set.
    pub rho: f64,
}

/// Discretization of the outer boundary used as the candidate set for
/// greedy and exchange steps, with a local parametrization for polishing.
#[derive(Clone, Debug)]
pub struct CandidateMesh {
    pub nodes: Vec<Complex64>,
    pub resolution: usize,
    param: MeshParam,
}

#[derive(Clone, Debug)]
enum MeshParam {
    Circle { center: Complex64, radius: f64 },
    Segment { mid: f64, half: f64 },
    Lemniscate { coefficients: Vec<Complex64>, level: f64, n_theta: usize, degree: usize },
}

impl CandidateMesh {
    /// Point on the boundary near node `idx`, displaced by `s` node spacings
    /// (`s` in `[-1, 1]`) along the boundary parameter.
    pub fn local_point(&self, idx: usize, s: f64) -> Option<Complex64> {
        match &self.param {
            MeshParam::Circle { center, radius } => {
                let step = 2.0 * PI / self.resolution as f64;
                let theta = step * (idx as f64 + s);
                Some(center + Complex64::from_polar(*radius, theta))
            }
            MeshParam::Segment { mid, half } => {
                let step = PI / (self.resolution - 1) as f64;
                let phi = (step * (idx as f64 + s)).clamp(0.0, PI);
                Some(Complex64::new(mid + half * phi.cos(), 0.0))
            }
            MeshParam::Lemniscate { coefficients, level, n_theta, degree } => {
                let j = idx / degree;
                let theta = 2.0 * PI * (j as f64 + 0.5 + s) / *n_theta as f64;
                let target = Complex64::from_polar(*level, theta);
                let start = self.nodes[idx];
                let z = solve_shifted(coefficients, target, start);
                let spacing = 4.0 * (self.nodes[idx] - self.nodes[neighbor(idx, *degree, *n_theta)]).norm();
                if !z.is_finite() || (z - start).norm() > spacing.max(1e-9) {
                    None
                } else {
                    Some(z)
                }
            }
        }
    }
}

fn neighbor(idx: usize, degree: usize, n_theta: usize) -> usize {
    let j = idx / degree;
    let b = idx % degree;
    ((j + 1) % n_theta) * degree + b
}

/// Newton solve of `p(z) = target` from `start`.
fn solve_shifted(coefficients: &[Complex64], target: Complex64, start: Complex64) -> Complex64 {
    let mut shifted = coefficients.to_vec();
    shifted[0] -= target;
    newton_polish(&shifted, start)
}

impl CompactSetModel {
    pub fn disk(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) || !center.is_finite() {
            return Err(Error::invalid("disk needs finite center and positive radius"));
        }
        Ok(Self::from_shape(SetShape::Disk { center, radius }))
    }

    pub fn segment(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::invalid("segment needs finite a < b"));
        }
        Ok(Self::from_shape(SetShape::Segment { a, b }))
    }

    /// Lemniscate `{z : |p(z)| <= r^m}`; `coefficients` ascending and monic.
    pub fn lemniscate(coefficients: Vec<Complex64>, r: f64) -> Result<Self> {
        if coefficients.len() < 2 {
            return Err(Error::invalid("lemniscate polynomial must have degree >= 1"));
        }
        if *coefficients.last().unwrap() != Complex64::new(1.0, 0.0) {
            return Err(Error::invalid("lemniscate polynomial must be monic"));
        }
        if coefficients.iter().any(|c| !c.is_finite()) || !(r.is_finite() && r > 0.0) {
            return Err(Error::invalid("lemniscate needs finite coefficients and r > 0"));
        }
        Ok(Self::from_shape(SetShape::Lemniscate { coefficients, r }))
    }

    pub fn unit_disk() -> Self {
        Self::from_shape(SetShape::Disk { center: Complex64::new(0.0, 0.0), radius: 1.0 })
    }

    pub fn unit_segment() -> Self {
        Self::from_shape(SetShape::Segment { a: -1.0, b: 1.0 })
    }

    fn from_shape(shape: SetShape) -> Self {
        Self {
            shape,
            mesh_resolution: DEFAULT_MESH_RESOLUTION,
            boundary_cache: OnceLock::new(),
            diameter_cache: OnceLock::new(),
        }
    }

    pub fn with_mesh_resolution(mut self, resolution: usize) -> Result<Self> {
        if resolution < 16 {
            return Err(Error::invalid("mesh resolution must be at least 16"));
        }
        self.mesh_resolution = resolution;
        self.boundary_cache = OnceLock::new();
        self.diameter_cache = OnceLock::new();
        Ok(self)
    }

    pub fn shape(&self) -> &SetShape {
        &self.shape
    }

    pub fn kind(&self) -> SetKind {
        match self.shape {
            SetShape::Disk { .. } => SetKind::Disk,
            SetShape::Segment { .. } => SetKind::Segment,
            SetShape::Lemniscate { .. } => SetKind::Lemniscate,
        }
    }

    pub fn mesh_resolution(&self) -> usize {
        self.mesh_resolution
    }

    /// Short label used in reports.
    pub fn label(&self) -> String {
        match &self.shape {
            SetShape::Disk { center, radius } => {
                format!("disk(c={},{};R={})", center.re, center.im, radius)
            }
            SetShape::Segment { a, b } => format!("segment[{a},{b}]"),
            SetShape::Lemniscate { coefficients, r } => {
                format!("lemniscate(m={};r={})", coefficients.len() - 1, r)
            }
        }
    }

    pub fn capacity(&self) -> f64 {
        match &self.shape {
            SetShape::Disk { radius, .. } => *radius,
            SetShape::Segment { a, b } => (b - a) / 4.0,
            SetShape::Lemniscate { r, .. } => *r,
        }
    }

    /// Robin constant `V_E = -log cap(E)`.
    pub fn robin_constant(&self) -> f64 {
        -self.capacity().ln()
    }

    /// Green function of the unbounded complement with pole at infinity.
    pub fn green(&self, z: Complex64) -> Result<f64> {
        if !z.is_finite() {
            return Err(Error::invalid("green: non-finite argument"));
        }
        Ok(self.g(z))
    }

    pub(crate) fn g(&self, z: Complex64) -> f64 {
        match &self.shape {
            SetShape::Disk { center, radius } => {
                let rho = (z - center).norm();
                if rho <= *radius {
                    0.0
                } else {
                    (rho / radius).ln()
                }
            }
            SetShape::Segment { a, b } => {
                if z.im == 0.0 && z.re >= *a && z.re <= *b {
                    return 0.0;
                }
                let w = self.segment_w(z, *a, *b);
                let root = (w * w - 1.0).sqrt();
                let u = (w + root).norm().max((w - root).norm());
                u.ln().max(0.0)
            }
            SetShape::Lemniscate { coefficients, r } => {
                let m = (coefficients.len() - 1) as f64;
                let p = horner(coefficients, z).0.norm();
                let level = r.powf(m);
                if p <= level {
                    0.0
                } else {
                    (p.ln() - m * r.ln()) / m
                }
            }
        }
    }

    fn segment_w(&self, z: Complex64, a: f64, b: f64) -> Complex64 {
        (z * 2.0 - (a + b)) / (b - a)
    }

    /// Gradient of `g` as a complex number `g_x + i g_y`, valid in the
    /// complement of the set.
    pub fn green_gradient(&self, z: Complex64) -> Complex64 {
        let derivative = match &self.shape {
            SetShape::Disk { center, .. } => (z - center).inv(),
            SetShape::Segment { a, b } => {
                let w = self.segment_w(z, *a, *b);
                let root = (w * w - 1.0).sqrt();
                let dw = 2.0 / (b - a);
                if (w + root).norm() >= (w - root).norm() {
                    root.inv() * dw
                } else {
                    -root.inv() * dw
                }
            }
            SetShape::Lemniscate { coefficients, .. } => {
                let m = (coefficients.len() - 1) as f64;
                let (p, dp) = horner(coefficients, z);
                dp / (p * m)
            }
        };
        derivative.conj()
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.g(z) <= MEMBERSHIP_EPS
    }

    /// `int log|z - t| dmu_E(t)`, evaluated by reducing the equilibrium
    /// measure to a circle average (Jensen's formula).
    pub fn log_potential(&self, z: Complex64) -> f64 {
        match &self.shape {
            SetShape::Disk { center, radius } => (z - center).norm().max(*radius).ln(),
            SetShape::Segment { a, b } => {
                // pushforward of dtheta/2pi under t = mid + half cos(theta)
                let half = (b - a) / 2.0;
                (half / 2.0).ln() + self.g(z)
            }
            SetShape::Lemniscate { coefficients, r } => {
                let m = (coefficients.len() - 1) as f64;
                let p = horner(coefficients, z).0.norm();
                p.max(r.powf(m)).ln() / m
            }
        }
    }

    /// Euclidean distance from `z` to the set.
    pub fn dist_to_set(&self, z: Complex64) -> f64 {
        match &self.shape {
            SetShape::Disk { center, radius } => ((z - center).norm() - radius).max(0.0),
            SetShape::Segment { a, b } => {
                let t = z.re.clamp(*a, *b);
                (z - Complex64::new(t, 0.0)).norm()
            }
            SetShape::Lemniscate { coefficients, r } => {
                let m = (coefficients.len() - 1) as i32;
                if horner(coefficients, z).0.norm() <= r.powi(m) {
                    return 0.0;
                }
                self.lemniscate_boundary_distance(z)
            }
        }
    }

    fn lemniscate_boundary_distance(&self, z: Complex64) -> f64 {
        let mesh = self.boundary_mesh_cached();
        let mut nearest: [(f64, usize); 3] = [(f64::INFINITY, 0); 3];
        for (i, t) in mesh.iter().enumerate() {
            let d = (z - t).norm_sqr();
            if d < nearest[2].0 {
                nearest[2] = (d, i);
                nearest.sort_by(|a, b| a.0.total_cmp(&b.0));
            }
        }
        let cand = self.cached_mesh_param();
        let mut best = nearest[0].0.sqrt();
        for &(_, idx) in nearest.iter().filter(|(d, _)| d.is_finite()) {
            let (_, v) = golden_max(
                |s| match cand.local_point(idx, s) {
                    Some(t) => -(z - t).norm(),
                    None => f64::NEG_INFINITY,
                },
                -1.0,
                1.0,
                1e-12,
            );
            best = best.min(-v);
        }
        best
    }

    fn cached_mesh_param(&self) -> CandidateMesh {
        let nodes = self.boundary_mesh_cached().clone();
        let resolution = nodes.len();
        CandidateMesh { nodes, resolution, param: self.mesh_param(resolution) }
    }

    fn boundary_mesh_cached(&self) -> &Vec<Complex64> {
        self.boundary_cache.get_or_init(|| {
            self.candidate_mesh(self.mesh_resolution)
                .map(|m| m.nodes)
                .unwrap_or_default()
        })
    }

    fn mesh_param(&self, resolution: usize) -> MeshParam {
        match &self.shape {
            SetShape::Disk { center, radius } => MeshParam::Circle { center: *center, radius: *radius },
            SetShape::Segment { a, b } => MeshParam::Segment { mid: (a + b) / 2.0, half: (b - a) / 2.0 },
            SetShape::Lemniscate { coefficients, r } => {
                let degree = coefficients.len() - 1;
                MeshParam::Lemniscate {
                    coefficients: coefficients.clone(),
                    level: r.powi(degree as i32),
                    n_theta: resolution.div_ceil(degree),
                    degree,
                }
            }
        }
    }

    /// Candidate mesh on the outer boundary with (at least) `resolution` nodes.
    ///
    /// Disk: equispaced circle points starting at the point of maximal real
    /// part. Segment: Chebyshev extreme points from `b` down to `a`.
    /// Lemniscate: preimages of equispaced level-circle points, `theta`-major,
    /// roots ordered by argument.
    pub fn candidate_mesh(&self, resolution: usize) -> Result<CandidateMesh> {
        if resolution < 2 {
            return Err(Error::invalid("mesh resolution must be >= 2"));
        }
        let param = self.mesh_param(resolution);
        let nodes = match &param {
            MeshParam::Circle { center, radius } => (0..resolution)
                .map(|j| {
                    let (s, c) = circle_unit(j, resolution);
                    center + Complex64::new(c, s) * *radius
                })
                .collect(),
            MeshParam::Segment { mid, half } => (0..resolution)
                .map(|j| {
                    let phi = PI * j as f64 / (resolution - 1) as f64;
                    let x = if j == 0 {
                        mid + half
                    } else if j == resolution - 1 {
                        mid - half
                    } else {
                        mid + half * phi.cos()
                    };
                    Complex64::new(x, 0.0)
                })
                .collect(),
            MeshParam::Lemniscate { coefficients, level, n_theta, .. } => {
                lemniscate_preimages(coefficients, *level, *n_theta)?
            }
        };
        let resolution = match &param {
            MeshParam::Lemniscate { n_theta, degree, .. } => n_theta * degree,
            _ => resolution,
        };
        Ok(CandidateMesh { nodes, resolution, param })
    }

    /// Boundary sample used for supremum norms.
    pub fn boundary_mesh(&self) -> &[Complex64] {
        self.boundary_mesh_cached()
    }

    /// Quadrature for the equilibrium measure with `n` nodes per angular sweep.
    pub fn equilibrium_quadrature(&self, n: usize) -> Result<EquilibriumQuadrature> {
        if n == 0 {
            return Err(Error::invalid("quadrature needs at least one node"));
        }
        match &self.shape {
            SetShape::Disk { center, radius } => {
                let nodes = (0..n)
                    .map(|j| {
                        let (s, c) = circle_unit(j, n);
                        center + Complex64::new(c, s) * *radius
                    })
                    .collect();
                Ok(EquilibriumQuadrature { nodes, weights: vec![1.0 / n as f64; n] })
            }
            SetShape::Segment { a, b } => {
                let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
                let nodes = (1..=n)
                    .map(|j| {
                        let x = ((2 * j - 1) as f64 * PI / (2 * n) as f64).cos();
                        Complex64::new(mid + half * x, 0.0)
                    })
                    .collect();
                Ok(EquilibriumQuadrature { nodes, weights: vec![1.0 / n as f64; n] })
            }
            SetShape::Lemniscate { coefficients, r } => {
                let m = coefficients.len() - 1;
                let nodes = lemniscate_preimages(coefficients, r.powi(m as i32), n)?;
                let weight = 1.0 / (m * n) as f64;
                Ok(EquilibriumQuadrature { weights: vec![weight; nodes.len()], nodes })
            }
        }
    }

    /// `int z^m dmu_E`, by equilibrium quadrature.
    pub fn equilibrium_moment(&self, m: u32) -> Result<Complex64> {
        let n = DEFAULT_MESH_RESOLUTION.max(2 * m as usize + 8);
        let quad = self.equilibrium_quadrature(n)?;
        Ok(quad.integrate_complex(|z| z.powu(m)))
    }

    /// Largest modulus over the set.
    pub fn bounding_radius(&self) -> f64 {
        match &self.shape {
            SetShape::Disk { center, radius } => center.norm() + radius,
            SetShape::Segment { a, b } => a.abs().max(b.abs()),
            SetShape::Lemniscate { .. } => {
                let mesh = self.boundary_mesh_cached();
                mesh.iter().map(|z| z.norm()).fold(0.0, f64::max) * (1.0 + 1e-9)
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        *self.diameter_cache.get_or_init(|| match &self.shape {
            SetShape::Disk { radius, .. } => 2.0 * radius,
            SetShape::Segment { a, b } => b - a,
            SetShape::Lemniscate { .. } => {
                let mesh = self.boundary_mesh_cached();
                let mut best = 0.0_f64;
                for (i, z) in mesh.iter().enumerate() {
                    for w in &mesh[i + 1..] {
                        best = best.max((z - w).norm());
                    }
                }
                best
            }
        })
    }

    /// Samples the level curve `{g = 1/n}` with `m` points, polished so
    /// that `|g - 1/n| < 1e-10` at every point.
    pub fn level_curve(&self, n: usize, m: usize) -> Result<LevelCurve> {
        if n < 2 {
            return Err(Error::invalid("level_curve needs n >= 2"));
        }
        if m == 0 {
            return Err(Error::invalid("level_curve needs a positive mesh size"));
        }
        let level = 1.0 / n as f64;
        let raw: Vec<Complex64> = match &self.shape {
            SetShape::Disk { center, radius } => (0..m)
                .map(|j| {
                    let (s, c) = circle_unit(j, m);
                    center + Complex64::new(c, s) * (radius * level.exp())
                })
                .collect(),
            SetShape::Segment { a, b } => {
                let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
                (0..m)
                    .map(|j| {
                        let (s, c) = circle_unit(j, m);
                        let w = Complex64::new(level.cosh() * c, level.sinh() * s);
                        w * half + mid
                    })
                    .collect()
            }
            SetShape::Lemniscate { coefficients, r } => {
                let deg = coefficients.len() - 1;
                let lvl = r.powi(deg as i32) * (deg as f64 * level).exp();
                lemniscate_preimages(coefficients, lvl, m.div_ceil(deg))?
            }
        };
        let mut points = Vec::with_capacity(raw.len());
        let mut rho = f64::INFINITY;
        for z0 in raw {
            let z = self.polish_to_level(z0, level)?;
            rho = rho.min(self.dist_to_set(z));
            points.push(z);
        }
        Ok(LevelCurve { level, points, rho })
    }

    fn polish_to_level(&self, mut z: Complex64, level: f64) -> Result<Complex64> {
        for _ in 0..50 {
            let defect = self.g(z) - level;
            if defect.abs() < 1e-14 {
                return Ok(z);
            }
            let grad = self.green_gradient(z);
            let step = grad * (defect / grad.norm_sqr());
            if !step.is_finite() {
                break;
            }
            z -= step;
        }
        if (self.g(z) - level).abs() < 1e-10 {
            Ok(z)
        } else {
            Err(Error::geometry(format!("level-curve polish did not converge at {z}")))
        }
    }

    /// Hölder pair `(C, s)` with `g(z) <= C d_E(z)^s` for `d_E(z) <= 1`,
    /// certified by a deterministic sampling audit of 10^4 points.
    pub fn holder_params(&self) -> Result<HolderParams> {
        let (c, s) = match &self.shape {
            // log(1 + d/R) <= d/R <= 2d/R
            SetShape::Disk { radius, .. } => (2.0 / radius, 1.0),
            SetShape::Segment { .. } => (1.25 * self.sampled_holder_ratio(0.5), 0.5),
            SetShape::Lemniscate { coefficients, .. } => {
                let s = 1.0 / (coefficients.len() - 1) as f64;
                (1.25 * self.sampled_holder_ratio(s), s)
            }
        };
        let audit_max_ratio = self.holder_audit(c, s, 10_000, 0x5eed_401d);
        if audit_max_ratio > 1.0 {
            return Err(Error::AuditFailure(format!(
                "Hölder audit: g/(C d^s) reached {audit_max_ratio} with C={c}, s={s}"
            )));
        }
        Ok(HolderParams { c, s, audit_max_ratio, sampled: true })
    }

    /// Max of `g / d^s` over boundary offsets along the outward normal and
    /// a fan of other directions, at log-spaced distances in `[1e-6, 1]`.
    fn sampled_holder_ratio(&self, s: f64) -> f64 {
        let mesh = self.boundary_mesh_cached();
        let stride = (mesh.len() / 256).max(1);
        let mut best = 0.0_f64;
        for b in mesh.iter().step_by(stride) {
            let normal = self.outward_direction(*b);
            let mut dirs = vec![normal];
            dirs.extend((0..8).map(|k| Complex64::from_polar(1.0, PI * k as f64 / 4.0)));
            for u in dirs {
                for step in 0..=18 {
                    let t = 10f64.powf(-6.0 + step as f64 / 3.0);
                    let z = b + u * t;
                    let d = self.dist_to_set(z);
                    let g = self.g(z);
                    if d > 0.0 && d <= 1.0 && g > 0.0 {
                        best = best.max(g / d.powf(s));
                    }
                }
            }
        }
        best
    }

    /// Nearby point of the outer boundary: radial projection for a disk,
    /// clamping for a segment, and for a lemniscate the preimage of
    /// `r^m p(z)/|p(z)|` reached by Newton from `z`.
    pub(crate) fn project_to_boundary(&self, z: Complex64) -> Option<Complex64> {
        let w = match &self.shape {
            SetShape::Disk { center, radius } => {
                let d = z - center;
                if d.norm() == 0.0 {
                    return None;
                }
                center + d * (*radius / d.norm())
            }
            SetShape::Segment { a, b } => Complex64::new(z.re.clamp(*a, *b), 0.0),
            SetShape::Lemniscate { coefficients, r } => {
                let p = horner(coefficients, z).0;
                if p.norm() == 0.0 {
                    return None;
                }
                let level = r.powi(coefficients.len() as i32 - 1);
                solve_shifted(coefficients, p * (level / p.norm()), z)
            }
        };
        (w.is_finite() && self.g(w) <= MEMBERSHIP_EPS).then_some(w)
    }

    /// Unit direction in which `g` grows fastest just outside boundary point `b`.
    pub(crate) fn outward_direction(&self, b: Complex64) -> Complex64 {
        match &self.shape {
            SetShape::Disk { center, .. } => (b - center) / (b - center).norm(),
            SetShape::Segment { .. } => {
                let grad = self.green_gradient(b + Complex64::new(0.0, 1e-9));
                if grad.is_finite() && grad.norm() > 0.0 {
                    grad / grad.norm()
                } else {
                    Complex64::new(0.0, 1.0)
                }
            }
            SetShape::Lemniscate { .. } => {
                let grad = self.green_gradient(b);
                if grad.is_finite() && grad.norm() > 0.0 {
                    grad / grad.norm()
                } else {
                    Complex64::new(1.0, 0.0)
                }
            }
        }
    }

    fn holder_audit(&self, c: f64, s: f64, samples: usize, seed: u64) -> f64 {
        let mesh = self.boundary_mesh_cached();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0_f64;
        for _ in 0..samples {
            let b = mesh[rng.gen_range(0..mesh.len())];
            let t: f64 = rng.gen_range(-6.0..0.0);
            let angle: f64 = rng.gen_range(0.0..2.0 * PI);
            let z = b + Complex64::from_polar(10f64.powf(t), angle);
            let d = self.dist_to_set(z);
            if d > 1.0 {
                continue;
            }
            let g = self.g(z);
            if g > 0.0 {
                worst = worst.max(g / (c * d.powf(s)));
            }
        }
        worst
    }
}

/// `(sin, cos)` of `2 pi j / n`, exact at the quarter turns.
fn circle_unit(j: usize, n: usize) -> (f64, f64) {
    if (4 * j).is_multiple_of(n) {
        match (4 * j / n) % 4 {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        }
    } else {
        (2.0 * PI * j as f64 / n as f64).sin_cos()
    }
}

/// Solutions of `p(z) = level * e^{i theta_j}`, `theta_j = 2 pi (j + 1/2) / n`,
/// `theta`-major with roots per angle ordered by argument.
fn lemniscate_preimages(coefficients: &[Complex64], level: f64, n: usize) -> Result<Vec<Complex64>> {
    let degree = coefficients.len() - 1;
    let mut out = Vec::with_capacity(n * degree);
    let mut shifted = coefficients.to_vec();
    for j in 0..n {
        let theta = 2.0 * PI * (j as f64 + 0.5) / n as f64;
        shifted[0] = coefficients[0] - Complex64::from_polar(level, theta);
        let roots = polynomial_roots(&shifted)?;
        for z in &roots {
            let residual = horner(&shifted, *z).0.norm();
            if !z.is_finite() || residual > 1e-9 * level.max(1.0) {
                return Err(Error::geometry(format!(
                    "lemniscate preimage solve failed at theta={theta} (residual {residual})"
                )));
            }
        }
        out.extend(roots);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// JSON description: {kind, params, mesh_resolution}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetDescription {
    pub kind: SetKind,
    pub params: serde_json::Value,
    #[serde(default = "default_mesh")]
    pub mesh_resolution: usize,
}

fn default_mesh() -> usize {
    DEFAULT_MESH_RESOLUTION
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiskParams {
    center: [f64; 2],
    radius: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentParams {
    a: f64,
    b: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LemniscateParams {
    /// Ascending coefficients as `[re, im]` pairs, leading one last.
    coefficients: Vec<[f64; 2]>,
    r: f64,
}

impl TryFrom<SetDescription> for CompactSetModel {
    type Error = Error;

    fn try_from(desc: SetDescription) -> Result<Self> {
        let set = match desc.kind {
            SetKind::Disk => {
                let p: DiskParams = serde_json::from_value(desc.params)?;
                Self::disk(Complex64::new(p.center[0], p.center[1]), p.radius)?
            }
            SetKind::Segment => {
                let p: SegmentParams = serde_json::from_value(desc.params)?;
                Self::segment(p.a, p.b)?
            }
            SetKind::Lemniscate => {
                let p: LemniscateParams = serde_json::from_value(desc.params)?;
                let coeffs = p.coefficients.iter().map(|c| Complex64::new(c[0], c[1])).collect();
                Self::lemniscate(coeffs, p.r)?
            }
        };
        set.with_mesh_resolution(desc.mesh_resolution)
    }
}

impl From<CompactSetModel> for SetDescription {
    fn from(set: CompactSetModel) -> Self {
        let params = match &set.shape {
            SetShape::Disk { center, radius } => {
                serde_json::to_value(DiskParams { center: [center.re, center.im], radius: *radius })
            }
            SetShape::Segment { a, b } => serde_json::to_value(SegmentParams { a: *a, b: *b }),
            SetShape::Lemniscate { coefficients, r } => serde_json::to_value(LemniscateParams {
                coefficients: coefficients.iter().map(|c| [c.re, c.im]).collect(),
                r: *r,
            }),
        }
        .expect("set parameters serialize");
        SetDescription { kind: set.kind(), params, mesh_resolution: set.mesh_resolution }
    }
}

impl CompactSetModel {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("set serializes")
    }

    /// Named presets accepted on the command line.
    pub fn preset(name: &str) -> Option<Self> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        match name {
            "disk" => Some(Self::unit_disk()),
            "segment" => Some(Self::unit_segment()),
            // connected figure around +-1
            "lemniscate" => Self::lemniscate(vec![c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], 1.2).ok(),
            // two ovals around +-1
            "lemniscate2" => Self::lemniscate(vec![c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], 0.8).ok(),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn z2_minus_1(r: f64) -> CompactSetModel {
        CompactSetModel::lemniscate(vec![c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], r).unwrap()
    }

    #[test]
    fn green_closed_forms() {
        let disk = CompactSetModel::unit_disk();
        assert_abs_diff_eq!(disk.green(c(2.0, 0.0)).unwrap(), 2f64.ln(), epsilon = 1e-15);
        assert_eq!(disk.green(c(0.5, 0.0)).unwrap(), 0.0);
        let seg = CompactSetModel::unit_segment();
        assert_abs_diff_eq!(seg.green(c(2.0, 0.0)).unwrap(), (2.0 + 3f64.sqrt()).ln(), epsilon = 1e-14);
        assert_eq!(seg.green(c(0.3, 0.0)).unwrap(), 0.0);
        // symmetric branch below the axis
        assert_abs_diff_eq!(
            seg.green(c(0.3, -0.7)).unwrap(),
            seg.green(c(0.3, 0.7)).unwrap(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn green_rejects_nan() {
        let disk = CompactSetModel::unit_disk();
        assert!(matches!(disk.green(c(f64::NAN, 0.0)), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn segment_green_is_harmonic_and_vanishes_on_boundary_mesh() {
        let seg = CompactSetModel::unit_segment();
        let h = 1e-3;
        for &z in &[c(2.0, 0.0), c(0.1, 0.5), c(-1.3, -0.2), c(0.0, 3.0)] {
            let lap = seg.g(z + h) + seg.g(z - h) + seg.g(z + c(0.0, h)) + seg.g(z - c(0.0, h))
                - 4.0 * seg.g(z);
            assert!((lap / (h * h)).abs() < 1e-4, "laplacian at {z}");
        }
        let mesh = seg.candidate_mesh(4096).unwrap();
        assert!(mesh.nodes.iter().all(|z| seg.g(*z) == 0.0));
    }

    #[test]
    fn capacities_and_robin_constants() {
        assert_eq!(CompactSetModel::unit_disk().capacity(), 1.0);
        assert_eq!(CompactSetModel::unit_disk().robin_constant(), 0.0);
        assert_eq!(CompactSetModel::unit_segment().capacity(), 0.5);
        let lem = CompactSetModel::lemniscate(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], 2.0).unwrap();
        let disk2 = CompactSetModel::disk(c(0.0, 0.0), 2.0).unwrap();
        assert_abs_diff_eq!(lem.capacity(), disk2.capacity(), epsilon = 1e-12);
        assert_eq!(lem.robin_constant(), -(2f64).ln());
    }

    #[test]
    fn degree_one_lemniscate_is_a_disk() {
        let center = c(0.3, -0.2);
        let lem = CompactSetModel::lemniscate(vec![-center, c(1.0, 0.0)], 1.7).unwrap();
        let disk = CompactSetModel::disk(center, 1.7).unwrap();
        for &z in &[c(3.0, 1.0), c(-2.0, 0.5), c(0.3, 1.6), c(0.0, 0.0)] {
            assert_abs_diff_eq!(lem.g(z), disk.g(z), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(lem.capacity(), disk.capacity(), epsilon = 1e-12);
    }

    #[test]
    fn robin_asymptote_at_large_modulus() {
        let sets = [CompactSetModel::unit_disk(), CompactSetModel::unit_segment(), z2_minus_1(1.2), z2_minus_1(0.8)];
        for set in &sets {
            for angle in [0.0, 1.0, 2.5] {
                let z = Complex64::from_polar(1e6, angle);
                let diff = set.g(z) - z.norm().ln() - set.robin_constant();
                assert!(diff.abs() < 1e-4, "{}: {diff}", set.label());
            }
        }
    }

    #[test]
    fn distances() {
        let disk = CompactSetModel::unit_disk();
        assert_eq!(disk.dist_to_set(c(3.0, 0.0)), 2.0);
        let seg = CompactSetModel::unit_segment();
        assert_eq!(seg.dist_to_set(c(0.0, 1.0)), 1.0);
        assert_abs_diff_eq!(seg.dist_to_set(c(2.0, 1.0)), 2f64.sqrt(), epsilon = 1e-15);
        // lemniscate z^2 with r=1 is the unit disk
        let lem = CompactSetModel::lemniscate(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], 1.0).unwrap();
        assert_abs_diff_eq!(lem.dist_to_set(c(0.0, 2.5)), 1.5, epsilon = 1e-12);
        assert_eq!(lem.dist_to_set(c(0.2, 0.1)), 0.0);
    }

    #[test]
    fn quadrature_small_disk_example() {
        let q = CompactSetModel::unit_disk().equilibrium_quadrature(4).unwrap();
        let expected = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        assert_eq!(q.nodes, expected);
        assert_eq!(q.weights, vec![0.25; 4]);
        let mean = q.integrate_complex(|z| z);
        assert_eq!(mean, c(0.0, 0.0));
    }

    #[test]
    fn quadrature_weights_sum_to_one_and_nodes_on_boundary() {
        for set in [CompactSetModel::unit_disk(), CompactSetModel::unit_segment(), z2_minus_1(1.2), z2_minus_1(0.8)] {
            let q = set.equilibrium_quadrature(256).unwrap();
            let total: f64 = q.weights.iter().sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            assert!(q.weights.iter().all(|w| *w > 0.0));
            for z in &q.nodes {
                assert!(set.g(*z) < 1e-12);
                assert!(set.dist_to_set(*z) < 1e-9);
            }
        }
    }

    #[test]
    fn quadrature_of_log_distance_to_exterior_point() {
        // circle average of log|e^{it} - 2| is log 2
        let q = CompactSetModel::unit_disk().equilibrium_quadrature(4096).unwrap();
        assert_abs_diff_eq!(-q.potential(c(2.0, 0.0)), 2f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn frostman_constancy_on_interior_points() {
        for set in [CompactSetModel::unit_disk(), CompactSetModel::unit_segment(), z2_minus_1(1.2)] {
            let q = set.equilibrium_quadrature(4096).unwrap();
            let v = set.robin_constant();
            let interior: Vec<Complex64> = match set.kind() {
                SetKind::Disk => (0..10).map(|k| Complex64::from_polar(0.05 * k as f64, k as f64)).collect(),
                SetKind::Segment => (0..10).map(|k| c(-0.9 + 0.2 * k as f64, 0.0)).collect(),
                SetKind::Lemniscate => vec![c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0), c(1.2, 0.3)],
            };
            for z in interior {
                // the segment nodes are dense near the ends; keep a margin from nodes
                let err = (q.potential(z) - v).abs();
                let tol = if set.kind() == SetKind::Segment { 2e-3 } else { 1e-3 };
                assert!(err < tol, "{} at {z}: {err}", set.label());
            }
        }
    }

    #[test]
    fn log_potential_matches_quadrature_off_support() {
        for set in [CompactSetModel::unit_disk(), CompactSetModel::unit_segment(), z2_minus_1(1.2)] {
            let q = set.equilibrium_quadrature(4096).unwrap();
            for &z in &[c(3.0, 0.5), c(-0.4, 2.5), c(0.0, -4.0)] {
                assert_abs_diff_eq!(set.log_potential(z), -q.potential(z), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn arcsine_second_moment() {
        let m2 = CompactSetModel::unit_segment().equilibrium_moment(2).unwrap();
        assert_abs_diff_eq!(m2.re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(m2.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn level_curves() {
        let disk = CompactSetModel::unit_disk();
        let lc = disk.level_curve(2, 64).unwrap();
        for z in &lc.points {
            assert_abs_diff_eq!(z.norm(), 0.5f64.exp(), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(lc.rho, 0.5f64.exp() - 1.0, epsilon = 1e-12);

        let seg = CompactSetModel::unit_segment();
        let n = 5;
        let lc = seg.level_curve(n, 128).unwrap();
        let (ca, sa) = ((1.0 / n as f64).cosh(), (1.0 / n as f64).sinh());
        for z in &lc.points {
            assert!((seg.g(*z) - 0.2).abs() < 1e-10);
            let ellipse = (z.re / ca).powi(2) + (z.im / sa).powi(2);
            assert_abs_diff_eq!(ellipse, 1.0, epsilon = 1e-9);
        }

        let lem = z2_minus_1(0.8);
        let lc = lem.level_curve(3, 200).unwrap();
        assert!(lc.points.iter().all(|z| (lem.g(*z) - 1.0 / 3.0).abs() < 1e-10));
        assert!(lc.rho > 0.0);
    }

    #[test]
    fn level_curve_rejects_small_n() {
        assert!(CompactSetModel::unit_disk().level_curve(1, 10).is_err());
    }

    #[test]
    fn holder_certificates_pass_their_audits() {
        let h = CompactSetModel::unit_disk().holder_params().unwrap();
        assert_eq!((h.c, h.s), (2.0, 1.0));
        assert!(2f64.ln() <= h.c * 1.0);
        let seg = CompactSetModel::unit_segment().holder_params().unwrap();
        assert_eq!(seg.s, 0.5);
        let lem = CompactSetModel::lemniscate(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], 1.0)
            .unwrap()
            .holder_params()
            .unwrap();
        assert_eq!(lem.s, 0.5);
        assert!(lem.audit_max_ratio <= 1.0);
    }

    #[test]
    fn segment_holder_exponent_from_fit() {
        let seg = CompactSetModel::unit_segment();
        let ds: Vec<f64> = (0..10).map(|k| 10f64.powf(-8.0 + 0.5 * k as f64)).collect();
        let gs: Vec<f64> = ds.iter().map(|d| seg.g(c(1.0 + d, 0.0))).collect();
        let slope = crate::numerics::log_log_slope(&ds, &gs);
        assert!((slope - 0.5).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn disconnected_lemniscate_is_accepted() {
        let lem = z2_minus_1(0.5);
        assert!(lem.contains(c(1.0, 0.0)));
        assert!(lem.contains(c(-1.0, 0.0)));
        assert!(!lem.contains(c(0.0, 0.0)));
        assert!(lem.g(c(0.0, 0.0)) > 0.0);
        let q = lem.equilibrium_quadrature(64).unwrap();
        assert_eq!(q.nodes.len(), 128);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let set = CompactSetModel::lemniscate(
            vec![c(-0.1f64.sqrt(), 1.0 / 3.0), c(0.0, 0.0), c(1.0, 0.0)],
            std::f64::consts::E,
        )
        .unwrap()
        .with_mesh_resolution(1000)
        .unwrap();
        let text = set.to_json();
        let back = CompactSetModel::from_json(&text).unwrap();
        assert_eq!(back, set);
        let disk = CompactSetModel::disk(c(0.1, 0.2), 1.0 / 7.0).unwrap();
        assert_eq!(CompactSetModel::from_json(&disk.to_json()).unwrap(), disk);
    }

    #[test]
    fn json_rejects_unknown_keys_and_bad_params() {
        assert!(CompactSetModel::from_json(r#"{"kind":"disk","params":{"center":[0,0],"radius":1},"extra":1}"#).is_err());
        assert!(CompactSetModel::from_json(r#"{"kind":"segment","params":{"a":1,"b":0}}"#).is_err());
        assert!(CompactSetModel::from_json(r#"{"kind":"lemniscate","params":{"coefficients":[[1,0],[2,0]],"r":1}}"#).is_err());
        let seg = CompactSetModel::from_json(r#"{"kind":"segment","params":{"a":-1,"b":1}}"#).unwrap();
        assert_eq!(seg.mesh_resolution(), DEFAULT_MESH_RESOLUTION);
    }
}
