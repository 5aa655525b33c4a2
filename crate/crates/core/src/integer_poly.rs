//! Exact prime arithmetic and the cyclotomic prime-product family
//! `P(z) = prod_{m<=k} (z^{p_m} - 1) / (z - 1)`, an integer polynomial with
//! all zeros on the unit circle and sup-norm `P(1) = prod p_m` on the disk.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::discrete_energy::{discrete_energy, PointConfiguration};
use crate::error::{Error, Result};
use crate::report::{fmt_f64, serialize_lossless, Table};

/// Largest sieve the module will allocate.
pub const MAX_SIEVE_LIMIT: u64 = 100_000_000;
pub const MAX_EXAMPLE_K: usize = 40;
pub const ENERGY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeTable {
    pub limit: u64,
    pub primes: Vec<u64>,
}

impl PrimeTable {
    /// All primes `<= limit` by the sieve of Eratosthenes.
    pub fn sieve(limit: u64) -> Result<Self> {
        if limit > MAX_SIEVE_LIMIT {
            return Err(Error::invalid(format!("sieve limit {limit} exceeds {MAX_SIEVE_LIMIT}")));
        }
        let size = limit as usize + 1;
        let mut composite = vec![false; size];
        let mut primes = Vec::new();
        for i in 2..size {
            if composite[i] {
                continue;
            }
            primes.push(i as u64);
            let mut j = i * i;
            while j < size {
                composite[j] = true;
                j += i;
            }
        }
        Ok(Self { limit, primes })
    }

    /// Every entry passes trial division and no prime `<= limit` is missing.
    pub fn audit(&self) -> bool {
        let is_prime = |n: u64| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d));
        let mut expected = (2..=self.limit).filter(|n| is_prime(*n));
        self.primes.iter().all(|p| expected.next() == Some(*p)) && expected.next().is_none()
    }
}

/// The first `k` primes.
pub fn first_k_primes(k: usize) -> Result<Vec<u64>> {
    if k == 0 {
        return Err(Error::invalid("need k >= 1 primes"));
    }
    // p_k < k (ln k + ln ln k) for k >= 6
    let kf = k.max(6) as f64;
    let limit = (kf * (kf.ln() + kf.ln().ln())).ceil() as u64 + 10;
    let mut primes = PrimeTable::sieve(limit)?.primes;
    primes.truncate(k);
    Ok(primes)
}

/// `theta(x) = sum_{p <= x} log p`.
pub fn chebyshev_theta(x: f64) -> Result<f64> {
    if !(x >= 2.0) {
        return Err(Error::invalid(format!("chebyshev_theta needs x >= 2, got {x}")));
    }
    if x > MAX_SIEVE_LIMIT as f64 {
        return Err(Error::invalid(format!("x = {x} exceeds the sieve limit")));
    }
    let table = PrimeTable::sieve(x.floor() as u64)?;
    Ok(table.primes.iter().map(|p| (*p as f64).ln()).sum())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicProductPoly {
    pub k: usize,
    pub primes: Vec<u64>,
    /// `sum p_m - k`.
    pub degree: usize,
    /// `P(1) = prod p_m`.
    pub supnorm_exact: BigUint,
}

pub fn build_example_poly(k: usize) -> Result<CyclotomicProductPoly> {
    if !(1..=MAX_EXAMPLE_K).contains(&k) {
        return Err(Error::invalid(format!("example index k must be in 1..={MAX_EXAMPLE_K}, got {k}")));
    }
    let primes = first_k_primes(k)?;
    let degree = primes.iter().sum::<u64>() as usize - k;
    let supnorm_exact = primes.iter().map(|p| BigUint::from(*p)).product();
    Ok(CyclotomicProductPoly { k, primes, degree, supnorm_exact })
}

impl CyclotomicProductPoly {
    /// `e^{2 pi i j / p}` for `j = 1..p-1`, factor by factor.
    pub fn roots(&self) -> Vec<Complex64> {
        self.primes
            .iter()
            .flat_map(|&p| {
                (1..p).map(move |j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / p as f64))
            })
            .collect()
    }

    pub fn root_config(&self) -> Result<PointConfiguration> {
        PointConfiguration::new(self.roots(), format!("cyclotomic_k{}", self.k))
    }

    /// `sum log p_m`.
    pub fn log_supnorm(&self) -> f64 {
        self.primes.iter().map(|p| (*p as f64).ln()).sum()
    }

    /// `log` of the exact big-integer product.
    pub fn log_supnorm_exact(&self) -> f64 {
        big_log(&self.supnorm_exact)
    }

    /// `log |P(z)|`, each factor summed as `1 + z + ... + z^{p-1}`.
    pub fn log_abs(&self, z: Complex64) -> f64 {
        self.primes
            .iter()
            .map(|&p| {
                let mut acc = Complex64::new(0.0, 0.0);
                for _ in 0..p {
                    acc = acc * z + 1.0;
                }
                acc.norm().ln()
            })
            .sum()
    }

    /// Largest `log |P|` over `m` equispaced points of the unit circle.
    pub fn sampled_log_circle_max(&self, m: usize) -> f64 {
        (0..m)
            .map(|j| self.log_abs(Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / m as f64)))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `|mean of the roots|`; each factor's roots sum to `-1`, so this is `k/n`.
    pub fn root_mean(&self) -> f64 {
        self.k as f64 / self.degree as f64
    }
}

fn big_log(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().expect("fits in f64").ln()
    } else {
        let shift = bits - 900;
        (x >> shift).to_f64().expect("fits in f64").ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Discrete energy of the zeros of the example polynomial. Needs `n >= 2`.
pub fn example_energy(poly: &CyclotomicProductPoly) -> Result<f64> {
    Ok(discrete_energy(&poly.root_config()?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiscriminantBound {
    pub energy: f64,
    /// `(2/n) log |a_n|`; an integer polynomial with simple zeros has
    /// `|disc| >= 1` and hence energy at most this.
    pub energy_bound: f64,
    pub holds: bool,
}

pub fn discriminant_energy_bound(leading: i64, roots: &PointConfiguration) -> Result<DiscriminantBound> {
    if leading == 0 {
        return Err(Error::invalid("leading coefficient must be non-zero"));
    }
    if roots.has_duplicates() {
        return Err(Error::invalid("discriminant bound needs distinct roots"));
    }
    let energy = discrete_energy(roots);
    let bound = 2.0 / roots.len() as f64 * (leading.unsigned_abs() as f64).ln();
    Ok(DiscriminantBound { energy, energy_bound: bound, holds: energy <= bound + ENERGY_TOLERANCE })
}

/// Exact discriminant of an integer polynomial (ascending coefficients),
/// `(-1)^{n(n-1)/2} Res(P, P') / a_n`.
pub fn exact_discriminant(coeffs: &[i64]) -> Result<BigInt> {
    let n = coeffs.len().checked_sub(1).filter(|n| *n >= 1).ok_or_else(|| Error::invalid("degree must be >= 1"))?;
    let lead = coeffs[n];
    if lead == 0 {
        return Err(Error::invalid("leading coefficient must be non-zero"));
    }
    if n == 1 {
        return Ok(BigInt::one());
    }
    let p: Vec<BigInt> = coeffs.iter().map(|c| BigInt::from(*c)).collect();
    let dp: Vec<BigInt> = (1..=n).map(|j| BigInt::from(j as i64) * &p[j]).collect();
    let res = bareiss_det(sylvester(&p, &dp));
    let sign = if (n * (n - 1) / 2) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    Ok(sign * res / BigInt::from(lead))
}

/// Sylvester matrix of two ascending-coefficient polynomials.
fn sylvester(p: &[BigInt], q: &[BigInt]) -> Vec<Vec<BigInt>> {
    let (m, n) = (p.len() - 1, q.len() - 1);
    let size = m + n;
    let mut rows = vec![vec![BigInt::zero(); size]; size];
    for i in 0..n {
        for (j, c) in p.iter().rev().enumerate() {
            rows[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in q.iter().rev().enumerate() {
            rows[n + i][i + j] = c.clone();
        }
    }
    rows
}

/// Fraction-free Gaussian elimination.
fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchurReport {
    pub k: usize,
    pub n: usize,
    /// `prod p_m` as a decimal string.
    pub supnorm_exact: String,
    pub log_supnorm: f64,
    pub sqrt_n_log_n: f64,
    pub ratio_c1: f64,
    pub root_mean: f64,
    /// `|mean of the materialized roots|`.
    pub root_mean_numeric: f64,
    pub ratio_c2: f64,
    /// Discrete energy of the zeros; `nan` when `n < 2`.
    #[serde(serialize_with = "serialize_lossless")]
    pub energy: f64,
}

impl SchurReport {
    pub fn new(poly: &CyclotomicProductPoly) -> Self {
        let n = poly.degree;
        let nf = n as f64;
        let scale = (nf * nf.ln()).sqrt();
        let roots = poly.roots();
        let mean = roots.iter().sum::<Complex64>() / nf;
        let energy = example_energy(poly).unwrap_or(f64::NAN);
        Self {
            k: poly.k,
            n,
            supnorm_exact: poly.supnorm_exact.to_string(),
            log_supnorm: poly.log_supnorm(),
            sqrt_n_log_n: scale,
            ratio_c1: poly.log_supnorm() / scale,
            root_mean: poly.root_mean(),
            root_mean_numeric: mean.norm(),
            ratio_c2: poly.root_mean() * scale,
            energy,
        }
    }

    pub const CSV_HEADER: [&'static str; 8] =
        ["k", "n", "supnorm_exact", "log_supnorm", "ratio_c1", "root_mean", "ratio_c2", "energy"];

    fn csv_cells(&self) -> Vec<String> {
        vec![
            self.k.to_string(),
            self.n.to_string(),
            self.supnorm_exact.clone(),
            fmt_f64(self.log_supnorm),
            fmt_f64(self.ratio_c1),
            fmt_f64(self.root_mean),
            fmt_f64(self.ratio_c2),
            fmt_f64(self.energy),
        ]
    }
}

pub fn sharpness_report(ks: impl IntoIterator<Item = usize>) -> Result<Vec<SchurReport>> {
    ks.into_iter().map(|k| Ok(SchurReport::new(&build_example_poly(k)?))).collect()
}

pub fn schur_csv(rows: &[SchurReport]) -> String {
    let mut table = Table::new(&SchurReport::CSV_HEADER);
    for r in rows {
        table.push(r.csv_cells());
    }
    table.to_csv()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DegreeRow {
    pub k: usize,
    pub n: usize,
    /// `n / (k^2 log k / 2)`.
    pub ratio: f64,
}

pub fn degree_asymptotic_check(ks: impl IntoIterator<Item = usize>) -> Result<Vec<DegreeRow>> {
    ks.into_iter()
        .map(|k| {
            if k < 2 {
                return Err(Error::invalid("degree asymptotics need k >= 2"));
            }
            let poly = build_example_poly(k)?;
            let kf = k as f64;
            Ok(DegreeRow { k, n: poly.degree, ratio: poly.degree as f64 / (kf * kf * kf.ln() / 2.0) })
        })
        .collect()
}

/// Whether a big integer is exactly `prod p`; used by the audits.
pub fn is_exact_product(value: &BigUint, primes: &[u64]) -> bool {
    let mut rest = value.clone();
    for p in primes {
        let p = BigUint::from(*p);
        if (&rest % &p) != BigUint::zero() {
            return false;
        }
        rest /= p;
    }
    rest.is_one()
}

/// `|d|` of a big signed integer as an `f64` logarithm; `-inf` for zero.
pub fn log_abs_big(d: &BigInt) -> f64 {
    if d.is_zero() {
        f64::NEG_INFINITY
    } else {
        big_log(&d.abs().to_biguint().expect("non-negative"))
    }
}
