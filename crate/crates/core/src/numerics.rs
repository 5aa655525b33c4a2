//! Small numerical kernels shared by the modules: 1-D golden-section search,
//! Gauss-Legendre rules, complex polynomial root finding and least-squares
//! slopes.

use num_complex::Complex64;

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes `f` on `[lo, hi]` by golden-section search.
///
/// Returns the best abscissa seen together with its value. Endpoints are
/// evaluated too, so monotone objectives converge to the boundary.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut best = (lo, f(lo));
    let fb = f(hi);
    if fb > best.1 {
        best = (hi, fb);
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

/// Least-squares slope of `ys` against `xs`.
pub fn regression_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Slope of `log y` against `log x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    regression_slope(&lx, &ly)
}

/// Evaluates a polynomial given by ascending coefficients, together with its
/// derivative.
pub fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All roots of the polynomial with ascending `coeffs` (leading coefficient
/// non-zero), via Aberth-Ehrlich iteration followed by Newton polishing.
///
/// Roots are returned ordered by argument in `(-pi, pi]`, then by modulus.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let degree = coeffs.len() - 1;
    let lead = coeffs[degree];
    if lead.norm() == 0.0 {
        return Err(Error::invalid("leading coefficient is zero"));
    }
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    if degree == 1 {
        return Ok(vec![-monic[0]]);
    }
    // Cauchy-type radius for the initial circle
    let radius = monic[..degree]
        .iter()
        .map(|c| c.norm())
        .fold(0.0_f64, f64::max)
        .max(1e-12)
        + 1.0;
    let mut roots: Vec<Complex64> = (0..degree)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / degree as f64 + 0.4;
            Complex64::from_polar(0.5 * radius, angle)
        })
        .collect();
    let mut converged = false;
    for _ in 0..500 {
        let mut max_step = 0.0_f64;
        for i in 0..degree {
            let (p, dp) = horner(&monic, roots[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..degree)
                .filter(|&j| j != i)
                .map(|j| (roots[i] - roots[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                roots[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + roots[i].norm()));
            }
        }
        if max_step < 1e-15 {
            converged = true;
            break;
        }
    }
    if !converged && roots.iter().any(|r| !r.is_finite()) {
        return Err(Error::geometry("polynomial root iteration diverged"));
    }
    for r in roots.iter_mut() {
        *r = newton_polish(&monic, *r);
    }
    sort_by_argument(&mut roots);
    Ok(roots)
}

/// A few Newton steps on `p(z) = 0`, keeping the best iterate.
pub fn newton_polish(coeffs: &[Complex64], mut z: Complex64) -> Complex64 {
    let mut best = (horner(coeffs, z).0.norm(), z);
    for _ in 0..8 {
        let (p, dp) = horner(coeffs, z);
        if dp.norm() == 0.0 {
            break;
        }
        z -= p / dp;
        let res = horner(coeffs, z).0.norm();
        if !res.is_finite() {
            break;
        }
        if res < best.0 {
            best = (res, z);
        }
        if res == 0.0 {
            break;
        }
    }
    best.1
}

pub fn sort_by_argument(points: &mut [Complex64]) {
    points.sort_by(|a, b| {
        a.arg()
            .total_cmp(&b.arg())
            .then(a.norm().total_cmp(&b.norm()))
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(12);
        let sum_w: f64 = w.iter().sum();
        assert_abs_diff_eq!(sum_w, 2.0, epsilon = 1e-14);
        let int_x10: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert_abs_diff_eq!(int_x10, 2.0 / 11.0, epsilon = 1e-14);
    }

    #[test]
    fn golden_finds_interior_and_boundary_maxima() {
        let (x, v) = golden_max(|x| -(x - 0.3) * (x - 0.3), -1.0, 1.0, 1e-12);
        assert_abs_diff_eq!(x, 0.3, epsilon = 1e-6);
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
        let (x, _) = golden_max(|x| x, -1.0, 1.0, 1e-12);
        assert_eq!(x, 1.0);
    }

    #[test]
    fn roots_of_quadratic_sorted_by_argument() {
        let one = Complex64::new(1.0, 0.0);
        // z^2 + 1
        let roots = polynomial_roots(&[one, Complex64::new(0.0, 0.0), one]).unwrap();
        assert_abs_diff_eq!(roots[0].im, -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(roots[1].im, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn roots_of_cubic_reproduce_polynomial() {
        let c = |re, im| Complex64::new(re, im);
        let coeffs = [c(-2.0, 1.0), c(0.5, 0.0), c(0.0, -3.0), c(1.0, 0.0)];
        let roots = polynomial_roots(&coeffs).unwrap();
        for r in roots {
            assert!(horner(&coeffs, r).0.norm() < 1e-12);
        }
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-0.5)).collect();
        assert_abs_diff_eq!(log_log_slope(&xs, &ys), -0.5, epsilon = 1e-12);
    }
}
