//! Small numerical utilities shared across modules: finite differences,
//! quadrature rules and smooth cutoff functions.

use crate::error::{Error, Result};
use std::sync::OnceLock;

/// Central difference of a scalar function, error O(h^2).
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Smooth taper equal to 1 for x <= 0 and 0 for x >= 1, with three
/// continuous derivatives at both junctions (degree-7 smoothstep).
pub fn taper_c3(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x >= 1.0 {
        0.0
    } else {
        let x2 = x * x;
        let x4 = x2 * x2;
        1.0 - (35.0 * x4 - 84.0 * x4 * x + 70.0 * x4 * x2 - 20.0 * x4 * x2 * x)
    }
}

/// Derivative of [`taper_c3`].
pub fn taper_c3_deriv(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        let x2 = x * x;
        let x3 = x2 * x;
        -(140.0 * x3 - 420.0 * x3 * x + 420.0 * x3 * x2 - 140.0 * x3 * x3)
    }
}

/// Adaptive Simpson quadrature with relative tolerance `rel_tol`.
///
/// The recursion splits until the local Richardson estimate meets the
/// tolerance scaled to the current partial value; depth is capped so
/// non-integrable endpoints fail instead of looping.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::QuadratureFailed(format!("bad interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson_rule(a, b, fa, fm, fb);
    let scale = whole.abs().max(1e-300);
    simpson_recurse(f, a, b, fa, fm, fb, whole, rel_tol * scale, 64)
}

fn simpson_rule(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    abs_tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    if !(flm.is_finite() && frm.is_finite()) {
        return Err(Error::QuadratureFailed(format!(
            "integrand not finite inside [{a}, {b}]"
        )));
    }
    let left = simpson_rule(a, m, fa, flm, fm);
    let right = simpson_rule(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * abs_tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureFailed(format!(
            "max depth reached on [{a}, {b}], residual {delta:.3e}"
        )));
    }
    let l = simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * abs_tol, depth - 1)?;
    let r = simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * abs_tol, depth - 1)?;
    Ok(l + r)
}

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes via Newton iteration on the Legendre polynomial P_n.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Chebyshev-based initial guess.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_deriv(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrate f over [a, b].
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shared 32-node rule used by the homotopy primitive.
pub fn gauss_legendre_32() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(32))
}

/// Least-squares affine fit y ≈ c0 + c1 t. Returns (c0, c1).
pub fn affine_fit(ts: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if ts.len() != ys.len() || ts.len() < 2 {
        return Err(Error::Degenerate("affine fit needs >= 2 samples".into()));
    }
    let n = ts.len() as f64;
    let st: f64 = ts.iter().sum();
    let sy: f64 = ys.iter().sum();
    let stt: f64 = ts.iter().map(|t| t * t).sum();
    let sty: f64 = ts.iter().zip(ys).map(|(t, y)| t * y).sum();
    let det = n * stt - st * st;
    if det.abs() < 1e-14 * n * stt.max(1.0) {
        return Err(Error::Degenerate("all abscissae equal in affine fit".into()));
    }
    let c1 = (n * sty - st * sy) / det;
    let c0 = (sy - c1 * st) / n;
    Ok((c0, c1))
}

/// Chebyshev interpolant of a smooth function on [a, b].
///
/// Used to make antiderivatives of tapered profiles cheap to evaluate.
#[derive(Debug, Clone)]
pub struct Chebyshev {
    a: f64,
    b: f64,
    coeffs: Vec<f64>,
}

impl Chebyshev {
    pub fn fit<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> Self {
        assert!(n >= 2 && b > a);
        let nf = n as f64;
        let vals: Vec<f64> = (0..n)
            .map(|k| {
                let x = (std::f64::consts::PI * (k as f64 + 0.5) / nf).cos();
                f(0.5 * (a + b) + 0.5 * (b - a) * x)
            })
            .collect();
        let mut coeffs = vec![0.0; n];
        for (j, c) in coeffs.iter_mut().enumerate() {
            let mut s = 0.0;
            for (k, v) in vals.iter().enumerate() {
                s += v * (std::f64::consts::PI * j as f64 * (k as f64 + 0.5) / nf).cos();
            }
            *c = 2.0 * s / nf;
        }
        Chebyshev { a, b, coeffs }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = (2.0 * x - self.a - self.b) / (self.b - self.a);
        let mut d = 0.0;
        let mut dd = 0.0;
        for &c in self.coeffs.iter().skip(1).rev() {
            let sv = d;
            d = 2.0 * t * d - dd + c;
            dd = sv;
        }
        t * d - dd + 0.5 * self.coeffs[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn simpson_matches_analytic_log() {
        let v = adaptive_simpson(&|x: f64| 1.0 / x, 0.1, 1.0, 1e-12).unwrap();
        assert_relative_eq!(v, 10.0_f64.ln(), max_relative = 1e-10);
    }

    #[test]
    fn simpson_handles_steep_integrand() {
        // f = 1/n^2 near the lower end; integrable but stiff.
        let v = adaptive_simpson(&|x: f64| 1.0 / (x * x), 1e-4, 1.0, 1e-10).unwrap();
        assert_relative_eq!(v, 1e4 - 1.0, max_relative = 1e-9);
    }

    #[test]
    fn gauss_legendre_exact_on_polynomials() {
        let rule = GaussLegendre::new(8);
        // degree 15 is integrated exactly by 8 nodes
        let v = rule.integrate(|x| x.powi(15) + 3.0 * x.powi(4), 0.0, 1.0);
        assert_relative_eq!(v, 1.0 / 16.0 + 3.0 / 5.0, epsilon = 1e-13);
    }

    #[test]
    fn taper_is_monotone_bridge() {
        assert_eq!(taper_c3(-1.0), 1.0);
        assert_eq!(taper_c3(2.0), 0.0);
        let mut prev = 1.0;
        for i in 1..=100 {
            let v = taper_c3(i as f64 / 100.0);
            assert!(v <= prev + 1e-15, "taper must be non-increasing");
            prev = v;
        }
        // derivative consistent with finite differences
        for &x in &[0.2, 0.5, 0.8] {
            let fd = central_diff(taper_c3, x, 1e-6);
            assert_relative_eq!(taper_c3_deriv(x), fd, epsilon = 1e-8);
        }
    }

    #[test]
    fn affine_fit_recovers_line() {
        let ts: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let ys: Vec<f64> = ts.iter().map(|t| 3.0 + 2.0 * t).collect();
        let (c0, c1) = affine_fit(&ts, &ys).unwrap();
        assert_relative_eq!(c0, 3.0, epsilon = 1e-10);
        assert_relative_eq!(c1, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn affine_fit_rejects_degenerate_abscissae() {
        let ts = vec![1.0; 12];
        let ys = vec![2.0; 12];
        assert!(affine_fit(&ts, &ys).is_err());
    }

    #[test]
    fn chebyshev_interpolates_smooth_function() {
        let ch = Chebyshev::fit(|x: f64| (2.0 * x).sin() * x.exp(), 0.1, 0.9, 24);
        for i in 0..50 {
            let x = 0.1 + 0.8 * i as f64 / 49.0;
            assert_relative_eq!(ch.eval(x), (2.0 * x).sin() * x.exp(), epsilon = 1e-12);
        }
    }
}
