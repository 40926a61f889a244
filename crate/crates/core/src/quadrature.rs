//! Gauss-Legendre rules and adaptive 1-D integration.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Gauss-Legendre rule mapped to [a, b].
pub fn gl_interval(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    let c = 0.5 * (b + a);
    (x.iter().map(|t| c + h * t).collect(), w.iter().map(|v| v * h).collect())
}

fn gl_apply(f: &impl Fn(f64) -> f64, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let h = 0.5 * (b - a);
    let c = 0.5 * (b + a);
    rule.0.iter().zip(&rule.1).map(|(t, w)| w * f(c + h * t)).sum::<f64>() * h
}

/// Adaptive bisection comparing 10- and 20-point Gauss-Legendre on each panel.
pub fn adaptive(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let lo = gauss_legendre(10);
    let hi = gauss_legendre(20);
    let mut stack = vec![(a, b, 0u32)];
    let mut total = 0.0;
    let mut comp = 0.0;
    let width = (b - a).abs().max(f64::MIN_POSITIVE);
    while let Some((x0, x1, depth)) = stack.pop() {
        let coarse = gl_apply(&f, x0, x1, &lo);
        let fine = gl_apply(&f, x0, x1, &hi);
        if !fine.is_finite() {
            return Err(Error::NotConverged(format!("non-finite integrand on [{x0}, {x1}]")));
        }
        let local_tol = tol * (x1 - x0).abs() / width;
        if (fine - coarse).abs() <= local_tol.max(1e-300) || depth > 40 {
            if depth > 40 && (fine - coarse).abs() > 1e3 * local_tol {
                return Err(Error::NotConverged("adaptive quadrature depth exhausted".into()));
            }
            // Kahan summation keeps panel order effects below the tolerance
            let y = fine - comp;
            let t = total + y;
            comp = (t - total) - y;
            total = t;
        } else {
            let mid = 0.5 * (x0 + x1);
            stack.push((mid, x1, depth + 1));
            stack.push((x0, mid, depth + 1));
        }
    }
    Ok(total)
}

/// ln Gamma for positive arguments (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const G: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = G[0];
    let t = x + 7.5;
    for (i, g) in G.iter().enumerate().skip(1) {
        a += g / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        for p in 0..14 {
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum();
            let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p + 1) as f64 };
            assert!((s - exact).abs() < 1e-14, "p={p}");
        }
    }

    #[test]
    fn adaptive_log() {
        let v = adaptive(|s| 1.0 / (1.0 + s), 1.0, 2.0, 1e-13).unwrap();
        assert!((v - (1.5f64).ln()).abs() < 1e-14);
        let g = adaptive(|x| (-x * x).exp(), -8.0, 8.0, 1e-13).unwrap();
        assert!((g - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn gamma_values() {
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-13);
        assert!((ln_gamma(0.5) - PI.sqrt().ln()).abs() < 1e-13);
    }
}
