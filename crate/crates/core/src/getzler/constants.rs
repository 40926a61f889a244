//! The cube integrals weighting the heat-kernel contributions and their combination.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::gl_interval;

/// Absolute tolerance targeted by the cube quadrature.
pub const CUBE_TOL: f64 = 1e-12;

fn cube_rule(q: usize, m: usize, f: &(dyn Fn(f64) -> f64 + Sync)) -> f64 {
    let (x, w) = gl_interval(m, 1.0, 2.0);
    // integrands depend on s only through S = s_1 + ... + s_q; sum the leading
    // coordinate in parallel and reduce in index order
    let rest = |s0: f64| -> f64 {
        let mut stack = vec![(s0, 1.0f64, 1usize)];
        let mut acc = 0.0;
        while let Some((sum, weight, depth)) = stack.pop() {
            if depth == q {
                acc += weight * f(sum);
                continue;
            }
            for (xi, wi) in x.iter().zip(&w) {
                stack.push((sum + xi, weight * wi, depth + 1));
            }
        }
        acc
    };
    let parts: Vec<f64> = x.par_iter().zip(w.par_iter()).map(|(s0, w0)| w0 * rest(*s0)).collect();
    parts.iter().sum()
}

/// Integral over [1,2]^q of `f(s_1 + ... + s_q)` by Gauss-Legendre with order doubling.
pub fn cube_integral(q: usize, f: &(dyn Fn(f64) -> f64 + Sync)) -> Result<f64> {
    if q == 0 {
        return Ok(f(0.0));
    }
    let mut m = 6;
    let mut last = cube_rule(q, m, f);
    while m < 96 {
        m *= 2;
        let next = cube_rule(q, m, f);
        if (next - last).abs() < CUBE_TOL {
            return Ok(next);
        }
        last = next;
    }
    Err(Error::NotConverged(format!("cube quadrature for q = {q}")))
}

/// `int_{[1,2]^q} (1 + S)^{-q} ds`; 1 for q = 0.
pub fn beta_q(q: usize) -> Result<f64> {
    cube_integral(q, &|s| (1.0 + s).powi(-(q as i32)))
}

/// `int_{[1,2]^q} S (1 + S)^{-(q+1)} ds`; 0 for q = 0.
pub fn delta_q(q: usize) -> Result<f64> {
    cube_integral(q, &|s| s * (1.0 + s).powi(-(q as i32) - 1))
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

#[derive(Clone, Debug, Serialize)]
pub struct CombinationReport {
    pub q: usize,
    pub beta: f64,
    pub delta: f64,
    /// Weight of the single term with all heat factors in place.
    pub t_weight: f64,
    /// Weight of each of the 2q terms with one commutator of the heat factor.
    pub tj_weight: f64,
    /// Weight of each of the 2q terms with one Duhamel insertion.
    pub zj_weight: f64,
    pub combination: f64,
    pub target: f64,
    pub abs_err: f64,
    pub pass: bool,
}

/// `beta_q - delta_q + 2q q!/(2q+1)!` against `q!/(2q)!`.
pub fn constant_combination_check(q: usize, tol: f64) -> Result<CombinationReport> {
    if q == 0 {
        return Err(Error::InvalidConfig("q must be at least 1".into()));
    }
    let beta = beta_q(q)?;
    let delta = delta_q(q)?;
    let tj_weight = -delta / (2 * q) as f64;
    let zj_weight = factorial(q) / factorial(2 * q + 1);
    let combination = beta + 2.0 * q as f64 * tj_weight + 2.0 * q as f64 * zj_weight;
    let target = factorial(q) / factorial(2 * q);
    let abs_err = (combination - target).abs();
    Ok(CombinationReport { q, beta, delta, t_weight: beta, tj_weight, zj_weight, combination, target, abs_err, pass: abs_err < tol })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_order_closed_forms() {
        let l = (1.5f64).ln();
        assert!((beta_q(1).unwrap() - l).abs() < 1e-13);
        assert!((delta_q(1).unwrap() - (l - 1.0 / 6.0)).abs() < 1e-13);
        assert_eq!(beta_q(0).unwrap(), 1.0);
        assert_eq!(delta_q(0).unwrap(), 0.0);
    }

    #[test]
    fn difference_is_simple() {
        // beta_q - delta_q = int (1+S)^{-(q+1)}, which has closed forms
        assert!((beta_q(1).unwrap() - delta_q(1).unwrap() - 1.0 / 6.0).abs() < 1e-13);
        let d2 = beta_q(2).unwrap() - delta_q(2).unwrap();
        // int_{[1,2]^2} (1+s+t)^{-3} = 1/2 (1/3 - 2/4 + 1/5) = 1/60
        assert!((d2 - 1.0 / 60.0).abs() < 1e-12);
        let d3 = beta_q(3).unwrap() - delta_q(3).unwrap();
        // third difference of 1/(6 x) at x = 4..7 gives 1/840
        assert!((d3 - 1.0 / 840.0).abs() < 1e-12);
    }

    #[test]
    fn combinations() {
        for q in 1..=3 {
            let r = constant_combination_check(q, 1e-8).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }
}
