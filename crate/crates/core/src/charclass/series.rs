//! Power series applied to even matrices: exp, sinh(x)/x and its half-determinant.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::matrix::{EvenMatrix, SkewMat};
use crate::algebra_core::{ExtElem, Rational, Scalar};
use crate::error::{Error, Result};

/// Relative tail tolerance for series on numeric input.
pub const SERIES_TOL: f64 = 1e-14;

/// Bernoulli numbers B_0..=B_m (B_1 = -1/2).
pub fn bernoulli(m: usize) -> Vec<Rational> {
    // Akiyama-Tanigawa gives B_1 = +1/2; flip it afterwards
    let mut out = Vec::with_capacity(m + 1);
    let mut a: Vec<Rational> = Vec::with_capacity(m + 1);
    for k in 0..=m {
        a.push(BigRational::new(BigInt::one(), BigInt::from(k as u64 + 1)));
        for j in (1..=k).rev() {
            let d = &a[j - 1] - &a[j];
            a[j - 1] = d * BigRational::from_integer(BigInt::from(j as u64));
        }
        out.push(a[0].clone());
    }
    if m >= 1 {
        out[1] = -out[1].clone();
    }
    out
}

fn factorial(n: usize) -> BigInt {
    (1..=n as u64).fold(BigInt::one(), |a, b| a * BigInt::from(b))
}

/// Exact c_k with log(sinh x / x) = sum_k c_k x^{2k}, k >= 1.
pub fn log_sinhc_coeffs(kmax: usize) -> Vec<Rational> {
    let b = bernoulli(2 * kmax);
    let mut out = vec![Rational::zero()];
    for k in 1..=kmax {
        let num = BigRational::from_integer(BigInt::one() << (2 * k)) * &b[2 * k];
        let den = BigRational::from_integer(BigInt::from(2 * k as u64) * factorial(2 * k));
        out.push(num / den);
    }
    out
}

/// zeta(2k) for k >= 1.
fn zeta_even(k: usize) -> f64 {
    static TABLE: std::sync::OnceLock<Vec<f64>> = std::sync::OnceLock::new();
    let table = TABLE.get_or_init(|| {
        // exact through Bernoulli numbers where the direct sum converges slowly
        let b = bernoulli(40);
        (0..=20)
            .map(|k| {
                if k == 0 {
                    return -0.5;
                }
                let bk = crate::algebra_core::rat_to_f64(&b[2 * k]).abs();
                let f: f64 = (1..=2 * k).map(|x| x as f64).product();
                bk * (2.0 * PI).powi(2 * k as i32) / (2.0 * f)
            })
            .collect()
    });
    if k <= 20 {
        return table[k];
    }
    let s = 2.0 * k as f64;
    (1..=60).rev().map(|m| (m as f64).powf(-s)).sum()
}

/// log det^{1/2}(sinh(s w)/(s w)) as an even element.
///
/// Exact when `w` has no grade-0 part (the series then terminates by nilpotency).
/// Otherwise the grade-0 spectral radius must stay below pi.
pub fn log_det_half_sinhc(w: &SkewMat, s: &Scalar) -> Result<ExtElem> {
    let m = w.matrix().scale(s);
    let gens = w.gens();
    let sq = m.mul(&m)?;
    let mut acc = ExtElem::zero(gens);
    if !m.has_numeric_part() {
        let mut p = sq.clone();
        let mut k = 1usize;
        let mut coeffs = log_sinhc_coeffs(4);
        while !p.is_zero() {
            if k >= coeffs.len() {
                coeffs = log_sinhc_coeffs(2 * k);
            }
            let c = Scalar::from_rational(coeffs[k].clone() / BigRational::from_integer(2.into()));
            acc.axpy(&c, &p.trace());
            p = p.mul(&sq)?;
            k += 1;
        }
        return Ok(acc);
    }
    let rho = m.numeric_spectral_radius();
    if rho >= PI * (1.0 - 1e-12) {
        return Err(Error::Branch(format!("spectral radius {rho:.6} reaches pi")));
    }
    // c_k tr(m^{2k}) = (-1)^{k+1} zeta(2k)/k tr((m/pi)^{2k})
    let q = sq.scale(&Scalar::real(1.0 / (PI * PI)));
    let mut p = q.clone();
    let mut quiet = 0;
    for k in 1..200_000usize {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let z = zeta_even(k) / k as f64;
        let t = p.trace();
        acc.axpy(&Scalar::real(0.5 * sign * z), &t);
        if t.max_abs() * z <= 1e-3 * SERIES_TOL * acc.max_abs().max(1.0) {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if p.is_zero() || quiet >= 3 {
            return Ok(acc);
        }
        p = p.mul(&q)?;
    }
    Err(Error::NotConverged("log det^(1/2) series".into()))
}

/// det^{1/2}(sinh(s w)/(s w)).
pub fn det_half_sinhc(w: &SkewMat, s: &Scalar) -> Result<ExtElem> {
    log_det_half_sinhc(w, s)?.exp_even()
}

/// Inverse A-hat form det^{1/2}(sinh(W/2)/(W/2)).
pub fn a_hat_inv(w: &SkewMat) -> Result<ExtElem> {
    det_half_sinhc(w, &Scalar::ratio(1, 2))
}

/// A-hat form det^{1/2}((W/2)/sinh(W/2)), the exact reciprocal series.
pub fn a_hat(w: &SkewMat) -> Result<ExtElem> {
    let l = log_det_half_sinhc(w, &Scalar::ratio(1, 2))?;
    (-&l).exp_even()
}

/// Power series selectable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixSeries {
    Exp,
    /// sinh(x)/x
    SinhOverX,
    Cosh,
}

impl MatrixSeries {
    fn coeff(self, k: usize) -> Option<Rational> {
        let f = |n: usize| BigRational::new(BigInt::one(), factorial(n));
        match self {
            MatrixSeries::Exp => Some(f(k)),
            MatrixSeries::SinhOverX => (k % 2 == 0).then(|| f(k + 1)),
            MatrixSeries::Cosh => (k % 2 == 0).then(|| f(k)),
        }
    }
}

/// Apply a power series to an even matrix.
pub fn analytic_even(f: MatrixSeries, m: &EvenMatrix) -> Result<EvenMatrix> {
    let n = m.n();
    let gens = m.gens();
    let mut sum = EvenMatrix::identity(n, gens);
    let mut p = EvenMatrix::identity(n, gens);
    let numeric = m.has_numeric_part();
    for k in 1..2000usize {
        p = p.mul(m)?;
        if p.is_zero() {
            return Ok(sum);
        }
        if let Some(c) = f.coeff(k) {
            let c = Scalar::from_rational(c);
            let term = p.scale(&c);
            sum.axpy(&Scalar::one(), &term);
            if numeric && term.max_abs() <= SERIES_TOL * sum.max_abs().max(1.0) && k > 4 {
                return Ok(sum);
            }
        }
        if numeric && k > 20 {
            // keep the exact rationals from growing without bound
            p = p.scale(&Scalar::real(1.0));
        }
    }
    Err(Error::NotConverged("matrix power series".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra_core::IndexSet;

    #[test]
    fn bernoulli_values() {
        let b = bernoulli(8);
        let r = |p, q| BigRational::new(BigInt::from(p), BigInt::from(q));
        assert_eq!(b[0], r(1, 1));
        assert_eq!(b[1], r(-1, 2));
        assert_eq!(b[2], r(1, 6));
        assert_eq!(b[4], r(-1, 30));
        assert_eq!(b[6], r(1, 42));
        assert_eq!(b[8], r(-1, 30));
    }

    #[test]
    fn log_coefficients() {
        let c = log_sinhc_coeffs(2);
        let r = |p, q| BigRational::new(BigInt::from(p), BigInt::from(q));
        assert_eq!(c[1], r(1, 6));
        assert_eq!(c[2], r(-1, 180));
        for k in 1..6 {
            let exact = crate::algebra_core::rat_to_f64(&log_sinhc_coeffs(k)[k]);
            let z = if k % 2 == 1 { 1.0 } else { -1.0 } * zeta_even(k) / (k as f64 * PI.powi(2 * k as i32));
            assert!((exact - z).abs() < 1e-15 * exact.abs().max(1e-300), "k={k}");
        }
    }

    #[test]
    fn numeric_two_by_two_is_sinc() {
        for th in [0.3, 1.0, 2.5, -3.0] {
            let w = SkewMat::from_upper(2, 0, &[ExtElem::scalar(0, Scalar::real(th))]).unwrap();
            let d = det_half_sinhc(&w, &Scalar::one()).unwrap().scalar_part().to_c64();
            assert!((d.re - th.sin() / th).abs() < 1e-13, "{th}: {d}");
        }
        let w = SkewMat::from_upper(2, 0, &[ExtElem::scalar(0, Scalar::real(3.2))]).unwrap();
        assert!(matches!(det_half_sinhc(&w, &Scalar::one()), Err(Error::Branch(_))));
    }

    #[test]
    fn nilpotent_leading_term() {
        let gens = 4;
        let a = ExtElem::monomial(gens, IndexSet::from_indices(&[1, 2]).unwrap(), Scalar::ratio(2, 3));
        let b = ExtElem::monomial(gens, IndexSet::from_indices(&[3, 4]).unwrap(), Scalar::ratio(-5, 7));
        let w = SkewMat::from_upper(4, gens, &[a.clone(), ExtElem::zero(gens), ExtElem::zero(gens), ExtElem::zero(gens), ExtElem::zero(gens), b.clone()]).unwrap();
        let tr2 = w.matrix().mul(w.matrix()).unwrap().trace();
        // tr(w^2)^2 survives at grade 4, so include the second-order exp term
        let mut expect = ExtElem::one(gens);
        expect.axpy(&Scalar::ratio(1, 12), &tr2);
        let tr4 = {
            let s = w.matrix().mul(w.matrix()).unwrap();
            s.mul(&s).unwrap().trace()
        };
        expect.axpy(&Scalar::ratio(-1, 360), &tr4);
        expect.axpy(&Scalar::ratio(1, 288), &(&tr2 * &tr2));
        assert_eq!(det_half_sinhc(&w, &Scalar::one()).unwrap(), expect);
        let inv = a_hat_inv(&w).unwrap();
        assert_eq!(inv.grade_part(2), ExtElem::zero(gens));
        assert_eq!(inv.grade_part(4).coeff(IndexSet::full(4)), {
            let mut e = ExtElem::zero(gens);
            e.axpy(&Scalar::ratio(1, 48), &tr2);
            e.axpy(&Scalar::ratio(-1, 5760), &tr4);
            e.axpy(&Scalar::ratio(1, 4608), &(&tr2 * &tr2));
            e.coeff(IndexSet::full(4))
        });
        assert_eq!(&inv * &a_hat(&w).unwrap(), ExtElem::one(gens));
    }

    #[test]
    fn zero_curvature() {
        let w = SkewMat::zero(4, 2);
        assert_eq!(a_hat_inv(&w).unwrap(), ExtElem::one(2));
        assert_eq!(analytic_even(MatrixSeries::Exp, w.matrix()).unwrap(), EvenMatrix::identity(4, 2));
    }

    #[test]
    fn numeric_sinhc_matrix() {
        let th = 0.7;
        let w = SkewMat::from_upper(2, 0, &[ExtElem::scalar(0, Scalar::real(th))]).unwrap();
        let s = analytic_even(MatrixSeries::SinhOverX, w.matrix()).unwrap();
        assert!((s.get(0, 0).scalar_part().to_c64().re - th.sin() / th).abs() < 1e-14);
        assert!(s.get(0, 1).is_zero() || s.get(0, 1).max_abs() < 1e-15);
    }
}
