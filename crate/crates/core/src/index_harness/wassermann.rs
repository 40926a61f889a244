//! The Wassermann idempotent and the heat-kernel index class.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

use super::graded::GradedMatrix;
use super::linalg::{cmul, CMat, HermEig};

/// Self-adjointness tolerance for Dirac inputs, relative to `|D+|`.
pub const DIRAC_TOL: f64 = 1e-12;
const SERIES_BELOW: f64 = 1e-4;

/// `f_t(x) = exp(-t^2 x^2)` and its odd partner `g_t` with `f^2 + g^2 = f`.
#[derive(Clone, Copy, Debug)]
pub struct SchwartzPair {
    pub t: f64,
}

impl SchwartzPair {
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidConfig(format!("t = {t} must be positive")));
        }
        Ok(SchwartzPair { t })
    }

    pub fn f(&self, x: f64) -> f64 {
        (-(self.t * x).powi(2)).exp()
    }

    pub fn g(&self, x: f64) -> f64 {
        self.h(x * x) * x
    }

    /// `h(s) = exp(-t^2 s / 2) sqrt((1 - exp(-t^2 s)) / s)`, so that `g(x) = h(x^2) x`.
    pub fn h(&self, s: f64) -> f64 {
        let s = s.max(0.0);
        let u = self.t * self.t * s;
        // (1 - e^{-u}) / u, by series near the removable point
        let ratio = if u.sqrt() < SERIES_BELOW { 1.0 - u / 2.0 + u * u / 6.0 } else { -(-u).exp_m1() / u };
        (-u / 2.0).exp() * self.t * ratio.sqrt()
    }
}

/// Spectral data of `D-D+` and `D+D-`, reused across t.
#[derive(Clone, Debug)]
pub struct WassermannCalc {
    d: GradedMatrix,
    minus_plus: HermEig,
    plus_minus: HermEig,
}

impl WassermannCalc {
    pub fn new(d: &GradedMatrix) -> Result<Self> {
        d.check_dirac(DIRAC_TOL)?;
        let dp = d.d_plus();
        let dm = d.d_plus().adjoint();
        Ok(WassermannCalc { d: d.clone(), minus_plus: HermEig::new(&cmul(&dm, dp)), plus_minus: HermEig::new(&cmul(dp, &dm)) })
    }

    pub fn operator(&self) -> &GradedMatrix {
        &self.d
    }

    /// Largest eigenvalue of `D-D+`.
    pub fn spectral_top(&self) -> f64 {
        self.minus_plus.values.last().copied().unwrap_or(0.0).max(self.plus_minus.values.last().copied().unwrap_or(0.0))
    }

    /// `f_t(D) = diag(exp(-t^2 D-D+), exp(-t^2 D+D-))`.
    pub fn heat(&self, t: f64) -> Result<GradedMatrix> {
        SchwartzPair::new(t)?;
        let heat = |x: f64| (-(t * t) * x.max(0.0)).exp();
        let pp = self.minus_plus.apply(heat);
        let mm = self.plus_minus.apply(heat);
        let (p, m) = (pp.nrows(), mm.nrows());
        GradedMatrix::new(pp, CMat::zeros(p, m), CMat::zeros(m, p), mm)
    }

    /// `g_t(D)`, the odd part.
    pub fn odd(&self, t: f64) -> Result<GradedMatrix> {
        let s = SchwartzPair::new(t)?;
        let h_mp = self.minus_plus.apply(|x| s.h(x));
        let pm = cmul(&h_mp, &self.d.d_plus().adjoint());
        let mp = pm.adjoint();
        let (p, m) = (pm.nrows(), pm.ncols());
        GradedMatrix::new(CMat::zeros(p, p), pm, mp, CMat::zeros(m, m))
    }

    /// `Ind_t(D) = gamma f_t(D) + g_t(D)`; the lower-right block is `-exp(-t^2 D+D-)`.
    pub fn class(&self, t: f64) -> Result<GradedMatrix> {
        let f = self.heat(t)?;
        let g = self.odd(t)?;
        GradedMatrix::new(f.pp, g.pm, g.mp, f.mm.map(|z| -z))
    }

    /// `tr exp(-t^2 D-D+) - tr exp(-t^2 D+D-)`, computed as the plain trace of the class.
    pub fn str_index(&self, t: f64) -> Result<f64> {
        Ok(self.class(t)?.trace().re)
    }
}

pub fn wassermann_class(d: &GradedMatrix, t: f64) -> Result<GradedMatrix> {
    WassermannCalc::new(d)?.class(t)
}

pub fn str_index(d: &GradedMatrix, t: f64) -> Result<f64> {
    WassermannCalc::new(d)?.str_index(t)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct IdempotencyResidual {
    /// Frobenius norm of `p^2 - p`, an upper bound for the operator norm.
    pub idempotent: f64,
    pub self_adjoint: f64,
}

/// Residuals of `p = Ind_t(D) + diag(0, I)`.
pub fn idempotency_residual(class: &GradedMatrix) -> Result<IdempotencyResidual> {
    let p = class.add(&GradedMatrix::minus_projection(class.dims()))?;
    let p2 = p.mul(&p)?;
    Ok(IdempotencyResidual { idempotent: p2.sub(&p)?.frob(), self_adjoint: p.sub(&p.adjoint())?.frob() })
}

pub fn unit() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_harness::graded::Dims;
    use crate::index_harness::linalg::{frob, CMat};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pair_identity() {
        for t in [0.05, 0.3, 1.0, 2.0] {
            let s = SchwartzPair::new(t).unwrap();
            assert_eq!(s.f(0.0), 1.0);
            assert_eq!(s.g(0.0), 0.0);
            let mut x = -50.0;
            while x <= 50.0 {
                let (f, g) = (s.f(x), s.g(x));
                assert!((f * f + g * g - f).abs() < 1e-14, "t={t} x={x}");
                x += 0.0137;
            }
        }
        // continuity across the series switch
        let s = SchwartzPair::new(1.0).unwrap();
        let a = s.h(0.99999e-4f64.powi(2));
        let b = s.h(1.00001e-4f64.powi(2));
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn zero_operator() {
        let d = GradedMatrix::dirac(CMat::zeros(2, 3));
        let c = wassermann_class(&d, 0.7).unwrap();
        assert!(frob(&(c.pp.clone() - CMat::identity(3, 3))) < 1e-15);
        assert!(frob(&(c.mm.clone() + CMat::identity(2, 2))) < 1e-15);
        assert!(frob(&c.pm) == 0.0);
        assert!((str_index(&d, 0.3).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scalar_closed_form() {
        let x = 1.7;
        let t = 0.6;
        let d = GradedMatrix::dirac(CMat::from_element(1, 1, Complex64::new(x, 0.0)));
        let c = wassermann_class(&d, t).unwrap();
        let e = (-(t * x).powi(2)).exp();
        let h = (-(t * x).powi(2) / 2.0).exp() * (1.0 - e).sqrt();
        assert!((c.pp[(0, 0)].re - e).abs() < 1e-15);
        assert!((c.mm[(0, 0)].re + e).abs() < 1e-15);
        assert!((c.pm[(0, 0)].re - h).abs() < 1e-15 && (c.mp[(0, 0)].re - h).abs() < 1e-15);
    }

    #[test]
    fn random_idempotents() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let dims = Dims { plus: 11, minus: 9 };
            let dp = CMat::from_fn(dims.minus, dims.plus, |_, _| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
            let d = GradedMatrix::dirac(dp);
            let calc = WassermannCalc::new(&d).unwrap();
            for t in [0.05, 0.5, 2.0] {
                let r = idempotency_residual(&calc.class(t).unwrap()).unwrap();
                assert!(r.idempotent < 1e-10 && r.self_adjoint < 1e-12, "{r:?}");
                assert!((calc.str_index(t).unwrap() - 2.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn invertible_square_has_index_zero() {
        let dp = CMat::from_fn(4, 4, |i, j| Complex64::new(if i == j { 2.0 } else { 0.3 }, (i as f64) - (j as f64)));
        assert!(str_index(&GradedMatrix::dirac(dp), 0.4).unwrap().abs() < 1e-12);
    }

    #[test]
    fn rejects_non_self_adjoint() {
        let mut d = GradedMatrix::dirac(CMat::from_element(1, 1, unit()));
        d.pp[(0, 0)] = unit();
        assert!(wassermann_class(&d, 1.0).is_err());
    }
}
