//! Forms on the total space of a rank-n vector bundle over a point-like base.
//!
//! A term is `x^a f^(d)(r^2) r^(-2q) dx^S beta` times the form's overall
//! weight, with `beta` a base form.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::algebra_core::{ExtElem, IndexSet, Rational, Scalar};
use crate::error::{Error, Result};
use crate::quadrature::adaptive;

use super::profile::RadialProfile;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weight {
    /// No weight: polynomial coefficients only.
    Polynomial,
    /// Overall factor exp(-|x|^2).
    Gaussian,
    /// Terms may carry derivatives of a compactly supported radial profile.
    Profile,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiberMono {
    pub x: Vec<u16>,
    pub dx: IndexSet,
    pub f_deriv: u8,
    pub r_inv: u16,
}

impl FiberMono {
    pub fn plain(n: usize, dx: IndexSet) -> Self {
        FiberMono { x: vec![0; n], dx, f_deriv: 0, r_inv: 0 }
    }

    pub fn degree(&self) -> usize {
        self.x.iter().map(|&a| a as usize).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiberForm {
    n: usize,
    base_gens: usize,
    pub weight: Weight,
    /// Overall factor pi^pi_power, kept symbolic so Gaussian integrals stay exact.
    pub pi_power: i32,
    terms: BTreeMap<FiberMono, ExtElem>,
}

/// Result of integrating over the fiber: `value * pi^pi_power`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberIntegral {
    pub value: ExtElem,
    pub pi_power: i32,
}

impl FiberIntegral {
    /// The integral as a base form, exact when no power of pi remains.
    pub fn to_ext(&self) -> ExtElem {
        if self.pi_power == 0 {
            self.value.clone()
        } else {
            self.value.scale(&Scalar::real(std::f64::consts::PI.powi(self.pi_power)))
        }
    }
}

impl FiberForm {
    pub fn zero(n: usize, base_gens: usize, weight: Weight) -> Self {
        FiberForm { n, base_gens, weight, pi_power: 0, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, beta: ExtElem) -> Self {
        let mut f = FiberForm::zero(n, beta.gens(), Weight::Polynomial);
        f.add_term(FiberMono::plain(n, IndexSet::EMPTY), beta);
        f
    }

    /// `dx_i` with i 1-based.
    pub fn dx(n: usize, base_gens: usize, i: usize) -> Self {
        let mut f = FiberForm::zero(n, base_gens, Weight::Polynomial);
        f.add_term(FiberMono::plain(n, IndexSet::single(i)), ExtElem::one(base_gens));
        f
    }

    /// `x_i beta`.
    pub fn coord(n: usize, i: usize, beta: ExtElem) -> Self {
        let mut m = FiberMono::plain(n, IndexSet::EMPTY);
        m.x[i - 1] = 1;
        let mut f = FiberForm::zero(n, beta.gens(), Weight::Polynomial);
        f.add_term(m, beta);
        f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base_gens(&self) -> usize {
        self.base_gens
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FiberMono, &ExtElem)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: FiberMono, beta: ExtElem) {
        debug_assert_eq!(m.x.len(), self.n);
        if beta.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                v.add_assign(&beta);
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, beta);
            }
        }
    }

    pub fn with_weight(mut self, w: Weight) -> Self {
        self.weight = w;
        self
    }

    pub fn with_pi_power(mut self, p: i32) -> Self {
        self.pi_power = p;
        self
    }

    pub fn scale(&self, s: &Scalar) -> FiberForm {
        let mut out = FiberForm { terms: BTreeMap::new(), ..self.clone() };
        for (m, b) in &self.terms {
            out.add_term(m.clone(), b.scale(s));
        }
        out
    }

    /// Multiply every coefficient on the right by an even base form.
    pub fn mul_base_even(&self, beta: &ExtElem) -> Result<FiberForm> {
        if !beta.is_even() {
            return Err(Error::NotEven);
        }
        let mut out = FiberForm { terms: BTreeMap::new(), ..self.clone() };
        for (m, b) in &self.terms {
            out.add_term(m.clone(), b.wedge(beta)?);
        }
        Ok(out)
    }

    fn compatible(&self, o: &FiberForm) -> Result<()> {
        if self.n != o.n {
            return Err(Error::Shape(format!("fiber ranks {} and {}", self.n, o.n)));
        }
        if self.base_gens != o.base_gens {
            return Err(Error::AlgebraMismatch(self.base_gens, o.base_gens));
        }
        Ok(())
    }

    pub fn add(&self, o: &FiberForm) -> Result<FiberForm> {
        self.compatible(o)?;
        if self.is_zero() {
            return Ok(o.clone());
        }
        if o.is_zero() {
            return Ok(self.clone());
        }
        if self.weight != o.weight || self.pi_power != o.pi_power {
            return Err(Error::InvalidConfig("sum of forms with different weights".into()));
        }
        let mut out = self.clone();
        for (m, b) in &o.terms {
            out.add_term(m.clone(), b.clone());
        }
        Ok(out)
    }

    /// Wedge product; at most one factor may carry a non-polynomial weight.
    pub fn mul(&self, o: &FiberForm) -> Result<FiberForm> {
        self.compatible(o)?;
        let weight = match (self.weight, o.weight) {
            (Weight::Polynomial, w) | (w, Weight::Polynomial) => w,
            _ => return Err(Error::InvalidConfig("product of two weighted fiber forms".into())),
        };
        let mut out = FiberForm::zero(self.n, self.base_gens, weight).with_pi_power(self.pi_power + o.pi_power);
        for (m1, b1) in &self.terms {
            for (m2, b2) in &o.terms {
                let s = m1.dx.merge_sign(m2.dx);
                if s == 0 {
                    continue;
                }
                // moving beta_1 past dx^T
                let b1 = if m2.dx.len() % 2 == 1 { b1.parity_flip() } else { b1.clone() };
                let coeff = b1.wedge(b2)?;
                let m = FiberMono {
                    x: m1.x.iter().zip(&m2.x).map(|(a, b)| a + b).collect(),
                    dx: m1.dx.union(m2.dx),
                    f_deriv: m1.f_deriv.max(m2.f_deriv),
                    r_inv: m1.r_inv + m2.r_inv,
                };
                out.add_term(m, if s < 0 { -&coeff } else { coeff });
            }
        }
        Ok(out)
    }

    /// Total exterior derivative; `base_d` is the differential on base forms.
    pub fn total_d(&self, base_d: &dyn Fn(&ExtElem) -> Result<ExtElem>) -> Result<FiberForm> {
        let n = self.n;
        let mut out = FiberForm { terms: BTreeMap::new(), ..self.clone() };
        for (m, b) in &self.terms {
            for i in 1..=n {
                let s = IndexSet::single(i).merge_sign(m.dx);
                if s == 0 {
                    continue;
                }
                let dx = m.dx.union(IndexSet::single(i));
                let b = if s < 0 { -b } else { b.clone() };
                // d/dx_i x^a
                if m.x[i - 1] > 0 {
                    let mut mm = m.clone();
                    mm.x[i - 1] -= 1;
                    mm.dx = dx;
                    out.add_term(mm, b.scale(&Scalar::int(m.x[i - 1] as i64)));
                }
                let mut up = m.clone();
                up.x[i - 1] += 1;
                up.dx = dx;
                if self.weight == Weight::Gaussian {
                    out.add_term(up.clone(), b.scale(&Scalar::int(-2)));
                }
                if self.weight == Weight::Profile {
                    let mut mf = up.clone();
                    mf.f_deriv += 1;
                    out.add_term(mf, b.scale(&Scalar::int(2)));
                }
                if m.r_inv > 0 {
                    let mut mr = up.clone();
                    mr.r_inv += 1;
                    out.add_term(mr, b.scale(&Scalar::int(-2 * m.r_inv as i64)));
                }
            }
            let db = base_d(b)?;
            if !db.is_zero() {
                let db = if m.dx.len() % 2 == 1 { -&db } else { db };
                out.add_term(m.clone(), db);
            }
        }
        Ok(out)
    }

    /// The component of top fiber degree.
    pub fn top(&self) -> FiberForm {
        let full = IndexSet::full(self.n);
        FiberForm {
            terms: self.terms.iter().filter(|(m, _)| m.dx == full).map(|(m, b)| (m.clone(), b.clone())).collect(),
            ..self.clone()
        }
    }

    /// The component of fiber degree k.
    pub fn fiber_degree(&self, k: usize) -> FiberForm {
        FiberForm {
            terms: self.terms.iter().filter(|(m, _)| m.dx.len() == k).map(|(m, b)| (m.clone(), b.clone())).collect(),
            ..self.clone()
        }
    }

    /// Evaluate the coefficient functions at a point; result lives on
    /// `n + base_gens` generators with dx first.
    pub fn eval(&self, x: &[f64], profile: &RadialProfile) -> Result<ExtElem> {
        if x.len() != self.n {
            return Err(Error::Shape(format!("{} coordinates for rank {}", x.len(), self.n)));
        }
        let gens = self.n + self.base_gens;
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let w = match self.weight {
            Weight::Gaussian => (-r2).exp(),
            _ => 1.0,
        } * std::f64::consts::PI.powi(self.pi_power);
        let mut out = ExtElem::zero(gens);
        for (m, b) in &self.terms {
            let mut v = w;
            for (xi, a) in x.iter().zip(&m.x) {
                v *= xi.powi(*a as i32);
            }
            if self.weight == Weight::Profile {
                v *= profile.deriv(r2, m.f_deriv as usize)?;
                if v == 0.0 {
                    continue;
                }
            }
            if m.r_inv > 0 {
                v /= r2.powi(m.r_inv as i32);
            }
            let dx = ExtElem::monomial(gens, m.dx, Scalar::real(v));
            out.add_assign(&(&dx * &b.shifted(self.n, gens)));
        }
        Ok(out)
    }
}

/// (a-1)!! / 2^(a/2) for even a: the Gaussian moment of x^a divided by sqrt(pi).
pub fn half_gauss_moment(a: u32) -> Option<Rational> {
    if a % 2 == 1 {
        return None;
    }
    let mut num = BigInt::one();
    let mut k = a as i64 - 1;
    while k > 1 {
        num *= k;
        k -= 2;
    }
    Some(Rational::new(num, BigInt::from(2).pow(a / 2)))
}

fn factorial(k: u32) -> Rational {
    Rational::from_integer((1..=k as i64).fold(BigInt::one(), |a, b| a * b))
}

/// Integral of the top fiber component over R^n.
pub fn fiber_integral(u: &FiberForm, profile: &RadialProfile) -> Result<FiberIntegral> {
    let n = u.n;
    let top = u.top();
    let mut value = ExtElem::zero(u.base_gens);
    for (m, b) in top.terms() {
        if m.x.iter().any(|a| a % 2 == 1) {
            continue;
        }
        // pi^{n/2} prod (a_i - 1)!! / 2^{a_i/2}
        let mut moment = Rational::one();
        for &a in &m.x {
            moment *= half_gauss_moment(a as u32).expect("even");
        }
        match u.weight {
            Weight::Polynomial => {
                return Err(Error::InvalidConfig("top component has no decaying weight".into()));
            }
            Weight::Gaussian => {
                if m.r_inv > 0 || m.f_deriv > 0 {
                    return Err(Error::InvalidConfig("Gaussian term with a radial factor".into()));
                }
                value.add_assign(&b.scale(&Scalar::from_rational(moment)));
            }
            Weight::Profile => {
                // sphere moment 2 pi^{n/2} prod(...) / Gamma((|a|+n)/2), radial part numeric
                let deg = m.degree() as i64;
                let half = (deg + n as i64) / 2;
                let sphere = crate::algebra_core::rat_to_f64(&(moment * Rational::from_integer(BigInt::from(2)) / factorial(half as u32 - 1)));
                let p = half - m.r_inv as i64 - 1;
                let radial = profile.radial_moment(m.f_deriv as usize, p)?;
                value.add_assign(&b.scale(&Scalar::real(sphere * radial)));
            }
        }
    }
    Ok(FiberIntegral { value, pi_power: u.pi_power + n as i32 / 2 })
}

/// 1/2 * int_0^inf f^(d)(u) u^p du for a compact profile.
pub(crate) fn radial_moment_numeric(f: impl Fn(f64) -> f64, lo: f64, hi: f64, p: i64) -> Result<f64> {
    if p < 0 && lo == 0.0 {
        return Err(Error::InvalidConfig("radial integrand is singular at the origin".into()));
    }
    let v = adaptive(|u| f(u) * u.powi(p as i32), lo, hi, 1e-13)?;
    Ok(0.5 * v)
}
