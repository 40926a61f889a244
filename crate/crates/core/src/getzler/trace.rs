//! Gaussian xi-integration and the symbol trace density.

use std::collections::BTreeMap;

use num_traits::One;
use serde::Serialize;

use crate::algebra_core::{ExtElem, IndexSet, Rational, Scalar};
use crate::clifford::top_supertrace;
use crate::error::{Error, Result};
use crate::mathai_quillen::fiber::half_gauss_moment;

use super::symbol::Symbol;

/// `value * pi^(sqrt_pi_power / 2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct XiIntegral {
    pub value: ExtElem,
    pub sqrt_pi_power: i32,
}

impl XiIntegral {
    pub fn to_ext(&self) -> ExtElem {
        if self.sqrt_pi_power == 0 {
            self.value.clone()
        } else {
            self.value.scale(&Scalar::real(std::f64::consts::PI.sqrt().powi(self.sqrt_pi_power)))
        }
    }
}

/// `int p(xi) exp(-|xi|^2) dxi` over R^n by exact moments.
pub fn gaussian_xi_integral(p: &Symbol) -> Result<XiIntegral> {
    if !p.gaussian {
        return Err(Error::InvalidConfig("symbol has no Gaussian weight".into()));
    }
    let mut value = ExtElem::zero(p.gens());
    for (e, c) in p.terms() {
        let mut m = Rational::one();
        let mut odd = false;
        for &a in e {
            match half_gauss_moment(a as u32) {
                Some(v) => m *= v,
                None => odd = true,
            }
        }
        if !odd {
            value.add_assign(&c.scale(&Scalar::from_rational(m)));
        }
    }
    Ok(XiIntegral { value, sqrt_pi_power: p.n() as i32 })
}

/// Symbol with a graded coefficient structure.
#[derive(Clone, Debug)]
pub enum GradedSymbol {
    /// Diagonal blocks of a (plus | minus) graded bundle.
    Blocks { plus: usize, diag: Vec<Symbol> },
    /// Clifford-valued symbol: coefficient symbol of each monomial g_I.
    Clifford { n: usize, parts: BTreeMap<IndexSet, Symbol> },
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityValue {
    pub re: f64,
    pub im: f64,
}

/// `(2 pi)^{-n} int Str(p(x, xi)) dxi`, returned as a base form.
pub fn trace_density(p: &GradedSymbol, n: usize) -> Result<XiIntegral> {
    let (gens, str_int) = match p {
        GradedSymbol::Blocks { plus, diag } => {
            let first = diag.first().ok_or_else(|| Error::Shape("empty block list".into()))?;
            let mut acc = ExtElem::zero(first.gens());
            for (i, s) in diag.iter().enumerate() {
                if s.n() != n {
                    return Err(Error::Shape(format!("symbol in {} variables, dimension {n}", s.n())));
                }
                let v = gaussian_xi_integral(s)?.value;
                if i < *plus {
                    acc.add_assign(&v);
                } else {
                    acc.sub_assign(&v);
                }
            }
            (first.gens(), acc)
        }
        GradedSymbol::Clifford { n: cn, parts } => {
            let top = IndexSet::full(*cn);
            let gens = parts.values().next().map(|s| s.gens()).unwrap_or(0);
            match parts.get(&top) {
                None => (gens, ExtElem::zero(gens)),
                Some(s) => {
                    if s.n() != n {
                        return Err(Error::Shape(format!("symbol in {} variables, dimension {n}", s.n())));
                    }
                    (gens, gaussian_xi_integral(s)?.value.scale(&top_supertrace(*cn)))
                }
            }
        }
    };
    let _ = gens;
    let two_n = Scalar::ratio(1, 1i64 << n);
    Ok(XiIntegral { value: str_int.scale(&two_n), sqrt_pi_power: n as i32 - 2 * n as i32 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra_core::rat;

    #[test]
    fn moments() {
        let one = Symbol::scalar(2, 0, Scalar::one()).with_gaussian(true);
        let r = gaussian_xi_integral(&one).unwrap();
        assert_eq!((r.value, r.sqrt_pi_power), (ExtElem::one(0), 2));
        let x1sq = Symbol::monomial(vec![2, 0], ExtElem::one(0)).with_gaussian(true);
        assert_eq!(gaussian_xi_integral(&x1sq).unwrap().value, ExtElem::scalar(0, Scalar::ratio(1, 2)));
        let x1 = Symbol::xi(2, 0, 1).with_gaussian(true);
        assert!(gaussian_xi_integral(&x1).unwrap().value.is_zero());
        assert!(gaussian_xi_integral(&Symbol::xi(2, 0, 1)).is_err());
    }

    #[test]
    fn densities() {
        let f = Scalar::ratio(3, 7);
        let s = Symbol::scalar(2, 0, f.clone()).with_gaussian(true);
        let bal = GradedSymbol::Blocks { plus: 1, diag: vec![s.clone(), s.clone()] };
        assert!(trace_density(&bal, 2).unwrap().value.is_zero());
        let one = GradedSymbol::Blocks { plus: 1, diag: vec![s.clone()] };
        let d = trace_density(&one, 2).unwrap();
        // f (2 pi)^{-2} pi
        assert_eq!(d.value, ExtElem::scalar(0, &f * &Scalar::ratio(1, 4)));
        assert_eq!(d.sqrt_pi_power, -2);
        let mut parts = BTreeMap::new();
        parts.insert(IndexSet::full(2), s);
        let cl = trace_density(&GradedSymbol::Clifford { n: 2, parts }, 2).unwrap();
        assert_eq!(cl.value, ExtElem::scalar(0, &(&f * &Scalar::ratio(1, 4)) * &Scalar::gauss(rat(0, 1), rat(2, 1))));
    }
}
