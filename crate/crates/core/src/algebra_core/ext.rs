//! Sparse exterior algebra over N odd generators.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::index_set::{IndexSet, MAX_GENERATORS};
use super::scalar::Scalar;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ExtElem {
    gens: usize,
    terms: BTreeMap<IndexSet, Scalar>,
}

/// Sign of `J^A J^B` relative to `J^{1..n}`. Zero unless A, B partition {1..n}.
pub fn eps(a: IndexSet, b: IndexSet, n: usize) -> i32 {
    if !a.is_disjoint(b) || a.union(b) != IndexSet::full(n) {
        return 0;
    }
    a.merge_sign(b)
}

impl ExtElem {
    pub fn zero(gens: usize) -> Self {
        assert!(gens <= MAX_GENERATORS, "at most {MAX_GENERATORS} generators");
        ExtElem { gens, terms: BTreeMap::new() }
    }

    pub fn scalar(gens: usize, s: Scalar) -> Self {
        let mut e = ExtElem::zero(gens);
        e.add_term(IndexSet::EMPTY, s);
        e
    }

    pub fn one(gens: usize) -> Self {
        ExtElem::scalar(gens, Scalar::one())
    }

    /// The generator `J_i`, 1-based.
    pub fn gen(gens: usize, i: usize) -> Result<Self> {
        if i == 0 || i > gens {
            return Err(Error::GeneratorOutOfRange { index: i, gens });
        }
        Ok(ExtElem::monomial(gens, IndexSet::single(i), Scalar::one()))
    }

    pub fn monomial(gens: usize, set: IndexSet, coeff: Scalar) -> Self {
        debug_assert!(set.max_index() <= gens);
        let mut e = ExtElem::zero(gens);
        e.add_term(set, coeff);
        e
    }

    pub fn gens(&self) -> usize {
        self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&IndexSet, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, set: IndexSet) -> Scalar {
        self.terms.get(&set).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn scalar_part(&self) -> Scalar {
        self.coeff(IndexSet::EMPTY)
    }

    /// Add `c * J^set` in place, pruning zeros.
    pub fn add_term(&mut self, set: IndexSet, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(set) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn sub_term(&mut self, set: IndexSet, c: &Scalar) {
        self.add_term(set, -c);
    }

    pub fn is_exact(&self) -> bool {
        self.terms.values().all(Scalar::is_exact)
    }

    pub fn to_float(&self) -> ExtElem {
        ExtElem {
            gens: self.gens,
            terms: self.terms.iter().map(|(k, v)| (*k, v.to_float())).collect(),
        }
    }

    pub fn check_same(&self, other: &ExtElem) -> Result<()> {
        if self.gens != other.gens {
            Err(Error::AlgebraMismatch(self.gens, other.gens))
        } else {
            Ok(())
        }
    }

    /// Re-embed into an algebra with more generators (indices unchanged).
    pub fn widen(&self, gens: usize) -> ExtElem {
        assert!(gens >= self.gens);
        ExtElem { gens, terms: self.terms.clone() }
    }

    /// Shift every generator index up by `offset` into an algebra of `gens` generators.
    pub fn shifted(&self, offset: usize, gens: usize) -> ExtElem {
        let mut out = ExtElem::zero(gens);
        for (k, v) in &self.terms {
            out.terms.insert(IndexSet(k.0 << offset), v.clone());
        }
        debug_assert!(out.terms.keys().all(|k| k.max_index() <= gens));
        out
    }

    pub fn scale(&self, s: &Scalar) -> ExtElem {
        let mut out = ExtElem::zero(self.gens);
        if s.is_zero() {
            return out;
        }
        for (k, v) in &self.terms {
            let c = v * s;
            if !c.is_zero() {
                out.terms.insert(*k, c);
            }
        }
        out
    }

    pub fn try_add(&self, other: &ExtElem) -> Result<ExtElem> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(*k, v.clone());
        }
        Ok(out)
    }

    pub fn add_assign(&mut self, other: &ExtElem) {
        assert_eq!(self.gens, other.gens, "algebra mismatch");
        for (k, v) in &other.terms {
            self.add_term(*k, v.clone());
        }
    }

    pub fn sub_assign(&mut self, other: &ExtElem) {
        assert_eq!(self.gens, other.gens, "algebra mismatch");
        for (k, v) in &other.terms {
            self.sub_term(*k, v);
        }
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: &Scalar, other: &ExtElem) {
        assert_eq!(self.gens, other.gens, "algebra mismatch");
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.terms {
            self.add_term(*k, v * c);
        }
    }

    /// Graded-commutative product.
    pub fn wedge(&self, other: &ExtElem) -> Result<ExtElem> {
        self.check_same(other)?;
        Ok(self.wedge_unchecked(other))
    }

    pub(crate) fn wedge_unchecked(&self, other: &ExtElem) -> ExtElem {
        let mut out = ExtElem::zero(self.gens);
        for (ka, va) in &self.terms {
            for (kb, vb) in &other.terms {
                if !ka.is_disjoint(*kb) {
                    continue;
                }
                let mut c = va * vb;
                if ka.merge_parity(*kb) == 1 {
                    c = -c;
                }
                out.add_term(ka.union(*kb), c);
            }
        }
        out
    }

    pub fn grade_part(&self, k: usize) -> ExtElem {
        ExtElem {
            gens: self.gens,
            terms: self.terms.iter().filter(|(s, _)| s.len() == k).map(|(s, v)| (*s, v.clone())).collect(),
        }
    }

    pub fn even_part(&self) -> ExtElem {
        self.filter(|s| s.len() % 2 == 0)
    }

    pub fn odd_part(&self) -> ExtElem {
        self.filter(|s| s.len() % 2 == 1)
    }

    pub fn filter(&self, keep: impl Fn(IndexSet) -> bool) -> ExtElem {
        ExtElem {
            gens: self.gens,
            terms: self.terms.iter().filter(|(s, _)| keep(**s)).map(|(s, v)| (*s, v.clone())).collect(),
        }
    }

    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|s| s.len() % 2 == 0)
    }

    pub fn is_odd(&self) -> bool {
        self.terms.keys().all(|s| s.len() % 2 == 1)
    }

    /// Parity if homogeneous: Some(0) even, Some(1) odd. Zero counts as even.
    pub fn parity(&self) -> Option<usize> {
        if self.is_even() {
            Some(0)
        } else if self.is_odd() {
            Some(1)
        } else {
            None
        }
    }

    /// Smallest positive grade present, if any.
    pub fn min_positive_grade(&self) -> Option<usize> {
        self.terms.keys().map(|s| s.len()).filter(|&g| g > 0).min()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(Scalar::abs).fold(0.0, f64::max)
    }

    /// Exponential of an even element. Exact when the scalar part is exactly zero.
    pub fn exp_even(&self) -> Result<ExtElem> {
        if !self.is_even() {
            return Err(Error::NotEven);
        }
        let s = self.scalar_part();
        let nil = self.filter(|k| !k.is_empty());
        let mut sum = ExtElem::one(self.gens);
        let mut term = ExtElem::one(self.gens);
        let mut k = 1i64;
        loop {
            term = term.wedge_unchecked(&nil).scale(&Scalar::ratio(1, k));
            if term.is_zero() {
                break;
            }
            sum.add_assign(&term);
            k += 1;
        }
        if s.is_zero() {
            Ok(sum)
        } else {
            Ok(sum.scale(&s.exp()))
        }
    }

    /// Coefficient of `J^{1..n}`.
    pub fn berezin_top(&self, n: usize) -> Scalar {
        self.coeff(IndexSet::full(n))
    }

    /// Parity automorphism: negate odd-grade terms.
    pub fn parity_flip(&self) -> ExtElem {
        let mut out = self.clone();
        for (k, v) in out.terms.iter_mut() {
            if k.len() % 2 == 1 {
                *v = -v.clone();
            }
        }
        out
    }

    /// Distance in the max-coefficient norm.
    pub fn dist(&self, other: &ExtElem) -> f64 {
        let mut d = self.clone();
        d.sub_assign(other);
        d.max_abs()
    }

    /// Drop float terms below `tol` in modulus.
    pub fn chop(&self, tol: f64) -> ExtElem {
        ExtElem {
            gens: self.gens,
            terms: self
                .terms
                .iter()
                .filter(|(_, v)| v.is_exact() || v.abs() > tol)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    pub fn to_json(&self) -> ExtElemJson {
        ExtElemJson {
            gens: Some(self.gens),
            terms: self
                .terms
                .iter()
                .map(|(k, v)| TermJson { indices: k.indices(), re: v.re_string(), im: v.im_string() })
                .collect(),
        }
    }

    pub fn from_json(j: &ExtElemJson, gens: Option<usize>) -> Result<ExtElem> {
        let max_idx = j.terms.iter().flat_map(|t| t.indices.iter().copied()).max().unwrap_or(0);
        let gens = gens.or(j.gens).unwrap_or(max_idx);
        if gens > MAX_GENERATORS {
            return Err(Error::TooManyGenerators(gens));
        }
        if max_idx > gens {
            return Err(Error::GeneratorOutOfRange { index: max_idx, gens });
        }
        let mut out = ExtElem::zero(gens);
        for t in &j.terms {
            // unsorted input carries the sign of its sorting permutation
            let mut sorted = t.indices.clone();
            let mut sign = 1;
            for i in 0..sorted.len() {
                for k in 0..sorted.len().saturating_sub(1 + i) {
                    if sorted[k] > sorted[k + 1] {
                        sorted.swap(k, k + 1);
                        sign = -sign;
                    }
                }
            }
            let set = IndexSet::from_indices(&sorted)?;
            let c = Scalar::parse_parts(&t.re, &t.im)?;
            out.add_term(set, if sign < 0 { -c } else { c });
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub indices: Vec<usize>,
    pub re: String,
    pub im: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ExtElemJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gens: Option<usize>,
    pub terms: Vec<TermJson>,
}

impl fmt::Display for ExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, v)| if k.is_empty() { format!("{v}") } else { format!("{v}*{k}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add<&ExtElem> for &ExtElem {
    type Output = ExtElem;
    fn add(self, rhs: &ExtElem) -> ExtElem {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl Sub<&ExtElem> for &ExtElem {
    type Output = ExtElem;
    fn sub(self, rhs: &ExtElem) -> ExtElem {
        let mut out = self.clone();
        out.sub_assign(rhs);
        out
    }
}

impl Mul<&ExtElem> for &ExtElem {
    type Output = ExtElem;
    fn mul(self, rhs: &ExtElem) -> ExtElem {
        assert_eq!(self.gens, rhs.gens, "algebra mismatch");
        self.wedge_unchecked(rhs)
    }
}

impl Neg for &ExtElem {
    type Output = ExtElem;
    fn neg(self) -> ExtElem {
        self.scale(&Scalar::int(-1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j(n: usize, idx: &[usize]) -> ExtElem {
        ExtElem::monomial(n, IndexSet::from_indices(idx).unwrap(), Scalar::one())
    }

    #[test]
    fn generator_products() {
        let a = ExtElem::gen(2, 1).unwrap();
        let b = ExtElem::gen(2, 2).unwrap();
        assert_eq!(&a * &b, j(2, &[1, 2]));
        assert_eq!(&b * &a, -&j(2, &[1, 2]));
        assert!((&a * &a).is_zero());
    }

    #[test]
    fn sum_of_disjoint_planes() {
        let one = ExtElem::one(4);
        let x = &one + &j(4, &[1, 2]);
        let y = &one + &j(4, &[3, 4]);
        let mut expect = &(&one + &j(4, &[1, 2])) + &j(4, &[3, 4]);
        expect.add_assign(&j(4, &[1, 2, 3, 4]));
        assert_eq!(&x * &y, expect);
    }

    #[test]
    fn eps_examples() {
        let s = |v: &[usize]| IndexSet::from_indices(v).unwrap();
        assert_eq!(eps(s(&[1]), s(&[2]), 2), 1);
        assert_eq!(eps(s(&[1]), s(&[1, 2]), 2), 0);
        assert_eq!(eps(s(&[2]), s(&[1]), 2), -1);
        assert_eq!(eps(s(&[1]), s(&[3]), 4), 0);
    }

    #[test]
    fn exp_two_planes() {
        let th = Scalar::ratio(3, 7);
        let ph = Scalar::ratio(-2, 5);
        let mut a = j(4, &[1, 2]).scale(&th);
        a.add_assign(&j(4, &[3, 4]).scale(&ph));
        let e = a.exp_even().unwrap();
        let mut expect = ExtElem::one(4);
        expect.add_assign(&a);
        expect.add_assign(&j(4, &[1, 2, 3, 4]).scale(&(&th * &ph)));
        assert_eq!(e, expect);
        assert_eq!(e.berezin_top(4), &th * &ph);
        assert_eq!(j(2, &[1, 2]).exp_even().unwrap(), &ExtElem::one(2) + &j(2, &[1, 2]));
        assert_eq!(ExtElem::zero(3).exp_even().unwrap(), ExtElem::one(3));
    }

    #[test]
    fn exp_rejects_odd() {
        assert_eq!(j(3, &[1]).exp_even(), Err(Error::NotEven));
    }

    #[test]
    fn berezin_examples() {
        assert_eq!(j(2, &[1, 2]).berezin_top(2), Scalar::one());
        assert_eq!(ExtElem::one(2).berezin_top(2), Scalar::zero());
    }

    #[test]
    fn mismatch_is_an_error() {
        assert!(ExtElem::one(2).wedge(&ExtElem::one(3)).is_err());
        assert!(ExtElem::gen(2, 3).is_err());
    }

    #[test]
    fn json_round_trip_and_unsorted_input() {
        let mut a = j(3, &[1, 3]).scale(&Scalar::ratio(-1, 2));
        a.add_assign(&ExtElem::scalar(3, Scalar::i()));
        let back = ExtElem::from_json(&a.to_json(), None).unwrap();
        assert_eq!(a, back);
        let raw: ExtElemJson =
            serde_json::from_str(r#"{"terms":[{"indices":[2,1],"re":"1","im":"0"}]}"#).unwrap();
        assert_eq!(ExtElem::from_json(&raw, Some(2)).unwrap(), -&j(2, &[1, 2]));
    }
}
