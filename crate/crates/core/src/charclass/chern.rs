//! Graded curvatures, their Chern character, and equivariant curvature data.

use std::collections::BTreeMap;

use super::matrix::{EvenMatrix, SkewMat};
use super::series::{analytic_even, MatrixSeries};
use crate::algebra_core::{ExtElem, Scalar};
use crate::error::{Error, Result};

/// Even-form endomorphism of a Z2-graded space of rank (r+ | r-).
#[derive(Clone, Debug, PartialEq)]
pub struct EndForm {
    pub plus: usize,
    pub minus: usize,
    pub m: EvenMatrix,
}

impl EndForm {
    pub fn new(plus: usize, minus: usize, m: EvenMatrix) -> Result<Self> {
        if m.n() != plus + minus {
            return Err(Error::Shape(format!("{}x{} matrix for rank ({plus}|{minus})", m.n(), m.n())));
        }
        Ok(EndForm { plus, minus, m })
    }

    pub fn zero(plus: usize, minus: usize, gens: usize) -> Self {
        EndForm { plus, minus, m: EvenMatrix::zero(plus + minus, gens) }
    }

    /// Block-diagonal form from its ++ and -- blocks.
    pub fn diag(pp: &EvenMatrix, mm: &EvenMatrix) -> Result<Self> {
        if pp.gens() != mm.gens() {
            return Err(Error::AlgebraMismatch(pp.gens(), mm.gens()));
        }
        let (a, b) = (pp.n(), mm.n());
        let mut m = EvenMatrix::zero(a + b, pp.gens());
        for i in 0..a {
            for j in 0..a {
                m.set(i, j, pp.get(i, j).clone());
            }
        }
        for i in 0..b {
            for j in 0..b {
                m.set(a + i, a + j, mm.get(i, j).clone());
            }
        }
        Ok(EndForm { plus: a, minus: b, m })
    }

    pub fn gens(&self) -> usize {
        self.m.gens()
    }

    pub fn supertrace(&self, m: &EvenMatrix) -> ExtElem {
        let mut t = ExtElem::zero(m.gens());
        for i in 0..self.plus {
            t.add_assign(m.get(i, i));
        }
        for i in self.plus..self.plus + self.minus {
            t.sub_assign(m.get(i, i));
        }
        t
    }

    /// Direct sum, keeping even summands ahead of odd ones.
    pub fn direct_sum(&self, o: &EndForm) -> Result<EndForm> {
        let order: Vec<(usize, usize)> = (0..self.plus)
            .map(|i| (0, i))
            .chain((0..o.plus).map(|i| (1, i)))
            .chain((self.plus..self.plus + self.minus).map(|i| (0, i)))
            .chain((o.plus..o.plus + o.minus).map(|i| (1, i)))
            .collect();
        let gens = self.gens();
        let m = EvenMatrix::from_fn(order.len(), gens, |r, c| {
            let (a, i) = order[r];
            let (b, j) = order[c];
            if a != b {
                ExtElem::zero(gens)
            } else if a == 0 {
                self.m.get(i, j).clone()
            } else {
                o.m.get(i, j).clone()
            }
        })?;
        EndForm::new(self.plus + o.plus, self.minus + o.minus, m)
    }

    /// Kronecker sum `Q1 (x) 1 + 1 (x) Q2` on the graded tensor product.
    pub fn tensor_sum(&self, o: &EndForm) -> Result<EndForm> {
        let (n1, n2) = (self.plus + self.minus, o.plus + o.minus);
        let parity = |i: usize, p: usize| usize::from(i >= p);
        let mut basis: Vec<(usize, usize)> = Vec::new();
        for want in 0..2 {
            for i in 0..n1 {
                for j in 0..n2 {
                    if (parity(i, self.plus) + parity(j, o.plus)) % 2 == want {
                        basis.push((i, j));
                    }
                }
            }
        }
        let plus = basis.iter().filter(|&&(i, j)| (parity(i, self.plus) + parity(j, o.plus)) % 2 == 0).count();
        let gens = self.gens();
        let m = EvenMatrix::from_fn(basis.len(), gens, |r, c| {
            let (i, j) = basis[r];
            let (k, l) = basis[c];
            let mut e = ExtElem::zero(gens);
            if j == l {
                e.add_assign(self.m.get(i, k));
            }
            if i == k {
                e.add_assign(o.m.get(j, l));
            }
            e
        })?;
        EndForm::new(plus, basis.len() - plus, m)
    }
}

/// Str(exp Q).
pub fn chern_character(q: &EndForm) -> Result<ExtElem> {
    let e = analytic_even(MatrixSeries::Exp, &q.m)?;
    Ok(q.supertrace(&e))
}

/// Curvature plus moment data; sample points are named tokens.
#[derive(Clone, Debug)]
pub struct EquivCurvatureData {
    pub omega: SkewMat,
    moments: BTreeMap<String, SkewMat>,
}

impl EquivCurvatureData {
    pub fn new(omega: SkewMat) -> Self {
        let mut moments = BTreeMap::new();
        moments.insert("0".to_string(), SkewMat::zero(omega.n(), omega.gens()));
        EquivCurvatureData { omega, moments }
    }

    /// Register a moment; entries must be grade 0.
    pub fn with_moment(mut self, token: &str, mu: SkewMat) -> Result<Self> {
        if mu.n() != self.omega.n() || mu.gens() != self.omega.gens() {
            return Err(Error::Shape("moment shape differs from curvature".into()));
        }
        let n = mu.n();
        for i in 0..n {
            for j in 0..n {
                if mu.get(i, j).terms().any(|(s, _)| !s.is_empty()) {
                    return Err(Error::InvalidConfig("moment entries must be scalars".into()));
                }
            }
        }
        if token == "0" && !mu.is_zero() {
            return Err(Error::InvalidConfig("the moment at 0 must vanish".into()));
        }
        self.moments.insert(token.to_string(), mu);
        Ok(self)
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.moments.keys().map(String::as_str)
    }
}

/// Omega + mu(X).
pub fn equivariant_curvature(data: &EquivCurvatureData, x: &str) -> Result<SkewMat> {
    let mu = data.moments.get(x).ok_or_else(|| Error::UnknownName {
        kind: "sample point",
        name: x.to_string(),
        known: data.tokens().collect::<Vec<_>>().join(", "),
    })?;
    data.omega.add(mu)
}

/// Scalar multiple of the identity as an even matrix.
pub fn scalar_matrix(n: usize, gens: usize, s: &Scalar) -> EvenMatrix {
    EvenMatrix::identity(n, gens).scale(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra_core::IndexSet;

    #[test]
    fn trivial_ranks() {
        assert_eq!(chern_character(&EndForm::zero(1, 0, 2)).unwrap(), ExtElem::one(2));
        assert_eq!(chern_character(&EndForm::zero(3, 0, 2)).unwrap(), ExtElem::scalar(2, Scalar::int(3)));
        assert!(chern_character(&EndForm::zero(2, 2, 2)).unwrap().is_zero());
    }

    #[test]
    fn rank_one_one() {
        let f = ExtElem::monomial(4, IndexSet::from_indices(&[1, 2]).unwrap(), Scalar::ratio(3, 2));
        let g = ExtElem::monomial(4, IndexSet::from_indices(&[3, 4]).unwrap(), Scalar::int(1));
        let fe = &f + &g;
        let pp = EvenMatrix::from_fn(1, 4, |_, _| fe.clone()).unwrap();
        let mm = EvenMatrix::zero(1, 4);
        let q = EndForm::diag(&pp, &mm).unwrap();
        let mut expect = fe.exp_even().unwrap();
        expect.sub_assign(&ExtElem::one(4));
        assert_eq!(chern_character(&q).unwrap(), expect);
    }

    #[test]
    fn moment_lookup() {
        let w = SkewMat::zero(2, 2);
        let mu = SkewMat::from_upper(2, 2, &[ExtElem::scalar(2, Scalar::int(1))]).unwrap();
        let d = EquivCurvatureData::new(w.clone()).with_moment("X", mu.clone()).unwrap();
        assert_eq!(equivariant_curvature(&d, "0").unwrap(), w);
        assert_eq!(equivariant_curvature(&d, "X").unwrap(), mu);
        assert!(equivariant_curvature(&d, "Y").is_err());
    }
}
