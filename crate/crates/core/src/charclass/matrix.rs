//! Square matrices with even exterior entries, skew matrices and Pfaffians.

use crate::algebra_core::{ExtElem, IndexSet, Scalar};
use crate::error::{Error, Result};

/// Dense square matrix over the even part of an exterior algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct EvenMatrix {
    n: usize,
    gens: usize,
    entries: Vec<ExtElem>,
}

impl EvenMatrix {
    pub fn zero(n: usize, gens: usize) -> Self {
        EvenMatrix { n, gens, entries: vec![ExtElem::zero(gens); n * n] }
    }

    pub fn identity(n: usize, gens: usize) -> Self {
        let mut m = EvenMatrix::zero(n, gens);
        for i in 0..n {
            m.entries[i * n + i] = ExtElem::one(gens);
        }
        m
    }

    pub fn from_fn(n: usize, gens: usize, f: impl Fn(usize, usize) -> ExtElem) -> Result<Self> {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let e = f(i, j);
                e.check_same(&ExtElem::zero(gens))?;
                if !e.is_even() {
                    return Err(Error::NotEven);
                }
                entries.push(e);
            }
        }
        Ok(EvenMatrix { n, gens, entries })
    }

    pub fn from_scalars(n: usize, gens: usize, s: &[Scalar]) -> Self {
        assert_eq!(s.len(), n * n);
        EvenMatrix { n, gens, entries: s.iter().map(|x| ExtElem::scalar(gens, x.clone())).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gens(&self) -> usize {
        self.gens
    }

    pub fn get(&self, i: usize, j: usize) -> &ExtElem {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: ExtElem) {
        self.entries[i * self.n + j] = e;
    }

    pub fn entries(&self) -> &[ExtElem] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(ExtElem::is_zero)
    }

    pub fn is_exact(&self) -> bool {
        self.entries.iter().all(ExtElem::is_exact)
    }

    pub fn scale(&self, s: &Scalar) -> EvenMatrix {
        EvenMatrix { n: self.n, gens: self.gens, entries: self.entries.iter().map(|e| e.scale(s)).collect() }
    }

    pub fn add(&self, o: &EvenMatrix) -> Result<EvenMatrix> {
        self.check(o)?;
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&o.entries) {
            a.add_assign(b);
        }
        Ok(out)
    }

    pub fn axpy(&mut self, c: &Scalar, o: &EvenMatrix) {
        for (a, b) in self.entries.iter_mut().zip(&o.entries) {
            a.axpy(c, b);
        }
    }

    fn check(&self, o: &EvenMatrix) -> Result<()> {
        if self.n != o.n {
            return Err(Error::Shape(format!("{}x{} vs {}x{}", self.n, self.n, o.n, o.n)));
        }
        if self.gens != o.gens {
            return Err(Error::AlgebraMismatch(self.gens, o.gens));
        }
        Ok(())
    }

    pub fn mul(&self, o: &EvenMatrix) -> Result<EvenMatrix> {
        self.check(o)?;
        let n = self.n;
        let mut out = EvenMatrix::zero(n, self.gens);
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &o.entries[k * n + j];
                    if !b.is_zero() {
                        out.entries[i * n + j].add_assign(&(a * b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> ExtElem {
        let mut t = ExtElem::zero(self.gens);
        for i in 0..self.n {
            t.add_assign(self.get(i, i));
        }
        t
    }

    /// Grade-0 part as a complex float matrix.
    pub fn numeric_part(&self) -> nalgebra::DMatrix<num_complex::Complex64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j).scalar_part().to_c64())
    }

    pub fn has_numeric_part(&self) -> bool {
        self.entries.iter().any(|e| !e.scalar_part().is_zero())
    }

    /// Largest eigenvalue modulus of the grade-0 part.
    pub fn numeric_spectral_radius(&self) -> f64 {
        if !self.has_numeric_part() {
            return 0.0;
        }
        let m = self.numeric_part();
        let ev = m.schur().eigenvalues().expect("complex Schur form is triangular");
        ev.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(ExtElem::max_abs).fold(0.0, f64::max)
    }

    pub fn dist(&self, o: &EvenMatrix) -> f64 {
        self.entries.iter().zip(&o.entries).map(|(a, b)| a.dist(b)).fold(0.0, f64::max)
    }
}

/// Skew-symmetric matrix with even entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewMat(EvenMatrix);

impl SkewMat {
    pub fn new(m: EvenMatrix) -> Result<Self> {
        let n = m.n();
        for i in 0..n {
            for j in i..n {
                let s = m.get(i, j) + m.get(j, i);
                if !s.is_zero() {
                    return Err(Error::NotSkew(i + 1, j + 1));
                }
            }
        }
        Ok(SkewMat(m))
    }

    /// Build from the strict upper triangle, row by row: (1,2), (1,3), ..., (n-1,n).
    pub fn from_upper(n: usize, gens: usize, upper: &[ExtElem]) -> Result<Self> {
        if upper.len() != n * (n.saturating_sub(1)) / 2 {
            return Err(Error::Shape(format!("{} upper entries for n = {n}", upper.len())));
        }
        let mut m = EvenMatrix::zero(n, gens);
        let mut it = upper.iter();
        for i in 0..n {
            for j in i + 1..n {
                let e = it.next().expect("length checked");
                if e.gens() != gens {
                    return Err(Error::AlgebraMismatch(e.gens(), gens));
                }
                if !e.is_even() {
                    return Err(Error::NotEven);
                }
                m.set(i, j, e.clone());
                m.set(j, i, -e);
            }
        }
        Ok(SkewMat(m))
    }

    pub fn zero(n: usize, gens: usize) -> Self {
        SkewMat(EvenMatrix::zero(n, gens))
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn gens(&self) -> usize {
        self.0.gens()
    }

    pub fn get(&self, i: usize, j: usize) -> &ExtElem {
        self.0.get(i, j)
    }

    pub fn matrix(&self) -> &EvenMatrix {
        &self.0
    }

    pub fn scale(&self, s: &Scalar) -> SkewMat {
        SkewMat(self.0.scale(s))
    }

    pub fn add(&self, o: &SkewMat) -> Result<SkewMat> {
        Ok(SkewMat(self.0.add(&o.0)?))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Principal submatrix on the (1-based) index set.
    pub fn sub(&self, set: IndexSet) -> SkewMat {
        let idx: Vec<usize> = set.indices().iter().map(|i| i - 1).collect();
        let k = idx.len();
        let mut m = EvenMatrix::zero(k, self.gens());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m.set(a, b, self.get(i, j).clone());
            }
        }
        SkewMat(m)
    }
}

/// Pfaffian as a signed sum over perfect matchings. Odd size gives 0, empty gives 1.
pub fn pfaffian(w: &SkewMat) -> ExtElem {
    let n = w.n();
    let gens = w.gens();
    if n % 2 == 1 {
        return ExtElem::zero(gens);
    }
    let mut total = ExtElem::zero(gens);
    let mut pairs = Vec::with_capacity(n / 2);
    let remaining: Vec<usize> = (0..n).collect();
    for_each_matching(&remaining, &mut pairs, &mut |m| {
        let mut prod = ExtElem::one(gens);
        for &(i, j) in m {
            prod = &prod * w.get(i, j);
            if prod.is_zero() {
                return;
            }
        }
        if matching_crossings(m) % 2 == 1 {
            prod = -&prod;
        }
        total.add_assign(&prod);
    });
    total
}

fn for_each_matching(rem: &[usize], acc: &mut Vec<(usize, usize)>, f: &mut impl FnMut(&[(usize, usize)])) {
    if rem.is_empty() {
        f(acc);
        return;
    }
    let first = rem[0];
    for k in 1..rem.len() {
        let mut rest: Vec<usize> = Vec::with_capacity(rem.len() - 2);
        rest.extend_from_slice(&rem[1..k]);
        rest.extend_from_slice(&rem[k + 1..]);
        acc.push((first, rem[k]));
        for_each_matching(&rest, acc, f);
        acc.pop();
    }
}

/// Number of crossing arc pairs when the matching is drawn above a line.
pub fn matching_crossings(m: &[(usize, usize)]) -> usize {
    let mut c = 0;
    for (x, &(a, b)) in m.iter().enumerate() {
        for &(p, q) in &m[x + 1..] {
            let (a, b) = (a.min(b), a.max(b));
            let (p, q) = (p.min(q), p.max(q));
            if (a < p && p < b && b < q) || (p < a && a < q && q < b) {
                c += 1;
            }
        }
    }
    c
}

/// Pfaffian by expansion along the first row. Independent of the matching sum.
pub fn pfaffian_row_expansion(w: &SkewMat) -> ExtElem {
    let idx: Vec<usize> = (0..w.n()).collect();
    pf_rows(w, &idx)
}

fn pf_rows(w: &SkewMat, idx: &[usize]) -> ExtElem {
    let gens = w.gens();
    if idx.is_empty() {
        return ExtElem::one(gens);
    }
    if idx.len() % 2 == 1 {
        return ExtElem::zero(gens);
    }
    let mut total = ExtElem::zero(gens);
    for j in 1..idx.len() {
        let a = w.get(idx[0], idx[j]);
        if a.is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx.iter().enumerate().filter(|&(k, _)| k != 0 && k != j).map(|(_, &v)| v).collect();
        let term = a * &pf_rows(w, &rest);
        if j % 2 == 1 {
            total.add_assign(&term);
        } else {
            total.sub_assign(&term);
        }
    }
    total
}

/// Pfaffian of the principal submatrix on `set`.
pub fn pf_sub(w: &SkewMat, set: IndexSet) -> ExtElem {
    if set.len() % 2 == 1 {
        return ExtElem::zero(w.gens());
    }
    pfaffian(&w.sub(set))
}
