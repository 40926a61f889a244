//! Clifford algebra C_n tensored with the exterior algebra, and its supertrace.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra_core::{rat, ExtElem, IndexSet, Scalar};
use crate::error::{Error, Result};

/// Element of A (x) C_n: Clifford monomials with exterior coefficients.
///
/// Generators satisfy the anticommutator relation `g_j g_k + g_k g_j = 2 delta_jk`.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffElem {
    n: usize,
    gens: usize,
    terms: BTreeMap<IndexSet, ExtElem>,
}

/// Sign of `g_I g_K = sign * g_{I xor K}` for orthonormal generators squaring to 1.
pub fn basis_product_sign(i: IndexSet, k: IndexSet) -> i32 {
    if i.merge_parity(k) == 0 {
        1
    } else {
        -1
    }
}

impl CliffElem {
    pub fn zero(n: usize, gens: usize) -> Self {
        CliffElem { n, gens, terms: BTreeMap::new() }
    }

    pub fn one(n: usize, gens: usize) -> Self {
        CliffElem::from_form(n, &ExtElem::one(gens))
    }

    /// `alpha (x) 1`.
    pub fn from_form(n: usize, alpha: &ExtElem) -> Self {
        let mut c = CliffElem::zero(n, alpha.gens());
        c.add_term(IndexSet::EMPTY, alpha.clone());
        c
    }

    /// `alpha (x) g_I`.
    pub fn monomial(n: usize, set: IndexSet, alpha: ExtElem) -> Self {
        assert!(set.max_index() <= n);
        let mut c = CliffElem::zero(n, alpha.gens());
        c.add_term(set, alpha);
        c
    }

    /// The generator `g_i` (1-based).
    pub fn gamma(n: usize, gens: usize, i: usize) -> Result<Self> {
        if i == 0 || i > n {
            return Err(Error::GeneratorOutOfRange { index: i, gens: n });
        }
        Ok(CliffElem::monomial(n, IndexSet::single(i), ExtElem::one(gens)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gens(&self) -> usize {
        self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&IndexSet, &ExtElem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, set: IndexSet) -> ExtElem {
        self.terms.get(&set).cloned().unwrap_or_else(|| ExtElem::zero(self.gens))
    }

    pub fn add_term(&mut self, set: IndexSet, alpha: ExtElem) {
        if alpha.is_zero() {
            return;
        }
        match self.terms.entry(set) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(alpha);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                o.get_mut().add_assign(&alpha);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &CliffElem) -> Result<CliffElem> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(*k, v.clone());
        }
        Ok(out)
    }

    pub fn add_assign(&mut self, other: &CliffElem) {
        for (k, v) in &other.terms {
            self.add_term(*k, v.clone());
        }
    }

    pub fn scale(&self, s: &Scalar) -> CliffElem {
        let mut out = CliffElem::zero(self.n, self.gens);
        for (k, v) in &self.terms {
            out.add_term(*k, v.scale(s));
        }
        out
    }

    fn check_same(&self, other: &CliffElem) -> Result<()> {
        if self.n != other.n {
            return Err(Error::AlgebraMismatch(self.n, other.n));
        }
        if self.gens != other.gens {
            return Err(Error::AlgebraMismatch(self.gens, other.gens));
        }
        Ok(())
    }

    /// Product with the Koszul rule `(a (x) g_I)(b (x) g_K) = (-1)^{|I||b|} (a b) (x) g_I g_K`.
    pub fn mul(&self, other: &CliffElem) -> Result<CliffElem> {
        self.check_same(other)?;
        let mut out = CliffElem::zero(self.n, self.gens);
        // split right coefficients by parity once
        let split: Vec<(IndexSet, ExtElem, ExtElem)> =
            other.terms.iter().map(|(k, v)| (*k, v.even_part(), v.odd_part())).collect();
        for (ki, a) in &self.terms {
            let odd_i = ki.len() % 2 == 1;
            for (kk, b_even, b_odd) in &split {
                let s = basis_product_sign(*ki, *kk);
                let set = ki.sym_diff(*kk);
                let mut coeff = a * b_even;
                if !b_odd.is_zero() {
                    let t = a * b_odd;
                    if odd_i {
                        coeff.sub_assign(&t);
                    } else {
                        coeff.add_assign(&t);
                    }
                }
                if s < 0 {
                    coeff = -&coeff;
                }
                out.add_term(set, coeff);
            }
        }
        Ok(out)
    }

    /// Supertrace: `(2i)^{n/2}` times the coefficient of the top monomial.
    pub fn str(&self) -> ExtElem {
        let c = self.coeff(IndexSet::full(self.n));
        c.scale(&top_supertrace(self.n))
    }

    /// Total parity if homogeneous.
    pub fn parity(&self) -> Option<usize> {
        let mut p = None;
        for (k, v) in &self.terms {
            for (s, _) in v.terms() {
                let q = (k.len() + s.len()) % 2;
                match p {
                    None => p = Some(q),
                    Some(x) if x != q => return None,
                    _ => {}
                }
            }
        }
        Some(p.unwrap_or(0))
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(ExtElem::max_abs).fold(0.0, f64::max)
    }

    /// Exponential by power series. Terminates exactly when the input is
    /// nilpotent; otherwise stops when the term falls below `tol` relative to the sum.
    pub fn exp(&self, tol: f64) -> Result<CliffElem> {
        let mut sum = CliffElem::one(self.n, self.gens);
        let mut term = sum.clone();
        for k in 1..400i64 {
            term = term.mul(self)?.scale(&Scalar::ratio(1, k));
            if term.is_zero() {
                return Ok(sum);
            }
            sum.add_assign(&term);
            let exact = term.terms.values().all(ExtElem::is_exact);
            if !exact && term.max_abs() <= tol * sum.max_abs().max(1.0) {
                return Ok(sum);
            }
        }
        Err(Error::NotConverged("Clifford exponential".into()))
    }
}

impl fmt::Display for CliffElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, v)| {
                let g: Vec<String> = k.indices().iter().map(|i| format!("g{i}")).collect();
                format!("({v}){}", if g.is_empty() { String::new() } else { format!("*{}", g.join("")) })
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `(2i)^{n/2}`.
pub fn top_supertrace(n: usize) -> Scalar {
    (&Scalar::int(2) * &Scalar::i()).powi((n / 2) as u32)
}

/// `c(z) = i sum z_k g_k`.
pub fn c_map(z: &[Scalar], n: usize, gens: usize) -> Result<CliffElem> {
    if z.len() != n {
        return Err(Error::Shape(format!("vector of length {} for n = {n}", z.len())));
    }
    let mut out = CliffElem::zero(n, gens);
    for (k, zk) in z.iter().enumerate() {
        out.add_term(IndexSet::single(k + 1), ExtElem::scalar(gens, &Scalar::i() * zk));
    }
    Ok(out)
}

/// `c(z)` with form-valued entries.
pub fn c_map_forms(z: &[ExtElem], n: usize) -> Result<CliffElem> {
    if z.len() != n {
        return Err(Error::Shape(format!("vector of length {} for n = {n}", z.len())));
    }
    let gens = z.first().map(|e| e.gens()).unwrap_or(0);
    let mut out = CliffElem::zero(n, gens);
    for (k, zk) in z.iter().enumerate() {
        out.add_term(IndexSet::single(k + 1), zk.scale(&Scalar::i()));
    }
    Ok(out)
}

/// Graded cyclicity `str(ab) = (-1)^{|a||b|} str(ba)`, exactly.
pub fn str_cyclic_check(a: &CliffElem, b: &CliffElem) -> Result<bool> {
    let pa = a.parity().ok_or_else(|| Error::InvalidConfig("inhomogeneous element".into()))?;
    let pb = b.parity().ok_or_else(|| Error::InvalidConfig("inhomogeneous element".into()))?;
    let lhs = a.mul(b)?.str();
    let mut rhs = b.mul(a)?.str();
    if pa * pb % 2 == 1 {
        rhs = -&rhs;
    }
    Ok(lhs == rhs)
}

/// Dense square matrix with exterior-algebra entries.
#[derive(Clone, Debug, PartialEq)]
pub struct FormMatrix {
    pub dim: usize,
    pub gens: usize,
    pub entries: Vec<ExtElem>,
}

impl FormMatrix {
    pub fn zero(dim: usize, gens: usize) -> Self {
        FormMatrix { dim, gens, entries: vec![ExtElem::zero(gens); dim * dim] }
    }

    pub fn from_scalars(dim: usize, gens: usize, m: &[Scalar]) -> Self {
        FormMatrix { dim, gens, entries: m.iter().map(|s| ExtElem::scalar(gens, s.clone())).collect() }
    }

    pub fn get(&self, r: usize, c: usize) -> &ExtElem {
        &self.entries[r * self.dim + c]
    }

    pub fn mul(&self, o: &FormMatrix) -> FormMatrix {
        let d = self.dim;
        let mut out = FormMatrix::zero(d, self.gens);
        for r in 0..d {
            for k in 0..d {
                let a = &self.entries[r * d + k];
                if a.is_zero() {
                    continue;
                }
                for c in 0..d {
                    let b = &o.entries[k * d + c];
                    if !b.is_zero() {
                        out.entries[r * d + c].add_assign(&(a * b));
                    }
                }
            }
        }
        out
    }

    pub fn add_assign(&mut self, o: &FormMatrix) {
        for (a, b) in self.entries.iter_mut().zip(&o.entries) {
            a.add_assign(b);
        }
    }
}

fn smat_mul(a: &[Scalar], b: &[Scalar], d: usize) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); d * d];
    for r in 0..d {
        for k in 0..d {
            if a[r * d + k].is_zero() {
                continue;
            }
            for c in 0..d {
                if !b[k * d + c].is_zero() {
                    out[r * d + c] += &(&a[r * d + k] * &b[k * d + c]);
                }
            }
        }
    }
    out
}

fn kron(a: &[Scalar], da: usize, b: &[Scalar], db: usize) -> Vec<Scalar> {
    let d = da * db;
    let mut out = vec![Scalar::zero(); d * d];
    for i in 0..da {
        for j in 0..da {
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k) * d + j * db + l] = &a[i * da + j] * &b[k * db + l];
                }
            }
        }
    }
    out
}

/// Concrete Jordan-Wigner matrices for `g_1..g_n`, used only as a cross-check.
#[derive(Clone, Debug)]
pub struct MatrixRep {
    pub n: usize,
    pub dim: usize,
    pub gammas: Vec<Vec<Scalar>>,
    /// `i^{n/2} g_1...g_n`, squares to the identity and anticommutes with each generator.
    pub chirality: Vec<Scalar>,
    norm: Scalar,
}

impl MatrixRep {
    pub fn new(n: usize) -> Result<Self> {
        if n % 2 == 1 {
            return Err(Error::InvalidConfig("n must be even".into()));
        }
        if n > 12 {
            return Err(Error::InvalidConfig("matrix representation limited to n <= 12".into()));
        }
        let z = Scalar::zero;
        let o = Scalar::one;
        let id = vec![o(), z(), z(), o()];
        let px = vec![z(), o(), o(), z()];
        let py = vec![z(), -Scalar::i(), Scalar::i(), z()];
        let pz = vec![o(), z(), z(), Scalar::int(-1)];
        let m = n / 2;
        let mut gammas = Vec::with_capacity(n);
        for j in 0..m {
            for p in [&px, &py] {
                let mut acc = vec![Scalar::one()];
                let mut d = 1;
                for site in 0..m {
                    let f = if site < j {
                        &pz
                    } else if site == j {
                        p
                    } else {
                        &id
                    };
                    acc = kron(&acc, d, f, 2);
                    d *= 2;
                }
                gammas.push(acc);
            }
        }
        let dim = 1usize << m;
        let mut full = identity(dim);
        for g in &gammas {
            full = smat_mul(&full, g, dim);
        }
        let chirality: Vec<Scalar> = full.iter().map(|x| x * &Scalar::i().powi(m as u32)).collect();
        // fix c so that c tr(Gamma g_full) = (2i)^{n/2}
        let t = trace(&smat_mul(&chirality, &full, dim));
        let norm = if n == 0 { Scalar::zero() } else { (&top_supertrace(n) * &t.inv()?).clone() };
        Ok(MatrixRep { n, dim, gammas, chirality, norm })
    }

    /// Matrix of a Clifford basis monomial.
    pub fn monomial(&self, set: IndexSet) -> Vec<Scalar> {
        let mut m = identity(self.dim);
        for i in set.indices() {
            m = smat_mul(&m, &self.gammas[i - 1], self.dim);
        }
        m
    }

    /// Image of `a (x) M` as `a Gamma^{|a|} M`, a homomorphism of the super tensor product.
    pub fn represent(&self, u: &CliffElem) -> FormMatrix {
        let d = self.dim;
        let mut out = FormMatrix::zero(d, u.gens());
        for (set, alpha) in u.terms() {
            let m = self.monomial(*set);
            let mg = smat_mul(&self.chirality, &m, d);
            for (parity, mat) in [(0usize, &m), (1usize, &mg)] {
                let part = if parity == 0 { alpha.even_part() } else { alpha.odd_part() };
                if part.is_zero() {
                    continue;
                }
                for (idx, s) in mat.iter().enumerate() {
                    if !s.is_zero() {
                        out.entries[idx].add_assign(&part.scale(s));
                    }
                }
            }
        }
        out
    }

    /// Supertrace of a represented element, undoing the parity twist.
    pub fn supertrace(&self, m: &FormMatrix) -> ExtElem {
        let d = self.dim;
        let mut out = ExtElem::zero(m.gens);
        for r in 0..d {
            for c in 0..d {
                let e = m.get(r, c);
                if e.is_zero() {
                    continue;
                }
                // even coefficients pair with Gamma, odd ones already carry it
                let g = &self.chirality[c * d + r];
                let even = e.even_part();
                if !g.is_zero() && !even.is_zero() {
                    out.add_assign(&even.scale(&(g * &self.norm)));
                }
                let odd = e.odd_part();
                if r == c && !odd.is_zero() {
                    out.add_assign(&odd.scale(&self.norm));
                }
            }
        }
        out
    }
}

fn identity(d: usize) -> Vec<Scalar> {
    let mut m = vec![Scalar::zero(); d * d];
    for i in 0..d {
        m[i * d + i] = Scalar::one();
    }
    m
}

fn trace(m: &[Scalar]) -> Scalar {
    let d = (m.len() as f64).sqrt() as usize;
    let mut t = Scalar::zero();
    for i in 0..d {
        t += &m[i * d + i];
    }
    t
}

/// Random element with small Gaussian-rational coefficients on `gens`
/// auxiliary generators; restricted to total parity `parity` when given.
pub fn random_element(n: usize, gens: usize, parity: Option<usize>, terms: usize, rng: &mut impl Rng) -> CliffElem {
    let mut out = CliffElem::zero(n, gens);
    let mut placed = 0;
    while placed < terms {
        let set = IndexSet::full(n).subsets().nth(rng.gen_range(0..1usize << n)).expect("subset");
        let form = IndexSet::full(gens).subsets().nth(rng.gen_range(0..1usize << gens)).expect("subset");
        if parity.is_some_and(|p| (set.len() + form.len()) % 2 != p) {
            continue;
        }
        let c = Scalar::gauss(rat(rng.gen_range(-3..=3), rng.gen_range(1..=3)), rat(rng.gen_range(-2..=2), 1));
        out.add_term(set, ExtElem::monomial(gens, form, c));
        placed += 1;
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct CliffordReport {
    pub n: usize,
    pub instances: usize,
    /// Anticommutator relations among the generators.
    pub relations: bool,
    /// Basis supertrace equals the matrix-representation supertrace.
    pub oracle_mismatches: usize,
    /// Graded cyclicity failures on random homogeneous pairs.
    pub cyclic_failures: usize,
    pub pass: bool,
}

/// Relations, matrix-oracle supertrace and graded cyclicity on `instances`
/// random elements with exterior coefficients on two auxiliary generators.
pub fn verify_clifford(n: usize, instances: usize, seed: u64) -> Result<CliffordReport> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::InvalidConfig("n must be even".into()));
    }
    let rep = MatrixRep::new(n)?;
    let gens = 2;
    let mut relations = true;
    for i in 1..=n {
        for j in 1..=n {
            let (a, b) = (CliffElem::gamma(n, gens, i)?, CliffElem::gamma(n, gens, j)?);
            let s = a.mul(&b)?.add(&b.mul(&a)?)?;
            let expect = if i == j { CliffElem::one(n, gens).scale(&Scalar::int(2)) } else { CliffElem::zero(n, gens) };
            relations &= s == expect;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut oracle_mismatches = 0;
    let mut cyclic_failures = 0;
    for _ in 0..instances {
        let u = random_element(n, gens, None, 6, &mut rng);
        if rep.supertrace(&rep.represent(&u)) != u.str() {
            oracle_mismatches += 1;
        }
        let pa = rng.gen_range(0..2);
        let pb = rng.gen_range(0..2);
        let a = random_element(n, gens, Some(pa), 4, &mut rng);
        let b = random_element(n, gens, Some(pb), 4, &mut rng);
        if !str_cyclic_check(&a, &b)? {
            cyclic_failures += 1;
        }
    }
    Ok(CliffordReport {
        n,
        instances,
        relations,
        oracle_mismatches,
        cyclic_failures,
        pass: relations && oracle_mismatches == 0 && cyclic_failures == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, i: usize) -> CliffElem {
        CliffElem::gamma(n, 0, i).unwrap()
    }

    #[test]
    fn relations() {
        assert_eq!(g(2, 1).mul(&g(2, 1)).unwrap(), CliffElem::one(2, 0));
        let g12 = g(2, 1).mul(&g(2, 2)).unwrap();
        assert_eq!(g12, CliffElem::monomial(2, IndexSet::full(2), ExtElem::one(0)));
        assert_eq!(g12.mul(&g12).unwrap(), CliffElem::one(2, 0).scale(&Scalar::int(-1)));
        for n in [2, 4, 6] {
            for i in 1..=n {
                for j in 1..=n {
                    let s = g(n, i).mul(&g(n, j)).unwrap().add(&g(n, j).mul(&g(n, i)).unwrap()).unwrap();
                    let expect = if i == j { CliffElem::one(n, 0).scale(&Scalar::int(2)) } else { CliffElem::zero(n, 0) };
                    assert_eq!(s, expect);
                }
            }
        }
    }

    #[test]
    fn supertrace_basics() {
        let g12 = CliffElem::monomial(2, IndexSet::full(2), ExtElem::one(0));
        assert_eq!(g12.str(), ExtElem::scalar(0, &Scalar::int(2) * &Scalar::i()));
        assert!(CliffElem::one(2, 0).str().is_zero());
    }

    #[test]
    fn koszul_sign_example() {
        let j1 = ExtElem::gen(2, 1).unwrap();
        let j2 = ExtElem::gen(2, 2).unwrap();
        let a = CliffElem::monomial(2, IndexSet::single(1), j1.clone());
        let b = CliffElem::monomial(2, IndexSet::single(2), j2.clone());
        let s = a.mul(&b).unwrap().str();
        let expect = (&j1 * &j2).scale(&Scalar::int(-2)).scale(&Scalar::i());
        assert_eq!(s, expect);
    }

    #[test]
    fn c_map_squares_to_minus_norm() {
        let z = vec![Scalar::ratio(1, 2), Scalar::i(), Scalar::int(3), Scalar::ratio(-2, 3)];
        let c = c_map(&z, 4, 0).unwrap();
        let sq = c.mul(&c).unwrap();
        let mut s = Scalar::zero();
        for x in &z {
            s += &(x * x);
        }
        assert_eq!(sq, CliffElem::one(4, 0).scale(&-s));
        assert!(c_map(&vec![Scalar::zero(); 2], 2, 0).unwrap().is_zero());
        assert!(c_map(&[Scalar::one()], 2, 0).is_err());
    }

    #[test]
    fn matrix_rep_normalization() {
        for n in [2, 4, 6] {
            let rep = MatrixRep::new(n).unwrap();
            let full = CliffElem::monomial(n, IndexSet::full(n), ExtElem::one(0));
            assert_eq!(rep.supertrace(&rep.represent(&full)), ExtElem::scalar(0, top_supertrace(n)));
            for set in IndexSet::full(n).subsets() {
                let u = CliffElem::monomial(n, set, ExtElem::one(0));
                assert_eq!(rep.supertrace(&rep.represent(&u)), u.str(), "{set:?}");
            }
        }
        assert!(MatrixRep::new(3).is_err());
    }

    #[test]
    fn cyclic_examples() {
        assert!(str_cyclic_check(&g(2, 1), &g(2, 2)).unwrap());
        assert!(str_cyclic_check(&CliffElem::one(2, 0), &g(2, 2)).unwrap());
    }

    #[test]
    fn verification_suite() {
        for n in [2, 4, 6] {
            let r = verify_clifford(n, 20, 3).unwrap();
            assert!(r.pass, "{r:?}");
        }
        assert!(verify_clifford(3, 1, 0).is_err());
    }
}
