//! Supertrace identities checked against brute-force Clifford expansion.

use rand::Rng;
use serde::Serialize;

use crate::algebra_core::{ExtElem, IndexSet, Scalar};
use crate::charclass::{det_half_sinhc, pf_sub, pfaffian, SkewMat};
use crate::clifford::{c_map_forms, top_supertrace, CliffElem};
use crate::error::{Error, Result};

/// Float tolerance used only when an instance has numeric entries.
pub const FLOAT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct IdentityOutcome {
    pub identity: &'static str,
    pub n: usize,
    pub exact: bool,
    pub deviation: f64,
    pub pass: bool,
    /// Set when the report had to fix a reading of the stated formula.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<String>,
    #[serde(skip)]
    pub lhs: ExtElem,
    #[serde(skip)]
    pub rhs: ExtElem,
}

impl IdentityOutcome {
    pub fn compare(identity: &'static str, n: usize, lhs: ExtElem, rhs: ExtElem) -> Self {
        let exact = lhs.is_exact() && rhs.is_exact();
        let deviation = lhs.dist(&rhs);
        let pass = if exact { lhs == rhs } else { deviation <= FLOAT_TOL * lhs.max_abs().max(1.0) };
        IdentityOutcome { identity, n, exact, deviation, pass, convention: None, lhs, rhs }
    }
}

fn require_even(n: usize) -> Result<()> {
    if n % 2 == 1 {
        Err(Error::InvalidConfig("n must be even".into()))
    } else {
        Ok(())
    }
}

/// `1/2 g^t w g = sum_{i<j} w_ij g_i g_j`.
pub fn half_quadratic(w: &SkewMat) -> CliffElem {
    let n = w.n();
    let mut x = CliffElem::zero(n, w.gens());
    for i in 0..n {
        for j in i + 1..n {
            let e = w.get(i, j);
            if !e.is_zero() {
                x.add_term(IndexSet::from_indices(&[i + 1, j + 1]).expect("in range"), e.clone());
            }
        }
    }
    x
}

/// `J^t g = sum_i J_i (x) g_i`, with `J_i` the i-th generator of the coefficient algebra.
pub fn j_dot_gamma(n: usize, gens: usize) -> Result<CliffElem> {
    let mut x = CliffElem::zero(n, gens);
    for i in 1..=n {
        x.add_term(IndexSet::single(i), ExtElem::gen(gens, i)?);
    }
    Ok(x)
}

fn sum_c_gamma(c: &[Scalar], gens: usize) -> CliffElem {
    let n = c.len();
    let mut x = CliffElem::zero(n, gens);
    for (k, ck) in c.iter().enumerate() {
        x.add_term(IndexSet::single(k + 1), ExtElem::scalar(gens, ck.clone()));
    }
    x
}

/// Str(exp(1/2 g^t w g)) against (2i)^{n/2} det^{1/2}(sinh w / w) Pf(w).
pub fn check_str_exp(w: &SkewMat) -> Result<IdentityOutcome> {
    let n = w.n();
    require_even(n)?;
    let lhs = half_quadratic(w).exp(1e-17)?.str();
    let rhs = (&det_half_sinhc(w, &Scalar::one())? * &pfaffian(w)).scale(&top_supertrace(n));
    Ok(IdentityOutcome::compare("str_exp", n, lhs, rhs))
}

/// Str(c(z) exp(1/2 g^t w g)) = 0.
pub fn check_odd_vanish(z: &[Scalar], w: &SkewMat) -> Result<IdentityOutcome> {
    let n = w.n();
    require_even(n)?;
    let zf: Vec<ExtElem> = z.iter().map(|s| ExtElem::scalar(w.gens(), s.clone())).collect();
    let cz = c_map_forms(&zf, n)?;
    let lhs = cz.mul(&half_quadratic(w).exp(1e-17)?)?.str();
    Ok(IdentityOutcome::compare("odd_vanish", n, lhs, ExtElem::zero(w.gens())))
}

/// `J^A J^B = s J^{A u B}` for disjoint sets, zero otherwise.
pub fn merge_sign(a: IndexSet, b: IndexSet) -> i32 {
    a.merge_sign(b)
}

/// Right side of the Pfaffian expansion lemma.
///
/// `full_union` selects the literal reading where the sign also demands
/// `{k} u I = {1..n}`; the expansion only holds with the merge sign.
pub fn pf_expansion_rhs(w: &SkewMat, c: &[Scalar], full_union: bool) -> ExtElem {
    let n = w.n();
    let gens = w.gens();
    let mut out = ExtElem::zero(gens);
    for k in 1..=n {
        if c[k - 1].is_zero() {
            continue;
        }
        let kset = IndexSet::single(k);
        for i in IndexSet::full(n).minus(kset).subsets() {
            let s = if full_union { crate::algebra_core::eps(kset, i, n) } else { merge_sign(kset, i) };
            if s == 0 {
                continue;
            }
            let pf = pf_sub(w, i.union(kset));
            if pf.is_zero() {
                continue;
            }
            let term = &pf * &ExtElem::monomial(gens, i, Scalar::int(s as i64));
            out.axpy(&c[k - 1], &term);
        }
    }
    out
}

/// (sum c_k w(J)_k) exp(1/2 J^t w J) against the Pfaffian expansion, with
/// `w(J)_k = sum_l w_kl J_l` and J the first n generators.
pub fn check_pf_expansion(w: &SkewMat, c: &[Scalar]) -> Result<IdentityOutcome> {
    let n = w.n();
    require_even(n)?;
    if c.len() != n {
        return Err(Error::Shape(format!("{} coefficients for n = {n}", c.len())));
    }
    let gens = w.gens();
    if gens < n {
        return Err(Error::InvalidConfig("coefficient algebra must contain J_1..J_n".into()));
    }
    let js: Vec<ExtElem> = (1..=n).map(|i| ExtElem::gen(gens, i)).collect::<Result<_>>()?;
    let mut lin = ExtElem::zero(gens);
    let mut quad = ExtElem::zero(gens);
    for k in 0..n {
        for l in 0..n {
            let wkl = w.get(k, l);
            if wkl.is_zero() {
                continue;
            }
            lin.add_assign(&(&ExtElem::scalar(gens, c[k].clone()) * &(wkl * &js[l])));
            if k < l {
                quad.add_assign(&(wkl * &(&js[k] * &js[l])));
            }
        }
    }
    let lhs = &lin * &quad.exp_even()?;
    let rhs = pf_expansion_rhs(w, c, false);
    let literal = pf_expansion_rhs(w, c, true);
    let mut out = IdentityOutcome::compare("pf_expansion", n, lhs, rhs);
    let literal_ok = out.lhs == literal || out.lhs.dist(&literal) <= FLOAT_TOL;
    out.convention = Some(if literal_ok {
        "sign eps({k},I) read as the merge sign of J^{k} J^I; literal full-union reading also agrees".into()
    } else {
        "sign eps({k},I) read as the merge sign of J^{k} J^I; the full-union reading drops every term with |I| < n-1".into()
    });
    Ok(out)
}

/// Sum over k, I of the stated right side, without the det^{1/2} prefactor.
pub fn grand_identity_sum(w: &SkewMat, c: &[Scalar]) -> ExtElem {
    let n = w.n();
    let gens = w.gens();
    let full = IndexSet::full(n);
    let mut out = ExtElem::zero(gens);
    for k in 1..=n {
        if c[k - 1].is_zero() {
            continue;
        }
        let kset = IndexSet::single(k);
        for i in full.minus(kset).subsets() {
            if i.len() % 2 == 0 {
                continue;
            }
            let ip = full.minus(i.union(kset));
            let e1 = crate::algebra_core::eps(i.union(kset), ip, n);
            let e2 = merge_sign(kset, i);
            let pf = pf_sub(w, ip);
            if e1 == 0 || e2 == 0 || pf.is_zero() {
                continue;
            }
            let sign = if ((i.len() + 1) / 2) % 2 == 0 { 1 } else { -1 };
            let coeff = &c[k - 1] * &Scalar::int((sign * e1 * e2) as i64);
            out.axpy(&coeff, &(&pf * &ExtElem::monomial(gens, i, Scalar::one())));
        }
    }
    out
}

/// Str((sum c_k g_k) exp(1/2 g^t w g + J^t g)) against the closed form.
pub fn check_grand_identity(w: &SkewMat, c: &[Scalar]) -> Result<IdentityOutcome> {
    let n = w.n();
    require_even(n)?;
    if c.len() != n {
        return Err(Error::Shape(format!("{} coefficients for n = {n}", c.len())));
    }
    let gens = w.gens();
    if gens < n {
        return Err(Error::InvalidConfig("coefficient algebra must contain J_1..J_n".into()));
    }
    if !w.matrix().has_numeric_part() || w.matrix().numeric_part().determinant().norm() > 1e-12 {
        // nilpotent entries: both sides are polynomial in w, so no inverse is needed
    } else {
        return Err(Error::InvalidConfig("numeric part of w is singular".into()));
    }
    let x = half_quadratic(w).add(&j_dot_gamma(n, gens)?)?;
    let lhs = sum_c_gamma(c, gens).mul(&x.exp(1e-17)?)?.str();
    let pref = det_half_sinhc(w, &Scalar::one())?.scale(&top_supertrace(n));
    let rhs = &pref * &grand_identity_sum(w, c);
    let mut out = IdentityOutcome::compare("grand_identity", n, lhs, rhs);
    out.convention = Some(
        "eps(I u {k}, I') is the stated full sign; eps({k}, I) is the merge sign of J^{k} J^I".into(),
    );
    Ok(out)
}

/// Random skew matrix with grade-2 entries in generators `offset+1..=offset+m`.
pub fn random_nilpotent_skew(n: usize, gens: usize, offset: usize, m: usize, rng: &mut impl Rng) -> SkewMat {
    let mut upper = Vec::new();
    for _ in 0..n * (n - 1) / 2 {
        let mut e = ExtElem::zero(gens);
        for _ in 0..2 {
            let a = rng.gen_range(0..m);
            let mut b = rng.gen_range(0..m - 1);
            if b >= a {
                b += 1;
            }
            let set = IndexSet::from_indices(&[offset + a + 1, offset + b + 1]).expect("in range");
            let num = rng.gen_range(-4i64..=4);
            let den = rng.gen_range(1i64..=3);
            e.add_term(set, Scalar::ratio(num, den));
        }
        upper.push(e);
    }
    SkewMat::from_upper(n, gens, &upper).expect("grade-2 entries are even")
}

/// Random skew matrix with small rational grade-0 entries.
pub fn random_rational_skew(n: usize, gens: usize, rng: &mut impl Rng) -> SkewMat {
    let upper: Vec<ExtElem> = (0..n * (n - 1) / 2)
        .map(|_| ExtElem::scalar(gens, Scalar::ratio(rng.gen_range(-6i64..=6), rng.gen_range(1i64..=4))))
        .collect();
    SkewMat::from_upper(n, gens, &upper).expect("scalars are even")
}

pub fn random_gauss_ints(n: usize, rng: &mut impl Rng) -> Vec<Scalar> {
    (0..n)
        .map(|_| Scalar::gauss(crate::algebra_core::rat(rng.gen_range(-3..=3), 1), crate::algebra_core::rat(rng.gen_range(-3..=3), 1)))
        .collect()
}
