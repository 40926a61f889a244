//! Randomized exact checks of the symbol product.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra_core::{rat, ExtElem, IndexSet, Scalar};
use crate::charclass::SkewMat;
use crate::error::{Error, Result};

use super::symbol::{star, CurvPairing, Symbol};

const GENS: usize = 4;

fn small(rng: &mut ChaCha8Rng) -> Scalar {
    Scalar::gauss(rat(rng.gen_range(-3..=3), rng.gen_range(1..=2)), rat(rng.gen_range(-1..=1), 1))
}

fn random_form(rng: &mut ChaCha8Rng, max_grade: usize) -> ExtElem {
    let mut e = ExtElem::zero(GENS);
    for _ in 0..3 {
        let set = IndexSet::full(GENS).subsets().nth(rng.gen_range(0..1usize << GENS)).expect("subset");
        if set.len() <= max_grade {
            e.add_term(set, small(rng));
        }
    }
    e
}

/// Random symbol of total xi-degree at most 2 in `n` variables.
pub fn random_symbol(n: usize, rng: &mut ChaCha8Rng) -> Symbol {
    let mut s = Symbol::zero(n, GENS);
    for _ in 0..4 {
        let mut e = vec![0u16; n];
        for _ in 0..rng.gen_range(0..=2) {
            e[rng.gen_range(0..n)] += 1;
        }
        s = s.add(&Symbol::monomial(e, random_form(rng, 2))).expect("same shape");
    }
    s
}

/// Curvature pairing with random 2-form entries.
pub fn random_pairing(n: usize, rng: &mut ChaCha8Rng) -> CurvPairing {
    let upper: Vec<ExtElem> = (0..n * (n - 1) / 2)
        .map(|_| {
            let mut e = ExtElem::zero(GENS);
            for _ in 0..2 {
                let i = rng.gen_range(1..GENS);
                let j = rng.gen_range(i + 1..=GENS);
                e.add_term(IndexSet::from_indices(&[i, j]).expect("in range"), small(rng));
            }
            e
        })
        .collect();
    CurvPairing::new(SkewMat::from_upper(n, GENS, &upper).expect("even entries")).expect("2-forms")
}

#[derive(Clone, Debug, Serialize)]
pub struct StarReport {
    pub n: usize,
    pub instances: usize,
    pub associativity_failures: usize,
    /// `a * b != a ^ b` at zero curvature.
    pub flat_failures: usize,
    /// `[a.xi, b.xi]_* != -1/2 sum a_k b_l R_kl`.
    pub commutator_failures: usize,
    pub pass: bool,
}

pub fn star_checks(n: usize, instances: usize, seed: u64) -> Result<StarReport> {
    if n == 0 {
        return Err(Error::InvalidConfig("n must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let flat = CurvPairing::zero(n, GENS);
    let (mut assoc, mut flat_f, mut comm) = (0, 0, 0);
    for _ in 0..instances {
        let r = random_pairing(n, &mut rng);
        let (a, b, c) = (random_symbol(n, &mut rng), random_symbol(n, &mut rng), random_symbol(n, &mut rng));
        if star(&star(&a, &b, &r)?, &c, &r)? != star(&a, &star(&b, &c, &r)?, &r)? {
            assoc += 1;
        }
        if star(&a, &b, &flat)? != a.wedge(&b)? {
            flat_f += 1;
        }
        let av: Vec<Scalar> = (0..n).map(|_| small(&mut rng)).collect();
        let bv: Vec<Scalar> = (0..n).map(|_| small(&mut rng)).collect();
        let lin = |v: &[Scalar]| -> Result<Symbol> {
            let mut s = Symbol::zero(n, GENS);
            for (k, c) in v.iter().enumerate() {
                s = s.add(&Symbol::xi(n, GENS, k + 1).scale(c))?;
            }
            Ok(s)
        };
        let (la, lb) = (lin(&av)?, lin(&bv)?);
        let got = star(&la, &lb, &r)?.sub(&star(&lb, &la, &r)?)?;
        let mut expect = ExtElem::zero(GENS);
        for k in 0..n {
            for l in 0..n {
                expect.axpy(&(&(&av[k] * &bv[l]) * &Scalar::ratio(-1, 2)), r.r.get(k, l));
            }
        }
        if got != Symbol::constant(n, expect) {
            comm += 1;
        }
    }
    Ok(StarReport {
        n,
        instances,
        associativity_failures: assoc,
        flat_failures: flat_f,
        commutator_failures: comm,
        pass: assoc + flat_f + comm == 0,
    })
}
