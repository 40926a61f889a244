//! Named identity checks run over instance batches.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra_core::{rat, ExtElem, IndexSet, Scalar};
use crate::charclass::SkewMat;
use crate::error::{Error, Result};

use super::identities::*;

/// One input to an identity check.
#[derive(Clone, Debug)]
pub struct Instance {
    pub omega: SkewMat,
    pub coeffs: Vec<Scalar>,
}

pub trait IdentityCheck: Sync + Send {
    fn name(&self) -> &'static str;
    /// Stable descriptive label of the statement being checked.
    fn anchor(&self) -> &'static str;
    fn max_n(&self) -> usize;
    /// Exhaustive parameter grid for n = 2.
    fn grid(&self) -> Vec<Instance>;
    fn random(&self, n: usize, rng: &mut ChaCha8Rng) -> Instance;
    fn evaluate(&self, inst: &Instance) -> Result<IdentityOutcome>;
}

const GRID: [(i64, i64); 7] = [(-2, 1), (-1, 1), (-1, 2), (0, 1), (1, 2), (1, 1), (2, 1)];

fn aux_two(n_off: usize, gens: usize, a: (i64, i64), b: (i64, i64)) -> ExtElem {
    let mut e = ExtElem::zero(gens);
    e.add_term(IndexSet::from_indices(&[n_off + 1, n_off + 2]).expect("in range"), Scalar::ratio(a.0, a.1));
    e.add_term(IndexSet::from_indices(&[n_off + 3, n_off + 4]).expect("in range"), Scalar::ratio(b.0, b.1));
    e
}

fn grid_omegas(offset: usize, gens: usize) -> Vec<SkewMat> {
    let mut out = Vec::new();
    for a in GRID {
        for b in GRID {
            out.push(SkewMat::from_upper(2, gens, &[aux_two(offset, gens, a, b)]).expect("even"));
        }
    }
    out
}

fn grid_coeffs() -> Vec<Vec<Scalar>> {
    let g = |re: i64, im: i64| Scalar::gauss(rat(re, 1), rat(im, 1));
    vec![
        vec![g(1, 0), g(0, 0)],
        vec![g(0, 0), g(1, 0)],
        vec![g(1, 0), g(1, 0)],
        vec![g(1, 0), g(0, 1)],
        vec![g(-2, 1), g(3, -1)],
    ]
}

/// Auxiliary generators used for nilpotent entries at rank n.
pub fn aux_count(n: usize) -> usize {
    n + 2
}

pub struct StrExp;
pub struct OddVanish;
pub struct GrandIdentity;
pub struct PfExpansion;

impl IdentityCheck for StrExp {
    fn name(&self) -> &'static str {
        "str_exp"
    }
    fn anchor(&self) -> &'static str {
        "supertrace-of-clifford-exponential"
    }
    fn max_n(&self) -> usize {
        6
    }
    fn grid(&self) -> Vec<Instance> {
        grid_omegas(0, 4).into_iter().map(|omega| Instance { omega, coeffs: vec![] }).collect()
    }
    fn random(&self, n: usize, rng: &mut ChaCha8Rng) -> Instance {
        let m = aux_count(n);
        Instance { omega: random_nilpotent_skew(n, m, 0, m, rng), coeffs: vec![] }
    }
    fn evaluate(&self, inst: &Instance) -> Result<IdentityOutcome> {
        check_str_exp(&inst.omega)
    }
}

impl IdentityCheck for OddVanish {
    fn name(&self) -> &'static str {
        "odd_vanish"
    }
    fn anchor(&self) -> &'static str {
        "odd-supertrace-vanishes"
    }
    fn max_n(&self) -> usize {
        6
    }
    fn grid(&self) -> Vec<Instance> {
        let mut out = Vec::new();
        for omega in grid_omegas(0, 4) {
            for c in grid_coeffs() {
                out.push(Instance { omega: omega.clone(), coeffs: c });
            }
        }
        out
    }
    fn random(&self, n: usize, rng: &mut ChaCha8Rng) -> Instance {
        let m = aux_count(n);
        let omega = random_nilpotent_skew(n, m, 0, m, rng);
        Instance { omega, coeffs: random_gauss_ints(n, rng) }
    }
    fn evaluate(&self, inst: &Instance) -> Result<IdentityOutcome> {
        check_odd_vanish(&inst.coeffs, &inst.omega)
    }
}

impl IdentityCheck for GrandIdentity {
    fn name(&self) -> &'static str {
        "grand_identity"
    }
    fn anchor(&self) -> &'static str {
        "supertrace-with-linear-source"
    }
    fn max_n(&self) -> usize {
        4
    }
    fn grid(&self) -> Vec<Instance> {
        let mut out = Vec::new();
        for omega in grid_omegas(2, 6) {
            for c in grid_coeffs() {
                out.push(Instance { omega: omega.clone(), coeffs: c });
            }
        }
        out
    }
    fn random(&self, n: usize, rng: &mut ChaCha8Rng) -> Instance {
        let m = aux_count(n);
        let omega = random_nilpotent_skew(n, n + m, n, m, rng);
        Instance { omega, coeffs: random_gauss_ints(n, rng) }
    }
    fn evaluate(&self, inst: &Instance) -> Result<IdentityOutcome> {
        check_grand_identity(&inst.omega, &inst.coeffs)
    }
}

impl IdentityCheck for PfExpansion {
    fn name(&self) -> &'static str {
        "pf_expansion"
    }
    fn anchor(&self) -> &'static str {
        "pfaffian-expansion-of-linear-times-gaussian"
    }
    fn max_n(&self) -> usize {
        8
    }
    fn grid(&self) -> Vec<Instance> {
        let mut out = Vec::new();
        for a in GRID {
            let omega = SkewMat::from_upper(2, 2, &[ExtElem::scalar(2, Scalar::ratio(a.0, a.1))]).expect("even");
            for c in grid_coeffs() {
                out.push(Instance { omega: omega.clone(), coeffs: c });
            }
        }
        out
    }
    fn random(&self, n: usize, rng: &mut ChaCha8Rng) -> Instance {
        let omega = random_rational_skew(n, n, rng);
        Instance { omega, coeffs: random_gauss_ints(n, rng) }
    }
    fn evaluate(&self, inst: &Instance) -> Result<IdentityOutcome> {
        check_pf_expansion(&inst.omega, &inst.coeffs)
    }
}

pub fn registry() -> Vec<Box<dyn IdentityCheck>> {
    vec![Box::new(StrExp), Box::new(OddVanish), Box::new(GrandIdentity), Box::new(PfExpansion)]
}

pub fn lookup(name: &str) -> Result<Box<dyn IdentityCheck>> {
    registry().into_iter().find(|c| c.name() == name).ok_or_else(|| Error::UnknownName {
        kind: "identity",
        name: name.into(),
        known: registry().iter().map(|c| c.name()).collect::<Vec<_>>().join(", "),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub identity: &'static str,
    pub anchor: &'static str,
    pub n: usize,
    pub instances: usize,
    pub max_abs_deviation: f64,
    pub exact: bool,
    pub failures: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<String>,
}

fn instance_seed(seed: u64, name: &str, n: usize, idx: usize) -> u64 {
    // FNV-1a over the name keeps streams of different checks independent
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h = (h ^ b as u64).wrapping_mul(0x100_0000_01b3);
    }
    h ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ ((n as u64) << 48) ^ idx as u64
}

/// Run a check on the n = 2 grid plus `count` random instances (only the
/// random batch for n > 2).
pub fn run_check(check: &dyn IdentityCheck, n: usize, count: usize, seed: u64) -> Result<SuiteReport> {
    if n % 2 == 1 || n == 0 {
        return Err(Error::InvalidConfig("n must be even".into()));
    }
    if n > check.max_n() {
        return Err(Error::InvalidConfig(format!("{} supports n <= {}", check.name(), check.max_n())));
    }
    let mut batch = if n == 2 { check.grid() } else { Vec::new() };
    for idx in 0..count {
        let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(seed, check.name(), n, idx));
        batch.push(check.random(n, &mut rng));
    }
    let outcomes: Vec<IdentityOutcome> = batch.par_iter().map(|i| check.evaluate(i)).collect::<Result<_>>()?;
    let max_abs_deviation = outcomes.iter().map(|o| o.deviation).fold(0.0, f64::max);
    let failures = outcomes.iter().filter(|o| !o.pass).count();
    Ok(SuiteReport {
        identity: check.name(),
        anchor: check.anchor(),
        n,
        instances: outcomes.len(),
        max_abs_deviation,
        exact: outcomes.iter().all(|o| o.exact),
        failures,
        pass: failures == 0,
        convention: outcomes.iter().find_map(|o| o.convention.clone()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names() {
        let names: Vec<_> = registry().iter().map(|c| c.name()).collect();
        assert_eq!(names, ["str_exp", "odd_vanish", "grand_identity", "pf_expansion"]);
        assert!(lookup("nope").is_err());
    }

    #[test]
    fn small_suites_pass() {
        for c in registry() {
            let r = run_check(c.as_ref(), 2, 3, 7).unwrap();
            assert!(r.pass && r.exact && r.max_abs_deviation == 0.0, "{r:?}");
            let r = run_check(c.as_ref(), 4, 3, 7).unwrap();
            assert!(r.pass && r.exact, "{r:?}");
        }
    }

    #[test]
    fn deterministic_batches() {
        let a = run_check(&StrExp, 4, 4, 99).unwrap();
        let b = run_check(&StrExp, 4, 4, 99).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(run_check(&StrExp, 3, 1, 0).is_err());
        assert!(run_check(&GrandIdentity, 6, 1, 0).is_err());
    }
}
