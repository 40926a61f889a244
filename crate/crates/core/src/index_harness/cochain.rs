//! Multi-point cochains on a lattice.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

use super::geometry::LatticeGeometry;

/// `sum_j c_j cos(<a_j, x> + phi_j)`; closed under differentiation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlaneWaveFn {
    pub waves: Vec<Wave>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Wave {
    pub coef: f64,
    pub freq: Vec<f64>,
    pub phase: f64,
}

impl PlaneWaveFn {
    pub fn constant(dim: usize, c: f64) -> Self {
        PlaneWaveFn { waves: vec![Wave { coef: c, freq: vec![0.0; dim], phase: 0.0 }] }
    }

    pub fn cos(freq: &[f64]) -> Self {
        PlaneWaveFn { waves: vec![Wave { coef: 1.0, freq: freq.to_vec(), phase: 0.0 }] }
    }

    pub fn sin(freq: &[f64]) -> Self {
        PlaneWaveFn { waves: vec![Wave { coef: 1.0, freq: freq.to_vec(), phase: -std::f64::consts::FRAC_PI_2 }] }
    }

    /// Product of two such functions, expanded with `cos a cos b = (cos(a+b) + cos(a-b))/2`.
    pub fn mul(&self, o: &PlaneWaveFn) -> PlaneWaveFn {
        let mut waves = Vec::new();
        for a in &self.waves {
            for b in &o.waves {
                let c = a.coef * b.coef / 2.0;
                let plus: Vec<f64> = a.freq.iter().zip(&b.freq).map(|(x, y)| x + y).collect();
                let minus: Vec<f64> = a.freq.iter().zip(&b.freq).map(|(x, y)| x - y).collect();
                waves.push(Wave { coef: c, freq: plus, phase: a.phase + b.phase });
                waves.push(Wave { coef: c, freq: minus, phase: a.phase - b.phase });
            }
        }
        PlaneWaveFn { waves }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.waves.iter().map(|w| w.coef * (dot(&w.freq, x) + w.phase).cos()).sum()
    }

    /// Exact partial derivative along `axis`.
    pub fn partial(&self, axis: usize) -> PlaneWaveFn {
        let waves = self
            .waves
            .iter()
            .filter(|w| w.freq[axis] != 0.0)
            .map(|w| Wave { coef: w.coef * w.freq[axis], freq: w.freq.clone(), phase: w.phase + std::f64::consts::FRAC_PI_2 })
            .collect();
        PlaneWaveFn { waves }
    }

    pub fn sup_bound(&self) -> f64 {
        self.waves.iter().map(|w| w.coef.abs()).sum()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Exponential site weight `exp(v d(x, z0))`.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthWeight {
    pub v: f64,
    pub base_site: usize,
}

pub type CochainFn = Arc<dyn Fn(&LatticeGeometry, &[usize]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum CochainKind {
    /// The constant function on single points (degree 0).
    Constant(f64),
    /// `sum_sigma sgn(sigma) prod_i f_sigma(i)(x_i)`, optionally times `prod_i exp(v d(x_i, z0))`.
    Antisymmetrized { factors: Vec<PlaneWaveFn>, weight: Option<GrowthWeight> },
    /// Arbitrary evaluator; only usable on small lattices.
    Function(CochainFn),
}

impl std::fmt::Debug for CochainKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CochainKind::Constant(c) => write!(f, "Constant({c})"),
            CochainKind::Antisymmetrized { factors, weight } => write!(f, "Antisymmetrized({} factors, {weight:?})", factors.len()),
            CochainKind::Function(_) => write!(f, "Function"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Cochain {
    pub arity: usize,
    pub kind: CochainKind,
    /// Declared growth exponent.
    pub growth: f64,
    pub antisymmetric: bool,
    pub cyclic: bool,
}

/// Permutations of `0..n` with their signs, lexicographic order.
pub fn signed_permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, sign: f64, out: &mut Vec<(Vec<usize>, f64)>) {
        if rest.is_empty() {
            out.push((prefix.clone(), sign));
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            prefix.push(v);
            rec(prefix, rest, if i % 2 == 0 { sign } else { -sign }, out);
            prefix.pop();
            rest.insert(i, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..n).collect(), 1.0, &mut out);
    out
}

impl Cochain {
    pub fn constant(c: f64) -> Self {
        Cochain { arity: 1, kind: CochainKind::Constant(c), growth: 0.0, antisymmetric: true, cyclic: true }
    }

    pub fn antisymmetrized(factors: Vec<PlaneWaveFn>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidConfig("a cochain needs at least one factor".into()));
        }
        Ok(Cochain { arity: factors.len(), kind: CochainKind::Antisymmetrized { factors, weight: None }, growth: 0.0, antisymmetric: true, cyclic: true })
    }

    /// Multiply by `prod_i exp(v d(x_i, z0))`; the declared growth becomes `v`.
    pub fn with_growth(mut self, v: f64, base_site: usize) -> Result<Self> {
        match &mut self.kind {
            CochainKind::Antisymmetrized { weight, .. } => *weight = Some(GrowthWeight { v, base_site }),
            _ => return Err(Error::InvalidConfig("growth weights apply to antisymmetrized cochains".into())),
        }
        self.growth = v;
        Ok(self)
    }

    pub fn from_fn(arity: usize, f: CochainFn, growth: f64, antisymmetric: bool, cyclic: bool) -> Self {
        Cochain { arity, kind: CochainKind::Function(f), growth, antisymmetric, cyclic }
    }

    /// Degree `q` of a cochain on `q + 1` points.
    pub fn degree(&self) -> usize {
        self.arity - 1
    }

    /// Values of factor `i` (with the growth weight) at every site.
    pub fn factor_values(&self, geom: &LatticeGeometry) -> Option<Vec<Vec<f64>>> {
        match &self.kind {
            CochainKind::Antisymmetrized { factors, weight } => Some(
                factors
                    .iter()
                    .map(|f| {
                        (0..geom.len())
                            .map(|s| {
                                let w = weight.as_ref().map(|g| (g.v * geom.distance(s, g.base_site)).exp()).unwrap_or(1.0);
                                f.eval(&geom.positions[s]) * w
                            })
                            .collect()
                    })
                    .collect(),
            ),
            _ => None,
        }
    }

    pub fn eval(&self, geom: &LatticeGeometry, sites: &[usize]) -> Result<f64> {
        if sites.len() != self.arity {
            return Err(Error::Shape(format!("{} sites for a cochain on {} points", sites.len(), self.arity)));
        }
        Ok(match &self.kind {
            CochainKind::Constant(c) => *c,
            CochainKind::Antisymmetrized { factors, weight } => {
                let vals: Vec<Vec<f64>> = factors.iter().map(|f| sites.iter().map(|&s| f.eval(&geom.positions[s])).collect()).collect();
                let mut acc = 0.0;
                for (perm, sign) in signed_permutations(self.arity) {
                    acc += sign * perm.iter().enumerate().map(|(slot, &fi)| vals[fi][slot]).product::<f64>();
                }
                let w: f64 = weight.as_ref().map(|g| sites.iter().map(|&s| (g.v * geom.distance(s, g.base_site)).exp()).product()).unwrap_or(1.0);
                acc * w
            }
            CochainKind::Function(f) => f(geom, sites),
        })
    }

    /// Verify the declared symmetries on random tuples; returns the largest violation.
    pub fn check_symmetry(&self, geom: &LatticeGeometry, samples: usize, rng: &mut impl Rng) -> Result<f64> {
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let sites: Vec<usize> = (0..self.arity).map(|_| rng.gen_range(0..geom.len())).collect();
            let base = self.eval(geom, &sites)?;
            let scale = 1.0f64.max(base.abs());
            if self.antisymmetric && self.arity > 1 {
                let (i, j) = (rng.gen_range(0..self.arity), rng.gen_range(0..self.arity));
                if i != j {
                    let mut s = sites.clone();
                    s.swap(i, j);
                    worst = worst.max((self.eval(geom, &s)? + base).abs() / scale);
                }
            }
            if self.cyclic {
                let mut s = sites.clone();
                s.rotate_left(1);
                let sign = if self.degree() % 2 == 0 { 1.0 } else { -1.0 };
                worst = worst.max((self.eval(geom, &s)? - sign * base).abs() / scale);
            }
        }
        Ok(worst)
    }

    /// `sup |psi| exp(-v sum_i d(x_i, z0))` over random tuples.
    pub fn growth_sup(&self, geom: &LatticeGeometry, base_site: usize, samples: usize, rng: &mut impl Rng) -> Result<f64> {
        let mut sup = 0.0f64;
        for _ in 0..samples {
            let sites: Vec<usize> = (0..self.arity).map(|_| rng.gen_range(0..geom.len())).collect();
            let damp: f64 = sites.iter().map(|&s| geom.distance(s, base_site)).sum::<f64>() * self.growth;
            sup = sup.max(self.eval(geom, &sites)?.abs() * (-damp).exp());
        }
        Ok(sup)
    }
}

/// The cochain used for the degree-2 pairing: antisymmetrization of
/// `cos x cos y (x) sin x (x) sin y`.
pub fn area_cochain() -> Cochain {
    let f0 = PlaneWaveFn::cos(&[1.0, 0.0]).mul(&PlaneWaveFn::cos(&[0.0, 1.0]));
    Cochain::antisymmetrized(vec![f0, PlaneWaveFn::sin(&[1.0, 0.0]), PlaneWaveFn::sin(&[0.0, 1.0])]).expect("three factors")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn permutations() {
        let p = signed_permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p.iter().map(|x| x.1).sum::<f64>(), 0.0);
        assert_eq!(p[1], (vec![0, 2, 1], -1.0));
    }

    #[test]
    fn waves() {
        let f = PlaneWaveFn::cos(&[1.0, 0.0]).mul(&PlaneWaveFn::sin(&[0.0, 2.0]));
        let x = [0.3, -1.1];
        assert!((f.eval(&x) - 0.3f64.cos() * (-2.2f64).sin()).abs() < 1e-15);
        let dy = f.partial(1);
        assert!((dy.eval(&x) - 0.3f64.cos() * 2.0 * (-2.2f64).cos()).abs() < 1e-14);
        assert!((f.partial(0).eval(&x) + 0.3f64.sin() * (-2.2f64).sin()).abs() < 1e-15);
    }

    #[test]
    fn area_cochain_symmetry() {
        let g = LatticeGeometry::uniform(&[std::f64::consts::TAU; 2], 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = area_cochain();
        assert!(c.check_symmetry(&g, 100, &mut rng).unwrap() < 1e-13);
        let bad = Cochain::from_fn(3, Arc::new(|_, s: &[usize]| s[0] as f64), 0.0, true, true);
        assert!(bad.check_symmetry(&g, 100, &mut rng).unwrap() > 0.1);
        let grown = area_cochain().with_growth(2.0, 0).unwrap();
        assert!(grown.growth_sup(&g, 0, 100, &mut rng).unwrap() <= 6.0 + 1e-12);
    }
}
