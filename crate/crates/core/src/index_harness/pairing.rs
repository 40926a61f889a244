//! The cochain pairing `tau(psi)` and its small-t limit.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra_core::{ExtElem, IndexSet, Scalar};
use crate::charclass::{a_hat, chern_character, EndForm, EvenMatrix, SkewMat};
use crate::error::{Error, Result};

use super::cochain::{signed_permutations, Cochain, CochainKind};
use super::decay::measured_decay;
use super::graded::GradedMatrix;
use super::kernel::{block_norm, pair_block, KernelBlock, SiteKernel};
use super::linalg::{cmul, CMat};
use super::models::ModelOperator;
use super::wassermann::WassermannCalc;

/// Volume growth exponent of the lattice; zero for a compact model.
pub const R_M: f64 = 0.0;
/// Largest tuple count the brute-force path will enumerate.
pub const BRUTE_FORCE_LIMIT: usize = 20_000_000;
/// A t is safe when the spectral truncation tail `exp(-t^2 lambda_max)` is below this.
pub const SAFE_TAIL: f64 = 1e-2;
pub const DEFAULT_TOLERANCE: f64 = 0.05;
pub const DEFAULT_SWEEP: [f64; 6] = [1.0, 0.7, 0.5, 0.35, 0.25, 0.2];

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GrowthCheck {
    pub degree: usize,
    pub v: f64,
    /// Measured decay rate of the kernel.
    pub u: f64,
    pub r_m: f64,
    /// `degree v - u + r_m`; admissible when negative.
    pub margin: f64,
    pub ok: bool,
}

pub fn growth_check(psi: &Cochain, u: f64) -> GrowthCheck {
    let degree = psi.degree();
    let margin = degree as f64 * psi.growth - u + R_M;
    GrowthCheck { degree, v: psi.growth, u, r_m: R_M, margin, ok: margin < 0.0 }
}

fn require(check: GrowthCheck) -> Result<()> {
    if check.ok {
        Ok(())
    } else {
        Err(Error::Growth(format!(
            "q v - u = {} * {:.4} - {:.4} = {:.4} is not below -r_M = {}",
            check.degree,
            check.v,
            check.u,
            check.degree as f64 * check.v - check.u,
            0.0 - check.r_m
        )))
    }
}

/// `tau(psi)(A)` after checking the growth condition against the kernel's measured decay.
pub fn tau_pairing(psi: &Cochain, k: &SiteKernel) -> Result<Complex64> {
    let fit = measured_decay(k)?;
    require(growth_check(psi, -fit.slope))?;
    tau_value(psi, k)
}

/// `tau(psi)(A)` without the growth check.
pub fn tau_value(psi: &Cochain, k: &SiteKernel) -> Result<Complex64> {
    match &psi.kind {
        CochainKind::Constant(c) => Ok(k.a.trace() * *c),
        CochainKind::Antisymmetrized { .. } => tau_separable(psi, k),
        CochainKind::Function(_) => tau_brute_force(psi, k),
    }
}

fn multiplier(frame: &CMat, values: &[f64], weights: &[f64]) -> CMat {
    let scaled = CMat::from_fn(frame.nrows(), frame.ncols(), |s, c| frame[(s, c)] * (values[s] * weights[s]));
    cmul(&frame.adjoint(), &scaled)
}

/// Product cochains: `sum_sigma sgn(sigma) Tr(M_s0 A M_s1 A ... M_sq A)` with
/// `M_f = F* diag(f mu) F`.
fn tau_separable(psi: &Cochain, k: &SiteKernel) -> Result<Complex64> {
    let vals = psi.factor_values(&k.geometry).ok_or_else(|| Error::InvalidConfig("cochain is not separable".into()))?;
    let w = &k.geometry.weights;
    let dims = k.a.dims();
    let mults: Vec<GradedMatrix> = vals
        .iter()
        .map(|f| {
            GradedMatrix::new(
                multiplier(&k.frame_plus, f, w),
                CMat::zeros(dims.plus, dims.minus),
                CMat::zeros(dims.minus, dims.plus),
                multiplier(&k.frame_minus, f, w),
            )
        })
        .collect::<Result<_>>()?;
    let ma: Vec<GradedMatrix> = mults.iter().map(|m| m.mul(&k.a)).collect::<Result<_>>()?;
    let arity = psi.arity;
    // cyclic rotations are even permutations for odd arity, so fix sigma(0) = 0
    let reduce = arity % 2 == 1;
    let perms: Vec<(Vec<usize>, f64)> = signed_permutations(arity).into_iter().filter(|(p, _)| !reduce || p[0] == 0).collect();
    let terms: Vec<Complex64> = perms
        .par_iter()
        .map(|(p, sign)| {
            let mut prod = ma[p[0]].clone();
            for &i in &p[1..] {
                prod = prod.mul(&ma[i])?;
            }
            Ok(prod.trace() * *sign)
        })
        .collect::<Result<_>>()?;
    let total: Complex64 = terms.iter().sum();
    Ok(if reduce { total * arity as f64 } else { total })
}

fn block_mul(a: &KernelBlock, b: &KernelBlock) -> KernelBlock {
    [a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]]
}

/// Direct sum over all site tuples; the reference path for small lattices.
pub fn tau_brute_force(psi: &Cochain, k: &SiteKernel) -> Result<Complex64> {
    let n = k.sites();
    let arity = psi.arity;
    let count = n.checked_pow(arity as u32).filter(|&c| c <= BRUTE_FORCE_LIMIT);
    let count = count.ok_or_else(|| Error::InvalidConfig(format!("{n}^{arity} tuples exceed the brute-force limit")))?;
    let blocks = k.full_blocks();
    let geom = &k.geometry;
    let partial: Vec<Complex64> = (0..n)
        .into_par_iter()
        .map(|x0| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut sites = vec![x0; arity];
            for rest in 0..count / n {
                let mut r = rest;
                for slot in (1..arity).rev() {
                    sites[slot] = r % n;
                    r /= n;
                }
                let psi_v = psi.eval(geom, &sites)?;
                if psi_v == 0.0 {
                    continue;
                }
                let mut prod = pair_block(&blocks, sites[0], sites[1 % arity]);
                for i in 1..arity {
                    prod = block_mul(&prod, &pair_block(&blocks, sites[i], sites[(i + 1) % arity]));
                }
                let mu: f64 = sites.iter().map(|&s| geom.weights[s]).product();
                acc += (prod[0] + prod[3]) * (psi_v * mu);
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(partial.iter().sum())
}

/// Curvature 2-form of the model's coefficient line bundle.
pub fn model_curvature(op: &ModelOperator) -> Result<ExtElem> {
    match op.model {
        "torus" => {
            let area: f64 = op.geometry.periods.iter().product();
            // connection d + iA with dA = -(2 pi k / area) dx ^ dy
            let c = 2.0 * PI * op.charge as f64 / area;
            Ok(ExtElem::monomial(2, IndexSet::full(2), Scalar::complex(0.0, -c)))
        }
        _ => Err(Error::InvalidConfig(format!("the {} model has no even-dimensional density", op.model))),
    }
}

/// `(-1)^(n/2 - q) (2 pi i)^(n/2 - 2q) q! / (2q)!`.
pub fn density_prefactor(n: usize, q: usize) -> Complex64 {
    let sign = if (n / 2 + q) % 2 == 0 { 1.0 } else { -1.0 };
    let fact = |m: usize| (1..=m).map(|i| i as f64).product::<f64>();
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    two_pi_i.powi(n as i32 / 2 - 2 * q as i32) * (sign * fact(q) / fact(2 * q))
}

#[derive(Clone, Debug, Serialize)]
pub struct TargetDensity {
    pub n: usize,
    pub q: usize,
    pub prefactor: (f64, f64),
    /// `sum_x mu(x) top(A-hat ^ ch ^ omega_psi)(x)`.
    pub integral: (f64, f64),
    pub value: (f64, f64),
}

/// The small-t limit predicted by the local index density, with
/// `omega_psi = sum_sigma sgn(sigma) f_s0 df_s1 ^ ... ^ df_s2q` from exact derivatives.
pub fn target_density(psi: &Cochain, op: &ModelOperator) -> Result<TargetDensity> {
    let factors = match &psi.kind {
        CochainKind::Antisymmetrized { factors, weight: None } => factors,
        _ => return Err(Error::InvalidConfig("the density target needs an unweighted product cochain".into())),
    };
    let n = op.geometry.dim();
    let deg = psi.degree();
    if n % 2 == 1 || deg % 2 == 1 || deg == 0 || deg > n {
        return Err(Error::InvalidConfig(format!("no density term for cochain degree {deg} in dimension {n}")));
    }
    let q = deg / 2;
    let ahat = a_hat(&SkewMat::zero(n, n))?;
    let curv = model_curvature(op)?;
    let ch = chern_character(&EndForm::new(1, 0, EvenMatrix::from_fn(1, n, |_, _| curv.clone())?)?)?;
    let base = ahat.wedge(&ch)?;
    let grads: Vec<Vec<_>> = factors.iter().map(|f| (0..n).map(|a| f.partial(a)).collect()).collect();
    let perms = signed_permutations(psi.arity);
    let geom = &op.geometry;
    let per_site: Vec<Complex64> = (0..geom.len())
        .into_par_iter()
        .map(|s| {
            let x = &geom.positions[s];
            let mut omega = ExtElem::zero(n);
            for (p, sign) in &perms {
                let mut term = ExtElem::scalar(n, Scalar::real(sign * factors[p[0]].eval(x)));
                for &i in &p[1..] {
                    let mut df = ExtElem::zero(n);
                    for (a, g) in grads[i].iter().enumerate() {
                        df.add_term(IndexSet::from_indices(&[a + 1])?, Scalar::real(g.eval(x)));
                    }
                    term = term.wedge(&df)?;
                }
                omega.add_assign(&term);
            }
            Ok(base.wedge(&omega)?.berezin_top(n).to_c64() * geom.weights[s])
        })
        .collect::<Result<_>>()?;
    let integral: Complex64 = per_site.iter().sum();
    let pre = density_prefactor(n, q);
    let value = pre * integral;
    Ok(TargetDensity { n, q, prefactor: (pre.re, pre.im), integral: (integral.re, integral.im), value: (value.re, value.im) })
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub t: f64,
    pub tau: Option<(f64, f64)>,
    pub abs_err: Option<f64>,
    pub rel_err: Option<f64>,
    pub growth: GrowthCheck,
    pub refused: Option<String>,
    /// `exp(-t^2 lambda_max)`: weight of the heat flow left at the top of the truncated spectrum.
    pub truncation_tail: f64,
    pub safe: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexRow {
    pub t: f64,
    pub tau: f64,
    pub str_index: f64,
    /// Bitwise equality with the supertrace.
    pub equals_str_index: bool,
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub model: &'static str,
    pub charge: i64,
    pub sites: usize,
    pub target: TargetDensity,
    pub rows: Vec<SweepRow>,
    pub index_rows: Vec<IndexRow>,
    /// `|tau - target|` strictly decreasing as t decreases.
    pub monotone: bool,
    /// Smallest safe t in the grid; the calibrated point.
    pub calibrated_t: Option<f64>,
    pub calibrated_rel_err: Option<f64>,
    pub tolerance: f64,
    pub within_tolerance: bool,
}

/// `tau(psi)(Ind_t(D))` over a t-grid, compared against the density target,
/// plus the degree-0 pairing against the integer index.
pub fn pairing_limit_sweep(psi: &Cochain, op: &ModelOperator, t_grid: &[f64], tolerance: f64) -> Result<SweepReport> {
    if t_grid.is_empty() {
        return Err(Error::InvalidConfig("empty t grid".into()));
    }
    let target = target_density(psi, op)?;
    let tv = Complex64::new(target.value.0, target.value.1);
    let calc = WassermannCalc::new(&op.d)?;
    let top = calc.spectral_top();
    let one = Cochain::constant(1.0);
    let mut t_sorted = t_grid.to_vec();
    t_sorted.sort_by(|a, b| b.total_cmp(a));
    let results: Vec<(SweepRow, IndexRow)> = t_sorted
        .par_iter()
        .map(|&t| {
            let k = SiteKernel::new(calc.class(t)?, op)?;
            let fit = measured_decay(&k)?;
            let growth = growth_check(psi, -fit.slope);
            let tail = (-t * t * top).exp();
            let (tau, refused) = match require(growth) {
                Ok(()) => (Some(tau_value(psi, &k)?), None),
                Err(e) => (None, Some(e.to_string())),
            };
            let row = SweepRow {
                t,
                tau: tau.map(|z| (z.re, z.im)),
                abs_err: tau.map(|z| (z - tv).norm()),
                rel_err: tau.map(|z| (z - tv).norm() / tv.norm()),
                growth,
                refused,
                truncation_tail: tail,
                safe: tail <= SAFE_TAIL,
            };
            let s = calc.str_index(t)?;
            let q0 = tau_value(&one, &k)?.re;
            let idx = IndexRow { t, tau: q0, str_index: s, equals_str_index: q0.to_bits() == s.to_bits(), deviation: (q0 - op.charge as f64).abs() };
            Ok((row, idx))
        })
        .collect::<Result<_>>()?;
    let (rows, index_rows): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let errs: Vec<Option<f64>> = rows.iter().map(|r| r.abs_err).collect();
    let monotone = errs.iter().all(Option::is_some) && errs.windows(2).all(|w| w[1] < w[0]);
    let calibrated = rows.iter().filter(|r| r.safe && r.tau.is_some()).last();
    let calibrated_rel_err = calibrated.and_then(|r| r.rel_err);
    Ok(SweepReport {
        model: op.model,
        charge: op.charge,
        sites: op.geometry.len(),
        target,
        monotone,
        calibrated_t: calibrated.map(|r| r.t),
        calibrated_rel_err,
        tolerance,
        within_tolerance: calibrated_rel_err.is_some_and(|e| e <= tolerance),
        rows,
        index_rows,
    })
}

/// Largest `|K(x, y)|` over pairs at distance at least `d`; a crude locality probe.
pub fn far_field(k: &SiteKernel, d: f64) -> f64 {
    let blocks = k.full_blocks();
    let n = k.sites();
    let mut m = 0.0f64;
    for x in 0..n {
        for y in 0..n {
            if k.geometry.distance(x, y) >= d {
                m = m.max(block_norm(&pair_block(&blocks, x, y)));
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_harness::cochain::{area_cochain, PlaneWaveFn};
    use crate::index_harness::models::{circle_dirac, torus_dirac};
    use std::sync::Arc;

    #[test]
    fn prefactor_values() {
        let p = density_prefactor(2, 1);
        assert!((p - Complex64::new(0.0, -1.0 / (4.0 * PI))).norm() < 1e-15);
        assert!((density_prefactor(2, 0) - Complex64::new(0.0, -2.0 * PI)).norm() < 1e-14);
    }

    #[test]
    fn area_target_closed_form() {
        let op = torus_dirac(8, 1).unwrap();
        let t = target_density(&area_cochain(), &op).unwrap();
        // int omega = 6 pi^2 for the default factors
        assert!((t.integral.0 - 6.0 * PI * PI).abs() < 1e-10 && t.integral.1.abs() < 1e-12, "{t:?}");
        assert!((t.value.1 + 1.5 * PI).abs() < 1e-10 && t.value.0.abs() < 1e-12);
    }

    #[test]
    fn separable_matches_brute_force() {
        let op = torus_dirac(6, 1).unwrap();
        let calc = WassermannCalc::new(&op.d).unwrap();
        let k = SiteKernel::new(calc.class(0.6).unwrap(), &op).unwrap();
        let psi = area_cochain();
        let fast = tau_value(&psi, &k).unwrap();
        let slow_psi = psi.clone();
        let g = op.geometry.clone();
        let as_fn = Cochain::from_fn(3, Arc::new(move |_, s: &[usize]| slow_psi.eval(&g, s).unwrap()), 0.0, true, true);
        let slow = tau_brute_force(&as_fn, &k).unwrap();
        assert!((fast - slow).norm() < 1e-10 * (1.0 + slow.norm()), "{fast} vs {slow}");
        // degree 1 exercises the unreduced permutation sum
        let psi1 = Cochain::antisymmetrized(vec![PlaneWaveFn::cos(&[1.0, 0.0]), PlaneWaveFn::sin(&[0.0, 1.0])]).unwrap();
        let g = op.geometry.clone();
        let p1 = psi1.clone();
        let as_fn1 = Cochain::from_fn(2, Arc::new(move |_, s: &[usize]| p1.eval(&g, s).unwrap()), 0.0, true, false);
        assert!((tau_value(&psi1, &k).unwrap() - tau_brute_force(&as_fn1, &k).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn constant_pairing_is_the_supertrace() {
        let op = circle_dirac(24, 2).unwrap();
        let calc = WassermannCalc::new(&op.d).unwrap();
        for t in [0.1, 0.5, 1.0] {
            let k = SiteKernel::new(calc.class(t).unwrap(), &op).unwrap();
            let v = tau_value(&Cochain::constant(1.0), &k).unwrap();
            assert_eq!(v.re.to_bits(), calc.str_index(t).unwrap().to_bits());
            assert_eq!(tau_value(&Cochain::constant(0.0), &k).unwrap(), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn growth_refusal() {
        let op = circle_dirac(32, 0).unwrap();
        let calc = WassermannCalc::new(&op.d).unwrap();
        let k = SiteKernel::new(calc.class(0.3).unwrap(), &op).unwrap();
        let u = -measured_decay(&k).unwrap().slope;
        assert!(u > 0.0);
        let psi = Cochain::antisymmetrized(vec![PlaneWaveFn::cos(&[1.0]), PlaneWaveFn::sin(&[1.0]), PlaneWaveFn::cos(&[2.0])]).unwrap();
        assert!(tau_pairing(&psi, &k).is_ok());
        let heavy = psi.with_growth(u, 0).unwrap();
        assert!(matches!(tau_pairing(&heavy, &k), Err(Error::Growth(_))));
    }
}
