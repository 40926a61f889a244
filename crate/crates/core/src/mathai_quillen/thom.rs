//! Thom representatives built from supertraces, their fiber integrals and closedness.

use rand::Rng;
use serde::Serialize;

use crate::algebra_core::{eps, ExtElem, IndexSet, Scalar};
use crate::charclass::{a_hat, equivariant_curvature, pf_sub, EquivCurvatureData, SkewMat};
use crate::clifford::CliffElem;
use crate::error::{Error, Result};

use super::fiber::{fiber_integral, FiberForm, FiberIntegral, FiberMono, Weight};
use super::identities::{half_quadratic, j_dot_gamma};
use super::profile::RadialProfile;

fn require_even(n: usize) -> Result<()> {
    if n % 2 == 1 || n == 0 {
        Err(Error::InvalidConfig("n must be even".into()))
    } else {
        Ok(())
    }
}

/// `J_i = dx_i + sum_l theta_il x_l`; `theta` is row-major with odd base entries.
pub fn j_forms(n: usize, base_gens: usize, theta: Option<&[ExtElem]>) -> Result<Vec<FiberForm>> {
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let mut j = FiberForm::dx(n, base_gens, i);
        if let Some(t) = theta {
            if t.len() != n * n {
                return Err(Error::Shape(format!("connection has {} entries, expected {}", t.len(), n * n)));
            }
            for l in 1..=n {
                let e = &t[(i - 1) * n + (l - 1)];
                if e.is_zero() {
                    continue;
                }
                if !e.is_odd() {
                    return Err(Error::InvalidConfig("connection entries must be 1-forms".into()));
                }
                j = j.add(&FiberForm::coord(n, l, e.clone()))?;
            }
        }
        out.push(j);
    }
    Ok(out)
}

fn j_power(js: &[FiberForm], set: IndexSet, base_gens: usize) -> Result<FiberForm> {
    let n = js.len();
    let mut p = FiberForm::constant(n, ExtElem::one(base_gens));
    for i in set.indices() {
        p = p.mul(&js[i - 1])?;
    }
    Ok(p)
}

/// Replace the first n generators of `e` by the fiber forms `js`; the rest
/// are base generators.
pub fn substitute_j(e: &ExtElem, js: &[FiberForm], base_gens: usize) -> Result<FiberForm> {
    let n = js.len();
    let jmask = IndexSet::full(n);
    let mut out = FiberForm::zero(n, base_gens, Weight::Polynomial);
    for (set, c) in e.terms() {
        let jpart = set.intersect(jmask);
        let base = IndexSet(set.minus(jmask).0 >> n);
        let beta = ExtElem::monomial(base_gens, base, c.clone());
        let term = j_power(js, jpart, base_gens)?.mul(&FiberForm::constant(n, beta))?;
        out = out.add(&term)?;
    }
    Ok(out)
}

/// Gaussian representative `pi^{-n/2} e^{-|x|^2} sum_I eps(I^c, I) Pf(-W_{I^c}/2) J^I`.
pub fn gaussian_thom(omega: &SkewMat, theta: Option<&[ExtElem]>) -> Result<FiberForm> {
    let n = omega.n();
    require_even(n)?;
    let bg = omega.gens();
    let js = j_forms(n, bg, theta)?;
    let half = omega.scale(&Scalar::ratio(-1, 2));
    let full = IndexSet::full(n);
    let mut u = FiberForm::zero(n, bg, Weight::Polynomial);
    for i in full.subsets() {
        let ic = full.minus(i);
        if ic.len() % 2 == 1 {
            continue;
        }
        let pf = pf_sub(&half, ic);
        if pf.is_zero() {
            continue;
        }
        let s = ic.merge_sign(i);
        let term = j_power(&js, i, bg)?.mul_base_even(&pf.scale(&Scalar::int(s as i64)))?;
        u = u.add(&term)?;
    }
    Ok(u.with_weight(Weight::Gaussian).with_pi_power(-(n as i32) / 2))
}

/// Transgression form B with `dB = U_0` away from the zero section.
///
/// Each t-integral `int_0^inf t^{|I|} e^{-t^2 r^2} dt = ((|I|-1)/2)! / (2 r^{|I|+1})`
/// is resolved in closed form.
pub fn transgression(omega: &SkewMat, theta: Option<&[ExtElem]>) -> Result<FiberForm> {
    let n = omega.n();
    require_even(n)?;
    let bg = omega.gens();
    let js = j_forms(n, bg, theta)?;
    let half = omega.scale(&Scalar::ratio(1, 2));
    let full = IndexSet::full(n);
    // -(-1)^{n/2} from (-pi)^{-n/2} and the orientation of the transgression
    let outer = if (n / 2) % 2 == 0 { -1 } else { 1 };
    let mut b = FiberForm::zero(n, bg, Weight::Polynomial);
    for k in 1..=n {
        let kset = IndexSet::single(k);
        for i in full.minus(kset).subsets() {
            if i.len() % 2 == 0 {
                continue;
            }
            let ip = full.minus(i.union(kset));
            let e1 = eps(i.union(kset), ip, n);
            let e2 = kset.merge_sign(i);
            let pf = pf_sub(&half, ip);
            if e1 == 0 || e2 == 0 || pf.is_zero() {
                continue;
            }
            let m = (i.len() + 1) / 2;
            let sign = if m % 2 == 0 { 1 } else { -1 };
            let fact: i64 = (1..m as i64).product();
            let coeff = Scalar::ratio(outer * sign * e1 as i64 * e2 as i64 * fact, 2);
            let mut mono = FiberMono::plain(n, IndexSet::EMPTY);
            mono.x[k - 1] = 1;
            mono.r_inv = m as u16;
            let mut xk = FiberForm::zero(n, bg, Weight::Polynomial);
            xk.add_term(mono, ExtElem::scalar(bg, coeff));
            let term = xk.mul(&j_power(&js, i, bg)?)?.mul_base_even(&pf)?;
            b = b.add(&term)?;
        }
    }
    Ok(b.with_pi_power(-(n as i32) / 2))
}

/// `chi U_0 + d(chi) B` for a compact profile chi = f(|x|^2).
pub fn compact_thom(omega: &SkewMat, theta: Option<&[ExtElem]>) -> Result<FiberForm> {
    let n = omega.n();
    require_even(n)?;
    let bg = omega.gens();
    let mut u0 = FiberForm::zero(n, bg, Weight::Profile).with_pi_power(-(n as i32) / 2);
    u0.add_term(FiberMono::plain(n, IndexSet::EMPTY), crate::charclass::pfaffian(&omega.scale(&Scalar::ratio(-1, 2))));
    let mut dchi = FiberForm::zero(n, bg, Weight::Profile);
    for j in 1..=n {
        let mut m = FiberMono::plain(n, IndexSet::single(j));
        m.x[j - 1] = 1;
        m.f_deriv = 1;
        dchi.add_term(m, ExtElem::scalar(bg, Scalar::int(2)));
    }
    u0.add(&dchi.mul(&transgression(omega, theta)?)?)
}

/// Thom representative for `Omega(X)` with the given profile.
pub fn thom_form(data: &EquivCurvatureData, x: &str, profile: &RadialProfile) -> Result<FiberForm> {
    let w = equivariant_curvature(data, x)?;
    match profile {
        RadialProfile::Gaussian => gaussian_thom(&w, None),
        RadialProfile::Compact { .. } => compact_thom(&w, None),
    }
}

/// Gaussian representative obtained by expanding `A-hat(W) Str(exp(1/4 g^t W g + J^t g))`
/// in the Clifford algebra, normalized by `(-pi)^{-n/2} (2i)^{-n/2}`.
pub fn gaussian_thom_by_expansion(omega: &SkewMat, theta: Option<&[ExtElem]>) -> Result<FiberForm> {
    let n = omega.n();
    require_even(n)?;
    let bg = omega.gens();
    let gens = n + bg;
    let ch = spinor_supertrace(omega)?;
    let ah = a_hat(omega)?.shifted(n, gens);
    let two_i_inv = Scalar::gauss(crate::algebra_core::rat(0, 1), crate::algebra_core::rat(-1, 2));
    let mut c = two_i_inv.powi(n as u32 / 2);
    if (n / 2) % 2 == 1 {
        c = -c;
    }
    let body = (&ah * &ch).scale(&c);
    let js = j_forms(n, bg, theta)?;
    Ok(substitute_j(&body, &js, bg)?.with_weight(Weight::Gaussian).with_pi_power(-(n as i32) / 2))
}

/// `Str(exp(1/4 g^t W g + J^t g))` with abstract odd J on the first n generators.
pub fn spinor_supertrace(omega: &SkewMat) -> Result<ExtElem> {
    let n = omega.n();
    let bg = omega.gens();
    let gens = n + bg;
    let upper: Vec<ExtElem> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| omega.get(i, j).shifted(n, gens).scale(&Scalar::ratio(1, 2)))
        .collect();
    let w = SkewMat::from_upper(n, gens, &upper)?;
    let x: CliffElem = half_quadratic(&w).add(&j_dot_gamma(n, gens)?)?;
    Ok(x.exp(1e-17)?.str())
}

/// Graded derivation of the exterior algebra determined by its values on generators.
pub fn derivation(e: &ExtElem, images: &[ExtElem]) -> Result<ExtElem> {
    let gens = e.gens();
    if images.len() != gens {
        return Err(Error::Shape(format!("{} generator images for {gens} generators", images.len())));
    }
    let mut out = ExtElem::zero(gens);
    for (set, c) in e.terms() {
        let idx = set.indices();
        for (pos, &g) in idx.iter().enumerate() {
            let before = IndexSet::from_indices(&idx[..pos])?;
            let after = IndexSet::from_indices(&idx[pos + 1..])?;
            let sign = if pos % 2 == 0 { c.clone() } else { -c.clone() };
            let left = ExtElem::monomial(gens, before, sign);
            let right = ExtElem::monomial(gens, after, Scalar::one());
            out.add_assign(&(&(&left * &images[g - 1]) * &right));
        }
    }
    Ok(out)
}

/// Chevalley-Eilenberg differential of su(2): `d e^a = -1/2 eps_abc e^b e^c`.
pub fn su2_differential(e: &ExtElem) -> Result<ExtElem> {
    let m = |a: usize, b: usize| ExtElem::monomial(3, IndexSet::from_indices(&[a, b]).expect("in range"), Scalar::int(-1));
    derivation(e, &[m(2, 3), -&m(1, 3), m(1, 2)])
}

/// Random left-invariant so(n) connection on SU(2) with small rational coefficients.
pub fn random_su2_connection(n: usize, rng: &mut impl Rng) -> Vec<ExtElem> {
    let mut t = vec![ExtElem::zero(3); n * n];
    for i in 0..n {
        for l in i + 1..n {
            let mut e = ExtElem::zero(3);
            for a in 1..=3 {
                e.add_term(IndexSet::single(a), Scalar::ratio(rng.gen_range(-3i64..=3), rng.gen_range(1i64..=2)));
            }
            t[l * n + i] = -&e;
            t[i * n + l] = e;
        }
    }
    t
}

/// Curvature of `J = dx + theta x` in the sign convention of the Thom formula:
/// `-(d theta + theta ^ theta)`, because the fiber generators square to +1.
pub fn connection_curvature(theta: &[ExtElem], n: usize, d: &dyn Fn(&ExtElem) -> Result<ExtElem>) -> Result<SkewMat> {
    let gens = theta[0].gens();
    let mut upper = Vec::new();
    for i in 0..n {
        for l in i + 1..n {
            let mut e = d(&theta[i * n + l])?;
            for m in 0..n {
                e.add_assign(&(&theta[i * n + m] * &theta[m * n + l]));
            }
            upper.push(e);
        }
    }
    Ok(SkewMat::from_upper(n, gens, &upper)?.scale(&Scalar::int(-1)))
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosednessReport {
    pub n: usize,
    pub terms: usize,
    pub residual_terms: usize,
    pub closed: bool,
}

/// Total d of the Gaussian representative over an SU(2) base with a random connection.
pub fn check_thom_closed(n: usize, rng: &mut impl Rng) -> Result<ClosednessReport> {
    require_even(n)?;
    let theta = random_su2_connection(n, rng);
    let w = connection_curvature(&theta, n, &su2_differential)?;
    let u = gaussian_thom(&w, Some(&theta))?;
    let du = u.total_d(&su2_differential)?;
    Ok(ClosednessReport { n, terms: u.len(), residual_terms: du.len(), closed: du.is_zero() })
}

#[derive(Clone, Debug, Serialize)]
pub struct ThomReport {
    pub profile: RadialProfile,
    pub n: usize,
    pub sample: String,
    pub integral_re: f64,
    pub integral_im: f64,
    pub exact: bool,
    pub deviation: f64,
    pub pass: bool,
}

/// Fiber integral of the Thom representative, compared with 1.
pub fn check_thom_normalization(data: &EquivCurvatureData, x: &str, profile: &RadialProfile, tol: f64) -> Result<ThomReport> {
    let u = thom_form(data, x, profile)?;
    let fi = fiber_integral(&u, profile)?;
    let v = fi.to_ext();
    let one = ExtElem::one(v.gens());
    let exact = fi.pi_power == 0 && v.is_exact();
    let deviation = v.dist(&one);
    let pass = if exact { v == one } else { deviation < tol };
    let s = v.scalar_part().to_c64();
    Ok(ThomReport {
        profile: *profile,
        n: data.omega.n(),
        sample: x.to_string(),
        integral_re: s.re,
        integral_im: s.im,
        exact,
        deviation,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RiemannRochReport {
    pub n: usize,
    /// The fiber integral is `value * pi^pi_power`.
    pub value_re: String,
    pub value_im: String,
    pub pi_power: i32,
    pub expected_re: String,
    pub expected_im: String,
    pub thom_integral: String,
    pub pass: bool,
}

/// Flat case: integral over the fiber of `Str(exp(-|x|^2 + dx^t g))` against `(-2 pi i)^{n/2}`.
pub fn riemann_roch_flat_check(n: usize) -> Result<RiemannRochReport> {
    require_even(n)?;
    let w = SkewMat::zero(n, 0);
    let ch = spinor_supertrace(&w)?;
    let js = j_forms(n, 0, None)?;
    let form = substitute_j(&ch, &js, 0)?.with_weight(Weight::Gaussian);
    let fi: FiberIntegral = fiber_integral(&form, &RadialProfile::Gaussian)?;
    let thom = fiber_integral(&gaussian_thom(&w, None)?, &RadialProfile::Gaussian)?;
    let minus_two_i = Scalar::gauss(crate::algebra_core::rat(0, 1), crate::algebra_core::rat(-2, 1));
    let expected = minus_two_i.powi(n as u32 / 2);
    let got = fi.value.scalar_part();
    let thom_one = thom.pi_power == 0 && thom.value == ExtElem::one(0);
    Ok(RiemannRochReport {
        n,
        value_re: got.re_string(),
        value_im: got.im_string(),
        pi_power: fi.pi_power,
        expected_re: expected.re_string(),
        expected_im: expected.im_string(),
        thom_integral: if thom_one { "1".into() } else { format!("{:?}", thom.value) },
        pass: fi.pi_power == n as i32 / 2 && got == expected && fi.value.len() <= 1 && thom_one,
    })
}

/// Random real skew moment rescaled to spectral radius `radius`.
pub fn random_moment(n: usize, radius: f64, rng: &mut impl Rng) -> Result<SkewMat> {
    let upper: Vec<ExtElem> = (0..n * (n - 1) / 2).map(|_| ExtElem::scalar(0, Scalar::real(rng.gen::<f64>() - 0.5))).collect();
    let w = SkewMat::from_upper(n, 0, &upper)?;
    let r = w.matrix().numeric_spectral_radius();
    if r == 0.0 {
        return Ok(w);
    }
    Ok(w.scale(&Scalar::real(radius / r)))
}

#[derive(Clone, Debug, Serialize)]
pub struct ThomSuiteReport {
    pub n: usize,
    pub samples: usize,
    pub checks: Vec<ThomReport>,
    /// Largest difference between profiles at the same sample.
    pub profile_spread: f64,
    pub pass: bool,
}

/// Fiber integrals at `X = 0` and `samples` random moments of spectral radius
/// below pi, for every profile; profiles must agree with each other.
pub fn thom_suite(n: usize, samples: usize, seed: u64, profiles: &[RadialProfile], tol: f64) -> Result<ThomSuiteReport> {
    require_even(n)?;
    if profiles.is_empty() {
        return Err(Error::InvalidConfig("no profiles given".into()));
    }
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let mut data = EquivCurvatureData::new(SkewMat::zero(n, 0));
    let mut tokens = vec!["0".to_string()];
    for k in 0..samples {
        let radius = std::f64::consts::PI * rng.gen_range(0.05..0.95);
        let token = format!("X{k}");
        data = data.with_moment(&token, random_moment(n, radius, &mut rng)?)?;
        tokens.push(token);
    }
    let mut checks = Vec::new();
    let mut spread = 0.0f64;
    for token in &tokens {
        let row: Vec<ThomReport> = profiles.iter().map(|p| check_thom_normalization(&data, token, p, tol)).collect::<Result<_>>()?;
        for a in &row {
            for b in &row {
                spread = spread.max((a.integral_re - b.integral_re).hypot(a.integral_im - b.integral_im));
            }
        }
        checks.extend(row);
    }
    let pass = checks.iter().all(|c| c.pass) && spread < tol.max(1e-12) * 2.0;
    Ok(ThomSuiteReport { n, samples, checks, profile_spread: spread, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charclass::EquivCurvatureData;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn numeric_skew(n: usize, rng: &mut impl Rng, scale: f64) -> SkewMat {
        let upper: Vec<ExtElem> =
            (0..n * (n - 1) / 2).map(|_| ExtElem::scalar(0, Scalar::real(scale * (rng.gen::<f64>() - 0.5)))).collect();
        SkewMat::from_upper(n, 0, &upper).unwrap()
    }

    #[test]
    fn flat_gaussian_top_component() {
        for n in [2, 4] {
            let u = gaussian_thom(&SkewMat::zero(n, 0), None).unwrap();
            assert_eq!(u.len(), 1);
            let (m, c) = u.terms().next().unwrap();
            assert_eq!(m.dx, IndexSet::full(n));
            assert_eq!(c, &ExtElem::one(0));
            assert_eq!(u.pi_power, -(n as i32) / 2);
        }
    }

    #[test]
    fn closed_form_matches_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2, 4] {
            let theta = random_su2_connection(n, &mut rng);
            let w = connection_curvature(&theta, n, &su2_differential).unwrap();
            let a = gaussian_thom(&w, Some(&theta)).unwrap();
            let b = gaussian_thom_by_expansion(&w, Some(&theta)).unwrap();
            assert_eq!(a, b, "n={n}");
        }
    }

    #[test]
    fn su2_differential_squares_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let theta = random_su2_connection(3, &mut rng);
        for t in &theta {
            let dd = su2_differential(&su2_differential(t).unwrap()).unwrap();
            assert!(dd.is_zero());
        }
        let top = ExtElem::monomial(3, IndexSet::full(3), Scalar::one());
        assert!(su2_differential(&top).unwrap().is_zero());
    }

    #[test]
    fn gaussian_thom_is_closed() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in [2, 4] {
            let r = check_thom_closed(n, &mut rng).unwrap();
            assert!(r.closed, "{r:?}");
        }
    }

    #[test]
    fn normalization_both_profiles() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for n in [2, 4] {
            for _ in 0..3 {
                let w = numeric_skew(n, &mut rng, 2.0);
                let data = EquivCurvatureData::new(SkewMat::zero(n, 0)).with_moment("X", w).unwrap();
                for p in [RadialProfile::Gaussian, RadialProfile::default_compact(), RadialProfile::compact(0.5, 3.0).unwrap()] {
                    let r = check_thom_normalization(&data, "X", &p, 1e-9).unwrap();
                    assert!(r.pass, "{r:?}");
                    if p == RadialProfile::Gaussian {
                        assert!(r.exact);
                    }
                }
            }
        }
    }

    #[test]
    fn origin_value_is_pfaffian() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let w = numeric_skew(4, &mut rng, 2.0);
        let expect = crate::charclass::pfaffian(&w.scale(&Scalar::real(-1.0 / (2.0 * std::f64::consts::PI))));
        let data = EquivCurvatureData::new(SkewMat::zero(4, 0)).with_moment("X", w).unwrap();
        for p in [RadialProfile::Gaussian, RadialProfile::default_compact()] {
            let u = thom_form(&data, "X", &p).unwrap().fiber_degree(0);
            let v = u.eval(&[0.0; 4], &p).unwrap().scalar_part();
            assert!(v.dist(&expect.scalar_part()) < 1e-14, "{v} vs {expect}");
        }
    }

    #[test]
    fn compact_thom_closed_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for n in [2, 4] {
            let theta = random_su2_connection(n, &mut rng);
            let w = connection_curvature(&theta, n, &su2_differential).unwrap();
            let p = RadialProfile::default_compact();
            let u = compact_thom(&w, Some(&theta)).unwrap();
            let du = u.total_d(&su2_differential).unwrap();
            for _ in 0..20 {
                // points in the transition annulus, where d(chi) is nonzero
                let dir: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
                let r = rng.gen_range(1.3..1.8);
                let x: Vec<f64> = dir.iter().map(|v| v * r / norm).collect();
                assert!(u.eval(&x, &p).unwrap().max_abs() > 1e-3);
                assert!(du.eval(&x, &p).unwrap().max_abs() < 1e-10);
            }
        }
    }

    #[test]
    fn flat_riemann_roch() {
        let r = riemann_roch_flat_check(2).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!((r.value_re.as_str(), r.value_im.as_str(), r.pi_power), ("0", "-2", 1));
        let r = riemann_roch_flat_check(4).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!((r.value_re.as_str(), r.value_im.as_str(), r.pi_power), ("-4", "0", 2));
    }

    #[test]
    fn suite_over_profiles() {
        let r = thom_suite(2, 3, 1, &[RadialProfile::Gaussian, RadialProfile::default_compact()], 1e-9).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.checks.len(), 8);
        let w = random_moment(4, 2.5, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert!((w.matrix().numeric_spectral_radius() - 2.5).abs() < 1e-12);
    }
}
