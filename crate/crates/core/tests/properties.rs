use eqindex::algebra_core::{ExtElem, IndexSet, Scalar};
use eqindex::charclass::pfaffian;
use eqindex::clifford::{random_element, str_cyclic_check};
use eqindex::getzler::checks::{random_pairing, random_symbol};
use eqindex::getzler::star;
use eqindex::index_harness::linalg::CMat;
use eqindex::index_harness::wassermann::SchwartzPair;
use eqindex::index_harness::{idempotency_residual, str_index, wassermann_class, GradedMatrix};
use eqindex::mathai_quillen::identities::random_rational_skew;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GENS: usize = 5;

fn form() -> impl Strategy<Value = ExtElem> {
    prop::collection::vec((0u32..(1 << GENS), -4i64..=4, 1i64..=3), 0..6).prop_map(|terms| {
        let mut e = ExtElem::zero(GENS);
        for (mask, p, q) in terms {
            let idx: Vec<usize> = (0..GENS).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
            e.add_term(IndexSet::from_indices(&idx).unwrap(), Scalar::ratio(p, q));
        }
        e
    })
}

fn homogeneous(e: &ExtElem, parity: usize) -> ExtElem {
    if parity == 0 {
        e.even_part()
    } else {
        e.odd_part()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wedge_is_associative(a in form(), b in form(), c in form()) {
        let l = a.wedge(&b).unwrap().wedge(&c).unwrap();
        let r = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn wedge_is_graded_commutative(a in form(), b in form(), pa in 0usize..2, pb in 0usize..2) {
        let (a, b) = (homogeneous(&a, pa), homogeneous(&b, pb));
        let mut ba = b.wedge(&a).unwrap();
        if pa * pb == 1 {
            ba = ba.scale(&Scalar::int(-1));
        }
        prop_assert_eq!(a.wedge(&b).unwrap(), ba);
    }

    #[test]
    fn pfaffian_squares_to_determinant(seed in any::<u64>(), half in 1usize..=3) {
        let n = 2 * half;
        let w = random_rational_skew(n, 0, &mut ChaCha8Rng::seed_from_u64(seed));
        let pf = pfaffian(&w).scalar_part();
        let det = w.matrix().numeric_part().determinant();
        let sq = (&pf * &pf).to_c64();
        prop_assert!((sq - det).norm() <= 1e-9 * (1.0 + det.norm()), "pf^2 = {sq}, det = {det}");
    }

    #[test]
    fn clifford_supertrace_is_graded_cyclic(seed in any::<u64>(), half in 1usize..=3, pa in 0usize..2, pb in 0usize..2) {
        let n = 2 * half;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_element(n, 2, Some(pa), 4, &mut rng);
        let b = random_element(n, 2, Some(pb), 4, &mut rng);
        prop_assert!(str_cyclic_check(&a, &b).unwrap());
    }

    #[test]
    fn star_is_associative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = random_pairing(2, &mut rng);
        let (a, b, c) = (random_symbol(2, &mut rng), random_symbol(2, &mut rng), random_symbol(2, &mut rng));
        let l = star(&star(&a, &b, &r).unwrap(), &c, &r).unwrap();
        let rr = star(&a, &star(&b, &c, &r).unwrap(), &r).unwrap();
        prop_assert!(l == rr);
    }

    #[test]
    fn schwartz_pair_identity(t in 0.05f64..2.0, x in -40.0f64..40.0) {
        let s = SchwartzPair::new(t).unwrap();
        let (f, g) = (s.f(x), s.g(x));
        prop_assert!((f * f + g * g - f).abs() < 1e-14);
        prop_assert!((s.g(-x) + g).abs() < 1e-15);
    }
}

fn random_dirac(p: usize, m: usize, seed: u64) -> GradedMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    use rand::Rng;
    let d_plus = CMat::from_fn(m, p, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    GradedMatrix::dirac(d_plus)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn class_is_idempotent_with_integer_index(p in 1usize..=20, m in 1usize..=20, t in 0.05f64..2.0, seed in any::<u64>()) {
        let d = random_dirac(p, m, seed);
        let class = wassermann_class(&d, t).unwrap();
        let res = idempotency_residual(&class).unwrap();
        prop_assert!(res.idempotent < 1e-10, "{res:?}");
        prop_assert!(res.self_adjoint < 1e-10, "{res:?}");
        // a generic rectangular D+ has maximal rank
        let idx = str_index(&d, t).unwrap();
        prop_assert!((idx - (p as f64 - m as f64)).abs() < 1e-8, "index {idx} for {p}x{m}");
    }
}

#[test]
fn rational_pfaffian_is_exact() {
    let w = random_rational_skew(4, 0, &mut ChaCha8Rng::seed_from_u64(3));
    assert!(pfaffian(&w).is_exact());
}
