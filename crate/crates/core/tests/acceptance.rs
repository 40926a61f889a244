//! Acceptance gauntlet: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::time::{Duration, Instant};

use eqindex::getzler::{beta_q, constant_combination_check, delta_q, star_checks};
use eqindex::index_harness::pairing::{DEFAULT_SWEEP, DEFAULT_TOLERANCE};
use eqindex::index_harness::{
    area_cochain, circle_dirac, idempotency_residual, kernel_decay_scan, pairing_limit_sweep, torus_dirac, KernelKind,
    ModelOperator, PairSample, WassermannCalc,
};
use eqindex::mathai_quillen::suite::{GrandIdentity, OddVanish, PfExpansion, StrExp};
use eqindex::mathai_quillen::{riemann_roch_flat_check, run_check, thom_suite, IdentityCheck, RadialProfile};
use eqindex::Result;

const SEED: u64 = 20240611;
const INSTANCES: usize = 50;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

fn identity_batches(check: &dyn IdentityCheck, ns: &[usize]) -> Result<(bool, String)> {
    let mut pass = true;
    let mut parts = Vec::new();
    for &n in ns {
        let r = run_check(check, n, INSTANCES, SEED)?;
        pass &= r.pass && r.exact && r.max_abs_deviation == 0.0;
        let mut part = format!("n={n}: {} instances, max dev {}", r.instances, r.max_abs_deviation);
        if let Some(c) = r.convention {
            part.push_str(&format!(" [convention: {c}]"));
        }
        parts.push(part);
    }
    Ok((pass, parts.join("; ")))
}

fn c1() -> Result<Outcome> {
    let start = Instant::now();
    let (pass, detail) = identity_batches(&StrExp, &[2, 4, 6])?;
    let el = start.elapsed();
    outcome(pass && el < Duration::from_secs(30), format!("{detail}; {:.1}s", el.as_secs_f64()))
}

fn c2() -> Result<Outcome> {
    let (pass, detail) = identity_batches(&OddVanish, &[2, 4, 6])?;
    outcome(pass, detail)
}

fn c3() -> Result<Outcome> {
    let (a, da) = identity_batches(&GrandIdentity, &[2, 4])?;
    let (b, db) = identity_batches(&PfExpansion, &[2, 4, 6])?;
    outcome(a && b, format!("linear source {da} | pfaffian expansion {db}"))
}

fn c4() -> Result<Outcome> {
    let profiles = [RadialProfile::Gaussian, RadialProfile::default_compact()];
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [2, 4] {
        let r = thom_suite(n, 10, SEED, &profiles, 1e-9)?;
        let gauss_dev = r.checks.iter().filter(|c| c.profile == RadialProfile::Gaussian).map(|c| c.deviation).fold(0.0, f64::max);
        let compact_dev = r.checks.iter().filter(|c| c.profile != RadialProfile::Gaussian).map(|c| c.deviation).fold(0.0, f64::max);
        pass &= r.pass && r.samples >= 10 && gauss_dev == 0.0 && compact_dev < 1e-9;
        parts.push(format!("n={n}: gaussian dev {gauss_dev:e}, compact dev {compact_dev:.2e}, profile spread {:.2e}", r.profile_spread));
    }
    outcome(pass, parts.join("; "))
}

fn c5() -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [2, 4] {
        let r = riemann_roch_flat_check(n)?;
        pass &= r.pass;
        parts.push(format!("n={n}: ({} + {}i) pi^{} vs ({} + {}i)", r.value_re, r.value_im, r.pi_power, r.expected_re, r.expected_im));
    }
    outcome(pass, parts.join("; "))
}

fn c6() -> Result<Outcome> {
    let start = Instant::now();
    let ln = 1.5f64.ln();
    let (b, d) = (beta_q(1)?, delta_q(1)?);
    let mut pass = (b - ln).abs() < 1e-10 && (d - (ln - 1.0 / 6.0)).abs() < 1e-10;
    let mut worst = 0.0f64;
    for q in 1..=3 {
        let r = constant_combination_check(q, 1e-8)?;
        pass &= r.pass;
        worst = worst.max(r.abs_err);
    }
    let el = start.elapsed();
    outcome(
        pass && el < Duration::from_secs(5),
        format!("beta_1 err {:.1e}, delta_1 err {:.1e}, combination err {worst:.1e}; {:.2}s", (b - ln).abs(), (d - ln + 1.0 / 6.0).abs(), el.as_secs_f64()),
    )
}

fn c7() -> Result<Outcome> {
    let r = star_checks(2, INSTANCES, SEED)?;
    outcome(
        r.pass,
        format!(
            "{} instances: associativity {}, flat {}, commutator {} failures",
            r.instances, r.associativity_failures, r.flat_failures, r.commutator_failures
        ),
    )
}

const INDEX_T: [f64; 4] = [0.1, 0.5, 1.0, 2.0];

fn index_ok(op: &ModelOperator) -> Result<(bool, f64, f64, f64)> {
    let calc = WassermannCalc::new(&op.d)?;
    let mut vals = Vec::new();
    let mut res = 0.0f64;
    for t in INDEX_T {
        res = res.max(idempotency_residual(&calc.class(t)?)?.idempotent);
        vals.push(calc.str_index(t)?);
    }
    let int_dev = vals.iter().map(|v| (v - op.charge as f64).abs()).fold(0.0, f64::max);
    let spread = vals.iter().cloned().fold(f64::MIN, f64::max) - vals.iter().cloned().fold(f64::MAX, f64::min);
    Ok((res < 1e-10 && int_dev < 1e-8 && spread < 1e-9, res, int_dev, spread))
}

fn c8() -> Result<Outcome> {
    let start = Instant::now();
    let mut pass = true;
    let (mut res, mut dev, mut spread) = (0.0f64, 0.0f64, 0.0f64);
    let mut ops = Vec::new();
    for w in -3..=3 {
        ops.push(circle_dirac(64, w)?);
    }
    for k in -3i64..=3 {
        let n = match k.abs() {
            0 | 1 => 16,
            2 => 20,
            _ => 24,
        };
        ops.push(torus_dirac(n, k)?);
    }
    for op in &ops {
        let (ok, r, d, s) = index_ok(op)?;
        pass &= ok;
        res = res.max(r);
        dev = dev.max(d);
        spread = spread.max(s);
    }
    let el = start.elapsed();
    outcome(
        pass && el < Duration::from_secs(120),
        format!(
            "{} models: idempotency {res:.1e}, index vs charge {dev:.1e}, t-spread {spread:.1e}; {:.1}s",
            ops.len(),
            el.as_secs_f64()
        ),
    )
}

fn c9() -> Result<Outcome> {
    let op = circle_dirac(64, 0)?;
    let mut pass = true;
    let mut parts = Vec::new();
    for kind in [KernelKind::Heat, KernelKind::Wassermann] {
        let rows = kernel_decay_scan(&op, &[0.25, 0.5], PairSample::default(), kind)?;
        let ratio = rows[0].slope / rows[1].slope;
        let ok = rows.iter().all(|r| r.r2 >= 0.99 && r.slope < 0.0) && (ratio / 2.0 - 1.0).abs() <= 0.25;
        pass &= ok;
        parts.push(format!(
            "{kind:?}: slopes {:.2}/{:.2}, r2 {:.4}/{:.4}, ratio {ratio:.3}",
            rows[0].slope, rows[1].slope, rows[0].r2, rows[1].r2
        ));
    }
    outcome(pass, parts.join("; "))
}

fn c10() -> Result<Outcome> {
    let op = torus_dirac(24, 1)?;
    let r = pairing_limit_sweep(&area_cochain(), &op, &DEFAULT_SWEEP, DEFAULT_TOLERANCE)?;
    let q0 = r.index_rows.iter().all(|row| row.equals_str_index);
    let errs: Vec<String> = r.rows.iter().map(|row| format!("{}", row.rel_err.map_or("-".into(), |e| format!("{e:.3}")))).collect();
    outcome(
        r.monotone && r.within_tolerance && q0,
        format!(
            "rel err over t={:?}: [{}]; calibrated t={:?} err {:.4}; target {:.6}i; q=0 rows equal index: {q0}",
            DEFAULT_SWEEP,
            errs.join(", "),
            r.calibrated_t,
            r.calibrated_rel_err.unwrap_or(f64::NAN),
            r.target.value.1,
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 10] = [
        ("supertrace of clifford exponential", c1),
        ("odd supertrace vanishes", c2),
        ("linear source and pfaffian expansion", c3),
        ("thom normalization", c4),
        ("flat riemann-roch constant", c5),
        ("cube constants", c6),
        ("star product", c7),
        ("heat-kernel index", c8),
        ("kernel decay", c9),
        ("pairing trend", c10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (status, detail) = match f() {
            Ok(o) => (if o.pass { "PASS" } else { "FAIL" }, o.detail),
            Err(e) => ("FAIL", format!("error: {e}")),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} {status} [{name}] ({:.1}s) {detail}", i + 1, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
