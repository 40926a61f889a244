use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use eqindex::charclass::{integrate_density, sample_density, Density, SurfaceGeometry};
use eqindex::clifford::verify_clifford;
use eqindex::getzler::{constant_combination_check, star_checks};
use eqindex::index_harness::pairing::{pairing_limit_sweep, DEFAULT_SWEEP};
use eqindex::index_harness::{
    area_cochain, idempotency_residual, kernel_decay_scan, lookup_model, Cochain, KernelKind, ModelOperator, PairSample,
    SiteKernel, WassermannCalc,
};
use eqindex::mathai_quillen::{check_thom_closed, lookup, registry, riemann_roch_flat_check, run_check, thom_suite, RadialProfile};
use eqindex::{Error, Result};
use rand::SeedableRng;

use crate::output::Report;
use crate::{Command, Format, GetzlerCmd, IndexArgs, PairArgs, SuiteArgs};

const SCHEMA: u32 = 1;

fn with_header(anchor: &str, body: impl Serialize) -> Result<Value> {
    let mut v = serde_json::to_value(body).map_err(|e| Error::Parse(e.to_string()))?;
    if let Value::Object(m) = &mut v {
        m.insert("schema".into(), json!(SCHEMA));
        m.insert("anchor".into(), json!(anchor));
    }
    Ok(v)
}

pub fn dispatch(cmd: &Command) -> Result<Report> {
    match cmd {
        Command::VerifyClifford(a) => verify_clifford_cmd(a),
        Command::VerifyMq { suite, identity } => verify_mq(suite, identity.as_deref()),
        Command::Thom { n, samples, seed, profile, tol } => thom(*n, *samples, *seed, profile, *tol),
        Command::Charform { geometry, density, flux, tol, format } => charform(geometry, density, *flux, *tol, *format),
        Command::Getzler { cmd: GetzlerCmd::Constants { q, tol, format } } => constants(q, *tol, *format),
        Command::Getzler { cmd: GetzlerCmd::Star(a) } => star(a),
        Command::Index(a) => index(a),
        Command::Pair(a) => pair(a),
    }
}

fn require_even(n: usize) -> Result<()> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::InvalidConfig("n must be even".into()));
    }
    Ok(())
}

fn verify_clifford_cmd(a: &SuiteArgs) -> Result<Report> {
    let r = verify_clifford(a.n, a.instances, a.seed)?;
    let pass = r.pass;
    Ok(Report::json("verify-clifford", with_header("clifford-supertrace-and-graded-cyclicity", r)?, pass))
}

fn verify_mq(a: &SuiteArgs, identity: Option<&str>) -> Result<Report> {
    require_even(a.n)?;
    let checks = match identity {
        Some(name) => vec![lookup(name)?],
        None => registry().into_iter().filter(|c| a.n <= c.max_n()).collect(),
    };
    if checks.is_empty() {
        return Err(Error::InvalidConfig(format!("no identity supports n = {}", a.n)));
    }
    let reports = checks.iter().map(|c| run_check(c.as_ref(), a.n, a.instances, a.seed)).collect::<Result<Vec<_>>>()?;
    let pass = reports.iter().all(|r| r.pass);
    let v = json!({
        "schema": SCHEMA,
        "identity": identity.unwrap_or("all"),
        "anchor": reports.iter().map(|r| r.anchor).collect::<Vec<_>>().join(", "),
        "n": a.n,
        "instances": reports.iter().map(|r| r.instances).sum::<usize>(),
        "max_abs_deviation": reports.iter().map(|r| r.max_abs_deviation).fold(0.0, f64::max),
        "exact": reports.iter().all(|r| r.exact),
        "pass": pass,
        "checks": reports,
    });
    Ok(Report::json("verify-mq", v, pass))
}

fn thom(n: usize, samples: usize, seed: u64, profiles: &[String], tol: f64) -> Result<Report> {
    require_even(n)?;
    let profiles = profiles.iter().map(|p| RadialProfile::parse(p)).collect::<Result<Vec<_>>>()?;
    let suite = thom_suite(n, samples, seed, &profiles, tol)?;
    let rr = riemann_roch_flat_check(n)?;
    let closed = check_thom_closed(n, &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed))?;
    let pass = suite.pass && rr.pass && closed.closed;
    let v = json!({
        "schema": SCHEMA,
        "anchor": "thom-form-unit-fiber-integral; flat-riemann-roch-constant",
        "n": n,
        "pass": pass,
        "normalization": suite,
        "riemann_roch": rr,
        "closedness": closed,
    });
    Ok(Report::json("thom", v, pass))
}

#[derive(Serialize)]
struct DensityRow {
    node: usize,
    density: f64,
    cumulative: f64,
}

fn charform(geometry: &str, density: &str, flux: i64, tol: f64, format: Format) -> Result<Report> {
    let geom = if Path::new(geometry).is_file() {
        let text = std::fs::read_to_string(geometry).map_err(|e| Error::Parse(format!("{geometry}: {e}")))?;
        SurfaceGeometry::from_json(&text)?
    } else {
        SurfaceGeometry::builtin(geometry, flux)?
    };
    let d = Density::parse(density)?;
    let values = sample_density(&geom, d)?;
    let total = integrate_density(&values, &geom)?.to_c64().re;
    let expected = match d {
        Density::Euler => geom.meta.euler,
        Density::C1 | Density::Index => geom.meta.flux,
    };
    let pass = expected.is_none_or(|e| (total - e as f64).abs() < tol);
    let mut cumulative = 0.0;
    let rows: Vec<DensityRow> = values
        .iter()
        .zip(&geom.nodes)
        .enumerate()
        .map(|(node, (v, g))| {
            cumulative += v * g.weight;
            DensityRow { node, density: *v, cumulative }
        })
        .collect();
    let mut report = match format {
        Format::Csv => Report::csv("charform", &rows, pass)?,
        Format::Json => Report::json(
            "charform",
            json!({
                "schema": SCHEMA,
                "anchor": "characteristic-density-quadrature",
                "geometry": if geom.meta.name.is_empty() { geometry } else { geom.meta.name.as_str() },
                "density": density,
                "total": total,
                "expected": expected,
                "pass": pass,
                "rows": rows,
            }),
            pass,
        ),
    };
    report.notes.push(format!("integral = {total:.12}{}", expected.map(|e| format!(" (expected {e})")).unwrap_or_default()));
    Ok(report)
}

fn parse_q(spec: &str) -> Result<Vec<usize>> {
    let bad = || Error::Parse(format!("bad q range '{spec}'"));
    if let Some((a, b)) = spec.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    spec.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

#[derive(Serialize)]
struct ConstantRow {
    q: usize,
    beta: f64,
    delta: f64,
    combination: f64,
    target: f64,
    abs_err: f64,
}

fn constants(q: &str, tol: f64, format: Format) -> Result<Report> {
    let reports = parse_q(q)?.into_iter().map(|q| constant_combination_check(q, tol)).collect::<Result<Vec<_>>>()?;
    let pass = reports.iter().all(|r| r.pass);
    match format {
        Format::Csv => {
            let rows: Vec<ConstantRow> = reports
                .iter()
                .map(|r| ConstantRow { q: r.q, beta: r.beta, delta: r.delta, combination: r.combination, target: r.target, abs_err: r.abs_err })
                .collect();
            Report::csv("getzler-constants", &rows, pass)
        }
        Format::Json => Ok(Report::json(
            "getzler-constants",
            json!({"schema": SCHEMA, "anchor": "heat-expansion-constant-combination", "pass": pass, "rows": reports}),
            pass,
        )),
    }
}

fn star(a: &SuiteArgs) -> Result<Report> {
    let r = star_checks(a.n, a.instances, a.seed)?;
    let pass = r.pass;
    Ok(Report::json("getzler-star", with_header("rescaled-symbol-star-product", r)?, pass))
}

fn build_model(model: &str, size: Option<usize>, w: Option<i64>, k: Option<i64>) -> Result<ModelOperator> {
    let m = lookup_model(model)?;
    let charge = match (m.charge_name(), w, k) {
        ("w", _, Some(_)) | ("k", Some(_), _) => {
            return Err(Error::InvalidConfig(format!("the {} model takes --{}", m.name(), m.charge_name())));
        }
        ("w", w, None) => w.unwrap_or(0),
        (_, None, k) => k.unwrap_or(0),
        _ => unreachable!("charge names are w or k"),
    };
    m.build(size.unwrap_or(m.default_size()), charge)
}

fn check_t(ts: &[f64]) -> Result<()> {
    if ts.is_empty() || ts.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidConfig("t values must be positive".into()));
    }
    Ok(())
}

fn index(a: &IndexArgs) -> Result<Report> {
    check_t(&a.t)?;
    let op = build_model(&a.model, a.size, a.w, a.k)?;
    let calc = WassermannCalc::new(&op.d)?;
    let per_t: Vec<(f64, f64, f64)> = a
        .t
        .par_iter()
        .map(|&t| {
            let r = idempotency_residual(&calc.class(t)?)?;
            Ok((calc.str_index(t)?, r.idempotent, r.self_adjoint))
        })
        .collect::<Result<_>>()?;
    let idx: Vec<f64> = per_t.iter().map(|x| x.0).collect();
    let res: Vec<f64> = per_t.iter().map(|x| x.1).collect();
    let sa: Vec<f64> = per_t.iter().map(|x| x.2).collect();
    let spread = idx.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - idx.iter().cloned().fold(f64::INFINITY, f64::min);
    let integer_dev = idx.iter().map(|v| (v - v.round()).abs()).fold(0.0, f64::max);
    let charge_dev = idx.iter().map(|v| (v - op.charge as f64).abs()).fold(0.0, f64::max);
    let mut pass = res.iter().all(|r| *r < a.tol_idempotent) && integer_dev < a.tol_integer && charge_dev < a.tol_integer && spread < a.tol_spread;
    let mut v = json!({
        "schema": SCHEMA,
        "anchor": "heat-kernel-index-class; mckean-singer-supertrace",
        "model": op.model,
        "charge": op.charge,
        "N": a.size.unwrap_or(lookup_model(&a.model)?.default_size()),
        "summary": op.summary(),
        "t_values": a.t,
        "str_index": idx,
        "idempotency_residual": res,
        "self_adjoint_residual": sa,
        "integer_deviation": integer_dev,
        "t_spread": spread,
    });
    if !a.decay_t.is_empty() {
        check_t(&a.decay_t)?;
        let kind = KernelKind::parse(&a.kernel)?;
        let rows = kernel_decay_scan(&op, &a.decay_t, PairSample::default(), kind)?;
        pass &= rows.iter().all(|r| r.slope < 0.0 && r.r2 >= a.min_r2);
        let ratio = (rows.len() >= 2).then(|| rows[0].slope / rows[1].slope);
        v["decay"] = json!({ "anchor": "gaussian-kernel-decay", "rows": rows, "slope_ratio_first_two": ratio });
    }
    v["pass"] = json!(pass);
    Ok(Report::json("index", v, pass))
}

#[derive(Serialize)]
struct PairRow {
    t: f64,
    tau_re: Option<f64>,
    tau_im: Option<f64>,
    target_re: Option<f64>,
    target_im: Option<f64>,
    abs_err: Option<f64>,
    rel_err: Option<f64>,
    status: String,
}

fn pair(a: &PairArgs) -> Result<Report> {
    let grid: Vec<f64> = match (a.sweep, a.t.is_empty()) {
        (true, true) => DEFAULT_SWEEP.to_vec(),
        (_, false) => a.t.clone(),
        (false, true) => return Err(Error::InvalidConfig("give --t or --sweep".into())),
    };
    check_t(&grid)?;
    // the pairing needs a finer torus than the index check
    let size = a.size.or((a.model == "torus").then_some(24));
    let op = build_model(&a.model, size, a.w, a.k)?;
    match a.q {
        0 => pair_degree_zero(a, &op, &grid),
        1 => pair_area(a, &op, &grid),
        q => Err(Error::InvalidConfig(format!("q = {q} has no density term on a 2-dimensional model"))),
    }
}

fn pair_degree_zero(a: &PairArgs, op: &ModelOperator, grid: &[f64]) -> Result<Report> {
    if a.growth.is_some() {
        return Err(Error::InvalidConfig("growth weights need a product cochain (q >= 1)".into()));
    }
    let calc = WassermannCalc::new(&op.d)?;
    let one = Cochain::constant(1.0);
    let target = op.charge as f64;
    let rows: Vec<(PairRow, bool)> = grid
        .par_iter()
        .map(|&t| {
            let k = SiteKernel::new(calc.class(t)?, op)?;
            let tau = eqindex::index_harness::tau_value(&one, &k)?;
            let same = tau.re.to_bits() == calc.str_index(t)?.to_bits();
            let err = (tau.re - target).abs();
            let row = PairRow {
                t,
                tau_re: Some(tau.re),
                tau_im: Some(tau.im),
                target_re: Some(target),
                target_im: Some(0.0),
                abs_err: Some(err),
                rel_err: (target != 0.0).then(|| err / target.abs()),
                status: if same { "ok".into() } else { "differs-from-supertrace".into() },
            };
            Ok((row, same && err < 1e-8))
        })
        .collect::<Result<_>>()?;
    let pass = rows.iter().all(|r| r.1);
    let rows: Vec<PairRow> = rows.into_iter().map(|r| r.0).collect();
    match a.format {
        Format::Csv => Report::csv("pair", &rows, pass),
        Format::Json => Ok(Report::json(
            "pair",
            json!({"schema": SCHEMA, "anchor": "degree-zero-pairing-equals-index", "model": op.model, "charge": op.charge, "q": 0, "pass": pass, "rows": rows}),
            pass,
        )),
    }
}

fn pair_area(a: &PairArgs, op: &ModelOperator, grid: &[f64]) -> Result<Report> {
    if let Some(v) = a.growth {
        return pair_weighted(a, op, grid, area_cochain().with_growth(v, 0)?);
    }
    let psi = area_cochain();
    let rep = pairing_limit_sweep(&psi, op, grid, a.tol)?;
    let index_ok = rep.index_rows.iter().all(|r| r.equals_str_index && r.deviation < 1e-8);
    let pass = rep.within_tolerance && (rep.monotone || rep.rows.len() < 2) && index_ok;
    let mut notes: Vec<String> = rep.rows.iter().filter_map(|r| r.refused.as_ref().map(|m| format!("t = {}: refused: {m}", r.t))).collect();
    notes.push(format!(
        "target {:.6}{:+.6}i; calibrated t = {:?}, relative error {:?} (tolerance {}); monotone: {}",
        rep.target.value.0, rep.target.value.1, rep.calibrated_t, rep.calibrated_rel_err, rep.tolerance, rep.monotone
    ));
    let mut report = match a.format {
        Format::Csv => {
            let rows: Vec<PairRow> = rep
                .rows
                .iter()
                .map(|r| PairRow {
                    t: r.t,
                    tau_re: r.tau.map(|z| z.0),
                    tau_im: r.tau.map(|z| z.1),
                    target_re: Some(rep.target.value.0),
                    target_im: Some(rep.target.value.1),
                    abs_err: r.abs_err,
                    rel_err: r.rel_err,
                    status: if r.refused.is_some() { "refused".into() } else { "ok".into() },
                })
                .collect();
            Report::csv("pair", &rows, pass)?
        }
        Format::Json => Report::json("pair", with_header("cochain-pairing-small-t-limit", &rep)?, pass),
    };
    report.notes = notes;
    Ok(report)
}

/// Growth-weighted cochains have no closed-form density target; rows carry
/// the pairing value or the refusal.
fn pair_weighted(a: &PairArgs, op: &ModelOperator, grid: &[f64], psi: Cochain) -> Result<Report> {
    let calc = WassermannCalc::new(&op.d)?;
    let rows: Vec<(PairRow, Option<String>)> = grid
        .par_iter()
        .map(|&t| {
            let k = SiteKernel::new(calc.class(t)?, op)?;
            Ok(match eqindex::index_harness::tau_pairing(&psi, &k) {
                Ok(z) => (
                    PairRow { t, tau_re: Some(z.re), tau_im: Some(z.im), target_re: None, target_im: None, abs_err: None, rel_err: None, status: "ok".into() },
                    None,
                ),
                Err(Error::Growth(m)) => (
                    PairRow { t, tau_re: None, tau_im: None, target_re: None, target_im: None, abs_err: None, rel_err: None, status: "refused".into() },
                    Some(format!("t = {t}: refused: {m}")),
                ),
                Err(e) => return Err(e),
            })
        })
        .collect::<Result<_>>()?;
    let notes: Vec<String> = rows.iter().filter_map(|r| r.1.clone()).collect();
    let pass = notes.is_empty();
    let rows: Vec<PairRow> = rows.into_iter().map(|r| r.0).collect();
    let mut report = match a.format {
        Format::Csv => Report::csv("pair", &rows, pass)?,
        Format::Json => Report::json(
            "pair",
            json!({"schema": SCHEMA, "anchor": "cochain-growth-admissibility", "model": op.model, "growth": a.growth, "pass": pass, "rows": rows}),
            pass,
        ),
    };
    report.notes = notes;
    Ok(report)
}
