//! Log-linear fits of kernel magnitudes against distance.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

use super::kernel::{block_norm, pair_block, SiteKernel};
use super::models::ModelOperator;
use super::wassermann::WassermannCalc;

/// Magnitudes below this are treated as exact zeros and left out of fits.
const LOG_FLOOR: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    /// `Ind_t(D) = gamma f_t(D) + g_t(D)`.
    Wassermann,
    /// `f_t(D)`.
    Heat,
    /// `g_t(D)`.
    Odd,
}

impl KernelKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "wassermann" => Ok(KernelKind::Wassermann),
            "heat" => Ok(KernelKind::Heat),
            "odd" => Ok(KernelKind::Odd),
            _ => Err(Error::UnknownName { kind: "kernel", name: s.into(), known: "wassermann, heat, odd".into() }),
        }
    }

    pub fn kernel(&self, calc: &WassermannCalc, op: &ModelOperator, t: f64) -> Result<SiteKernel> {
        let a = match self {
            KernelKind::Wassermann => calc.class(t)?,
            KernelKind::Heat => calc.heat(t)?,
            KernelKind::Odd => calc.odd(t)?,
        };
        SiteKernel::new(a, op)
    }
}

/// Which pairs enter a fit: `references` evenly spaced base sites, and
/// distances in `[lo * t, hi * t]` capped by the lattice diameter.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PairSample {
    pub references: usize,
    pub window: (f64, f64),
}

impl Default for PairSample {
    fn default() -> Self {
        PairSample { references: 4, window: (4.0, 6.25) }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub pairs: usize,
}

/// Least squares `y = slope x + intercept`.
pub fn line_fit(points: &[(f64, f64)]) -> Result<LineFit> {
    let n = points.len() as f64;
    if points.len() < 3 {
        return Err(Error::InvalidConfig(format!("decay fit needs at least 3 pairs, got {}", points.len())));
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx <= 1e-12 * (1.0 + mx * mx) * n {
        return Err(Error::InvalidConfig("degenerate decay sample: all distances equal".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LineFit { slope, intercept: my - slope * mx, r2, pairs: points.len() })
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayRow {
    pub t: f64,
    pub kind: KernelKind,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub pairs: usize,
    pub window: (f64, f64),
    /// `max_x |K(x, x)|`.
    pub diag_max: f64,
    /// `diag_max <= exp(intercept)`.
    pub diag_bounded: bool,
}

fn reference_sites(n: usize, count: usize) -> Vec<usize> {
    let count = count.clamp(1, n);
    (0..count).map(|i| i * n / count).collect()
}

/// Per-t fit of `log |K(x, y)|` against `d(x, y)` on the sampled pairs.
pub fn kernel_decay_scan(op: &ModelOperator, t_grid: &[f64], sample: PairSample, kind: KernelKind) -> Result<Vec<DecayRow>> {
    if !(sample.window.0 >= 0.0 && sample.window.1 > sample.window.0) {
        return Err(Error::InvalidConfig(format!("bad decay window {:?}", sample.window)));
    }
    let calc = WassermannCalc::new(&op.d)?;
    let geom = &op.geometry;
    let refs = reference_sites(geom.len(), sample.references);
    t_grid
        .par_iter()
        .map(|&t| {
            let k = kind.kernel(&calc, op, t)?;
            let lo = sample.window.0 * t;
            let hi = (sample.window.1 * t).min(geom.diameter());
            let mut points = Vec::new();
            let mut diag_max = 0.0f64;
            for &y in &refs {
                let col = k.column(y);
                for (x, b) in col.iter().enumerate() {
                    let d = geom.distance(x, y);
                    let v = block_norm(b);
                    if x == y {
                        diag_max = diag_max.max(v);
                    }
                    if d >= lo && d <= hi && v > LOG_FLOOR {
                        points.push((d, v.ln()));
                    }
                }
            }
            let fit = line_fit(&points)?;
            Ok(DecayRow {
                t,
                kind,
                slope: fit.slope,
                intercept: fit.intercept,
                r2: fit.r2,
                pairs: fit.pairs,
                window: (lo, hi),
                diag_max,
                diag_bounded: diag_max <= fit.intercept.exp(),
            })
        })
        .collect()
}

/// Fit over every pair with `d > 0`; `-slope` is the measured decay rate.
pub fn measured_decay(k: &SiteKernel) -> Result<LineFit> {
    let blocks = k.full_blocks();
    let geom = &k.geometry;
    let n = geom.len();
    let mut points = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let d = geom.distance(x, y);
            let v = block_norm(&pair_block(&blocks, x, y));
            if d > 0.0 && v > LOG_FLOOR {
                points.push((d, v.ln()));
            }
        }
    }
    line_fit(&points)
}
