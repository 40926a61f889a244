//! Model Dirac operators with a known index, realized on lattices through
//! orthonormal frames of sampled mode functions.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

use super::geometry::LatticeGeometry;
use super::graded::{Dims, GradedMatrix};
use super::linalg::{cmul, CMat, HermEig};

/// Operator in a mode basis plus the site values of the modes.
///
/// Columns of `frame_plus` / `frame_minus` are orthonormal for the lattice
/// measure, so a mode-basis operator `A` has the site kernel `F A F*` against `dmu`.
#[derive(Clone, Debug)]
pub struct ModelOperator {
    pub model: &'static str,
    pub charge: i64,
    pub d: GradedMatrix,
    pub geometry: LatticeGeometry,
    pub frame_plus: CMat,
    pub frame_minus: CMat,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelSummary {
    pub model: &'static str,
    pub charge: i64,
    pub sites: usize,
    pub dims: Dims,
    pub frame_residual: f64,
}

impl ModelOperator {
    /// Largest deviation of `F* diag(mu) F` from the identity.
    pub fn frame_residual(&self) -> f64 {
        let gram = |f: &CMat| {
            let wf = CMat::from_fn(f.nrows(), f.ncols(), |i, j| f[(i, j)] * self.geometry.weights[i]);
            let g = cmul(&f.adjoint(), &wf);
            let mut m = 0.0f64;
            for i in 0..g.nrows() {
                for j in 0..g.ncols() {
                    let e = if i == j { 1.0 } else { 0.0 };
                    m = m.max((g[(i, j)] - e).norm());
                }
            }
            m
        };
        gram(&self.frame_plus).max(gram(&self.frame_minus))
    }

    pub fn summary(&self) -> ModelSummary {
        ModelSummary {
            model: self.model,
            charge: self.charge,
            sites: self.geometry.len(),
            dims: self.d.dims(),
            frame_residual: self.frame_residual(),
        }
    }

    /// Swap the roles of the two half spaces: `D+ -> D+*`.
    fn adjoint_model(self) -> ModelOperator {
        let dp = self.d.d_plus().adjoint();
        ModelOperator {
            model: self.model,
            charge: -self.charge,
            d: GradedMatrix::dirac(dp),
            geometry: self.geometry,
            frame_plus: self.frame_minus,
            frame_minus: self.frame_plus,
        }
    }
}

pub trait DiracModel: Sync + Send {
    fn name(&self) -> &'static str;
    /// Name of the integer parameter (winding, flux).
    fn charge_name(&self) -> &'static str;
    fn default_size(&self) -> usize;
    fn build(&self, size: usize, charge: i64) -> Result<ModelOperator>;
}

pub struct CircleModel;
pub struct TorusModel;

impl DiracModel for CircleModel {
    fn name(&self) -> &'static str {
        "circle"
    }
    fn charge_name(&self) -> &'static str {
        "w"
    }
    fn default_size(&self) -> usize {
        64
    }
    fn build(&self, size: usize, charge: i64) -> Result<ModelOperator> {
        circle_dirac(size, charge)
    }
}

impl DiracModel for TorusModel {
    fn name(&self) -> &'static str {
        "torus"
    }
    fn charge_name(&self) -> &'static str {
        "k"
    }
    fn default_size(&self) -> usize {
        16
    }
    fn build(&self, size: usize, charge: i64) -> Result<ModelOperator> {
        torus_dirac(size, charge)
    }
}

pub fn model_registry() -> Vec<Box<dyn DiracModel>> {
    vec![Box::new(CircleModel), Box::new(TorusModel)]
}

pub fn lookup_model(name: &str) -> Result<Box<dyn DiracModel>> {
    model_registry().into_iter().find(|m| m.name() == name).ok_or_else(|| Error::UnknownName {
        kind: "model",
        name: name.into(),
        known: model_registry().iter().map(|m| m.name()).collect::<Vec<_>>().join(", "),
    })
}

/// Antiperiodic circle of length 2 pi with `n` sites and modes `k` in `Z + 1/2`,
/// `|k| < n/2`. `D+` is `-i d/dtheta` on negative modes and `-i d/dtheta`
/// followed by the shift `e_k -> e_(k-w)` on positive modes, so `H-` keeps
/// `n - w` modes and the kernel is spanned by `w` low modes.
pub fn circle_dirac(n: usize, w: i64) -> Result<ModelOperator> {
    let aw = w.unsigned_abs() as usize;
    if n < 8 * aw + 8 || n % 2 == 1 {
        return Err(Error::InvalidConfig(format!("circle model needs an even N >= 8|w| + 8, got N = {n}, w = {w}")));
    }
    let geometry = LatticeGeometry::uniform(&[TAU], n)?;
    let modes: Vec<f64> = (0..n).map(|m| m as f64 - n as f64 / 2.0 + 0.5).collect();
    let frame = |count: usize| {
        CMat::from_fn(n, count, |s, c| {
            let theta = geometry.positions[s][0];
            Complex64::from_polar(1.0 / TAU.sqrt(), modes[c] * theta)
        })
    };
    let mut dp = CMat::zeros(n - aw, n);
    for (c, &k) in modes.iter().enumerate() {
        let target = if k < 0.0 { c } else { c - aw };
        dp[(target, c)] = Complex64::new(k, 0.0);
    }
    let op = ModelOperator {
        model: "circle",
        charge: aw as i64,
        d: GradedMatrix::dirac(dp),
        frame_plus: frame(n),
        frame_minus: frame(n - aw),
        geometry,
    };
    Ok(if w < 0 { op.adjoint_model() } else { op })
}

/// Fraction of the grid dimension spent on Landau levels.
pub const TORUS_MODE_FRACTION: f64 = 0.7;
const IMAGE_CUTOFF: f64 = 40.0;
/// Smallest Gram eigenvalue of the sampled Landau modes before Lowdin
/// orthonormalization; below this the top levels are aliased by the grid.
pub const MIN_GRAM: f64 = 0.9;

/// L2-normalized Hermite functions `h_0 .. h_nmax` at `xi`.
pub fn hermite_functions(nmax: usize, xi: f64) -> Vec<f64> {
    let mut h = vec![0.0; nmax + 1];
    h[0] = PI.powf(-0.25) * (-xi * xi / 2.0).exp();
    if nmax >= 1 {
        h[1] = std::f64::consts::SQRT_2 * xi * h[0];
    }
    for m in 2..=nmax {
        h[m] = (2.0 / m as f64).sqrt() * xi * h[m - 1] - ((m - 1) as f64 / m as f64).sqrt() * h[m - 2];
    }
    h
}

/// Landau-level functions `psi_(l, j)` at the sites, columns ordered `(l, j)` with `j` fastest.
fn landau_frame(geom: &LatticeGeometry, side: f64, flux: usize, levels: usize, b: f64) -> CMat {
    let sb = b.sqrt();
    let norm = b.powf(0.25) / side.sqrt();
    let mut out = CMat::zeros(geom.len(), levels * flux);
    let images = (IMAGE_CUTOFF / (sb * side)).ceil() as i64 + 2;
    for (s, pos) in geom.positions.iter().enumerate() {
        let (x, y) = (pos[0], pos[1]);
        for j in 0..flux {
            for m in -images..=images {
                // momentum p = 2 pi (j + m flux) / side, guiding center p / b
                let p = TAU * (j as i64 + m * flux as i64) as f64 / side;
                let xi = sb * (x - p / b);
                if xi.abs() > IMAGE_CUTOFF {
                    continue;
                }
                let phase = Complex64::from_polar(norm, p * y);
                for (l, hv) in hermite_functions(levels - 1, xi).into_iter().enumerate() {
                    out[(s, l * flux + j)] += phase * hv;
                }
            }
        }
    }
    out
}

/// Orthonormalize columns for the lattice measure: `F (F* mu F)^(-1/2)`.
/// Returns the frame and the smallest Gram eigenvalue.
fn lowdin(f: &CMat, weights: &[f64]) -> (CMat, f64) {
    let wf = CMat::from_fn(f.nrows(), f.ncols(), |i, j| f[(i, j)] * weights[i]);
    let gram = cmul(&f.adjoint(), &wf);
    let e = HermEig::new(&gram);
    let min = e.values.first().copied().unwrap_or(1.0);
    let inv_sqrt = e.apply(|x| 1.0 / x.max(1e-300).sqrt());
    (cmul(f, &inv_sqrt), min)
}

/// Flat torus of side 2 pi, `n x n` sites, line bundle of degree `k`.
///
/// Connection `d + iA` with `dA = -(2 pi k / area) dx^dy`, so the first Chern
/// form `(i/2pi) i dA` integrates to `k`. `D+ = Pi_x + i Pi_y` lowers the Landau
/// level with `D+ psi_l = -i sqrt(2 |B| l) psi_(l-1)`; `H+` keeps levels `0..=L`
/// and `H-` levels `0..L`, so the kernel is the lowest level.
pub fn torus_dirac(n: usize, k: i64) -> Result<ModelOperator> {
    let side = TAU;
    let geometry = LatticeGeometry::uniform(&[side, side], n)?;
    if k == 0 {
        return torus_flat(n, geometry);
    }
    let flux = k.unsigned_abs() as usize;
    let levels = ((TORUS_MODE_FRACTION * (n * n) as f64) / flux as f64).floor() as usize;
    if levels < 8 {
        return Err(Error::InvalidConfig(format!("{} grid modes cannot resolve flux {k}", n * n)));
    }
    let b = TAU * flux as f64 / (side * side);
    let (fp, gp) = lowdin(&landau_frame(&geometry, side, flux, levels, b), &geometry.weights);
    let (fm, gm) = lowdin(&landau_frame(&geometry, side, flux, levels - 1, b), &geometry.weights);
    if gp.min(gm) < MIN_GRAM {
        return Err(Error::InvalidConfig(format!("flux {k} is under-resolved on {n}x{n} sites (Gram {:.3e})", gp.min(gm))));
    }
    let mut dp = CMat::zeros((levels - 1) * flux, levels * flux);
    for l in 1..levels {
        for j in 0..flux {
            dp[((l - 1) * flux + j, l * flux + j)] = Complex64::new(0.0, -(2.0 * b * l as f64).sqrt());
        }
    }
    let op = ModelOperator { model: "torus", charge: k, d: GradedMatrix::dirac(dp), geometry, frame_plus: fp, frame_minus: fm };
    if k > 0 {
        return Ok(op);
    }
    // complex conjugation maps flux -k to k and D+ to -conj(D-)
    let dp_neg = op.d.d_plus().transpose().map(|z| -z);
    Ok(ModelOperator {
        model: "torus",
        charge: k,
        d: GradedMatrix::dirac(dp_neg),
        geometry: op.geometry,
        frame_plus: op.frame_minus.map(|z| z.conj()),
        frame_minus: op.frame_plus.map(|z| z.conj()),
    })
}

/// Zero flux: spin structure antiperiodic in both directions, `D+ = k_x + i k_y` on plane waves.
fn torus_flat(n: usize, geometry: LatticeGeometry) -> Result<ModelOperator> {
    if n < 4 || n % 2 == 1 {
        return Err(Error::InvalidConfig(format!("flat torus needs an even N >= 4, got {n}")));
    }
    let ks: Vec<f64> = (0..n).map(|m| m as f64 - n as f64 / 2.0 + 0.5).collect();
    let dim = n * n;
    let frame = CMat::from_fn(dim, dim, |s, c| {
        let (kx, ky) = (ks[c / n], ks[c % n]);
        let p = &geometry.positions[s];
        Complex64::from_polar(1.0 / TAU, kx * p[0] + ky * p[1])
    });
    let dp = CMat::from_fn(dim, dim, |r, c| if r == c { Complex64::new(ks[c / n], ks[c % n]) } else { Complex64::new(0.0, 0.0) });
    Ok(ModelOperator { model: "torus", charge: 0, d: GradedMatrix::dirac(dp), geometry, frame_plus: frame.clone(), frame_minus: frame })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_harness::wassermann::WassermannCalc;

    #[test]
    fn hermite_orthonormal() {
        let (xs, ws) = crate::quadrature::gl_interval(200, -20.0, 20.0);
        let mut g = [[0.0; 4]; 4];
        for (x, w) in xs.iter().zip(&ws) {
            let h = hermite_functions(3, *x);
            for a in 0..4 {
                for b in 0..4 {
                    g[a][b] += w * h[a] * h[b];
                }
            }
        }
        for a in 0..4 {
            for b in 0..4 {
                assert!((g[a][b] - if a == b { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn circle_kernel_basis() {
        // w = 2: kernel vectors combine e_j and e_(j+2) for j in {-3/2, -1/2}
        let m = circle_dirac(64, 2).unwrap();
        assert_eq!(m.d.dims(), Dims { plus: 64, minus: 62 });
        let dp = m.d.d_plus();
        for j in [-1.5f64, -0.5] {
            let cj = (j + 32.0 - 0.5) as usize;
            let mut v = CMat::zeros(64, 1);
            v[(cj, 0)] = Complex64::new(j + 2.0, 0.0);
            v[(cj + 2, 0)] = Complex64::new(-j, 0.0);
            assert!(super::super::linalg::frob(&cmul(dp, &v)) < 1e-14);
        }
        assert!(m.frame_residual() < 1e-12);
        assert!(circle_dirac(16, 2).is_err());
    }

    #[test]
    fn circle_indices() {
        for (w, expect) in [(0, 0.0), (1, 1.0), (-2, -2.0), (3, 3.0)] {
            let m = circle_dirac(64, w).unwrap();
            let calc = WassermannCalc::new(&m.d).unwrap();
            for t in [0.1, 0.5, 1.0, 2.0] {
                assert!((calc.str_index(t).unwrap() - expect).abs() < 1e-9, "w={w} t={t}");
            }
        }
    }

    #[test]
    fn torus_small() {
        let m = torus_dirac(8, 1).unwrap();
        assert!(m.frame_residual() < 1e-10);
        let calc = WassermannCalc::new(&m.d).unwrap();
        assert!((calc.str_index(0.5).unwrap() - 1.0).abs() < 1e-9);
        let m = torus_dirac(8, -2).unwrap();
        assert_eq!(m.charge, -2);
        let calc = WassermannCalc::new(&m.d).unwrap();
        assert!((calc.str_index(0.5).unwrap() + 2.0).abs() < 1e-9);
        let m = torus_dirac(6, 0).unwrap();
        assert!(WassermannCalc::new(&m.d).unwrap().str_index(0.3).unwrap().abs() < 1e-12);
        assert!(torus_dirac(4, 3).is_err());
        assert!(lookup_model("sphere").is_err());
    }
}
