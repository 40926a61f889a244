//! Site kernels `K = F A F*` of mode-basis operators.

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::geometry::LatticeGeometry;
use super::graded::GradedMatrix;
use super::linalg::{cmul, CMat};
use super::models::ModelOperator;

/// A mode-basis operator together with the frames that turn it into a
/// kernel against the lattice measure.
#[derive(Clone, Debug)]
pub struct SiteKernel {
    pub a: GradedMatrix,
    pub frame_plus: CMat,
    pub frame_minus: CMat,
    pub geometry: LatticeGeometry,
}

/// 2x2 block of a kernel at one pair of sites, row-major `[++, +-, -+, --]`.
pub type KernelBlock = [Complex64; 4];

/// Operator norm of a 2x2 complex matrix.
pub fn block_norm(k: &KernelBlock) -> f64 {
    let f2: f64 = k.iter().map(|z| z.norm_sqr()).sum();
    let det = (k[0] * k[3] - k[1] * k[2]).norm_sqr();
    let disc = (f2 * f2 - 4.0 * det).max(0.0).sqrt();
    ((f2 + disc) / 2.0).sqrt()
}

impl SiteKernel {
    pub fn new(a: GradedMatrix, op: &ModelOperator) -> Result<Self> {
        let d = a.dims();
        if d.plus != op.frame_plus.ncols() || d.minus != op.frame_minus.ncols() {
            return Err(Error::Shape(format!("operator dims {d:?} do not match the model frames")));
        }
        Ok(SiteKernel { a, frame_plus: op.frame_plus.clone(), frame_minus: op.frame_minus.clone(), geometry: op.geometry.clone() })
    }

    pub fn sites(&self) -> usize {
        self.geometry.len()
    }

    fn frames(&self) -> [&CMat; 2] {
        [&self.frame_plus, &self.frame_minus]
    }

    fn block(&self, r: usize, c: usize) -> &CMat {
        match (r, c) {
            (0, 0) => &self.a.pp,
            (0, 1) => &self.a.pm,
            (1, 0) => &self.a.mp,
            _ => &self.a.mm,
        }
    }

    /// `K(., y)` for a fixed site `y`.
    pub fn column(&self, y: usize) -> Vec<KernelBlock> {
        let fr = self.frames();
        let n = self.sites();
        let mut out = vec![[Complex64::new(0.0, 0.0); 4]; n];
        for r in 0..2 {
            for c in 0..2 {
                let fy: Vec<Complex64> = fr[c].row(y).iter().map(|z| z.conj()).collect();
                let ay = self.block(r, c) * nalgebra::DVector::from_vec(fy);
                let col = fr[r] * ay;
                for (x, v) in col.iter().enumerate() {
                    out[x][2 * r + c] = *v;
                }
            }
        }
        out
    }

    /// All four blocks `F_r A_rc F_c*` as site-by-site matrices.
    pub fn full_blocks(&self) -> [CMat; 4] {
        let fr = self.frames();
        let b = |r: usize, c: usize| cmul(&cmul(fr[r], self.block(r, c)), &fr[c].adjoint());
        [b(0, 0), b(0, 1), b(1, 0), b(1, 1)]
    }
}

pub fn pair_block(blocks: &[CMat; 4], x: usize, y: usize) -> KernelBlock {
    [blocks[0][(x, y)], blocks[1][(x, y)], blocks[2][(x, y)], blocks[3][(x, y)]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_harness::models::circle_dirac;

    #[test]
    fn norm_of_blocks() {
        let c = |a: f64, b: f64| Complex64::new(a, b);
        assert!((block_norm(&[c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]) - 3.0).abs() < 1e-14);
        // rank one: |u||v|
        let k = [c(1.0, 0.0), c(2.0, 0.0), c(0.0, 1.0), c(0.0, 2.0)];
        assert!((block_norm(&k) - 10.0f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn identity_kernel_reproduces_frames() {
        let op = circle_dirac(16, 1).unwrap();
        let id = GradedMatrix::new(
            CMat::identity(op.d.dims().plus, op.d.dims().plus),
            CMat::zeros(op.d.dims().plus, op.d.dims().minus),
            CMat::zeros(op.d.dims().minus, op.d.dims().plus),
            CMat::identity(op.d.dims().minus, op.d.dims().minus),
        )
        .unwrap();
        let k = SiteKernel::new(id, &op).unwrap();
        let full = k.full_blocks();
        for y in [0, 5, 11] {
            let col = k.column(y);
            for x in 0..16 {
                let b = pair_block(&full, x, y);
                for i in 0..4 {
                    assert!((b[i] - col[x][i]).norm() < 1e-12);
                }
            }
        }
    }
}
