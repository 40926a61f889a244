//! Dense complex helpers. Products go through real matrices, which are much
//! faster than the generic complex kernel.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

fn split(a: &CMat) -> (DMatrix<f64>, DMatrix<f64>) {
    (a.map(|z| z.re), a.map(|z| z.im))
}

pub fn cmul(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.ncols(), b.nrows(), "product shape");
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let re = &ar * &br - &ai * &bi;
    let im = &ar * &bi + &ai * &br;
    CMat::from_fn(a.nrows(), b.ncols(), |i, j| Complex64::new(re[(i, j)], im[(i, j)]))
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl HermEig {
    pub fn new(a: &CMat) -> HermEig {
        let n = a.nrows();
        if n == 0 {
            return HermEig { values: vec![], vectors: CMat::zeros(0, 0) };
        }
        let h = (a + a.adjoint()).scale(0.5);
        let e = h.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| e.eigenvalues[i].total_cmp(&e.eigenvalues[j]));
        let values = order.iter().map(|&i| e.eigenvalues[i]).collect();
        let vectors = CMat::from_fn(n, n, |r, c| e.eigenvectors[(r, order[c])]);
        HermEig { values, vectors }
    }

    /// `V diag(f(lambda)) V*`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMat {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (c, &l) in self.values.iter().enumerate() {
            let s = f(l);
            for r in 0..n {
                scaled[(r, c)] *= s;
            }
        }
        cmul(&scaled, &self.vectors.adjoint())
    }
}

pub fn frob(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(a: &CMat) -> Complex64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

/// `tr(a b)` without forming the product.
pub fn trace_of_product(a: &CMat, b: &CMat) -> Complex64 {
    assert!(a.ncols() == b.nrows() && a.nrows() == b.ncols(), "trace product shape");
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}
