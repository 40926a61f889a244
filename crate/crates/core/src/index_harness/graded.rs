//! Block matrices on a graded space `H+ (+) H-`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

use super::linalg::{cmul, frob, CMat};

#[derive(Clone, Debug)]
pub struct GradedMatrix {
    pub pp: CMat,
    pub pm: CMat,
    pub mp: CMat,
    pub mm: CMat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Dims {
    pub plus: usize,
    pub minus: usize,
}

impl GradedMatrix {
    pub fn new(pp: CMat, pm: CMat, mp: CMat, mm: CMat) -> Result<Self> {
        let (p, m) = (pp.nrows(), mm.nrows());
        let ok = pp.ncols() == p && mm.ncols() == m && pm.shape() == (p, m) && mp.shape() == (m, p);
        if !ok {
            return Err(Error::Shape(format!(
                "inconsistent blocks {:?} {:?} {:?} {:?}",
                pp.shape(),
                pm.shape(),
                mp.shape(),
                mm.shape()
            )));
        }
        Ok(GradedMatrix { pp, pm, mp, mm })
    }

    pub fn zeros(d: Dims) -> Self {
        GradedMatrix {
            pp: CMat::zeros(d.plus, d.plus),
            pm: CMat::zeros(d.plus, d.minus),
            mp: CMat::zeros(d.minus, d.plus),
            mm: CMat::zeros(d.minus, d.minus),
        }
    }

    /// `D = [[0, D+*], [D+, 0]]` for `D+ : H+ -> H-`.
    pub fn dirac(d_plus: CMat) -> Self {
        let (m, p) = d_plus.shape();
        GradedMatrix { pp: CMat::zeros(p, p), pm: d_plus.adjoint(), mp: d_plus, mm: CMat::zeros(m, m) }
    }

    /// `diag(0, I)`.
    pub fn minus_projection(d: Dims) -> Self {
        let mut z = GradedMatrix::zeros(d);
        z.mm = CMat::identity(d.minus, d.minus);
        z
    }

    pub fn dims(&self) -> Dims {
        Dims { plus: self.pp.nrows(), minus: self.mm.nrows() }
    }

    pub fn d_plus(&self) -> &CMat {
        &self.mp
    }

    pub fn d_minus(&self) -> &CMat {
        &self.pm
    }

    /// Checks that `self` is an odd self-adjoint operator.
    pub fn check_dirac(&self, tol: f64) -> Result<()> {
        let scale = 1.0f64.max(frob(&self.mp));
        let res = (frob(&self.pp) + frob(&self.mm) + frob(&(&self.pm - self.mp.adjoint()))) / scale;
        if res > tol {
            return Err(Error::NotSelfAdjoint(res));
        }
        Ok(())
    }

    pub fn full(&self) -> CMat {
        let Dims { plus: p, minus: m } = self.dims();
        let mut out = CMat::zeros(p + m, p + m);
        out.view_mut((0, 0), (p, p)).copy_from(&self.pp);
        out.view_mut((0, p), (p, m)).copy_from(&self.pm);
        out.view_mut((p, 0), (m, p)).copy_from(&self.mp);
        out.view_mut((p, p), (m, m)).copy_from(&self.mm);
        out
    }

    pub fn from_full(a: &CMat, d: Dims) -> Result<Self> {
        if a.nrows() != d.plus + d.minus || a.ncols() != a.nrows() {
            return Err(Error::Shape(format!("{:?} does not split as {d:?}", a.shape())));
        }
        let (p, m) = (d.plus, d.minus);
        Ok(GradedMatrix {
            pp: a.view((0, 0), (p, p)).into_owned(),
            pm: a.view((0, p), (p, m)).into_owned(),
            mp: a.view((p, 0), (m, p)).into_owned(),
            mm: a.view((p, p), (m, m)).into_owned(),
        })
    }

    pub fn add(&self, o: &GradedMatrix) -> Result<GradedMatrix> {
        if self.dims() != o.dims() {
            return Err(Error::Shape("graded dimensions differ".into()));
        }
        Ok(GradedMatrix { pp: &self.pp + &o.pp, pm: &self.pm + &o.pm, mp: &self.mp + &o.mp, mm: &self.mm + &o.mm })
    }

    pub fn sub(&self, o: &GradedMatrix) -> Result<GradedMatrix> {
        self.add(&o.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> GradedMatrix {
        GradedMatrix { pp: self.pp.scale_c(s), pm: self.pm.scale_c(s), mp: self.mp.scale_c(s), mm: self.mm.scale_c(s) }
    }

    pub fn mul(&self, o: &GradedMatrix) -> Result<GradedMatrix> {
        if self.dims() != o.dims() {
            return Err(Error::Shape("graded dimensions differ".into()));
        }
        Ok(GradedMatrix {
            pp: cmul(&self.pp, &o.pp) + cmul(&self.pm, &o.mp),
            pm: cmul(&self.pp, &o.pm) + cmul(&self.pm, &o.mm),
            mp: cmul(&self.mp, &o.pp) + cmul(&self.mm, &o.mp),
            mm: cmul(&self.mp, &o.pm) + cmul(&self.mm, &o.mm),
        })
    }

    pub fn adjoint(&self) -> GradedMatrix {
        GradedMatrix { pp: self.pp.adjoint(), pm: self.mp.adjoint(), mp: self.pm.adjoint(), mm: self.mm.adjoint() }
    }

    /// Plain trace over both blocks.
    pub fn trace(&self) -> Complex64 {
        super::linalg::trace(&self.pp) + super::linalg::trace(&self.mm)
    }

    /// `tr A++ - tr A--`.
    pub fn supertrace(&self) -> Complex64 {
        super::linalg::trace(&self.pp) - super::linalg::trace(&self.mm)
    }

    pub fn frob(&self) -> f64 {
        (frob(&self.pp).powi(2) + frob(&self.pm).powi(2) + frob(&self.mp).powi(2) + frob(&self.mm).powi(2)).sqrt()
    }
}

trait ScaleC {
    fn scale_c(&self, s: Complex64) -> CMat;
}

impl ScaleC for CMat {
    fn scale_c(&self, s: Complex64) -> CMat {
        self.map(|z| z * s)
    }
}
