//! Radial cutoff profiles chi = f(|x|^2).

use serde::Serialize;

use crate::error::{Error, Result};

use super::fiber::radial_moment_numeric;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RadialProfile {
    /// The t -> infinity limit of the cutoff family: the Gaussian representative.
    Gaussian,
    /// Smooth step in u = |x|^2, equal to 1 for |x| <= inner and 0 for |x| >= outer.
    Compact { inner: f64, outer: f64 },
}

impl RadialProfile {
    pub fn compact(inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && outer > inner && outer.is_finite()) {
            return Err(Error::InvalidConfig(format!("profile radii ({inner}, {outer}) must satisfy 0 < inner < outer")));
        }
        Ok(RadialProfile::Compact { inner, outer })
    }

    pub fn default_compact() -> Self {
        RadialProfile::Compact { inner: 1.0, outer: 2.0 }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(RadialProfile::Gaussian),
            "compact" => Ok(RadialProfile::default_compact()),
            _ => {
                let rest = s.strip_prefix("compact:").ok_or_else(|| Error::UnknownName {
                    kind: "profile",
                    name: s.into(),
                    known: "gaussian, compact, compact:INNER,OUTER".into(),
                })?;
                let (a, b) = rest.split_once(',').ok_or_else(|| Error::Parse(format!("bad radii '{rest}'")))?;
                let a: f64 = a.trim().parse().map_err(|_| Error::Parse(format!("bad radius '{a}'")))?;
                let b: f64 = b.trim().parse().map_err(|_| Error::Parse(format!("bad radius '{b}'")))?;
                RadialProfile::compact(a, b)
            }
        }
    }

    /// d-th derivative of f at u = |x|^2, d <= 2.
    pub fn deriv(&self, u: f64, d: usize) -> Result<f64> {
        let (inner, outer) = match self {
            RadialProfile::Gaussian => return Err(Error::InvalidConfig("the Gaussian profile has no cutoff".into())),
            RadialProfile::Compact { inner, outer } => (*inner, *outer),
        };
        let (a, b) = (inner * inner, outer * outer);
        if u <= a {
            return Ok(if d == 0 { 1.0 } else { 0.0 });
        }
        if u >= b {
            return Ok(0.0);
        }
        let width = b - a;
        let s = (b - u) / width;
        // f = 1 / (1 + e^q), q = 1/s - 1/(1-s)
        let q = 1.0 / s - 1.0 / (1.0 - s);
        let q1 = -1.0 / (s * s) - 1.0 / ((1.0 - s) * (1.0 - s));
        let q2 = 2.0 / (s * s * s) - 2.0 / ((1.0 - s) * (1.0 - s) * (1.0 - s));
        let l = if q > 0.0 { (-q).exp() / (1.0 + (-q).exp()) } else { 1.0 / (1.0 + q.exp()) };
        let c = 0.25 / (0.5 * q).cosh().powi(2);
        match d {
            0 => Ok(l),
            1 => Ok(-c * q1 * (-1.0 / width)),
            2 => Ok(((1.0 - 2.0 * l) * c * q1 * q1 - c * q2) / (width * width)),
            _ => Err(Error::InvalidConfig("profile derivatives above order 2 are not tabulated".into())),
        }
    }

    /// 1/2 int_0^inf f^(d)(u) u^p du.
    pub fn radial_moment(&self, d: usize, p: i64) -> Result<f64> {
        let (inner, outer) = match self {
            RadialProfile::Gaussian => return Err(Error::InvalidConfig("the Gaussian profile has no cutoff".into())),
            RadialProfile::Compact { inner, outer } => (*inner, *outer),
        };
        let (a, b) = (inner * inner, outer * outer);
        let f = |u: f64| self.deriv(u, d).unwrap_or(0.0);
        if d == 0 {
            if p < 0 {
                return Err(Error::InvalidConfig("radial integrand is singular at the origin".into()));
            }
            // f = 1 on [0, a]
            Ok(0.5 * a.powi(p as i32 + 1) / (p + 1) as f64 + radial_moment_numeric(f, a, b, p)?)
        } else {
            radial_moment_numeric(f, a, b, p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_shape() {
        let p = RadialProfile::default_compact();
        assert_eq!(p.deriv(0.5, 0).unwrap(), 1.0);
        assert_eq!(p.deriv(5.0, 0).unwrap(), 0.0);
        assert!((p.deriv(2.5, 0).unwrap() - 0.5).abs() < 1e-15);
        let mut last = 1.0;
        for k in 0..=300 {
            let v = p.deriv(1.0 + 3.0 * k as f64 / 300.0, 0).unwrap();
            assert!((0.0..=1.0).contains(&v) && v <= last + 1e-15);
            last = v;
        }
    }

    #[test]
    fn derivatives_match_differences() {
        let p = RadialProfile::compact(0.5, 3.0).unwrap();
        let h = 1e-5;
        for u in [0.4, 1.0, 3.3, 7.0, 8.9] {
            let d1 = (p.deriv(u + h, 0).unwrap() - p.deriv(u - h, 0).unwrap()) / (2.0 * h);
            let d2 = (p.deriv(u + h, 1).unwrap() - p.deriv(u - h, 1).unwrap()) / (2.0 * h);
            assert!((d1 - p.deriv(u, 1).unwrap()).abs() < 1e-7, "u={u}");
            assert!((d2 - p.deriv(u, 2).unwrap()).abs() < 1e-6, "u={u}");
        }
    }

    #[test]
    fn derivative_integrates_to_minus_one() {
        for p in [RadialProfile::default_compact(), RadialProfile::compact(0.5, 3.0).unwrap()] {
            assert!((2.0 * p.radial_moment(1, 0).unwrap() + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn parse_profiles() {
        assert_eq!(RadialProfile::parse("compact:0.5,3").unwrap(), RadialProfile::Compact { inner: 0.5, outer: 3.0 });
        assert!(RadialProfile::parse("compact:3,1").is_err());
        assert!(RadialProfile::parse("box").is_err());
    }
}
