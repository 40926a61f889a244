//! Sampled closed surfaces for integrating characteristic densities.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chern::{chern_character, EndForm};
use super::matrix::{EvenMatrix, SkewMat};
use super::series::a_hat;
use crate::algebra_core::{ExtElem, IndexSet, Scalar};
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GeomNode {
    pub weight: f64,
    /// Gaussian curvature.
    #[serde(rename = "K")]
    pub k: f64,
    /// Line-bundle curvature density (the 2-form is F dA).
    #[serde(rename = "F", default)]
    pub f: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct GeometryMeta {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flux: Option<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SurfaceGeometry {
    pub nodes: Vec<GeomNode>,
    #[serde(default)]
    pub meta: GeometryMeta,
}

impl SurfaceGeometry {
    pub fn from_json(text: &str) -> Result<Self> {
        let g: SurfaceGeometry = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::InvalidConfig("geometry has no nodes".into()));
        }
        if let Some((i, _)) = self.nodes.iter().enumerate().find(|(_, n)| !(n.weight > 0.0) || !n.weight.is_finite()) {
            return Err(Error::InvalidConfig(format!("node {i} has a non-positive weight")));
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        deterministic_sum(&self.nodes.iter().map(|n| n.weight).collect::<Vec<_>>())
    }

    /// Round sphere of radius r with a monopole line bundle of flux k.
    ///
    /// `ripple` adds an exact perturbation proportional to cos(theta), which
    /// leaves the total flux unchanged.
    pub fn round_sphere(r: f64, n_theta: usize, n_phi: usize, flux: i64, ripple: f64) -> Self {
        let (u, w) = gauss_legendre(n_theta);
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        for (ui, wi) in u.iter().zip(&w) {
            for _ in 0..n_phi {
                let f0 = flux as f64 / (2.0 * r * r);
                nodes.push(GeomNode { weight: r * r * wi * 2.0 * PI / n_phi as f64, k: 1.0 / (r * r), f: f0 * (1.0 + ripple * ui) });
            }
        }
        SurfaceGeometry {
            nodes,
            meta: GeometryMeta { name: format!("sphere(r={r})"), area: Some(4.0 * PI * r * r), euler: Some(2), flux: Some(flux) },
        }
    }

    /// Flat torus [0,l1) x [0,l2) with uniform flux k plus an exact ripple along x.
    pub fn flat_torus(l1: f64, l2: f64, n1: usize, n2: usize, flux: i64, ripple: f64) -> Self {
        let a = l1 * l2;
        let w = a / (n1 * n2) as f64;
        let mut nodes = Vec::with_capacity(n1 * n2);
        for i in 0..n1 {
            let x = l1 * i as f64 / n1 as f64;
            for _ in 0..n2 {
                let f = 2.0 * PI * flux as f64 / a + ripple * (2.0 * PI * x / l1).cos();
                nodes.push(GeomNode { weight: w, k: 0.0, f });
            }
        }
        SurfaceGeometry {
            nodes,
            meta: GeometryMeta { name: format!("torus({l1}x{l2})"), area: Some(a), euler: Some(0), flux: Some(flux) },
        }
    }

    pub fn builtin(name: &str, flux: i64) -> Result<Self> {
        match name {
            "sphere" => Ok(SurfaceGeometry::round_sphere(1.0, 24, 32, flux, 0.3)),
            "torus" => Ok(SurfaceGeometry::flat_torus(2.0 * PI, 3.0, 32, 24, flux, 0.5)),
            _ => Err(Error::UnknownName { kind: "geometry", name: name.into(), known: "sphere, torus".into() }),
        }
    }
}

/// Which top-degree density to sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Density {
    /// K / 2pi, integrating to the Euler characteristic.
    Euler,
    /// F / 2pi, integrating to the degree of the line bundle.
    C1,
    /// Top component of A-hat(R/2pi) ^ ch(F/2pi).
    Index,
}

impl Density {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "euler" => Ok(Density::Euler),
            "c1" => Ok(Density::C1),
            "index" => Ok(Density::Index),
            _ => Err(Error::UnknownName { kind: "density", name: s.into(), known: "euler, c1, index".into() }),
        }
    }
}

/// Top-degree coefficient of A-hat ^ ch at one node, from 2-form algebra on two generators.
pub fn index_density_at(node: &GeomNode) -> Result<f64> {
    let area = ExtElem::monomial(2, IndexSet::full(2), Scalar::one());
    let r12 = area.scale(&Scalar::real(node.k / (2.0 * PI)));
    let r = SkewMat::from_upper(2, 2, &[r12])?;
    let ahat = a_hat(&r)?;
    let fm = EvenMatrix::from_fn(1, 2, |_, _| area.scale(&Scalar::real(node.f / (2.0 * PI))))?;
    let ch = chern_character(&EndForm::new(1, 0, fm)?)?;
    Ok((&ahat * &ch).berezin_top(2).to_c64().re)
}

pub fn sample_density(geom: &SurfaceGeometry, d: Density) -> Result<Vec<f64>> {
    geom.nodes
        .iter()
        .map(|n| match d {
            Density::Euler => Ok(n.k / (2.0 * PI)),
            Density::C1 => Ok(n.f / (2.0 * PI)),
            Density::Index => index_density_at(n),
        })
        .collect()
}

/// Quadrature of sampled top-degree density values.
pub fn integrate_density(values: &[f64], geom: &SurfaceGeometry) -> Result<Scalar> {
    if values.len() != geom.nodes.len() {
        return Err(Error::Shape(format!("{} samples for {} nodes", values.len(), geom.nodes.len())));
    }
    let weighted: Vec<f64> = values.iter().zip(&geom.nodes).map(|(v, n)| v * n.weight).collect();
    Ok(Scalar::real(deterministic_sum(&weighted)))
}

/// Parallel sum with a fixed chunking, so the result does not depend on thread count.
pub fn deterministic_sum(v: &[f64]) -> f64 {
    let partial: Vec<f64> = v.par_chunks(4096).map(|c| c.iter().sum::<f64>()).collect();
    partial.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_area_and_gauss_bonnet() {
        let g = SurfaceGeometry::round_sphere(1.7, 20, 16, 3, 0.3);
        assert!((g.area() - 4.0 * PI * 1.7 * 1.7).abs() < 1e-10);
        let ones = vec![1.0; g.nodes.len()];
        assert!((integrate_density(&ones, &g).unwrap().to_c64().re - g.meta.area.unwrap()).abs() < 1e-10);
        let e = integrate_density(&sample_density(&g, Density::Euler).unwrap(), &g).unwrap();
        assert!((e.to_c64().re - 2.0).abs() < 1e-8);
        let c = integrate_density(&sample_density(&g, Density::C1).unwrap(), &g).unwrap();
        assert!((c.to_c64().re - 3.0).abs() < 1e-8);
    }

    #[test]
    fn torus_flux() {
        let g = SurfaceGeometry::flat_torus(2.0 * PI, 3.0, 32, 8, -2, 0.5);
        assert!((g.area() - 6.0 * PI).abs() < 1e-10);
        let c = integrate_density(&sample_density(&g, Density::Index).unwrap(), &g).unwrap();
        assert!((c.to_c64().re + 2.0).abs() < 1e-8);
    }

    #[test]
    fn json_geometry() {
        let g = SurfaceGeometry::from_json(r#"{"nodes":[{"weight":2.0,"K":0.5,"F":1.0}],"meta":{"name":"x"}}"#).unwrap();
        assert_eq!(g.nodes[0].k, 0.5);
        assert!(SurfaceGeometry::from_json(r#"{"nodes":[{"weight":-1.0,"K":0.5}]}"#).is_err());
        assert!(integrate_density(&[1.0, 2.0], &g).is_err());
    }
}
