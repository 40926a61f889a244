//! Finite lattices on flat periodic boxes.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct LatticeGeometry {
    /// Period of each axis; distances are flat with wrap-around.
    pub periods: Vec<f64>,
    pub positions: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl LatticeGeometry {
    /// Uniform grid with `n` points per axis.
    pub fn uniform(periods: &[f64], n: usize) -> Result<Self> {
        if n == 0 || periods.is_empty() || periods.iter().any(|&p| !(p > 0.0)) {
            return Err(Error::InvalidConfig("lattice needs n > 0 and positive periods".into()));
        }
        let dim = periods.len();
        let total = n.pow(dim as u32);
        let cell: f64 = periods.iter().map(|p| p / n as f64).product();
        let mut positions = Vec::with_capacity(total);
        for idx in 0..total {
            let mut rest = idx;
            let mut pos = vec![0.0; dim];
            // first axis varies slowest
            for a in (0..dim).rev() {
                pos[a] = periods[a] * (rest % n) as f64 / n as f64;
                rest /= n;
            }
            positions.push(pos);
        }
        Ok(LatticeGeometry { periods: periods.to_vec(), positions, weights: vec![cell; total] })
    }

    pub fn dim(&self) -> usize {
        self.periods.len()
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let mut s = 0.0;
        for ((a, b), p) in self.positions[i].iter().zip(&self.positions[j]).zip(&self.periods) {
            let d = (a - b).abs() % p;
            let d = d.min(p - d);
            s += d * d;
        }
        s.sqrt()
    }

    pub fn diameter(&self) -> f64 {
        self.periods.iter().map(|p| (p / 2.0).powi(2)).sum::<f64>().sqrt()
    }

    /// Positive weights, symmetric distances and the triangle inequality on random triples.
    pub fn validate(&self, samples: usize, rng: &mut impl Rng) -> Result<()> {
        if self.weights.len() != self.len() || self.weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidConfig("lattice weights must be positive".into()));
        }
        if self.is_empty() {
            return Ok(());
        }
        for _ in 0..samples {
            let (a, b, c) = (rng.gen_range(0..self.len()), rng.gen_range(0..self.len()), rng.gen_range(0..self.len()));
            if (self.distance(a, b) - self.distance(b, a)).abs() > 1e-12 {
                return Err(Error::InvalidConfig(format!("asymmetric distance at ({a}, {b})")));
            }
            if self.distance(a, c) > self.distance(a, b) + self.distance(b, c) + 1e-12 {
                return Err(Error::InvalidConfig(format!("triangle inequality fails at ({a}, {b}, {c})")));
            }
        }
        Ok(())
    }
}
