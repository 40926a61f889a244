//! Pfaffians, characteristic series, Chern characters and surface quadrature.

pub mod chern;
pub mod geometry;
pub mod matrix;
pub mod series;

pub use chern::{chern_character, equivariant_curvature, EndForm, EquivCurvatureData};
pub use geometry::{integrate_density, sample_density, Density, GeomNode, GeometryMeta, SurfaceGeometry};
pub use matrix::{matching_crossings, pf_sub, pfaffian, pfaffian_row_expansion, EvenMatrix, SkewMat};
pub use series::{a_hat, a_hat_inv, analytic_even, det_half_sinhc, log_det_half_sinhc, MatrixSeries};
