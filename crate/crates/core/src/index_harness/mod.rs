//! Heat-kernel index classes of model Dirac operators on lattices, their
//! kernel decay, and cochain pairings against the local index density.

pub mod cochain;
pub mod decay;
pub mod geometry;
pub mod graded;
pub mod kernel;
pub mod linalg;
pub mod models;
pub mod pairing;
pub mod wassermann;

pub use cochain::{area_cochain, Cochain, CochainKind, PlaneWaveFn};
pub use decay::{kernel_decay_scan, measured_decay, DecayRow, KernelKind, LineFit, PairSample};
pub use geometry::LatticeGeometry;
pub use graded::{Dims, GradedMatrix};
pub use kernel::SiteKernel;
pub use models::{circle_dirac, lookup_model, model_registry, torus_dirac, DiracModel, ModelOperator};
pub use pairing::{
    growth_check, pairing_limit_sweep, target_density, tau_brute_force, tau_pairing, tau_value, GrowthCheck, SweepReport,
    TargetDensity,
};
pub use wassermann::{idempotency_residual, str_index, wassermann_class, IdempotencyResidual, SchwartzPair, WassermannCalc};
