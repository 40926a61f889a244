//! Getzler symbol calculus: star product, model Hamiltonian, trace density, cube constants.

pub mod checks;
pub mod constants;
pub mod symbol;
pub mod trace;

pub use checks::{star_checks, StarReport};
pub use constants::{beta_q, constant_combination_check, delta_q, CombinationReport};
pub use symbol::{model_hamiltonian, rule_consistency, star, CurvPairing, RuleConsistency, Symbol, SymbolOp};
pub use trace::{gaussian_xi_integral, trace_density, GradedSymbol, XiIntegral};
