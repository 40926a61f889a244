//! Supertrace identity checks and the Thom representative.

pub mod fiber;
pub mod identities;
pub mod profile;
pub mod suite;
pub mod thom;

pub use fiber::{fiber_integral, FiberForm, FiberIntegral, FiberMono, Weight};
pub use identities::{check_grand_identity, check_odd_vanish, check_pf_expansion, check_str_exp, IdentityOutcome};
pub use profile::RadialProfile;
pub use thom::{
    check_thom_closed, check_thom_normalization, random_moment, riemann_roch_flat_check, thom_form, thom_suite, ThomReport,
    ThomSuiteReport,
};
pub use suite::{lookup, registry, run_check, IdentityCheck, SuiteReport};
