pub mod ext;
pub mod index_set;
pub mod scalar;

pub use ext::{eps, ExtElem, ExtElemJson, TermJson};
pub use index_set::{IndexSet, MAX_GENERATORS};
pub use scalar::{rat, rat_to_f64, GaussRational, Rational, Scalar};
