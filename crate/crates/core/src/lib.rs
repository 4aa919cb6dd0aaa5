//! Schreier families, repeated averages, ordinal-indexed trees of step
//! functions, and projective tensor norms, with exact arithmetic wherever
//! the quantities are rational.

pub mod error;
pub mod harness;
mod lp;
pub mod ordinal;
pub mod schreier;
pub mod space;
pub mod tensor;
pub mod trees;
pub mod weights;

pub use error::Error;
pub use ordinal::Ordinal;
pub use schreier::{Family, FiniteSet, Limits};
pub use space::{AtomicMeasure, CantorScheme, Interval, IntervalSet, StepFunction};
pub use tensor::{DualCertificate, TensorMatrix};
pub use trees::{Node, TGamma};
pub use weights::Weight;
