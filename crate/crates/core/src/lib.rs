pub mod error;
pub mod scalar;
pub mod series;
pub mod matrix;
pub mod operators;
pub mod space;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{ComplexRational, Rational};
pub use series::{PowerSeries, TailModel};
pub use space::{make_space, SpaceKind, WeightSequence};
