// `!(x > 0.0)` also rejects NaN, which is the point
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classic_theory;
pub mod dd;
pub mod dsvars;
pub mod elements;
pub mod eps_theory;
pub mod error;
pub mod hamiltonians;
pub mod harness;
pub mod liealgebra;
pub mod reference;
pub mod scalar;

pub use dd::DoubleDouble;
pub use elements::{CartesianState, ClassicalElements, GravityModel, PolarState, RswError};
pub use error::{Error, Result};
pub use liealgebra::Jet2;
pub use scalar::Scalar;
