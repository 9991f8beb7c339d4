//! Log-domain real-rooted polynomials, their coefficient profiles, finite free
//! convolutions, and the transforms used to compare root distributions with limits.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closedform;
pub mod error;
pub mod freeconv;
pub mod generators;
pub mod logpoly;
pub mod numeric;
pub mod profile;
pub mod suite;
pub mod transforms;

pub use closedform::MeasureSpec;
pub use error::{Error, Result};
pub use logpoly::{EmpiricalMeasure, LogPoly, Recipe};
pub use profile::{Profile, TiltingContext};
pub use transforms::{Measure, TransformKind, TransformSample};
