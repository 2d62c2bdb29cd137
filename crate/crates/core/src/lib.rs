//! Entanglement monotones, LOCC random-distillation protocols and
//! separable-operation feasibility for `N`-qubit W-class states.

pub mod error;
pub mod gap;
pub mod monotones;
pub mod multicopy;
pub mod protocols;
pub mod sampling;
pub mod scalar;
pub mod sdp;
pub mod wstate;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
pub use wstate::{
    apply_diagonal, apply_measurement, kt_upper_bound, sorted_indices, DiagonalMeasurement, KrausOp,
    LocalMeasurement, SortedIndices, WClassState,
};
