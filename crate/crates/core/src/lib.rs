//! Non-open C¹ maps with a unique critical point.
//!
//! Every map here has the form `F(x) = exp(-1/G(x)) · x`, where `G` is a
//! power of a norm that is strictly weaker than the ambient norm. Such an
//! `F` is C¹, invertible in derivative everywhere except the origin, and
//! still fails to be open at the origin. The crate evaluates these maps on
//! exactly represented vectors and produces numerical certificates for each
//! of those properties.
//!
//! - [`vector`], [`space_models`]: vectors and strong norms.
//! - [`gauges`]: the gauge `G`, its derivative and Lipschitz bounds.
//! - [`map_f`]: `F`, `J_F`, the rank-one inverse and the radial inverse.
//! - [`witnesses`]: non-openness, criticality and separability certificates.
//! - [`gradcheck`]: finite-difference validation of the analytic derivatives.
//! - [`cli`]: the command-line surface.

pub mod cli;
pub mod error;
pub mod gauges;
pub mod gradcheck;
pub mod map_f;
pub mod roots;
pub mod sampling;
pub mod space_models;
pub mod vector;
pub mod witnesses;

pub use error::{Error, Result};
pub use gauges::{FamilyId, FunctionalFamily, GaugeKind, GaugeSpec};
pub use map_f::{MapSpec, SolveResult};
pub use space_models::{ModelKind, SpaceModel};
pub use vector::{GridFunction, SparseVector, Vector};
