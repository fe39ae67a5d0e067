//! Irreducible SO(3) structures on five-dimensional Riemannian geometries.
//!
//! The crate is organized bottom-up:
//!
//! * [`scalar`] and [`linalg`]: exact ℚ(√3) and float arithmetic, dense
//!   elimination, null spaces and spectral projectors.
//! * [`exterior`]: forms, wedge, Hodge star and the exterior derivative of a
//!   coframe with constant structure coefficients.
//! * [`upsilon`]: the defining tensor Υ, its identities, frame adaptation and
//!   the stabilizer.
//! * [`repr`]: the operators Υ̂, Υ̌, Ὺ, Ῡ, Υ′ and the SO(3)-irreducible
//!   decompositions they induce.
//! * [`connection`]: Levi-Civita and characteristic connections, curvature,
//!   Ricci and Weyl tensors, Bianchi identities, the Cartan su(3) connection.
//! * [`catalog`]: the homogeneous examples and the flat-constraint solver.
//! * [`spin`]: the spin(3) representation and the parallel-spinor obstruction.
//! * [`twistor`]: exact fiber calculus on the twistor bundle, CR residuals
//!   and the G₂ 3-form.
//!
//! Everything geometric is generic over [`scalar::Field`]; the aliases below
//! fix the common instantiations.

#![forbid(unsafe_code)]

pub mod catalog;
pub mod connection;
pub mod error;
pub mod exterior;
pub mod io;
pub mod linalg;
pub mod report;
pub mod repr;
pub mod scalar;
pub mod spin;
pub mod twistor;
pub mod upsilon;
pub mod validation;

pub use error::{Error, Result};
pub use exterior::{CoframeModel, Form};
pub use scalar::{Field, QSqrt3, Scalar};

/// Exact coframe model over ℚ(√3).
pub type ExactModel = CoframeModel<QSqrt3>;
/// Float coframe model.
pub type FloatModel = CoframeModel<f64>;
/// Coframe model with per-coefficient exact or float kind.
pub type Model = CoframeModel<Scalar>;
/// Exact matrix.
pub type ExactMatrix = linalg::Matrix<QSqrt3>;
/// Float matrix.
pub type FloatMatrix = linalg::Matrix<f64>;
