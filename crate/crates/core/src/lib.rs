//! Equivariant gradient-like flows on torus manifolds.
//!
//! The crate constructs compact T-manifolds with equivariant atlases
//! (projective spaces, smooth complete toric manifolds, even spheres),
//! integrates the associated gradient-like dynamical system exactly and with
//! a Runge–Kutta cross-check, and machine-verifies the structural properties
//! of the construction: hyperbolicity of the fixed points, flow equivariance,
//! convergence of all orbits to fixed points, decay of the field norm along
//! flows, and the covering/equivariance properties of the atlases. The
//! resulting decomposition into basins is reported together with Morse
//! indices, the Poincaré polynomial, and the connection poset.
//!
//! Sign convention used everywhere: a coordinate with flow exponent a > 0 is
//! contracted forward in time, w(s) = w·e^{−a s}.

pub mod decomposition;
pub mod error;
pub mod flow;
pub mod metric;
pub mod models;
pub mod sampling;
pub mod torus;
pub mod verdict;

pub use error::{Error, Result};
pub use models::{Model, ModelDescriptor, Point};
pub use torus::{GeneratorVector, TorusElement, Weight};
pub use verdict::{ToleranceSet, Verdict};

/// The convention statement embedded in every report header.
pub const SIGN_CONVENTION: &str =
    "flow exponent a_i = 2*pi*<m_i, a0>; a_i > 0 contracts coordinate i forward in time (w_i(s) = w_i*e^(-a_i*s))";
