//! Numerical laboratory for stable solutions of `−Δu = f(u)` with convex `f`.

pub mod discretization;
pub mod elliptic;
pub mod error;
pub mod linalg;
pub mod nonlinearity;
pub mod pipeline;
pub mod spectral;
pub mod verify;

pub use discretization::quadrature;
pub use discretization::{build_mesh, DomainSpec, Field, Isometry, Mesh, NodeKind, Norms};
pub use elliptic::{assemble, DiscreteOperator, SolveReport};
pub use error::{Error, Result};
pub use nonlinearity::{Nonlinear, Nonlinearity};
