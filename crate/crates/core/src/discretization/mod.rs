//! Domains, structured meshes, nodal fields, norms and quadrature.

mod field;
mod mesh;
pub mod quadrature;

pub use field::{Field, Norms};
pub use mesh::{build_mesh, Cut, DomainSpec, Edge, Geometry, Isometry, Mesh, MeshHeader, NodeKind, StretchMap};
