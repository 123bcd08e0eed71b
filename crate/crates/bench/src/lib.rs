//! Problem fixtures shared by the criterion benches.

use std::sync::Arc;

use stablelab::{assemble, build_mesh, DiscreteOperator, DomainSpec, Field};

pub fn operator(domain: &DomainSpec, resolution: usize) -> DiscreteOperator {
    assemble(&Arc::new(build_mesh(domain, resolution).expect("valid fixture domain")))
}

/// Radial unit ball in dimension 10 with the singular profile `−2 ln r`.
pub fn singular_log(resolution: usize) -> (DiscreteOperator, Field) {
    let op = operator(&DomainSpec::ball(10, 1.0), resolution);
    let u = Field::from_fn(op.mesh(), |p| -2.0 * p[0].ln()).expect("finite away from the origin");
    (op, u)
}

pub fn hardy_potential(op: &DiscreteOperator, c: f64) -> Field {
    Field::from_fn(op.mesh(), |p| c / (p[0] * p[0])).expect("finite away from the origin")
}
