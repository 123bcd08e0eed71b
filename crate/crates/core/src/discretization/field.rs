//! Nodal fields on a mesh, discrete norms and CSV output.

use std::io::Write;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::discretization::{Geometry, Mesh, NodeKind};

/// Nodal values bound to a mesh. Values are always finite.
#[derive(Clone, Debug)]
pub struct Field {
    mesh: Arc<Mesh>,
    values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub sup: f64,
    pub h1_seminorm: f64,
    pub h1: f64,
}

impl Field {
    pub fn zeros(mesh: &Arc<Mesh>) -> Self {
        Field { mesh: Arc::clone(mesh), values: vec![0.0; mesh.len()] }
    }

    pub fn constant(mesh: &Arc<Mesh>, value: f64) -> Result<Self> {
        Self::from_values(mesh, vec![value; mesh.len()])
    }

    pub fn from_values(mesh: &Arc<Mesh>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.len() {
            return Err(Error::InvalidInput(format!(
                "field has {} values, mesh has {} nodes",
                values.len(),
                mesh.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite value {} at node {i}", values[i])));
        }
        Ok(Field { mesh: Arc::clone(mesh), values })
    }

    /// Samples `g` at every node coordinate.
    pub fn from_fn<G: Fn([f64; 2]) -> f64>(mesh: &Arc<Mesh>, g: G) -> Result<Self> {
        let values = (0..mesh.len()).map(|k| g(mesh.coord(k))).collect();
        Self::from_values(mesh, values)
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, node: usize) -> f64 {
        self.values[node]
    }

    pub fn same_mesh(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.mesh, &other.mesh) || *self.mesh == *other.mesh
    }

    pub fn check_mesh(&self, other: &Field) -> Result<()> {
        if self.same_mesh(other) {
            Ok(())
        } else {
            Err(Error::MeshMismatch)
        }
    }

    pub fn map<G: Fn(f64) -> f64>(&self, g: G) -> Result<Field> {
        Self::from_values(&self.mesh, self.values.iter().map(|&v| g(v)).collect())
    }

    pub fn try_map<G: Fn(f64) -> Result<f64>>(&self, g: G) -> Result<Field> {
        let values = self.values.iter().map(|&v| g(v)).collect::<Result<Vec<_>>>()?;
        Self::from_values(&self.mesh, values)
    }

    pub fn zip_with<G: Fn(f64, f64) -> f64>(&self, other: &Field, g: G) -> Result<Field> {
        self.check_mesh(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| g(a, b)).collect();
        Self::from_values(&self.mesh, values)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, factor: f64) -> Result<Field> {
        self.map(|v| factor * v)
    }

    /// Same values at interior nodes, `boundary` elsewhere.
    pub fn with_boundary(&self, boundary: &Field) -> Result<Field> {
        self.check_mesh(boundary)?;
        let values = (0..self.len())
            .map(|k| if self.mesh.kind(k) == NodeKind::Interior { self.values[k] } else { boundary.values[k] })
            .collect();
        Self::from_values(&self.mesh, values)
    }

    /// Zero outside the interior nodes.
    pub fn interior_only(&self) -> Field {
        let values = (0..self.len())
            .map(|k| if self.mesh.kind(k) == NodeKind::Interior { self.values[k] } else { 0.0 })
            .collect();
        Field { mesh: Arc::clone(&self.mesh), values }
    }

    /// Weighted inner product `Σ w_i a_i b_i`.
    pub fn dot(&self, other: &Field) -> Result<f64> {
        self.check_mesh(other)?;
        Ok(self.mesh.weights().iter().zip(&self.values).zip(&other.values).map(|((w, a), b)| w * a * b).sum())
    }

    /// Weighted integral `Σ w_i u_i`.
    pub fn integral(&self) -> f64 {
        self.mesh.weights().iter().zip(&self.values).map(|(w, v)| w * v).sum()
    }

    /// Maximum over nodes with positive weight or on the boundary.
    pub fn max(&self) -> f64 {
        self.relevant().map(|k| self.values[k]).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.relevant().map(|k| self.values[k]).fold(f64::INFINITY, f64::min)
    }

    fn relevant(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&k| self.mesh.kind(k) != NodeKind::Exterior)
    }

    /// Discrete Dirichlet energy `Σ_edges c (u_a − u_b)²`.
    pub fn dirichlet_energy(&self) -> f64 {
        self.mesh
            .edges()
            .iter()
            .map(|e| e.conductance * (self.values[e.a] - self.values[e.b]).powi(2))
            .sum()
    }

    pub fn norms(&self) -> Norms {
        let w = self.mesh.weights();
        let l1 = w.iter().zip(&self.values).map(|(w, v)| w * v.abs()).sum();
        let l2sq: f64 = w.iter().zip(&self.values).map(|(w, v)| w * v * v).sum();
        let sup = self.relevant().map(|k| self.values[k].abs()).fold(0.0, f64::max);
        let dir = self.dirichlet_energy();
        Norms { l1, l2: l2sq.sqrt(), sup, h1_seminorm: dir.sqrt(), h1: (l2sq + dir).sqrt() }
    }

    /// Linear (1D) or bilinear (2D) interpolation; `None` outside the grid or
    /// when the stencil touches an exterior node.
    pub fn interpolate(&self, p: [f64; 2]) -> Option<f64> {
        let g = self.mesh.locate(p)?;
        let [nx, ny] = self.mesh.shape();
        let i0 = (g[0].floor() as usize).min(nx.saturating_sub(2));
        let tx = g[0] - i0 as f64;
        if self.mesh.is_1d() {
            return Some((1.0 - tx) * self.values[i0] + tx * self.values[i0 + 1]);
        }
        let j0 = (g[1].floor() as usize).min(ny.saturating_sub(2));
        let ty = g[1] - j0 as f64;
        let nodes = [
            self.mesh.node_at(i0, j0),
            self.mesh.node_at(i0 + 1, j0),
            self.mesh.node_at(i0, j0 + 1),
            self.mesh.node_at(i0 + 1, j0 + 1),
        ];
        if nodes.iter().any(|&k| self.mesh.kind(k) == NodeKind::Exterior) {
            return None;
        }
        let v = |n: usize| self.values[nodes[n]];
        Some((1.0 - tx) * (1.0 - ty) * v(0) + tx * (1.0 - ty) * v(1) + (1.0 - tx) * ty * v(2) + tx * ty * v(3))
    }

    /// Writes `coordinate columns,value,kind` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let header = match self.mesh.geometry() {
            Geometry::Interval => "x,value,kind",
            Geometry::Radial { .. } => "r,value,kind",
            Geometry::Cartesian => "x,y,value,kind",
            Geometry::Cylindrical { .. } => "s,y,value,kind",
        };
        writeln!(out, "{header}")?;
        for k in 0..self.len() {
            let p = self.mesh.coord(k);
            let kind = match self.mesh.kind(k) {
                NodeKind::Interior => "interior",
                NodeKind::Boundary => "boundary",
                NodeKind::Exterior => "exterior",
            };
            if self.mesh.is_1d() {
                writeln!(out, "{:.17e},{:.17e},{kind}", p[0], self.values[k])?;
            } else {
                writeln!(out, "{:.17e},{:.17e},{:.17e},{kind}", p[0], p[1], self.values[k])?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{build_mesh, DomainSpec};
    use std::f64::consts::PI;

    fn mesh(d: DomainSpec, res: usize) -> Arc<Mesh> {
        Arc::new(build_mesh(&d, res).unwrap())
    }

    #[test]
    fn rejects_non_finite_and_mismatch() {
        let m = mesh(DomainSpec::unit_interval(), 10);
        assert!(Field::from_fn(&m, |p| 1.0 / p[0]).is_err());
        let other = mesh(DomainSpec::unit_interval(), 20);
        assert_eq!(Field::zeros(&m).sub(&Field::zeros(&other)).unwrap_err(), Error::MeshMismatch);
        // equal meshes built separately are compatible
        let twin = mesh(DomainSpec::unit_interval(), 10);
        assert!(Field::zeros(&m).sub(&Field::zeros(&twin)).is_ok());
    }

    #[test]
    fn quadrature_of_constants() {
        let m = mesh(DomainSpec::ball(2, 1.0), 400);
        let one = Field::constant(&m, 1.0).unwrap();
        assert!((one.norms().l1 - PI).abs() < 1e-4);
        let m = mesh(DomainSpec::ball(3, 1.0), 400);
        let one = Field::constant(&m, 1.0).unwrap();
        assert!((one.integral() - 4.0 * PI / 3.0).abs() < 1e-4);
        let m = mesh(DomainSpec::Disk2D { radius: 1.0 }, 200);
        let one = Field::constant(&m, 1.0).unwrap();
        assert!((one.integral() - PI).abs() < 0.05);
    }

    #[test]
    fn dirichlet_energy_of_linear_profile() {
        let m = mesh(DomainSpec::unit_interval(), 50);
        let u = Field::from_fn(&m, |p| 3.0 * p[0]).unwrap();
        assert!((u.dirichlet_energy() - 9.0).abs() < 1e-12);
        let m = mesh(DomainSpec::Box2D { lx: 1.0, ly: 1.0 }, 20);
        let u = Field::from_fn(&m, |p| p[0] + 2.0 * p[1]).unwrap();
        assert!((u.dirichlet_energy() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn interpolation_reproduces_bilinear() {
        let m = mesh(DomainSpec::Box2D { lx: 1.0, ly: 1.0 }, 10);
        let u = Field::from_fn(&m, |p| 1.0 + p[0] - 2.0 * p[1] + p[0] * p[1]).unwrap();
        for q in [[0.13, 0.77], [0.5, 0.5], [1.0, 1.0], [0.0, 0.31]] {
            let exact = 1.0 + q[0] - 2.0 * q[1] + q[0] * q[1];
            assert!((u.interpolate(q).unwrap() - exact).abs() < 1e-13);
        }
        assert!(u.interpolate([1.2, 0.5]).is_none());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let m = mesh(DomainSpec::unit_interval(), 4);
        let u = Field::from_fn(&m, |p| p[0]).unwrap();
        let mut buf = Vec::new();
        u.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,value,kind");
        assert_eq!(lines.len(), 6);
        assert!(lines[1].ends_with("boundary"));
    }
}
