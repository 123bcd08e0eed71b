use std::sync::Arc;

use crate::discretization::{Field, Geometry, Mesh, NodeKind};
use crate::error::Result;
use crate::linalg::CsrMatrix;

/// Discrete `−Δ` on the interior nodes of a mesh with Dirichlet elimination.
///
/// Rows are `(−Δ_h u)_i = Σ_j a_ij u_j + Σ_b c_ib g_b`, where `j` runs over
/// interior unknowns and `b` over the boundary/exterior nodes holding data.
/// Edge-based meshes give `A = W⁻¹K` with `K` symmetric; the disk uses the
/// nonsymmetric Shortley–Weller stencil.
#[derive(Clone, Debug)]
pub struct DiscreteOperator {
    mesh: Arc<Mesh>,
    unknowns: Vec<usize>,
    slot: Vec<usize>,
    matrix: CsrMatrix,
    coupling: Vec<Vec<(usize, f64)>>,
    weights: Option<Vec<f64>>,
}

const NONE: usize = usize::MAX;

/// Assembles the discrete Laplacian of `mesh`.
pub fn assemble(mesh: &Arc<Mesh>) -> DiscreteOperator {
    let unknowns: Vec<usize> = (0..mesh.len()).filter(|&k| mesh.kind(k) == NodeKind::Interior).collect();
    let mut slot = vec![NONE; mesh.len()];
    for (s, &k) in unknowns.iter().enumerate() {
        slot[k] = s;
    }
    let n = unknowns.len();
    let mut triplets = Vec::new();
    let mut coupling = vec![Vec::new(); n];
    let curved = !mesh.cuts().is_empty();
    if curved {
        shortley_weller(mesh, &slot, &mut triplets, &mut coupling);
    } else {
        let w = mesh.weights();
        let mut push = |row_node: usize, col_node: usize, c: f64| {
            let r = slot[row_node];
            if r == NONE {
                return;
            }
            let c = c / w[row_node];
            triplets.push((r, r, c));
            match slot[col_node] {
                NONE => coupling[r].push((col_node, -c)),
                s => triplets.push((r, s, -c)),
            }
        };
        for e in mesh.edges() {
            push(e.a, e.b, e.conductance);
            push(e.b, e.a, e.conductance);
        }
    }
    let weights = (!curved).then(|| unknowns.iter().map(|&k| mesh.weights()[k]).collect());
    DiscreteOperator {
        mesh: Arc::clone(mesh),
        unknowns,
        slot,
        matrix: CsrMatrix::from_triplets(n, triplets),
        coupling,
        weights,
    }
}

fn shortley_weller(
    mesh: &Mesh,
    slot: &[usize],
    triplets: &mut Vec<(usize, usize, f64)>,
    coupling: &mut [Vec<(usize, f64)>],
) {
    let h = mesh.spacing();
    let [nx, _] = mesh.shape();
    let mut cut_at = std::collections::HashMap::new();
    for c in mesh.cuts() {
        cut_at.insert((c.node, c.axis, c.sign), c.distance);
    }
    for k in 0..mesh.len() {
        let r = slot[k];
        if r == NONE {
            continue;
        }
        for axis in 0..2 {
            let stride = if axis == 0 { 1 } else { nx };
            let dm = cut_at.get(&(k, axis, -1)).copied().unwrap_or(h[axis]);
            let dp = cut_at.get(&(k, axis, 1)).copied().unwrap_or(h[axis]);
            let cm = 2.0 / (dm * (dm + dp));
            let cp = 2.0 / (dp * (dm + dp));
            triplets.push((r, r, cm + cp));
            for (nb, c) in [(k - stride, cm), (k + stride, cp)] {
                match slot[nb] {
                    NONE => coupling[r].push((nb, -c)),
                    s => triplets.push((r, s, -c)),
                }
            }
        }
    }
}

impl DiscreteOperator {
    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    /// Interior node ids in unknown order.
    pub fn unknowns(&self) -> &[usize] {
        &self.unknowns
    }

    pub fn unknown_count(&self) -> usize {
        self.unknowns.len()
    }

    /// Unknown index of `node`, if interior.
    pub fn slot(&self, node: usize) -> Option<usize> {
        match self.slot[node] {
            NONE => None,
            s => Some(s),
        }
    }

    /// Interior block of the operator.
    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    /// Node weights of the unknowns when `A = W⁻¹K` with `K` symmetric.
    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn is_symmetrizable(&self) -> bool {
        self.weights.is_some()
    }

    /// `W^{1/2} A W^{-1/2}`, symmetric, for edge-based meshes.
    pub fn symmetrized(&self) -> Option<CsrMatrix> {
        let w = self.weights.as_ref()?;
        let s: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
        let si: Vec<f64> = s.iter().map(|v| 1.0 / v).collect();
        Some(self.matrix.scale(&s, &si))
    }

    /// Values of `u` at the unknowns.
    pub fn gather(&self, u: &Field) -> Vec<f64> {
        self.unknowns.iter().map(|&k| u.get(k)).collect()
    }

    /// Field with `x` at the unknowns and `boundary` elsewhere.
    pub fn scatter(&self, x: &[f64], boundary: &Field) -> Result<Field> {
        let mut values = boundary.values().to_vec();
        for (&k, &v) in self.unknowns.iter().zip(x) {
            values[k] = v;
        }
        Field::from_values(&self.mesh, values)
    }

    /// Contribution `Σ_b c_ib g_b` of the Dirichlet data to each row.
    pub fn boundary_term(&self, boundary: &Field) -> Vec<f64> {
        self.coupling.iter().map(|row| row.iter().map(|&(b, c)| c * boundary.get(b)).sum()).collect()
    }

    /// `(−Δ_h u)` at the unknowns.
    pub fn apply_interior(&self, u: &Field) -> Vec<f64> {
        let x = self.gather(u);
        let mut y = self.matrix.mul(&x);
        for (yi, bi) in y.iter_mut().zip(self.boundary_term(u)) {
            *yi += bi;
        }
        y
    }

    /// `−Δ_h u` as a field, zero off the interior.
    pub fn apply(&self, u: &Field) -> Result<Field> {
        let y = self.apply_interior(u);
        let mut values = vec![0.0; self.mesh.len()];
        for (&k, v) in self.unknowns.iter().zip(y) {
            values[k] = v;
        }
        Field::from_values(&self.mesh, values)
    }

    /// Whether the mesh is one-dimensional or radial.
    pub fn is_1d(&self) -> bool {
        matches!(self.mesh.geometry(), Geometry::Interval | Geometry::Radial { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{build_mesh, DomainSpec};

    fn op(d: DomainSpec, res: usize) -> DiscreteOperator {
        assemble(&Arc::new(build_mesh(&d, res).unwrap()))
    }

    #[test]
    fn interval_stencil() {
        let a = op(DomainSpec::unit_interval(), 4);
        let m = a.matrix();
        assert_eq!(a.unknown_count(), 3);
        assert!((m.get(1, 1) - 32.0).abs() < 1e-12);
        assert!((m.get(1, 0) + 16.0).abs() < 1e-12);
        assert!((m.get(1, 2) + 16.0).abs() < 1e-12);
        assert!(m.is_symmetric(1e-14));
    }

    #[test]
    fn row_sums_vanish_with_boundary() {
        for d in [
            DomainSpec::unit_interval(),
            DomainSpec::ball(5, 1.0),
            DomainSpec::Box2D { lx: 1.0, ly: 2.0 },
            DomainSpec::Disk2D { radius: 1.0 },
            DomainSpec::Dumbbell { dim: 11, stretch: 2, layer: 0.5 },
        ] {
            let a = op(d.clone(), 24);
            let one = Field::constant(a.mesh(), 1.0).unwrap();
            let r = a.apply_interior(&one);
            let scale = a.matrix().diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(r.iter().all(|v| v.abs() < 1e-10 * scale), "{d:?}");
        }
    }

    #[test]
    fn radial_quadratic_is_exact() {
        let a = op(DomainSpec::ball(3, 1.0), 50);
        // conservative form with node weights r_i² h: error h²/(2r_i²)
        let u = Field::from_fn(a.mesh(), |p| 1.0 - p[0] * p[0]).unwrap();
        let h = a.mesh().h();
        for (&k, v) in a.unknowns().iter().zip(a.apply_interior(&u)) {
            let r = a.mesh().coord(k)[0];
            assert!((v - 6.0 - h * h / (2.0 * r * r)).abs() < 1e-8, "r = {r}");
        }
    }

    #[test]
    fn disk_quadratic_is_exact() {
        let a = op(DomainSpec::Disk2D { radius: 1.0 }, 40);
        assert!(!a.is_symmetrizable());
        // ghosts carry the boundary value 0 of the quadratic
        let u = Field::from_fn(a.mesh(), |p| (1.0 - p[0] * p[0] - p[1] * p[1]).max(0.0)).unwrap();
        for v in a.apply_interior(&u) {
            assert!((v - 4.0).abs() < 1e-9);
        }
    }

    #[test]
    fn symmetrized_is_symmetric() {
        let a = op(DomainSpec::Dumbbell { dim: 11, stretch: 2, layer: 0.5 }, 20);
        assert!(a.symmetrized().unwrap().is_symmetric(1e-10));
        let a = op(DomainSpec::ball(10, 1.0), 20);
        assert!(a.symmetrized().unwrap().is_symmetric(1e-12));
    }
}
