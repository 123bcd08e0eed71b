//! Certificates for qualitative properties of computed fields.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::discretization::{DomainSpec, Field, Geometry, Isometry, NodeKind};
use crate::elliptic::{solve_linear, DiscreteOperator};
use crate::error::{Error, Result};
use crate::spectral::first_dirichlet_eigenpair;

/// Outcome of a check: `witness` is the extremal deviation or margin, compared
/// against `tolerance` in the sense documented by each check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub name: String,
    pub pass: bool,
    pub witness: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_location: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub extras: BTreeMap<String, f64>,
}

impl Certificate {
    /// Passing iff `witness ≤ tolerance`.
    pub fn upper(name: &str, witness: f64, tolerance: f64) -> Self {
        Certificate {
            name: name.to_string(),
            pass: witness <= tolerance,
            witness,
            tolerance,
            worst_location: None,
            note: None,
            extras: BTreeMap::new(),
        }
    }

    pub fn at(mut self, location: Option<[f64; 2]>) -> Self {
        self.worst_location = location;
        self
    }

    pub fn with_note(mut self, note: &str) -> Self {
        self.note = Some(note.to_string());
        self
    }

    pub fn with_extra(mut self, key: &str, value: f64) -> Self {
        self.extras.insert(key.to_string(), value);
        self
    }
}

/// `max |u(x) − u(ρx)|` over nodes, with `u(ρx)` interpolated.
///
/// Nodes whose image falls outside the interpolation grid (or next to an
/// exterior node) are skipped. Default tolerance `max(1e-8, 5h²‖u‖_sup)`.
pub fn check_rho_invariance(u: &Field, iso: &Isometry) -> Result<Certificate> {
    let h = u.mesh().h();
    let tol = (5.0 * h * h * u.norms().sup).max(1e-8);
    check_rho_invariance_with(u, iso, tol)
}

pub fn check_rho_invariance_with(u: &Field, iso: &Isometry, tol: f64) -> Result<Certificate> {
    let mesh = u.mesh();
    if !mesh.domain().admits(iso) {
        return Err(Error::InvalidInput(format!("{} is not an isometry of the domain", iso.name)));
    }
    let mut worst = 0.0f64;
    let mut at = None;
    let mut compared = 0usize;
    for k in 0..mesh.len() {
        if mesh.kind(k) == NodeKind::Exterior {
            continue;
        }
        let p = mesh.coord(k);
        let Some(image) = u.interpolate(iso.apply(p)) else { continue };
        compared += 1;
        let d = (u.get(k) - image).abs();
        if d > worst {
            worst = d;
            at = Some(p);
        }
    }
    Ok(Certificate::upper(&format!("rho-invariance:{}", iso.name), worst, tol)
        .at(at)
        .with_extra("nodes_compared", compared as f64))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ordering {
    Below,
    Equal,
    Above,
    Unordered,
}

/// Sign pattern of `u − v` at interior nodes with band `1e-8·(1 + max sup)`.
pub fn check_ordering(u: &Field, v: &Field) -> Result<(Ordering, Certificate)> {
    let d = u.sub(v)?;
    let mesh = u.mesh();
    let tol = 1e-8 * (1.0 + u.norms().sup.max(v.norms().sup));
    let (mut hi, mut lo) = (0.0f64, 0.0f64);
    for k in 0..mesh.len() {
        if mesh.kind(k) == NodeKind::Interior {
            hi = hi.max(d.get(k));
            lo = lo.min(d.get(k));
        }
    }
    let ordering = match (hi > tol, lo < -tol) {
        (false, false) => Ordering::Equal,
        (true, false) => Ordering::Above,
        (false, true) => Ordering::Below,
        (true, true) => Ordering::Unordered,
    };
    let cert = Certificate::upper("ordering", hi.min(-lo), tol)
        .with_note(match ordering {
            Ordering::Below => "below",
            Ordering::Equal => "equal",
            Ordering::Above => "above",
            Ordering::Unordered => "unordered",
        })
        .with_extra("max_difference", hi)
        .with_extra("min_difference", lo);
    Ok((ordering, cert))
}

/// For `u ≥ v`: `‖d/‖d‖ − φ₁‖_{L²}` with `d = u − v`, tolerance `10h²`.
///
/// `d ≈ 0` yields a passing certificate noted `equal-case`.
pub fn check_eigenfunction_alternative(op: &DiscreteOperator, u: &Field, v: &Field) -> Result<Certificate> {
    let d = u.sub(v)?;
    let h = op.mesh().h();
    let tol = 10.0 * h * h;
    let scale = 1.0 + u.norms().sup.max(v.norms().sup);
    let min = d.min();
    if min < -1e-8 * scale {
        return Ok(Certificate::upper("eigenfunction-alternative", f64::INFINITY, tol)
            .with_note("not-ordered")
            .with_extra("min_difference", min));
    }
    let norm = d.norms().l2;
    if norm <= 1e-12 {
        return Ok(Certificate::upper("eigenfunction-alternative", 0.0, tol).with_note("equal-case"));
    }
    let (lambda1, phi) = first_dirichlet_eigenpair(op)?;
    let phi_norm = phi.norms().l2;
    let diff = d.zip_with(&phi, |a, b| a / norm - b / phi_norm)?;
    Ok(Certificate::upper("eigenfunction-alternative", diff.norms().l2, tol)
        .with_note("eigenfunction-case")
        .with_extra("lambda1", lambda1)
        .with_extra("difference_l2", norm))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AffineOffset {
    pub a: f64,
    pub lambda1: f64,
    /// Sup residual of `−Δ_h u − a − λ₁u` (advisory).
    pub residual: f64,
}

/// `a = −λ₁ ∫φ₁H / ∫φ₁` where `H` is the discrete harmonic extension of the
/// boundary data.
pub fn compute_affine_offset(op: &DiscreteOperator, u: &Field, boundary: &Field) -> Result<AffineOffset> {
    let harmonic = solve_linear(op, &Field::zeros(op.mesh()), boundary)?;
    let (lambda1, phi) = first_dirichlet_eigenpair(op)?;
    let a = -lambda1 * phi.dot(&harmonic)? / phi.integral();
    let lap = op.apply_interior(u);
    let residual = op
        .unknowns()
        .iter()
        .zip(lap)
        .map(|(&k, l)| (l - a - lambda1 * u.get(k)).abs())
        .fold(0.0, f64::max);
    Ok(AffineOffset { a, lambda1, residual })
}

/// Largest forward difference quotient of a radial (or 1D) field.
///
/// Passes when every quotient is below `−1e-10`, ignoring pairs in the
/// tail where both values are below `1e-8·‖v‖_sup`. Reports `r0`, the first
/// radius where the quotient changes sign, when there is one.
pub fn check_radial_monotonicity(v: &Field) -> Result<Certificate> {
    let mesh = v.mesh();
    if !matches!(mesh.geometry(), Geometry::Radial { .. } | Geometry::Interval) {
        return Err(Error::InvalidInput("radial monotonicity needs a 1D radial field".into()));
    }
    let h = mesh.h();
    let tail = 1e-8 * v.norms().sup;
    let tol = -1e-10;
    let mut worst = f64::NEG_INFINITY;
    let mut at = None;
    let mut first_sign = None;
    let mut r0 = None;
    for i in 0..mesh.len() - 1 {
        let (a, b) = (v.get(i), v.get(i + 1));
        let q = (b - a) / h;
        let r_mid = 0.5 * (mesh.coord(i)[0] + mesh.coord(i + 1)[0]);
        let sign = q > 0.0;
        match first_sign {
            None => first_sign = Some(sign),
            Some(s) if s != sign && r0.is_none() => r0 = Some(r_mid),
            _ => {}
        }
        if a.abs().max(b.abs()) <= tail {
            continue;
        }
        if q > worst {
            worst = q;
            at = Some([r_mid, 0.0]);
        }
    }
    let mut cert = Certificate {
        name: "radial-monotonicity".into(),
        pass: worst < tol,
        witness: worst,
        tolerance: tol,
        worst_location: at,
        note: None,
        extras: BTreeMap::new(),
    };
    if let Some(r0) = r0 {
        cert.extras.insert("r0".into(), r0);
    }
    Ok(cert)
}

/// Normal monotonicity in the boundary layer `{dist < ρ}` of a disk or box.
///
/// Witness: `max u(x) − u(x − h n(x))` over interior layer nodes, `n` the
/// outward normal of the nearest boundary piece; passes below `1e-8`. Also
/// reports the layer sup, `‖u‖_{L¹}` and `γ = ‖u‖_{L¹} / sup_layer u`.
pub fn check_boundary_normal_monotonicity(u: &Field, rho_layer: f64) -> Result<Certificate> {
    let mesh = u.mesh();
    let inradius = match *mesh.domain() {
        DomainSpec::Disk2D { radius } => radius,
        DomainSpec::Box2D { lx, ly } => 0.5 * lx.min(ly),
        _ => return Err(Error::InvalidInput("normal monotonicity needs a disk or box field".into())),
    };
    if !(rho_layer > 0.0 && rho_layer < 0.5 * inradius) {
        return Err(Error::InvalidInput(format!("layer width must lie in (0, {}), got {rho_layer}", 0.5 * inradius)));
    }
    let h = mesh.h();
    let tol = 1e-8;
    let mut worst = f64::NEG_INFINITY;
    let mut at = None;
    let mut layer_sup = f64::NEG_INFINITY;
    let mut count = 0usize;
    for k in 0..mesh.len() {
        if mesh.kind(k) != NodeKind::Interior || mesh.boundary_distance(k) >= rho_layer {
            continue;
        }
        let p = mesh.coord(k);
        let n = match *mesh.domain() {
            DomainSpec::Disk2D { .. } => {
                let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
                [p[0] / r, p[1] / r]
            }
            DomainSpec::Box2D { lx, ly } => {
                let d = [p[0], lx - p[0], p[1], ly - p[1]];
                let (face, _) = d.iter().enumerate().fold((0, f64::INFINITY), |b, (i, v)| if *v < b.1 { (i, *v) } else { b });
                [[-1.0, 0.0], [1.0, 0.0], [0.0, -1.0], [0.0, 1.0]][face]
            }
            _ => unreachable!(),
        };
        let Some(inner) = u.interpolate([p[0] - h * n[0], p[1] - h * n[1]]) else { continue };
        count += 1;
        layer_sup = layer_sup.max(u.get(k));
        let diff = u.get(k) - inner;
        if diff > worst {
            worst = diff;
            at = Some(p);
        }
    }
    if count == 0 {
        return Err(Error::InvalidInput("boundary layer contains no nodes".into()));
    }
    let l1 = u.norms().l1;
    Ok(Certificate::upper("boundary-normal-monotonicity", worst, tol)
        .at(at)
        .with_extra("rho", rho_layer)
        .with_extra("layer_sup", layer_sup)
        .with_extra("l1", l1)
        .with_extra("gamma", l1 / layer_sup))
}

/// `‖∇u_k‖² − (‖∇u‖² + 2|c₀|‖u‖_{L¹})`, passing at most `1e-8·(1 + RHS)`.
pub fn energy_bound_check(u_k: &Field, u: &Field, c0: f64) -> Result<Certificate> {
    u_k.check_mesh(u)?;
    let lhs = u_k.dirichlet_energy();
    let rhs = u.dirichlet_energy() + 2.0 * c0.abs() * u.norms().l1;
    Ok(Certificate::upper("energy-bound", lhs - rhs, 1e-8 * (1.0 + rhs))
        .with_extra("lhs", lhs)
        .with_extra("rhs", rhs))
}
