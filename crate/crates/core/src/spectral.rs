//! Principal eigenvalue of `−Δ_h − V`, negative-eigenvalue counts and the
//! analytic stability criteria for inverse-square potentials.

use std::sync::Arc;

use serde::Serialize;

use crate::discretization::quadrature::unit_ball_volume;
use crate::discretization::{build_mesh, DomainSpec, Field, Mesh, NodeKind};
use crate::elliptic::{assemble, DiscreteOperator};
use crate::error::{Error, Result};
use crate::linalg::{inertia, BandLu, CsrMatrix};
use crate::nonlinearity::Nonlinear;

/// Default stability tolerance: `μ₁ ≥ −TOL_STAB` counts as stable.
pub const TOL_STAB: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct EigenOptions {
    /// Relative eigenvalue tolerance.
    pub tol: f64,
    pub max_iter: usize,
    /// Restrict to nodes where the mask is `true`; the rest act as Dirichlet nodes.
    pub mask: Option<Vec<bool>>,
    /// Size of the window for the negative count.
    pub m: usize,
    pub tol_stab: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { tol: 1e-9, max_iter: 10_000, mask: None, m: 20, tol_stab: TOL_STAB }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    pub mu1: f64,
    #[serde(skip)]
    pub eigenfield: Field,
    pub negative_count: usize,
    pub m: usize,
    /// `(h, μ₁)` pairs when produced by a refinement study.
    pub refinement: Vec<(f64, f64)>,
    pub iterations: usize,
    /// Rayleigh quotient of the returned eigenfield.
    pub rayleigh: f64,
    pub method: &'static str,
}

struct Restricted {
    /// Positions (in unknown order) of the active unknowns.
    active: Vec<usize>,
    /// `A − diag(V)` on the active unknowns.
    matrix: CsrMatrix,
    weights: Vec<f64>,
    symmetric: Option<CsrMatrix>,
}

fn restrict(op: &DiscreteOperator, v: &Field, mask: Option<&[bool]>) -> Result<Restricted> {
    Field::zeros(op.mesh()).check_mesh(v)?;
    if let Some(m) = mask {
        if m.len() != op.mesh().len() {
            return Err(Error::InvalidInput(format!("mask has {} entries for {} nodes", m.len(), op.mesh().len())));
        }
    }
    let unknowns = op.unknowns();
    let active: Vec<usize> = (0..unknowns.len()).filter(|&s| mask.map_or(true, |m| m[unknowns[s]])).collect();
    if active.is_empty() {
        return Err(Error::InvalidInput("no interior nodes in the eigenproblem".into()));
    }
    let mut pos = vec![usize::MAX; unknowns.len()];
    for (p, &s) in active.iter().enumerate() {
        pos[s] = p;
    }
    let a = op.matrix();
    let mut t = Vec::new();
    for (p, &s) in active.iter().enumerate() {
        for (c, val) in a.row(s) {
            if pos[c] != usize::MAX {
                t.push((p, pos[c], val));
            }
        }
        t.push((p, p, -v.get(unknowns[s])));
    }
    let matrix = CsrMatrix::from_triplets(active.len(), t);
    let node_w = op.mesh().weights();
    let weights: Vec<f64> = active.iter().map(|&s| node_w[unknowns[s]]).collect();
    let symmetric = op.is_symmetrizable().then(|| {
        let s: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
        let si: Vec<f64> = s.iter().map(|x| 1.0 / x).collect();
        matrix.scale(&s, &si)
    });
    Ok(Restricted { active, matrix, weights, symmetric })
}

fn normalize_sign(x: &mut [f64]) {
    let big = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if let Some(first) = x.iter().find(|v| v.abs() > 1e-8 * big) {
        if *first < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Symmetric case: bisection on the inertia of `S − σI` to isolate `μ₁`,
/// then inverse iteration just below it.
fn symmetric_principal(s: &CsrMatrix, opts: &EigenOptions) -> Result<(f64, Vec<f64>, usize)> {
    let n = s.dim();
    let mut lo = s.gershgorin_lower() - 1.0;
    let mut hi = -CsrMatrix::gershgorin_lower(&s.scale(&vec![-1.0; n], &vec![1.0; n])) + 1.0;
    let mut steps = 0;
    while hi - lo > 1e-7 * (1.0 + lo.abs().min(hi.abs())) && steps < 200 {
        let mid = 0.5 * (lo + hi);
        if inertia(s, mid).negative >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        steps += 1;
    }
    let gap = (hi - lo).max(1e-9 * (1.0 + lo.abs()));
    let shift = lo - gap;
    let lu = BandLu::factor(&s.add_diagonal(&vec![-shift; n]))?;
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut mu = f64::NAN;
    for it in 1..=opts.max_iter {
        lu.solve(&mut x);
        let norm = dot(&x, &x).sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
        let sx = s.mul(&x);
        let next = dot(&x, &sx);
        let res = sx.iter().zip(&x).map(|(a, b)| (a - next * b).powi(2)).sum::<f64>().sqrt();
        let converged = (next - mu).abs() <= opts.tol * (1.0 + next.abs())
            && res <= (opts.tol * (1.0 + next.abs())).sqrt() * 1e-2;
        mu = next;
        if converged {
            return Ok((mu, x, steps + it));
        }
    }
    Err(Error::NotConverged { method: "inverse iteration", iterations: opts.max_iter, residual: mu })
}

/// Nonsymmetric case: inverse iteration at the Gershgorin lower bound − 1,
/// eigenvalue read off the weighted Rayleigh quotient.
fn general_principal(a: &CsrMatrix, w: &[f64], opts: &EigenOptions) -> Result<(f64, Vec<f64>, usize)> {
    let n = a.dim();
    let shift = a.gershgorin_lower() - 1.0;
    let lu = BandLu::factor(&a.add_diagonal(&vec![-shift; n]))?;
    let wnorm = |x: &[f64]| x.iter().zip(w).map(|(v, w)| w * v * v).sum::<f64>().sqrt();
    let mut x = vec![1.0; n];
    let mut mu = f64::NAN;
    for it in 1..=opts.max_iter {
        lu.solve(&mut x);
        let norm = wnorm(&x);
        x.iter_mut().for_each(|v| *v /= norm);
        let ax = a.mul(&x);
        let next: f64 = x.iter().zip(&ax).zip(w).map(|((x, y), w)| w * x * y).sum();
        let res = wnorm(&ax.iter().zip(&x).map(|(a, b)| a - next * b).collect::<Vec<_>>());
        if (next - mu).abs() <= opts.tol * 1e-3 * (1.0 + next.abs()) && res <= 1e-5 * (1.0 + next.abs()) {
            return Ok((next, x, it));
        }
        mu = next;
    }
    Err(Error::NotConverged { method: "inverse iteration", iterations: opts.max_iter, residual: mu })
}

/// Smallest eigenvalue of `−Δ_h − V` with homogeneous Dirichlet conditions.
pub fn principal_eigen(op: &DiscreteOperator, v: &Field) -> Result<SpectralReport> {
    principal_eigen_with(op, v, &EigenOptions::default())
}

pub fn principal_eigen_with(op: &DiscreteOperator, v: &Field, opts: &EigenOptions) -> Result<SpectralReport> {
    let r = restrict(op, v, opts.mask.as_deref())?;
    let (mu1, phi, iterations, method) = match &r.symmetric {
        Some(s) => {
            let (mu, y, it) = symmetric_principal(s, opts)?;
            let phi: Vec<f64> = y.iter().zip(&r.weights).map(|(y, w)| y / w.sqrt()).collect();
            (mu, phi, it, "inertia-bisection+inverse-iteration")
        }
        None => {
            let (mu, x, it) = general_principal(&r.matrix, &r.weights, opts)?;
            (mu, x, it, "shifted-inverse-iteration")
        }
    };
    let mut phi = phi;
    normalize_sign(&mut phi);
    let mut values = vec![0.0; op.mesh().len()];
    for (p, &s) in r.active.iter().enumerate() {
        values[op.unknowns()[s]] = phi[p];
    }
    let eigenfield = Field::from_values(op.mesh(), values)?;
    let rayleigh = rayleigh_quotient(op, v, &eigenfield)?;
    let negative_count = match &r.symmetric {
        Some(s) => inertia(s, -opts.tol_stab).negative.min(opts.m),
        None => usize::from(mu1 < -opts.tol_stab),
    };
    Ok(SpectralReport {
        mu1,
        eigenfield,
        negative_count,
        m: opts.m,
        refinement: Vec::new(),
        iterations,
        rayleigh,
        method,
    })
}

/// `(⟨−Δ_h φ, φ⟩ − ∫Vφ²) / ∫φ²` for `φ` vanishing off the interior.
pub fn rayleigh_quotient(op: &DiscreteOperator, v: &Field, phi: &Field) -> Result<f64> {
    let phi = phi.interior_only();
    let lap = op.apply(&phi)?;
    let num = lap.dot(&phi)? - phi.zip_with(v, |p, v| p * p * v)?.integral();
    let den = phi.dot(&phi)?;
    if den == 0.0 {
        return Err(Error::InvalidInput("Rayleigh quotient of the zero field".into()));
    }
    Ok(num / den)
}

/// `λ₁` and the positive, `L²`-normalised `φ₁` of `−Δ_h`.
pub fn first_dirichlet_eigenpair(op: &DiscreteOperator) -> Result<(f64, Field)> {
    let rep = principal_eigen(op, &Field::zeros(op.mesh()))?;
    Ok((rep.mu1, rep.eigenfield))
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityVerdict {
    pub mu1: f64,
    pub stable: bool,
    pub tol_stab: f64,
    pub negative_count: usize,
}

/// Stability of `u` for `f`: `μ₁(−Δ_h − f'(u)) ≥ −tol_stab`.
pub fn stability_verdict<F: Nonlinear>(f: &F, op: &DiscreteOperator, u: &Field) -> Result<StabilityVerdict> {
    stability_verdict_with(f, op, u, &EigenOptions::default())
}

pub fn stability_verdict_with<F: Nonlinear>(
    f: &F,
    op: &DiscreteOperator,
    u: &Field,
    opts: &EigenOptions,
) -> Result<StabilityVerdict> {
    let v = u.map(|t| f.derivative(t))?;
    let rep = principal_eigen_with(op, &v, opts)?;
    Ok(StabilityVerdict {
        mu1: rep.mu1,
        stable: rep.mu1 >= -opts.tol_stab,
        tol_stab: opts.tol_stab,
        negative_count: rep.negative_count,
    })
}

/// Number of eigenvalues of `−Δ_h − V` below `−tol_stab`, capped at `m`.
pub fn morse_count(op: &DiscreteOperator, v: &Field, m: usize) -> Result<usize> {
    if m == 0 || m > 20 {
        return Err(Error::InvalidInput(format!("window m must be in 1..=20, got {m}")));
    }
    let r = restrict(op, v, None)?;
    let s = r
        .symmetric
        .ok_or_else(|| Error::Unsupported("negative counts need a symmetric discretisation".into()))?;
    Ok(inertia(&s, -TOL_STAB).negative.min(m))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HardyVerdict {
    pub threshold: f64,
    pub stable: bool,
}

/// Stability of `V = c/|x|²` in ℝ^N by the Hardy constant `(N−2)²/4`.
pub fn hardy_verdict(dim: u32, c: f64) -> Result<HardyVerdict> {
    if dim < 3 {
        return Err(Error::InvalidInput(format!("Hardy's inequality needs N ≥ 3, got {dim}")));
    }
    let threshold = ((dim - 2) as f64).powi(2) / 4.0;
    Ok(HardyVerdict { threshold, stable: c <= threshold })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LebesgueCriterion {
    pub norm: f64,
    pub bound: f64,
    pub holds: bool,
}

/// `‖V⁺‖_{L^{N/2}}` against the bound `N(N−2)|B₁|/4`.
pub fn lebesgue_criterion(mesh: &Mesh, vplus: &Field, dim: u32) -> Result<LebesgueCriterion> {
    if dim < 3 {
        return Err(Error::InvalidInput(format!("the criterion needs N ≥ 3, got {dim}")));
    }
    if vplus.mesh().as_ref() != mesh {
        return Err(Error::MeshMismatch);
    }
    let q = dim as f64 / 2.0;
    let integral: f64 = (0..mesh.len())
        .filter(|&k| mesh.kind(k) != NodeKind::Exterior)
        .map(|k| mesh.weights()[k] * vplus.get(k).max(0.0).powf(q))
        .sum();
    let norm = integral.powf(1.0 / q);
    let bound = dim as f64 * (dim as f64 - 2.0) * unit_ball_volume(dim) / 4.0;
    Ok(LebesgueCriterion { norm, bound, holds: norm <= bound })
}

/// `μ₁(h)` over a list of resolutions for a potential given as a function
/// of the node coordinates.
pub fn refinement_study<G: Fn([f64; 2]) -> f64>(
    domain: &DomainSpec,
    resolutions: &[usize],
    potential: G,
) -> Result<SpectralReport> {
    let mut trace = Vec::with_capacity(resolutions.len());
    let mut last = None;
    for &res in resolutions {
        let mesh = Arc::new(build_mesh(domain, res)?);
        let op = assemble(&mesh);
        let v = Field::from_fn(&mesh, &potential)?;
        let rep = principal_eigen(&op, &v)?;
        trace.push((mesh.h(), rep.mu1));
        last = Some(rep);
    }
    let mut rep = last.ok_or_else(|| Error::InvalidInput("no resolutions given".into()))?;
    rep.refinement = trace;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn op(d: DomainSpec, res: usize) -> DiscreteOperator {
        assemble(&Arc::new(build_mesh(&d, res).unwrap()))
    }

    #[test]
    fn interval_principal_eigenvalue() {
        let a = op(DomainSpec::unit_interval(), 200);
        let (lam, phi) = first_dirichlet_eigenpair(&a).unwrap();
        let h = a.mesh().h();
        let exact_discrete = 4.0 / (h * h) * (PI * h / 2.0).sin().powi(2);
        assert!((lam - exact_discrete).abs() < 1e-9 * lam);
        assert!((lam - PI * PI).abs() < 1e-3);
        assert!((phi.dot(&phi).unwrap() - 1.0).abs() < 1e-12);
        assert!(phi.values().iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn constant_potential_shifts() {
        let a = op(DomainSpec::unit_interval(), 100);
        let base = principal_eigen(&a, &Field::zeros(a.mesh())).unwrap().mu1;
        let v = Field::constant(a.mesh(), 3.5).unwrap();
        let shifted = principal_eigen(&a, &v).unwrap();
        assert!((shifted.mu1 - (base - 3.5)).abs() < 1e-9 * base);
        assert!((shifted.rayleigh - shifted.mu1).abs() < 1e-8);
    }

    #[test]
    fn box_and_disk() {
        let a = op(DomainSpec::Box2D { lx: 1.0, ly: 1.0 }, 40);
        let (lam, _) = first_dirichlet_eigenpair(&a).unwrap();
        assert!((lam - 2.0 * PI * PI).abs() < 0.02 * lam);
        let a = op(DomainSpec::Disk2D { radius: 1.0 }, 80);
        let (lam, phi) = first_dirichlet_eigenpair(&a).unwrap();
        assert!((lam - 5.783_185_962_946_784).abs() < 0.01, "{lam}");
        assert!(phi.values().iter().all(|v| *v >= -1e-12));
    }

    #[test]
    fn morse_counts_on_interval() {
        let a = op(DomainSpec::unit_interval(), 200);
        let count = |c: f64| morse_count(&a, &Field::constant(a.mesh(), c).unwrap(), 10).unwrap();
        assert_eq!(count(0.0), 0);
        assert_eq!(count(2.0 * PI * PI), 1);
        assert_eq!(count(6.0 * PI * PI), 2);
        assert!(morse_count(&a, &Field::zeros(a.mesh()), 21).is_err());
    }

    #[test]
    fn hardy_thresholds() {
        let v = hardy_verdict(10, 16.0).unwrap();
        assert_eq!(v.threshold, 16.0);
        assert!(v.stable);
        let v = hardy_verdict(9, 14.0).unwrap();
        assert_eq!(v.threshold, 12.25);
        assert!(!v.stable);
        assert!(!hardy_verdict(3, 2.0).unwrap().stable);
        assert!(hardy_verdict(2, 0.0).is_err());
    }

    #[test]
    fn lebesgue_bound_in_three_dimensions() {
        let mesh = Arc::new(build_mesh(&DomainSpec::ball(3, 1.0), 20).unwrap());
        let c = lebesgue_criterion(&mesh, &Field::zeros(&mesh), 3).unwrap();
        assert_eq!(c.norm, 0.0);
        assert!(c.holds);
        assert!((c.bound - PI).abs() < 1e-12);
    }

    #[test]
    fn mask_restricts_to_subdomain() {
        // nodes in (0, ½) of the unit interval: λ₁ of the half interval is 4π²
        let a = op(DomainSpec::unit_interval(), 200);
        let mask: Vec<bool> = (0..a.mesh().len()).map(|k| a.mesh().coord(k)[0] < 0.5 - 1e-12).collect();
        let opts = EigenOptions { mask: Some(mask), ..Default::default() };
        let rep = principal_eigen_with(&a, &Field::zeros(a.mesh()), &opts).unwrap();
        assert!((rep.mu1 - 4.0 * PI * PI).abs() < 0.01);
        let full = principal_eigen(&a, &Field::zeros(a.mesh())).unwrap();
        assert!(rep.mu1 >= full.mu1);
    }
}
