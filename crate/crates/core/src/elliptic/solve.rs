use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::operator::DiscreteOperator;
use crate::discretization::Field;
use crate::error::{Error, Result};
use crate::linalg::{pcg, BandLu, CsrMatrix};
use crate::nonlinearity::Nonlinear;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinearMethod {
    /// Conjugate gradients for symmetric 2D problems, banded LU otherwise.
    #[default]
    Auto,
    Direct,
    ConjugateGradient,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearOptions {
    pub method: LinearMethod,
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for LinearOptions {
    fn default() -> Self {
        LinearOptions { method: LinearMethod::Auto, rel_tol: 1e-12, max_iter: 50_000 }
    }
}

/// Iteration statistics of a solve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub method: String,
    pub iterations: usize,
    /// Sup norm of `−Δ_h u − f(u)` over interior nodes.
    pub residual: f64,
    pub converged: bool,
    /// Smallest nodewise increment over all steps (monotone schemes).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_increment: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Factored `A + diag(shift)` on the unknowns of an operator.
pub struct LinearSystem {
    kind: SystemKind,
}

enum SystemKind {
    Direct(BandLu),
    /// `K + W·diag(shift)` with the weights used to form right-hand sides.
    Cg { matrix: CsrMatrix, weights: Vec<f64>, rel_tol: f64, max_iter: usize },
}

impl LinearSystem {
    pub fn new(op: &DiscreteOperator, shift: &[f64], opts: &LinearOptions) -> Result<Self> {
        let method = match opts.method {
            LinearMethod::Auto if op.is_symmetrizable() && !op.is_1d() && op.mesh().stretch().is_none() => {
                LinearMethod::ConjugateGradient
            }
            LinearMethod::Auto => LinearMethod::Direct,
            m => m,
        };
        let a = op.matrix().add_diagonal(shift);
        match (method, op.weights()) {
            (LinearMethod::ConjugateGradient, Some(w)) => {
                let k = a.scale(w, &vec![1.0; w.len()]);
                Ok(LinearSystem {
                    kind: SystemKind::Cg { matrix: k, weights: w.to_vec(), rel_tol: opts.rel_tol, max_iter: opts.max_iter },
                })
            }
            (LinearMethod::ConjugateGradient, None) => Err(Error::Unsupported(
                "conjugate gradients need a symmetric operator; use the direct solver".into(),
            )),
            _ => Ok(LinearSystem { kind: SystemKind::Direct(BandLu::factor(&a)?) }),
        }
    }

    pub fn solve(&self, rhs: &[f64], guess: Option<&[f64]>) -> Result<Vec<f64>> {
        match &self.kind {
            SystemKind::Direct(lu) => {
                let mut x = rhs.to_vec();
                lu.solve(&mut x);
                Ok(x)
            }
            SystemKind::Cg { matrix, weights, rel_tol, max_iter } => {
                let b: Vec<f64> = rhs.iter().zip(weights).map(|(r, w)| r * w).collect();
                let mut x = guess.map_or_else(|| vec![0.0; b.len()], <[f64]>::to_vec);
                pcg(matrix, &b, &mut x, *rel_tol, *max_iter)?;
                Ok(x)
            }
        }
    }
}

/// Solves `−Δ_h u = rhs` at interior nodes with `u = boundary` elsewhere.
pub fn solve_linear(op: &DiscreteOperator, rhs: &Field, boundary: &Field) -> Result<Field> {
    solve_linear_with(op, rhs, boundary, &LinearOptions::default())
}

pub fn solve_linear_with(op: &DiscreteOperator, rhs: &Field, boundary: &Field, opts: &LinearOptions) -> Result<Field> {
    let mesh_field = Field::zeros(op.mesh());
    mesh_field.check_mesh(rhs)?;
    mesh_field.check_mesh(boundary)?;
    let system = LinearSystem::new(op, &vec![0.0; op.unknown_count()], opts)?;
    let b: Vec<f64> = op.gather(rhs).iter().zip(op.boundary_term(boundary)).map(|(r, g)| r - g).collect();
    let x = system.solve(&b, None)?;
    op.scatter(&x, boundary)
}

/// `−Δ_h u − f(u)` at the unknowns.
pub fn residual_vector<F: Nonlinear>(f: &F, op: &DiscreteOperator, u: &Field) -> Vec<f64> {
    let lap = op.apply_interior(u);
    op.unknowns().iter().zip(lap).map(|(&k, l)| l - f.value(u.get(k))).collect()
}

/// `−Δ_h u − f(u)` as a field, zero off the interior.
pub fn residual_field<F: Nonlinear>(f: &F, op: &DiscreteOperator, u: &Field) -> Result<Field> {
    let r = residual_vector(f, op, u);
    let mut values = vec![0.0; op.mesh().len()];
    for (&k, v) in op.unknowns().iter().zip(r) {
        values[k] = v;
    }
    Field::from_values(op.mesh(), values)
}

/// Sup over interior nodes of `|−Δ_h u − f(u)|`.
pub fn residual<F: Nonlinear>(f: &F, op: &DiscreteOperator, u: &Field) -> f64 {
    sup_norm(&residual_vector(f, op, u))
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Nodewise shift of the monotone iteration `(−Δ + M)v_{j+1} = f(v_j) + M v_j`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "value", rename_all = "kebab-case")]
pub enum ShiftRule {
    /// `M_i = max(0, −f'(sub_i))`, the least shift keeping `t ↦ f(t) + M_i t`
    /// nondecreasing above `sub_i` for convex `f`.
    #[default]
    Minimal,
    /// `M = max |f'|` on `[min sub, max sup]`.
    Lipschitz,
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MonotoneScheme {
    /// Shifted fixed point iteration.
    #[default]
    Picard,
    /// Newton steps `(−Δ − f'(v_j))v_{j+1} = f(v_j) − f'(v_j)v_j`, monotone
    /// from a subsolution for convex `f`.
    Newton,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartSide {
    /// From the subsolution upward, converging to the minimal solution.
    #[default]
    Subsolution,
    /// From the supersolution downward, converging to the maximal solution.
    Supersolution,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MonotoneOptions {
    pub shift: ShiftRule,
    pub scheme: MonotoneScheme,
    pub start: StartSide,
    /// Stop when the sup-norm increment is at most `tol·(1 + ‖v‖_sup)`.
    pub tol: f64,
    pub max_iter: usize,
    /// Allowed decrease per step, relative to `1 + ‖v‖_sup`.
    pub monotonicity_tol: f64,
    /// Sup-norm cap used when no supersolution is given.
    pub blow_up_cap: f64,
    pub linear: LinearOptions,
}

impl Default for MonotoneOptions {
    fn default() -> Self {
        MonotoneOptions {
            shift: ShiftRule::Minimal,
            scheme: MonotoneScheme::Picard,
            start: StartSide::Subsolution,
            tol: 1e-10,
            max_iter: 100_000,
            monotonicity_tol: 1e-8,
            blow_up_cap: 1e8,
            linear: LinearOptions::default(),
        }
    }
}

fn check_pair<F: Nonlinear>(
    f: &F,
    op: &DiscreteOperator,
    sub: &Field,
    sup: Option<&Field>,
    warnings: &mut Vec<String>,
) -> Result<()> {
    let mut test = |field: &Field, sign: f64, what: &str| {
        let r = residual_vector(f, op, field);
        let scale = 1.0 + op.unknowns().iter().map(|&k| f.value(field.get(k)).abs()).fold(0.0, f64::max);
        let (worst, node) = r
            .iter()
            .enumerate()
            .map(|(i, v)| (sign * v, op.unknowns()[i]))
            .fold((0.0, 0), |acc, x| if x.0 > acc.0 { x } else { acc });
        if worst > 1e-8 * scale {
            warnings.push(format!("{what} violated by {worst:e} at node {node}"));
        }
    };
    test(sub, 1.0, "subsolution inequality");
    if let Some(sup) = sup {
        test(sup, -1.0, "supersolution inequality");
        let below = sub.values().iter().zip(sup.values()).position(|(a, b)| a > b);
        if let Some(node) = below {
            return Err(Error::InvalidInput(format!("sub exceeds sup at node {node}")));
        }
    }
    Ok(())
}

/// Monotone sub/supersolution iteration.
///
/// From the subsolution the iterates increase to the minimal solution lying
/// above `sub`; from the supersolution they decrease to the maximal one below
/// `sup`. Without `sup`, growth past `blow_up_cap` is reported as
/// [`Error::BlowUpSuspected`].
pub fn monotone_iteration<F: Nonlinear>(
    f: &F,
    op: &DiscreteOperator,
    sub: &Field,
    sup: Option<&Field>,
    boundary: &Field,
    opts: &MonotoneOptions,
) -> Result<(Field, SolveReport)> {
    let started = Instant::now();
    sub.check_mesh(boundary)?;
    Field::zeros(op.mesh()).check_mesh(sub)?;
    if let Some(s) = sup {
        sub.check_mesh(s)?;
    }
    let mut warnings = Vec::new();
    check_pair(f, op, &sub.with_boundary(boundary)?, sup.map(|s| s.with_boundary(boundary)).transpose()?.as_ref(), &mut warnings)?;
    let descending = opts.start == StartSide::Supersolution;
    let start = if descending {
        sup.ok_or_else(|| Error::InvalidInput("a supersolution start needs a supersolution".into()))?
    } else {
        sub
    };
    if descending && opts.scheme == MonotoneScheme::Newton {
        return Err(Error::Unsupported("Newton monotone steps only run upward from a subsolution".into()));
    }
    let sub_x = op.gather(sub);
    let sup_x = sup.map(|s| op.gather(s));
    let n = op.unknown_count();
    let g = op.boundary_term(boundary);
    let mut x = op.gather(start);

    let lo = sub_x.iter().copied().fold(f64::INFINITY, f64::min).min(0.0);
    let shift: Vec<f64> = match opts.shift {
        ShiftRule::Minimal => sub_x.iter().map(|&s| (-f.derivative(s)).max(0.0)).collect(),
        ShiftRule::Lipschitz => {
            let hi = sup_x
                .as_ref()
                .map_or(opts.blow_up_cap, |s| s.iter().copied().fold(f64::NEG_INFINITY, f64::max));
            vec![f.lipschitz_on(lo, hi); n]
        }
        ShiftRule::Fixed(m) => vec![m; n],
    };
    let picard_system = match opts.scheme {
        MonotoneScheme::Picard => Some(LinearSystem::new(op, &shift, &opts.linear)?),
        MonotoneScheme::Newton => None,
    };
    let method = match opts.scheme {
        MonotoneScheme::Picard => "monotone-picard",
        MonotoneScheme::Newton => "monotone-newton",
    };

    let mut min_increment = f64::INFINITY;
    for it in 1..=opts.max_iter {
        let next = match &picard_system {
            Some(system) => {
                let rhs: Vec<f64> = (0..n).map(|i| f.value(x[i]) + shift[i] * x[i] - g[i]).collect();
                system.solve(&rhs, Some(&x))?
            }
            None => {
                let d: Vec<f64> = x.iter().map(|&v| -f.derivative(v)).collect();
                let system = LinearSystem::new(op, &d, &opts.linear)?;
                let rhs: Vec<f64> = (0..n).map(|i| f.value(x[i]) - f.derivative(x[i]) * x[i] - g[i]).collect();
                system.solve(&rhs, Some(&x))?
            }
        };
        let norm = sup_norm(&next);
        let scale = 1.0 + norm;
        let mut step_max = 0.0f64;
        for i in 0..n {
            let inc = if descending { x[i] - next[i] } else { next[i] - x[i] };
            if inc < -opts.monotonicity_tol * scale {
                return Err(Error::MonotonicityViolation { iteration: it, node: op.unknowns()[i], violation: -inc });
            }
            min_increment = min_increment.min(inc / scale);
            step_max = step_max.max(inc.abs());
        }
        if let Some(bound) = &sup_x {
            if !descending {
                for i in 0..n {
                    let excess = next[i] - bound[i];
                    if excess > opts.monotonicity_tol * scale {
                        return Err(Error::SupersolutionExceeded { iteration: it, node: op.unknowns()[i], excess });
                    }
                }
            }
        } else if norm > opts.blow_up_cap || !norm.is_finite() {
            return Err(Error::BlowUpSuspected { iteration: it, sup_norm: norm, cap: opts.blow_up_cap });
        }
        if descending {
            for i in 0..n {
                if next[i] < sub_x[i] - opts.monotonicity_tol * scale {
                    return Err(Error::MonotonicityViolation { iteration: it, node: op.unknowns()[i], violation: sub_x[i] - next[i] });
                }
            }
        }
        x = next;
        if step_max <= opts.tol * scale {
            let u = op.scatter(&x, boundary)?;
            let report = SolveReport {
                method: method.into(),
                iterations: it,
                residual: residual(f, op, &u),
                converged: true,
                min_increment: Some(min_increment),
                warnings,
                wall_time: started.elapsed(),
            };
            return Ok((u, report));
        }
    }
    let u = op.scatter(&x, boundary)?;
    Err(Error::NotConverged { method, iterations: opts.max_iter, residual: residual(f, op, &u) })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub blow_up_cap: f64,
    pub linear: LinearOptions,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: 1e-10, max_iter: 100, blow_up_cap: 1e8, linear: LinearOptions::default() }
    }
}

/// Damped Newton iteration on `−Δ_h u − f(u) = 0` with a halving line search
/// on the sup-norm residual.
pub fn newton_solve<F: Nonlinear>(
    f: &F,
    op: &DiscreteOperator,
    boundary: &Field,
    initial: &Field,
    opts: &NewtonOptions,
) -> Result<(Field, SolveReport)> {
    let started = Instant::now();
    initial.check_mesh(boundary)?;
    Field::zeros(op.mesh()).check_mesh(initial)?;
    let n = op.unknown_count();
    let g = op.boundary_term(boundary);
    let res = |x: &[f64]| -> Vec<f64> {
        let ax = op.matrix().mul(x);
        (0..n).map(|i| ax[i] + g[i] - f.value(x[i])).collect()
    };
    let mut x = op.gather(initial);
    let mut r = res(&x);
    let mut rnorm = sup_norm(&r);
    for it in 0..opts.max_iter {
        if rnorm <= opts.tol {
            let u = op.scatter(&x, boundary)?;
            let report = SolveReport {
                method: "newton".into(),
                iterations: it,
                residual: rnorm,
                converged: true,
                min_increment: None,
                warnings: Vec::new(),
                wall_time: started.elapsed(),
            };
            return Ok((u, report));
        }
        let d: Vec<f64> = x.iter().map(|&v| -f.derivative(v)).collect();
        let system = LinearSystem::new(op, &d, &opts.linear)?;
        let neg: Vec<f64> = r.iter().map(|v| -v).collect();
        let delta = system.solve(&neg, None)?;
        let mut step = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(&delta).map(|(a, b)| a + step * b).collect();
            let tnorm = sup_norm(&trial);
            if !tnorm.is_finite() || tnorm > opts.blow_up_cap {
                return Err(Error::BlowUpSuspected { iteration: it + 1, sup_norm: tnorm, cap: opts.blow_up_cap });
            }
            let tr = res(&trial);
            let trn = sup_norm(&tr);
            if trn < rnorm || step < 1e-4 {
                x = trial;
                r = tr;
                rnorm = trn;
                break;
            }
            step *= 0.5;
        }
    }
    Err(Error::NotConverged { method: "newton", iterations: opts.max_iter, residual: rnorm })
}

/// Unshifted fixed-point iteration `−Δ_h v_{j+1} = f(v_j)` from `initial`.
///
/// Unlike [`monotone_iteration`] no ordering is assumed or checked; the
/// iteration stops on a small increment, on the iteration cap (returned with
/// `converged = false`), or on blow-up.
pub fn picard_solve<F: Nonlinear>(
    f: &F,
    op: &DiscreteOperator,
    boundary: &Field,
    initial: &Field,
    opts: &MonotoneOptions,
) -> Result<(Field, SolveReport)> {
    let started = Instant::now();
    initial.check_mesh(boundary)?;
    let n = op.unknown_count();
    let g = op.boundary_term(boundary);
    let system = LinearSystem::new(op, &vec![0.0; n], &opts.linear)?;
    let mut x = op.gather(initial);
    let mut iterations = opts.max_iter;
    let mut converged = false;
    for it in 1..=opts.max_iter {
        let rhs: Vec<f64> = (0..n).map(|i| f.value(x[i]) - g[i]).collect();
        let next = system.solve(&rhs, Some(&x))?;
        let norm = sup_norm(&next);
        if !norm.is_finite() || norm > opts.blow_up_cap {
            return Err(Error::BlowUpSuspected { iteration: it, sup_norm: norm, cap: opts.blow_up_cap });
        }
        let step = next.iter().zip(&x).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        x = next;
        if step <= opts.tol * (1.0 + norm) {
            iterations = it;
            converged = true;
            break;
        }
    }
    let u = op.scatter(&x, boundary)?;
    let report = SolveReport {
        method: "picard".into(),
        iterations,
        residual: residual(f, op, &u),
        converged,
        min_increment: None,
        warnings: Vec::new(),
        wall_time: started.elapsed(),
    };
    Ok((u, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{build_mesh, DomainSpec};
    use crate::elliptic::assemble;
    use crate::nonlinearity::Nonlinearity;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn op(d: DomainSpec, res: usize) -> DiscreteOperator {
        assemble(&Arc::new(build_mesh(&d, res).unwrap()))
    }

    #[test]
    fn poisson_interval() {
        let a = op(DomainSpec::unit_interval(), 100);
        let rhs = Field::constant(a.mesh(), 1.0).unwrap();
        let zero = Field::zeros(a.mesh());
        let u = solve_linear(&a, &rhs, &zero).unwrap();
        let exact = Field::from_fn(a.mesh(), |p| p[0] * (1.0 - p[0]) / 2.0).unwrap();
        assert!(u.sub(&exact).unwrap().norms().sup <= 1e-4);
    }

    #[test]
    fn harmonic_extension_obeys_max_principle() {
        let a = op(DomainSpec::Box2D { lx: 1.0, ly: 1.0 }, 30);
        let g = Field::from_fn(a.mesh(), |p| (3.0 * p[0]).sin() + p[1] * p[1]).unwrap();
        let u = solve_linear(&a, &Field::zeros(a.mesh()), &g).unwrap();
        let bdry: Vec<f64> = (0..g.len()).filter(|&k| a.slot(k).is_none()).map(|k| g.get(k)).collect();
        let (lo, hi) = bdry.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
        assert!(u.values().iter().all(|v| *v >= lo - 1e-12 && *v <= hi + 1e-12));
    }

    #[test]
    fn cg_and_direct_agree() {
        let a = op(DomainSpec::Box2D { lx: 1.0, ly: 1.0 }, 24);
        let rhs = Field::from_fn(a.mesh(), |p| 1.0 + p[0] * p[1]).unwrap();
        let zero = Field::zeros(a.mesh());
        let direct = LinearOptions { method: LinearMethod::Direct, ..Default::default() };
        let u1 = solve_linear_with(&a, &rhs, &zero, &direct).unwrap();
        let u2 = solve_linear(&a, &rhs, &zero).unwrap();
        assert!(u1.sub(&u2).unwrap().norms().sup < 1e-10);
    }

    #[test]
    fn monotone_constant_source() {
        let a = op(DomainSpec::unit_interval(), 100);
        let f = Nonlinearity::constant(1.0);
        let zero = Field::zeros(a.mesh());
        let one = Field::constant(a.mesh(), 1.0).unwrap();
        let (u, rep) = monotone_iteration(&f, &a, &zero, Some(&one), &zero, &MonotoneOptions::default()).unwrap();
        assert!(rep.converged && rep.residual < 1e-10);
        assert!(!rep.warnings.is_empty());
        let exact = Field::from_fn(a.mesh(), |p| p[0] * (1.0 - p[0]) / 2.0).unwrap();
        assert!(u.sub(&exact).unwrap().norms().sup <= 1e-4);
        let (un, _) = newton_solve(&f, &a, &zero, &zero, &NewtonOptions::default()).unwrap();
        assert!(u.sub(&un).unwrap().norms().sup <= 1e-9);
    }

    #[test]
    fn monotone_linear_stays_at_zero() {
        let a = op(DomainSpec::unit_interval(), 50);
        let f = Nonlinearity::affine(1.0, 0.0);
        let zero = Field::zeros(a.mesh());
        let sup = Field::from_fn(a.mesh(), |p| (PI * p[0]).sin()).unwrap();
        let (u, rep) = monotone_iteration(&f, &a, &zero, Some(&sup), &zero, &MonotoneOptions::default()).unwrap();
        assert_eq!(rep.iterations, 1);
        assert_eq!(u.norms().sup, 0.0);
    }

    #[test]
    fn newton_affine_matches_closed_form() {
        // −u'' = (λ₁/2)u + 1, u(0) = u(1) = 0, with k² = π²/2
        let a = op(DomainSpec::unit_interval(), 400);
        let lam = PI * PI;
        let f = Nonlinearity::affine(lam / 2.0, 1.0);
        let zero = Field::zeros(a.mesh());
        let (u, rep) = newton_solve(&f, &a, &zero, &zero, &NewtonOptions::default()).unwrap();
        assert!(rep.residual <= 1e-10);
        let k = (lam / 2.0).sqrt();
        let c = (1.0 - k.cos()) / k.sin();
        let exact = Field::from_fn(a.mesh(), |p| ((k * p[0]).cos() + c * (k * p[0]).sin() - 1.0) / (k * k)).unwrap();
        assert!(u.sub(&exact).unwrap().norms().sup < 1e-5);
    }

    #[test]
    fn monotone_without_supersolution_detects_blow_up() {
        let a = op(DomainSpec::unit_interval(), 50);
        let f = Nonlinearity::affine(2.0 * PI * PI, 2.0 * PI * PI);
        let zero = Field::zeros(a.mesh());
        let opts = MonotoneOptions { blow_up_cap: 1e6, ..Default::default() };
        let err = monotone_iteration(&f, &a, &zero, None, &zero, &opts).unwrap_err();
        assert!(matches!(err, Error::BlowUpSuspected { .. }), "{err:?}");
    }

    #[test]
    fn supersolution_start_reaches_maximal_solution() {
        let a = op(DomainSpec::unit_interval(), 60);
        let f = Nonlinearity::constant(1.0);
        let zero = Field::zeros(a.mesh());
        let sup = Field::constant(a.mesh(), 1.0).unwrap();
        let opts = MonotoneOptions { start: StartSide::Supersolution, ..Default::default() };
        let (down, _) = monotone_iteration(&f, &a, &zero, Some(&sup), &zero, &opts).unwrap();
        let (up, _) = monotone_iteration(&f, &a, &zero, Some(&sup), &zero, &MonotoneOptions::default()).unwrap();
        assert!(down.sub(&up).unwrap().norms().sup < 1e-9);
    }

    #[test]
    fn residual_of_zero_with_unit_source() {
        let a = op(DomainSpec::unit_interval(), 20);
        assert_eq!(residual(&Nonlinearity::constant(1.0), &a, &Field::zeros(a.mesh())), 1.0);
    }
}
