//! Multi-step constructions: truncation and contraction sequences, the
//! classification and nonexistence probes, and the dumbbell experiment.

use std::sync::Arc;

use serde::Serialize;

use crate::discretization::{build_mesh, DomainSpec, Field, NodeKind, Norms};
use crate::elliptic::{
    assemble, monotone_iteration, newton_solve, picard_solve, DiscreteOperator, MonotoneOptions, MonotoneScheme,
    NewtonOptions, SolveReport,
};
use crate::error::{Error, Result};
use crate::nonlinearity::{
    floor_constant, positivity_index, truncate, ContractionMap, Nonlinear, Nonlinearity, PositivityIndex, Scaled,
};
use crate::spectral::{first_dirichlet_eigenpair, stability_verdict};
use crate::verify::{check_eigenfunction_alternative, energy_bound_check, Certificate};

/// One member of an approximating sequence.
#[derive(Clone, Debug, Serialize)]
pub struct ApproxStep {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip)]
    pub field: Field,
    pub reports: Vec<SolveReport>,
    pub norms: Norms,
    /// `‖u_step − u‖_{H¹}`.
    pub h1_distance: f64,
    pub certificates: Vec<Certificate>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SequenceDiagnostics {
    pub h1_distances: Vec<f64>,
    /// Largest nodewise decrease between consecutive steps, or excess over the target.
    pub max_monotonicity_violation: f64,
    /// `RHS − LHS` of the energy bound per step.
    pub energy_margins: Vec<f64>,
    /// `f' ≤ 0`: the sequence is the target itself.
    pub degenerate: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ApproxSequence {
    pub kind: &'static str,
    pub steps: Vec<ApproxStep>,
    #[serde(skip)]
    pub target: Field,
    pub target_norms: Norms,
    pub diagnostics: SequenceDiagnostics,
    pub certificates: Vec<Certificate>,
}

impl ApproxSequence {
    pub fn all_pass(&self) -> bool {
        self.certificates.iter().chain(self.steps.iter().flat_map(|s| &s.certificates)).all(|c| c.pass)
    }
}

fn interior_max_excess(a: &Field, b: &Field) -> f64 {
    let mesh = a.mesh();
    (0..mesh.len())
        .filter(|&k| mesh.kind(k) != NodeKind::Exterior)
        .map(|k| a.get(k) - b.get(k))
        .fold(0.0, f64::max)
}

fn step_error(step: usize, e: Error) -> Error {
    Error::Step { step, source: Box::new(e) }
}

/// Minimal solutions `u_k` of `−Δv = f_k(v)` between `0` and `u`, with the
/// boundary trace of `u`, for each truncation level in `k_list`.
pub fn build_truncation_sequence(
    f: &Nonlinearity,
    op: &DiscreteOperator,
    u: &Field,
    k_list: &[u32],
    opts: &MonotoneOptions,
) -> Result<ApproxSequence> {
    Field::zeros(op.mesh()).check_mesh(u)?;
    if u.min() < 0.0 {
        return Err(Error::InvalidInput(format!("target must be nonnegative, min is {}", u.min())));
    }
    if k_list.is_empty() {
        return Err(Error::InvalidInput("empty list of truncation levels".into()));
    }
    let mut ks = k_list.to_vec();
    ks.sort_unstable();
    ks.dedup();
    let degenerate = positivity_index(f) == PositivityIndex::NoTruncationNeeded;
    let target_norms = u.norms();
    let zero = Field::zeros(op.mesh());
    let scale = 1.0 + target_norms.sup;
    let mut steps: Vec<ApproxStep> = Vec::with_capacity(ks.len());
    let mut violation = 0.0f64;
    for (idx, &k) in ks.iter().enumerate() {
        let fk = truncate(f, k).map_err(|e| step_error(idx, e))?;
        let (field, reports) = if degenerate {
            (u.clone(), Vec::new())
        } else {
            let (v, rep) = monotone_iteration(&fk, op, &zero, Some(u), u, opts).map_err(|e| step_error(idx, e))?;
            (v, vec![rep])
        };
        violation = violation.max(interior_max_excess(&field, u));
        if let Some(prev) = steps.last() {
            violation = violation.max(interior_max_excess(&prev.field, &field));
        }
        let c0 = floor_constant(f, fk.k0);
        let energy = energy_bound_check(&field, u, c0)?;
        let diff = field.sub(u)?;
        steps.push(ApproxStep {
            label: format!("k={k}"),
            k: Some(k),
            eps: None,
            delta: None,
            norms: field.norms(),
            h1_distance: diff.norms().h1,
            field,
            reports,
            certificates: vec![energy],
        });
    }
    let h1: Vec<f64> = steps.iter().map(|s| s.h1_distance).collect();
    let increase = h1.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let certificates = vec![
        Certificate::upper("monotone-in-k", violation, 1e-8 * scale),
        Certificate::upper("h1-distance-nonincreasing", increase, 1e-8 * (1.0 + h1[0])),
    ];
    let energy_margins = steps.iter().map(|s| -s.certificates[0].witness).collect();
    Ok(ApproxSequence {
        kind: "truncation",
        steps,
        target: u.clone(),
        target_norms,
        diagnostics: SequenceDiagnostics {
            h1_distances: h1,
            max_monotonicity_violation: violation,
            energy_margins,
            degenerate,
        },
        certificates,
    })
}

/// Number of contraction stages `⌊N/4⌋ + 1` and the resulting `δ = 1 − (1−ε)^k`.
pub fn contraction_stages(dim: u32, eps: f64) -> (u32, f64) {
    let k = dim / 4 + 1;
    (k, 1.0 - (1.0 - eps).powi(k as i32))
}

/// The nested solves `−Δv_j = (1−ε)^j f(v_j)` between `0` and `Φ_ε(v_{j−1})`,
/// `v_0 = u`, `j = 1..k`, for each `ε`; the final stage is `u_δ`.
pub fn build_contraction_sequence(
    f: &Nonlinearity,
    op: &DiscreteOperator,
    u: &Field,
    eps_list: &[f64],
    dim: u32,
    opts: &MonotoneOptions,
) -> Result<ApproxSequence> {
    Field::zeros(op.mesh()).check_mesh(u)?;
    if u.min() < 0.0 {
        return Err(Error::InvalidInput(format!("target must be nonnegative, min is {}", u.min())));
    }
    if eps_list.is_empty() {
        return Err(Error::InvalidInput("empty list of ε values".into()));
    }
    let mut eps_sorted = eps_list.to_vec();
    eps_sorted.sort_by(|a, b| b.total_cmp(a));
    eps_sorted.dedup();
    let top = u.max();
    let mut t = 0.0;
    while t <= top {
        let v = f.value(t);
        if !(v > 0.0) {
            return Err(Error::NonPositive { at: t, value: v });
        }
        t += (top / 64.0).max(1e-3);
    }
    let target_norms = u.norms();
    let zero = Field::zeros(op.mesh());
    let scale = 1.0 + target_norms.sup;
    let mut steps = Vec::with_capacity(eps_sorted.len());
    let mut violation = 0.0f64;
    for (idx, &eps) in eps_sorted.iter().enumerate() {
        let map = ContractionMap::new(f.clone(), eps).map_err(|e| step_error(idx, e))?;
        let (k, delta) = contraction_stages(dim, eps);
        let mut prev = u.clone();
        let mut chain = u.clone();
        let mut reports = Vec::with_capacity(k as usize);
        for j in 1..=k {
            let sup = prev.try_map(|t| map.apply(t.max(0.0))).map_err(|e| step_error(idx, e))?;
            chain = chain.try_map(|t| map.apply(t.max(0.0))).map_err(|e| step_error(idx, e))?;
            let fj = Scaled { factor: (1.0 - eps).powi(j as i32), inner: f.clone() };
            let (v, rep) = monotone_iteration(&fj, op, &zero, Some(&sup), &sup, opts).map_err(|e| step_error(idx, e))?;
            reports.push(rep);
            prev = v;
        }
        let u_delta = prev;
        let n_delta = u_delta.norms().h1;
        let n_chain = chain.norms().h1;
        let chain_witness = (n_delta - n_chain).max(n_chain - target_norms.h1);
        let below = interior_max_excess(&u_delta, &chain).max(interior_max_excess(&chain, u));
        let nonneg = -u_delta.min().min(0.0);
        violation = violation.max(below);
        let certificates = vec![
            Certificate::upper("energy-chain", chain_witness, 1e-8 * (1.0 + target_norms.h1))
                .with_extra("h1_u_delta", n_delta)
                .with_extra("h1_phi_chain", n_chain)
                .with_extra("h1_target", target_norms.h1),
            Certificate::upper("order-chain", below.max(nonneg), 1e-8 * scale),
            Certificate::upper("stage-count", (reports.len() as f64 - k as f64).abs(), 0.0).with_extra("k", k as f64),
        ];
        let diff = u_delta.sub(u)?;
        steps.push(ApproxStep {
            label: format!("eps={eps}"),
            k: Some(k),
            eps: Some(eps),
            delta: Some(delta),
            norms: u_delta.norms(),
            h1_distance: diff.norms().h1,
            field: u_delta,
            reports,
            certificates,
        });
    }
    let h1: Vec<f64> = steps.iter().map(|s| s.h1_distance).collect();
    let worst = h1.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let strict = if h1.len() < 2 { Certificate::upper("h1-distance-decreasing", 0.0, 0.0) } else {
        let mut c = Certificate::upper("h1-distance-decreasing", worst, 0.0);
        c.pass = worst < 0.0;
        c
    };
    Ok(ApproxSequence {
        kind: "contraction",
        steps,
        target: u.clone(),
        target_norms,
        diagnostics: SequenceDiagnostics {
            h1_distances: h1,
            max_monotonicity_violation: violation,
            energy_margins: Vec::new(),
            degenerate: false,
        },
        certificates: vec![strict],
    })
}

/// Outcome of one seeded solve in a probe.
#[derive(Clone, Debug, Serialize)]
pub struct SeedOutcome {
    pub seed: String,
    pub method: &'static str,
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sup: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stable: Option<bool>,
    #[serde(skip)]
    pub field: Option<Field>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub lambda1: f64,
    /// Whether `f(t) = λ₁t` on the sampled range of the stable solutions.
    pub linear_at_lambda1: bool,
    pub seeds: Vec<SeedOutcome>,
    pub stable_nontrivial: usize,
    pub counterexamples: usize,
    pub certificates: Vec<Certificate>,
}

#[derive(Clone, Debug)]
pub struct ProbeOptions {
    /// Sup-norm below which a solution counts as `u ≡ 0`.
    pub zero_tol: f64,
    pub seeds: Vec<(String, Field)>,
    pub iteration: MonotoneOptions,
    pub newton: NewtonOptions,
}

/// Default seeds: multiples of `φ₁` and of the torsion-like profile.
pub fn default_seeds(op: &DiscreteOperator) -> Result<Vec<(String, Field)>> {
    let (_, phi) = first_dirichlet_eigenpair(op)?;
    let phi = phi.scale(1.0 / phi.norms().sup)?;
    let bump = Field::from_fn(op.mesh(), |_| 1.0)?.interior_only();
    Ok(vec![
        ("0.5*phi1".into(), phi.scale(0.5)?),
        ("phi1".into(), phi.clone()),
        ("2*phi1".into(), phi.scale(2.0)?),
        ("0.3*indicator".into(), bump.scale(0.3)?),
        ("phi1+0.5*indicator".into(), phi.add(&bump.scale(0.5)?)?),
    ])
}

impl ProbeOptions {
    pub fn for_operator(op: &DiscreteOperator) -> Result<Self> {
        Ok(ProbeOptions {
            zero_tol: 1e-6,
            seeds: default_seeds(op)?,
            iteration: MonotoneOptions { max_iter: 20_000, blow_up_cap: 1e6, ..Default::default() },
            newton: NewtonOptions { blow_up_cap: 1e6, ..Default::default() },
        })
    }
}

fn samples_linear(f: &Nonlinearity, lambda1: f64, top: f64) -> bool {
    (0..=64).all(|i| {
        let t = top * i as f64 / 64.0;
        (f.value(t) - lambda1 * t).abs() <= 1e-9 * (1.0 + lambda1 * t)
    })
}

/// Runs unshifted fixed-point and Newton solves from several seeds with zero
/// boundary data and classifies each stable nonnegative solution as trivial
/// or as a positive multiple of `φ₁` (the latter only when `f = λ₁t`).
pub fn classification_probe(f: &Nonlinearity, op: &DiscreteOperator, opts: &ProbeOptions) -> Result<ClassificationReport> {
    f.validate()?;
    if f.value(0.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!("classification needs f(0) = 0, got {}", f.value(0.0))));
    }
    let (lambda1, _) = first_dirichlet_eigenpair(op)?;
    let zero = Field::zeros(op.mesh());
    let mut seeds = Vec::new();
    let mut stable_fields: Vec<Field> = Vec::new();
    let mut certificates = Vec::new();
    let mut counterexamples = 0;
    let mut top = 0.0f64;
    for (label, seed) in &opts.seeds {
        let attempts: [(&'static str, Result<(Field, SolveReport)>); 2] = [
            ("picard", picard_solve(f, op, &zero, seed, &opts.iteration)),
            ("newton", newton_solve(f, op, &zero, seed, &opts.newton)),
        ];
        for (method, result) in attempts {
            let mut out = SeedOutcome {
                seed: label.clone(),
                method,
                outcome: String::new(),
                sup: None,
                mu1: None,
                stable: None,
                field: None,
            };
            match result {
                Err(e) => out.outcome = format!("diverged: {e}"),
                Ok((_, rep)) if !rep.converged => out.outcome = "not-converged".into(),
                Ok((u, _)) => {
                    let sup = u.norms().sup;
                    out.sup = Some(sup);
                    if u.min() < -opts.zero_tol {
                        out.outcome = "sign-changing (outside [0, ∞))".into();
                    } else {
                        let verdict = stability_verdict(f, op, &u)?;
                        out.mu1 = Some(verdict.mu1);
                        out.stable = Some(verdict.stable);
                        out.outcome = if !verdict.stable {
                            "unstable".into()
                        } else if sup <= opts.zero_tol {
                            "trivial".into()
                        } else {
                            top = top.max(sup);
                            stable_fields.push(u.clone());
                            let linear = samples_linear(f, lambda1, sup);
                            let cert = check_eigenfunction_alternative(op, &u, &zero)?;
                            let ok = linear && cert.pass;
                            certificates.push(Certificate { name: format!("eigenfunction-alternative:{label}:{method}"), ..cert });
                            if ok {
                                "eigenfunction".into()
                            } else {
                                counterexamples += 1;
                                "counterexample".into()
                            }
                        };
                        out.field = Some(u);
                    }
                }
            }
            seeds.push(out);
        }
    }
    // pairwise: differences of ordered stable solutions are eigenfunctions too
    for i in 0..stable_fields.len() {
        for j in 0..stable_fields.len() {
            let (a, b) = (&stable_fields[i], &stable_fields[j]);
            if i != j && a.sub(b)?.min() >= 0.0 && a.sub(b)?.norms().l2 > 1e-8 {
                let cert = check_eigenfunction_alternative(op, a, b)?;
                if !cert.pass {
                    counterexamples += 1;
                }
                certificates.push(Certificate { name: format!("eigenfunction-alternative:pair-{i}-{j}"), ..cert });
            }
        }
    }
    certificates.push(Certificate::upper("no-counterexample", counterexamples as f64, 0.0));
    Ok(ClassificationReport {
        lambda1,
        linear_at_lambda1: samples_linear(f, lambda1, top.max(1.0)),
        seeds,
        stable_nontrivial: stable_fields.len(),
        counterexamples,
        certificates,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NonexistenceReport {
    pub lambda1: f64,
    pub verdict: &'static str,
    pub attempts: Vec<SeedOutcome>,
    pub certificates: Vec<Certificate>,
}

/// Looks for nonnegative solutions of `−Δu = f(u)`, `u = 0` on the boundary,
/// when `f(t) > λ₁t` for `t > 0`.
///
/// Verdicts: `blow-up-suspected` (iterations escape every supersolution
/// candidate or the cap), `trivial-only` (every converged nonnegative
/// solution vanishes) or `counterexample`.
pub fn nonexistence_probe(f: &Nonlinearity, op: &DiscreteOperator, cap: f64, opts: &ProbeOptions) -> Result<NonexistenceReport> {
    f.validate()?;
    let (lambda1, _) = first_dirichlet_eigenpair(op)?;
    for i in 1..=200 {
        let t = cap * (i as f64 / 200.0).powi(3);
        if !(f.value(t) > lambda1 * t) {
            return Err(Error::InvalidInput(format!(
                "precondition f(t) > λ₁t fails at t = {t}: f(t) = {}, λ₁t = {}",
                f.value(t),
                lambda1 * t
            )));
        }
    }
    let zero = Field::zeros(op.mesh());
    let mut attempts = Vec::new();
    let mut escaped = 0usize;
    let mut nontrivial = 0usize;
    let mut record = |label: String, method: &'static str, result: Result<(Field, SolveReport)>, attempts: &mut Vec<SeedOutcome>| {
        let mut out = SeedOutcome { seed: label, method, outcome: String::new(), sup: None, mu1: None, stable: None, field: None };
        match result {
            Err(Error::BlowUpSuspected { .. }) | Err(Error::SupersolutionExceeded { .. }) => {
                escaped += 1;
                out.outcome = "blow-up suspected".into();
            }
            Err(e) => out.outcome = format!("failed: {e}"),
            Ok((_, rep)) if !rep.converged => out.outcome = "not-converged".into(),
            Ok((u, _)) => {
                let sup = u.norms().sup;
                out.sup = Some(sup);
                out.outcome = if u.min() < -opts.zero_tol {
                    "sign-changing (not admissible)".into()
                } else if sup <= opts.zero_tol {
                    "trivial".into()
                } else {
                    nontrivial += 1;
                    "nontrivial nonnegative solution".into()
                };
                out.field = Some(u);
            }
        }
        attempts.push(out);
    };
    let unbounded = MonotoneOptions { scheme: MonotoneScheme::Picard, ..opts.iteration.clone() };
    record("zero".into(), "monotone", monotone_iteration(f, op, &zero, None, &zero, &unbounded), &mut attempts);
    let torsion = crate::elliptic::solve_linear(op, &Field::constant(op.mesh(), 1.0)?, &zero)?;
    for m in [1.0, 10.0, 100.0] {
        let sup = torsion.scale(m * f.value(0.0).abs().max(1.0))?;
        record(format!("supersolution-candidate {m}"), "monotone", monotone_iteration(f, op, &zero, Some(&sup), &zero, &opts.iteration), &mut attempts);
    }
    for (label, seed) in &opts.seeds {
        record(label.clone(), "newton", newton_solve(f, op, &zero, seed, &opts.newton), &mut attempts);
    }
    let verdict = if nontrivial > 0 {
        "counterexample"
    } else if escaped > 0 {
        "blow-up-suspected"
    } else {
        "trivial-only"
    };
    let certificates = vec![Certificate::upper("no-nontrivial-solution", nontrivial as f64, 0.0)];
    Ok(NonexistenceReport { lambda1, verdict, attempts, certificates })
}

/// Layer width `ρ_n` as a function of the stretch factor.
pub type RhoRule = fn(u32) -> f64;

pub fn default_rho(n: u32) -> f64 {
    1.0 / n as f64
}

#[derive(Clone, Debug, Serialize)]
pub struct DumbbellRow {
    pub n: u32,
    pub rho: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layer_sup: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l1_average: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    pub volume: f64,
    pub layer_nodes: usize,
    /// Largest of `−u` and `u + 2 ln s` over interior nodes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub barrier_violation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<SolveReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub field: Option<Field>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DumbbellTable {
    pub dim: u32,
    pub resolution: usize,
    pub nonlinearity: Nonlinearity,
    pub rows: Vec<DumbbellRow>,
    pub certificates: Vec<Certificate>,
    pub assumption: &'static str,
}

/// Minimal solutions of `−Δu = 2(N−3)e^u` on the stretched dumbbells `Ω^n`
/// between `0` and `−2 ln s`, with layer sup over `{dist < ρ_n}` and the
/// volume-normalised `L¹` average per `n`.
pub fn dumbbell_experiment(
    dim: u32,
    n_list: &[u32],
    rho_rule: RhoRule,
    resolution: usize,
    opts: &MonotoneOptions,
) -> Result<DumbbellTable> {
    if dim < 11 {
        return Err(Error::InvalidInput(format!("the dumbbell experiment needs N ≥ 11, got {dim}")));
    }
    let f = Nonlinearity::exponential(2.0 * (dim as f64 - 3.0), 1.0);
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let rho = rho_rule(n);
        let mut row = DumbbellRow {
            n,
            rho,
            layer_sup: None,
            l1_average: None,
            max: None,
            volume: 0.0,
            layer_nodes: 0,
            barrier_violation: None,
            report: None,
            error: None,
            field: None,
        };
        let run = || -> Result<(Field, SolveReport, Arc<crate::discretization::Mesh>)> {
            let mesh = Arc::new(build_mesh(&DomainSpec::Dumbbell { dim, stretch: n, layer: rho }, resolution)?);
            let op = assemble(&mesh);
            let zero = Field::zeros(&mesh);
            let sup = Field::from_fn(&mesh, |p| -2.0 * p[0].ln())?;
            let (u, rep) = monotone_iteration(&f, &op, &zero, Some(&sup), &zero, opts)?;
            Ok((u, rep, mesh))
        };
        match run() {
            Err(e) => row.error = Some(e.to_string()),
            Ok((u, rep, mesh)) => {
                let mut layer_sup = f64::NEG_INFINITY;
                let mut barrier = 0.0f64;
                for k in 0..mesh.len() {
                    if mesh.kind(k) != NodeKind::Interior {
                        continue;
                    }
                    let v = u.get(k);
                    let s = mesh.coord(k)[0];
                    barrier = barrier.max(-v).max(v + 2.0 * s.ln());
                    if mesh.boundary_distance(k) < rho {
                        row.layer_nodes += 1;
                        layer_sup = layer_sup.max(v);
                    }
                }
                row.volume = mesh.weights().iter().sum();
                row.l1_average = Some(u.norms().l1 / row.volume);
                row.layer_sup = (row.layer_nodes > 0).then_some(layer_sup);
                row.max = Some(u.max());
                row.barrier_violation = Some(barrier);
                row.report = Some(rep);
                row.field = Some(u);
            }
        }
        rows.push(row);
    }
    let certificates = dumbbell_certificates(&rows);
    Ok(DumbbellTable {
        dim,
        resolution,
        nonlinearity: f,
        rows,
        certificates,
        assumption: "minimal solutions are taken rotationally symmetric in the cross-section variable",
    })
}

fn dumbbell_certificates(rows: &[DumbbellRow]) -> Vec<Certificate> {
    let sups: Vec<Option<f64>> = rows.iter().map(|r| r.layer_sup).collect();
    let growth = if sups.iter().any(Option::is_none) || sups.len() < 2 {
        f64::NEG_INFINITY
    } else {
        sups.windows(2).map(|w| w[1].unwrap() / w[0].unwrap() - 1.0).fold(f64::INFINITY, f64::min)
    };
    let mut increasing = Certificate::upper("layer-sup-increasing", growth, 0.05);
    increasing.pass = growth >= 0.05;
    let avgs: Vec<Option<f64>> = rows.iter().map(|r| r.l1_average).collect();
    let ratio = match avgs.first().copied().flatten() {
        Some(a0) if avgs.iter().all(Option::is_some) => avgs
            .iter()
            .map(|a| {
                let r = a.unwrap() / a0;
                r.max(1.0 / r)
            })
            .fold(1.0, f64::max),
        _ => f64::INFINITY,
    };
    let barrier = rows
        .iter()
        .map(|r| r.barrier_violation.unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    vec![
        increasing,
        Certificate::upper("l1-average-within-factor-2", ratio, 2.0),
        Certificate::upper("barrier", barrier, 1e-8),
    ]
}
