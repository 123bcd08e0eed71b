use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};
use stablelab::elliptic::{monotone_iteration, newton_solve, picard_solve, residual, MonotoneOptions, NewtonOptions};
use stablelab::pipeline::{
    build_contraction_sequence, build_truncation_sequence, classification_probe, default_rho, dumbbell_experiment,
    nonexistence_probe, ApproxSequence, ProbeOptions,
};
use stablelab::spectral::{first_dirichlet_eigenpair, hardy_verdict, morse_count, refinement_study, TOL_STAB};
use stablelab::verify::{check_rho_invariance, Certificate};
use stablelab::{assemble, build_mesh, DiscreteOperator, DomainSpec, Field, Nonlinear, Nonlinearity};

use crate::config::RunConfig;
use crate::spec::{parse_potential, Potential};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Solve,
    Stability,
    Approximate,
    Classify,
    Nonexist,
    Symmetry,
    Dumbbell,
    Eig,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Stability => "stability",
            Command::Approximate => "approximate",
            Command::Classify => "classify",
            Command::Nonexist => "nonexist",
            Command::Symmetry => "symmetry",
            Command::Dumbbell => "dumbbell",
            Command::Eig => "eig",
        }
    }

    pub fn from_name(name: &str) -> Result<Command, CliError> {
        use clap::ValueEnum;
        Command::from_str(name, false).map_err(|_| CliError::Usage(format!("unknown command `{name}`")))
    }
}

/// Everything a command produces before it is written out.
pub struct Outcome {
    pub results: Value,
    pub certificates: Vec<Certificate>,
    pub fields: Vec<(String, Field)>,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.certificates.iter().all(|c| c.pass)
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn operator(domain: &DomainSpec, res: usize) -> Result<DiscreteOperator, CliError> {
    Ok(assemble(&Arc::new(build_mesh(domain, res)?)))
}

fn domain_or(cfg: &RunConfig, default: &str) -> Result<DomainSpec, CliError> {
    match &cfg.domain {
        Some(d) => d.resolve(),
        None => crate::spec::parse_domain(default),
    }
}

fn nonlinearity(cfg: &RunConfig, op: &DiscreteOperator, default: Option<&str>) -> Result<Nonlinearity, CliError> {
    let arg = match (&cfg.f, default) {
        (Some(f), _) => f.clone(),
        (None, Some(d)) => crate::spec::NonlinearityArg::Compact(d.to_string()),
        (None, None) => return Err(CliError::Usage("missing nonlinearity (--f)".into())),
    };
    let lambda1 = if arg.needs_lambda1() { Some(first_dirichlet_eigenpair(op)?.0) } else { None };
    arg.resolve(lambda1)
}

fn monotone_opts(cfg: &RunConfig) -> MonotoneOptions {
    let t = cfg.tolerances();
    let mut o = MonotoneOptions::default();
    if let Some(tol) = t.solver_tol {
        o.tol = tol;
    }
    if let Some(m) = t.max_iter {
        o.max_iter = m;
    }
    o
}

fn newton_opts(cfg: &RunConfig) -> NewtonOptions {
    let t = cfg.tolerances();
    let mut o = NewtonOptions::default();
    if let Some(tol) = t.solver_tol {
        o.tol = tol;
    }
    if let Some(m) = t.max_iter {
        o.max_iter = m;
    }
    o
}

pub fn execute(command: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match command {
        Command::Solve => solve(cfg),
        Command::Stability => stability(cfg),
        Command::Approximate => approximate(cfg),
        Command::Classify => classify(cfg),
        Command::Nonexist => nonexist(cfg),
        Command::Symmetry => symmetry(cfg),
        Command::Dumbbell => dumbbell(cfg),
        Command::Eig => eig(cfg),
    }
}

fn solve(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let domain = domain_or(cfg, "interval")?;
    let op = operator(&domain, cfg.resolution.unwrap_or(100))?;
    let f = nonlinearity(cfg, &op, None)?;
    let g = cfg.boundary.unwrap_or(0.0);
    let boundary = Field::constant(op.mesh(), g)?;
    let zero = Field::zeros(op.mesh());
    let method = cfg.method.as_deref().unwrap_or("monotone");
    let (u, report) = match method {
        "monotone" => monotone_iteration(&f, &op, &zero.with_boundary(&boundary)?, None, &boundary, &monotone_opts(cfg))?,
        "newton" => newton_solve(&f, &op, &boundary, &boundary, &newton_opts(cfg))?,
        "picard" => picard_solve(&f, &op, &boundary, &boundary, &monotone_opts(cfg))?,
        other => return Err(CliError::Usage(format!("unknown method `{other}` (monotone, newton, picard)"))),
    };
    let res = residual(&f, &op, &u);
    let mut certificates = vec![
        Certificate::upper("converged", if report.converged { 0.0 } else { 1.0 }, 0.0),
        Certificate::upper("residual", res, 1e-6 * (1.0 + f.value(u.max()).abs())),
    ];
    let source = match &f {
        Nonlinearity::Affine { m, q } if *m == 0.0 => Some(*q),
        Nonlinearity::Polynomial { coefficients } if coefficients.iter().skip(1).all(|c| *c == 0.0) => {
            coefficients.first().copied()
        }
        _ => None,
    };
    if let (DomainSpec::Interval { a, b }, Some(c), true) = (&domain, source, g == 0.0) {
        let err = (0..u.len())
            .map(|k| {
                let x = op.mesh().coord(k)[0];
                (u.get(k) - c * (x - a) * (b - x) / 2.0).abs()
            })
            .fold(0.0, f64::max);
        certificates.push(Certificate::upper("closed-form", err, 1e-4));
    }
    Ok(Outcome {
        results: json!({
            "domain": domain,
            "nonlinearity": f,
            "resolution": op.mesh().shape(),
            "solver": report,
            "norms": u.norms(),
            "min": u.min(),
            "max": u.max(),
        }),
        certificates,
        fields: vec![("u".into(), u)],
    })
}

fn stability(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let domain = domain_or(cfg, "interval")?;
    let potential = parse_potential(cfg.potential.as_deref().unwrap_or("zero"))?;
    let resolutions = cfg.resolutions.clone().unwrap_or_else(|| vec![cfg.resolution.unwrap_or(200)]);
    let p = potential.clone();
    let rep = refinement_study(&domain, &resolutions, move |x| p.eval(x))?;
    let tol_stab = cfg.tolerances().tol_stab.unwrap_or(TOL_STAB);
    let finest = *resolutions.iter().max().expect("nonempty");
    let op = operator(&domain, finest)?;
    let v = Field::from_fn(op.mesh(), |x| potential.eval(x))?;
    let morse = morse_count(&op, &v, 20).ok();
    let mut certificates = vec![Certificate::upper(
        "rayleigh-consistency",
        (rep.rayleigh - rep.mu1).abs(),
        1e-6 * (1.0 + rep.mu1.abs()),
    )];
    let mut hardy = None;
    if let (DomainSpec::Ball { dim, .. }, Potential::Hardy { c }) = (&domain, &potential) {
        let h = hardy_verdict(*dim, *c)?;
        let discrete = rep.mu1 >= -tol_stab;
        certificates.push(
            Certificate::upper("hardy-consistency", if discrete == h.stable { 0.0 } else { 1.0 }, 0.0)
                .with_extra("threshold", h.threshold),
        );
        hardy = Some(h);
    }
    Ok(Outcome {
        results: json!({
            "domain": domain,
            "potential": potential,
            "mu1": rep.mu1,
            "stable": rep.mu1 >= -tol_stab,
            "tol_stab": tol_stab,
            "refinement": rep.refinement.iter().map(|(h, mu)| json!({"h": h, "mu1": mu})).collect::<Vec<_>>(),
            "morse_count": morse,
            "hardy": hardy,
            "report": rep,
        }),
        certificates,
        fields: vec![("eigenfunction".into(), rep.eigenfield.clone())],
    })
}

fn sequence_outcome(seq: ApproxSequence) -> Outcome {
    let mut certificates = seq.certificates.clone();
    for s in &seq.steps {
        for c in &s.certificates {
            certificates.push(Certificate { name: format!("{}:{}", s.label, c.name), ..c.clone() });
        }
    }
    let fields = seq.steps.iter().map(|s| (s.label.replace('=', "_"), s.field.clone())).collect();
    Outcome { results: to_value(&seq), certificates, fields }
}

fn approximate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let target = cfg.target.as_deref().unwrap_or("singular-log");
    let (domain, dim) = match (target, &cfg.domain) {
        ("singular-log", None) => {
            let dim = cfg.dim.unwrap_or(10);
            (DomainSpec::Ball { dim, radius: 1.0 }, dim)
        }
        (_, Some(d)) => {
            let d = d.resolve()?;
            let dim = match (&d, cfg.dim) {
                (_, Some(n)) => n,
                (DomainSpec::Ball { dim, .. }, None) => *dim,
                (DomainSpec::Interval { .. }, None) => 1,
                _ => 2,
            };
            (d, dim)
        }
        (_, None) => (DomainSpec::unit_interval(), cfg.dim.unwrap_or(1)),
    };
    let op = operator(&domain, cfg.resolution.unwrap_or(1000))?;
    let f = nonlinearity(cfg, &op, None)?;
    let u = match target {
        "singular-log" => {
            if !matches!(domain, DomainSpec::Ball { radius, .. } if radius == 1.0) {
                return Err(CliError::Usage("target singular-log needs the unit ball".into()));
            }
            Field::from_fn(op.mesh(), |p| -2.0 * p[0].ln())?
        }
        "torsion" => {
            let zero = Field::zeros(op.mesh());
            stablelab::elliptic::solve_linear(&op, &Field::constant(op.mesh(), 1.0)?, &zero)?
        }
        other => return Err(CliError::Usage(format!("unknown target `{other}` (singular-log, torsion)"))),
    };
    let opts = monotone_opts(cfg);
    let seq = match cfg.mode.as_deref().unwrap_or("truncation") {
        "truncation" => build_truncation_sequence(&f, &op, &u, cfg.k.as_deref().unwrap_or(&[2, 4, 6, 8]), &opts)?,
        "contraction" => {
            build_contraction_sequence(&f, &op, &u, cfg.eps.as_deref().unwrap_or(&[0.4, 0.2, 0.1, 0.05]), dim, &opts)?
        }
        other => return Err(CliError::Usage(format!("unknown mode `{other}` (truncation, contraction)"))),
    };
    Ok(sequence_outcome(seq))
}

fn probe_options(cfg: &RunConfig, op: &DiscreteOperator) -> Result<ProbeOptions, CliError> {
    let mut o = ProbeOptions::for_operator(op)?;
    let t = cfg.tolerances();
    if let Some(tol) = t.solver_tol {
        o.iteration.tol = tol;
        o.newton.tol = tol;
    }
    Ok(o)
}

fn seed_fields(seeds: &[stablelab::pipeline::SeedOutcome]) -> Vec<(String, Field)> {
    seeds
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.field.clone().map(|f| (format!("seed{i}_{}", s.method), f)))
        .collect()
}

fn classify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let domain = domain_or(cfg, "interval")?;
    let op = operator(&domain, cfg.resolution.unwrap_or(100))?;
    let f = nonlinearity(cfg, &op, None)?;
    let rep = classification_probe(&f, &op, &probe_options(cfg, &op)?)?;
    Ok(Outcome {
        results: json!({"domain": domain, "nonlinearity": f, "report": rep}),
        certificates: rep.certificates.clone(),
        fields: seed_fields(&rep.seeds),
    })
}

fn nonexist(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let domain = domain_or(cfg, "interval")?;
    let op = operator(&domain, cfg.resolution.unwrap_or(100))?;
    let f = nonlinearity(cfg, &op, None)?;
    let rep = nonexistence_probe(&f, &op, cfg.cap.unwrap_or(100.0), &probe_options(cfg, &op)?)?;
    Ok(Outcome {
        results: json!({"domain": domain, "nonlinearity": f, "report": rep}),
        certificates: rep.certificates.clone(),
        fields: seed_fields(&rep.attempts),
    })
}

fn symmetry(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let domain = domain_or(cfg, "box")?;
    let op = operator(&domain, cfg.resolution.unwrap_or(64))?;
    let f = nonlinearity(cfg, &op, Some("const:1"))?;
    let zero = Field::zeros(op.mesh());
    let (u, report) = monotone_iteration(&f, &op, &zero, None, &zero, &monotone_opts(cfg))?;
    let certificates = domain
        .symmetries()
        .iter()
        .map(|iso| check_rho_invariance(&u, iso))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Outcome {
        results: json!({"domain": domain, "nonlinearity": f, "solver": report, "norms": u.norms()}),
        certificates,
        fields: vec![("u".into(), u)],
    })
}

fn dumbbell(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let dim = cfg.dim.unwrap_or(11);
    let n_list = cfg.n.clone().unwrap_or_else(|| vec![1, 2, 4, 8]);
    let table = dumbbell_experiment(dim, &n_list, default_rho, cfg.resolution.unwrap_or(200), &monotone_opts(cfg))?;
    let fields = table
        .rows
        .iter()
        .filter_map(|r| r.field.clone().map(|f| (format!("n{}", r.n), f)))
        .collect();
    Ok(Outcome { results: to_value(&table), certificates: table.certificates.clone(), fields })
}

fn eig(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let domain = domain_or(cfg, "interval")?;
    let op = operator(&domain, cfg.resolution.unwrap_or(200))?;
    let (lambda1, phi) = first_dirichlet_eigenpair(&op)?;
    let q = stablelab::spectral::rayleigh_quotient(&op, &Field::zeros(op.mesh()), &phi)?;
    Ok(Outcome {
        results: json!({"domain": domain, "lambda1": lambda1, "h": op.mesh().h()}),
        certificates: vec![Certificate::upper("rayleigh-consistency", (q - lambda1).abs(), 1e-6 * lambda1.abs())],
        fields: vec![("phi1".into(), phi)],
    })
}
