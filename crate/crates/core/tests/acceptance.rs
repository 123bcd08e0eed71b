//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero when any criterion fails.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stablelab::elliptic::{monotone_iteration, picard_solve, solve_linear, MonotoneOptions};
use stablelab::nonlinearity::{truncate, ContractionMap};
use stablelab::pipeline::{
    build_contraction_sequence, build_truncation_sequence, classification_probe, default_rho, dumbbell_experiment,
    ProbeOptions,
};
use stablelab::spectral::{first_dirichlet_eigenpair, refinement_study, stability_verdict};
use stablelab::verify::{
    check_eigenfunction_alternative, check_ordering, check_radial_monotonicity, check_rho_invariance_with,
    compute_affine_offset, Ordering,
};
use stablelab::{assemble, build_mesh, DiscreteOperator, DomainSpec, Field, Nonlinearity};

struct Outcome {
    pass: bool,
    detail: String,
}

fn op(domain: DomainSpec, res: usize) -> DiscreteOperator {
    assemble(&Arc::new(build_mesh(&domain, res).expect("mesh")))
}

fn log_target(res: usize) -> (DiscreteOperator, Field) {
    let a = op(DomainSpec::ball(10, 1.0), res);
    let u = Field::from_fn(a.mesh(), |p| -2.0 * p[0].ln()).unwrap();
    (a, u)
}

fn hardy() -> Outcome {
    let resolutions = [250, 500, 1000];
    let mut pass = true;
    let mut lines = Vec::new();
    let mut strict_toward_zero = true;
    for dim in (3..=9).chain([10, 12]) {
        let c = 2.0 * (dim as f64 - 2.0);
        let rep = refinement_study(&DomainSpec::ball(dim, 1.0), &resolutions, |p| c / (p[0] * p[0])).unwrap();
        let mus: Vec<f64> = rep.refinement.iter().map(|x| x.1).collect();
        if dim <= 9 {
            let ok = mus.iter().all(|m| *m < -1.0) && mus.windows(2).all(|w| w[1].abs() >= 1.5 * w[0].abs());
            pass &= ok;
        } else {
            let ok = mus.iter().all(|m| *m >= -0.5) && mus.windows(2).all(|w| w[1].abs() <= w[0].abs());
            strict_toward_zero &= mus.windows(2).all(|w| w[1] > w[0]) && mus.iter().all(|m| *m < 0.0);
            pass &= ok;
        }
        lines.push(format!("N={dim}: {:.4e} {:.4e} {:.4e}", mus[0], mus[1], mus[2]));
    }
    Outcome {
        pass,
        detail: format!(
            "{}; |mu1| nonincreasing for N>=10 (literal 'increasing negative values' reading: {})",
            lines.join("; "),
            if strict_toward_zero { "holds" } else { "does not hold, mu1 > 0 and decreasing" }
        ),
    }
}

/// Sup of `|I_h u − u*|` over the interval, `I_h` the piecewise linear
/// reconstruction from nodal values.
fn torsion_error(res: usize) -> f64 {
    let a = op(DomainSpec::unit_interval(), res);
    let zero = Field::zeros(a.mesh());
    let u = solve_linear(&a, &Field::constant(a.mesh(), 1.0).unwrap(), &zero).unwrap();
    let samples = 20 * res;
    (0..=samples)
        .map(|i| {
            let x = i as f64 / samples as f64;
            let v = u.interpolate([x, 0.0]).expect("inside interval");
            (v - x * (1.0 - x) / 2.0).abs()
        })
        .fold(0.0, f64::max)
}

fn nodal_torsion_error(res: usize) -> f64 {
    let a = op(DomainSpec::unit_interval(), res);
    let zero = Field::zeros(a.mesh());
    let u = solve_linear(&a, &Field::constant(a.mesh(), 1.0).unwrap(), &zero).unwrap();
    (0..u.len()).map(|k| (u.get(k) - {
        let x = a.mesh().coord(k)[0];
        x * (1.0 - x) / 2.0
    }).abs()).fold(0.0, f64::max)
}

fn exact_solution() -> Outcome {
    let e1 = torsion_error(100);
    let e2 = torsion_error(200);
    let ratio = e1 / e2;
    Outcome {
        pass: e1 <= 2e-4 && (ratio - 4.0).abs() <= 0.5,
        detail: format!(
            "sup error {e1:.3e} (nodal {:.1e}), ratio h -> h/2 = {ratio:.3}",
            nodal_torsion_error(100)
        ),
    }
}

fn truncation(radial_fields: &mut Vec<Field>) -> Outcome {
    let (a, u) = log_target(1000);
    let f = Nonlinearity::exponential(16.0, 1.0);
    let seq = build_truncation_sequence(&f, &a, &u, &[2, 4, 6, 8, 10], &MonotoneOptions::default()).unwrap();
    let h1 = &seq.diagnostics.h1_distances;
    let nonincreasing = h1.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    let halved = h1[h1.len() - 1] < 0.5 * h1[0];
    let energy = seq.steps.iter().all(|s| s.certificates.iter().all(|c| c.pass));
    let violation = seq.diagnostics.max_monotonicity_violation;
    radial_fields.extend(seq.steps.iter().map(|s| s.field.clone()));
    Outcome {
        pass: violation <= 1e-8 && nonincreasing && halved && energy,
        detail: format!(
            "violation {violation:.1e}, H1 distances {:?}, energy bound {}",
            h1.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>(),
            if energy { "ok" } else { "violated" }
        ),
    }
}

fn contraction(radial_fields: &mut Vec<Field>) -> Outcome {
    let (a, u) = log_target(1000);
    let f = Nonlinearity::exponential(16.0, 1.0);
    let seq = build_contraction_sequence(&f, &a, &u, &[0.4, 0.2, 0.1, 0.05], 10, &MonotoneOptions::default()).unwrap();
    let stages = seq.steps.iter().all(|s| s.k == Some(3) && s.reports.len() == 3);
    let chain = seq
        .steps
        .iter()
        .all(|s| s.certificates.iter().filter(|c| c.name == "energy-chain").all(|c| c.pass));
    let h1 = &seq.diagnostics.h1_distances;
    let decreasing = h1.windows(2).all(|w| w[1] < w[0]);
    radial_fields.extend(seq.steps.iter().map(|s| s.field.clone()));
    Outcome {
        pass: stages && chain && decreasing,
        detail: format!(
            "k=3 stages {stages}, energy chain {chain}, H1 distances {:?}",
            h1.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>()
        ),
    }
}

fn phi_properties(f: &Nonlinearity, eps: f64) -> bool {
    let map = ContractionMap::new(f.clone(), eps).unwrap();
    let zero = map.apply(0.0).unwrap() == 0.0;
    let d0 = (map.derivative(0.0).unwrap() - (1.0 - eps)).abs() <= 1e-6;
    let ts: Vec<f64> = (1..=100).map(|i| 0.05 * i as f64).collect();
    let slopes = ts.iter().all(|&t| {
        let d = map.derivative(t).unwrap();
        d > 0.0 && d < 1.0
    });
    let vals: Vec<f64> = ts.iter().map(|&t| map.apply(t).unwrap()).collect();
    let concave = vals.windows(3).all(|w| w[2] - 2.0 * w[1] + w[0] <= 1e-8 * (1.0 + w[1].abs()));
    zero && d0 && slopes && concave
}

fn contraction_closed_form() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = Nonlinearity::exponential(1.0, 1.0);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let eps: f64 = rng.gen_range(0.01..0.99);
        let t: f64 = rng.gen_range(0.01..5.0);
        let map = ContractionMap::new(f.clone(), eps).unwrap();
        let exact = -(eps + (1.0 - eps) * (-t).exp()).ln();
        worst = worst.max((map.apply(t).unwrap() - exact).abs());
    }
    let suite = [Nonlinearity::constant(1.0), f.clone(), Nonlinearity::affine(1.0, 1.0)]
        .iter()
        .all(|g| [0.1, 0.5, 0.9].iter().all(|&e| phi_properties(g, e)));
    Outcome { pass: worst <= 1e-9 && suite, detail: format!("max deviation {worst:.2e}, property suite {suite}") }
}

fn classification() -> Outcome {
    let a = op(DomainSpec::unit_interval(), 100);
    let h = a.mesh().h();
    let (lambda1, _) = first_dirichlet_eigenpair(&a).unwrap();
    let opts = ProbeOptions::for_operator(&a).unwrap();
    let rep = classification_probe(&Nonlinearity::affine(lambda1, 0.0), &a, &opts).unwrap();
    let stable: Vec<Field> = rep
        .seeds
        .iter()
        .filter(|s| s.stable == Some(true) && s.outcome == "eigenfunction")
        .filter_map(|s| s.field.clone())
        .collect();
    let mut worst = 0.0f64;
    let mut distinct_pairs = 0;
    for i in 0..stable.len() {
        for j in 0..stable.len() {
            let d = stable[i].sub(&stable[j]).unwrap();
            if i != j && d.min() >= 0.0 && d.norms().l2 > 1e-8 {
                let cert = check_eigenfunction_alternative(&a, &stable[i], &stable[j]).unwrap();
                worst = worst.max(cert.witness);
                distinct_pairs += 1;
            }
        }
    }
    let linear_ok = distinct_pairs > 0 && worst <= 10.0 * h * h;

    let quad = Nonlinearity::polynomial(vec![0.0, 0.5 * lambda1, 1.0]);
    let rep2 = classification_probe(&quad, &a, &opts).unwrap();
    let sups: Vec<f64> = rep2.seeds.iter().filter(|s| s.stable == Some(true)).filter_map(|s| s.sup).collect();
    let trivial_ok = !sups.is_empty() && sups.iter().all(|s| *s <= 1e-6);
    Outcome {
        pass: linear_ok && trivial_ok,
        detail: format!(
            "lambda1 t: {} stable, {distinct_pairs} ordered pairs, witness {worst:.2e} (band {:.1e}); t^2+0.5 lambda1 t: {} stable, max sup {:.1e}",
            stable.len(),
            10.0 * h * h,
            sups.len(),
            sups.iter().cloned().fold(0.0, f64::max)
        ),
    }
}

fn ordering() -> Outcome {
    let a = op(DomainSpec::unit_interval(), 100);
    let (lambda1, phi) = first_dirichlet_eigenpair(&a).unwrap();
    let f = Nonlinearity::affine(lambda1, 0.0);
    let zero = Field::zeros(a.mesh());
    let opts = MonotoneOptions { tol: 1e-12, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let solve = |rng: &mut ChaCha8Rng| -> Option<Field> {
        let amp: f64 = rng.gen_range(0.2..3.0);
        let noise: Vec<f64> = (0..phi.len()).map(|_| rng.gen_range(-0.3..0.3)).collect();
        let seed = phi.scale(amp).unwrap().add(&Field::from_values(a.mesh(), noise).ok()?.interior_only()).ok()?;
        let (u, rep) = picard_solve(&f, &a, &zero, &seed, &opts).ok()?;
        let stable = stability_verdict(&f, &a, &u).ok()?.stable;
        (rep.converged && stable).then_some(u)
    };
    let mut counts = [0usize; 4];
    let mut solved = 0;
    for _ in 0..10 {
        let (Some(u), Some(v)) = (solve(&mut rng), solve(&mut rng)) else { continue };
        solved += 1;
        let (o, _) = check_ordering(&u, &v).unwrap();
        counts[o as usize] += 1;
    }
    Outcome {
        pass: solved == 10 && counts[Ordering::Unordered as usize] == 0,
        detail: format!(
            "{solved} pairs solved: below {}, equal {}, above {}, unordered {}",
            counts[0], counts[1], counts[2], counts[3]
        ),
    }
}

fn truncated_stability(radial_fields: &mut Vec<Field>) -> Outcome {
    let (a, u) = log_target(1000);
    let f4 = truncate(&Nonlinearity::exponential(16.0, 1.0), 4).unwrap();
    let zero = Field::zeros(a.mesh());
    let (v, _) = monotone_iteration(&f4, &a, &zero, Some(&u), &u, &MonotoneOptions::default()).unwrap();
    let gap = (0..v.len())
        .filter(|&k| a.slot(k).is_some())
        .map(|k| u.get(k) - v.get(k))
        .fold(f64::INFINITY, f64::min);
    let verdict = stability_verdict(&f4, &a, &v).unwrap();
    radial_fields.push(v);
    Outcome {
        pass: gap > 0.0 && verdict.mu1 >= -1e-4,
        detail: format!("min gap to -2 ln r {gap:.3e}, mu1 {:.4e}", verdict.mu1),
    }
}

fn radial_monotonicity(radial_fields: &[Field]) -> Outcome {
    let mut failures = 0;
    let mut worst = f64::NEG_INFINITY;
    for v in radial_fields.iter().filter(|v| v.max() > 0.0) {
        let cert = check_radial_monotonicity(v).unwrap();
        worst = worst.max(cert.witness);
        failures += usize::from(!cert.pass);
    }
    Outcome {
        pass: failures == 0 && !radial_fields.is_empty(),
        detail: format!("{} radial fields, {failures} failures, largest slope {worst:.3e}", radial_fields.len()),
    }
}

fn symmetry() -> Outcome {
    let one = Nonlinearity::constant(1.0);
    let opts = MonotoneOptions::default();
    let square = op(DomainSpec::Box2D { lx: 1.0, ly: 1.0 }, 64);
    let zero = Field::zeros(square.mesh());
    let (u, _) = monotone_iteration(&one, &square, &zero, None, &zero, &opts).unwrap();
    let mut worst_sq = 0.0f64;
    let isos = square.mesh().domain().symmetries();
    for iso in &isos {
        worst_sq = worst_sq.max(check_rho_invariance_with(&u, iso, 1e-9).unwrap().witness);
    }
    let disk = op(DomainSpec::Disk2D { radius: 1.0 }, 64);
    let h = disk.mesh().h();
    let zero = Field::zeros(disk.mesh());
    let (w, _) = monotone_iteration(&one, &disk, &zero, None, &zero, &opts).unwrap();
    let rotations: Vec<_> = disk.mesh().domain().symmetries().into_iter().filter(|i| i.is_rotation()).collect();
    let mut worst_disk = 0.0f64;
    for iso in &rotations {
        worst_disk = worst_disk.max(check_rho_invariance_with(&w, iso, 5.0 * h * h).unwrap().witness);
    }
    Outcome {
        pass: isos.len() == 8 && rotations.len() == 8 && worst_sq <= 1e-9 && worst_disk <= 5.0 * h * h,
        detail: format!(
            "square: {} maps, witness {worst_sq:.2e}; disk: {} rotations, witness {worst_disk:.2e} (band {:.2e})",
            isos.len(),
            rotations.len(),
            5.0 * h * h
        ),
    }
}

fn dumbbell() -> Outcome {
    let table = dumbbell_experiment(11, &[1, 2, 4, 8], default_rho, 200, &MonotoneOptions::default()).unwrap();
    let rows: Vec<String> = table
        .rows
        .iter()
        .map(|r| match &r.error {
            Some(e) => format!("n={}: error {e}", r.n),
            None => format!(
                "n={}: layer sup {:.4}, L1 avg {:.4}",
                r.n,
                r.layer_sup.unwrap_or(f64::NAN),
                r.l1_average.unwrap_or(f64::NAN)
            ),
        })
        .collect();
    let certs: Vec<String> = table
        .certificates
        .iter()
        .map(|c| format!("{} {} ({:.3e})", c.name, if c.pass { "ok" } else { "fails" }, c.witness))
        .collect();
    Outcome {
        pass: table.certificates.iter().all(|c| c.pass),
        detail: format!("{}; {}", rows.join("; "), certs.join(", ")),
    }
}

fn affine_offset() -> Outcome {
    let a = op(DomainSpec::unit_interval(), 400);
    let boundary = Field::from_fn(a.mesh(), |p| p[0]).unwrap();
    let off = compute_affine_offset(&a, &boundary, &boundary).unwrap();
    let err = (off.a + PI * PI / 2.0).abs();
    Outcome { pass: err <= 1e-3, detail: format!("a = {:.6}, error {err:.2e}", off.a) }
}

fn main() {
    let mut radial = Vec::new();
    let criteria: Vec<(u32, &str, Duration, Box<dyn FnOnce(&mut Vec<Field>) -> Outcome>)> = vec![
        (1, "hardy dichotomy", Duration::from_secs(10), Box::new(|_| hardy())),
        (2, "exact torsion solution", Duration::from_secs(1), Box::new(|_| exact_solution())),
        (3, "truncation sequence", Duration::from_secs(60), Box::new(truncation)),
        (4, "contraction sequence", Duration::from_secs(60), Box::new(contraction)),
        (5, "contraction map closed form", Duration::from_secs(2), Box::new(|_| contraction_closed_form())),
        (6, "classification", Duration::from_secs(10), Box::new(|_| classification())),
        (7, "ordering of stable pairs", Duration::from_secs(5), Box::new(|_| ordering())),
        (8, "stability of truncated minimal solution", Duration::from_secs(10), Box::new(truncated_stability)),
        (9, "radial monotonicity", Duration::from_secs(1), Box::new(|_| Outcome { pass: true, detail: String::new() })),
        (10, "symmetry", Duration::from_secs(10), Box::new(|_| symmetry())),
        (11, "dumbbell trend", Duration::from_secs(300), Box::new(|_| dumbbell())),
        (12, "affine offset", Duration::from_secs(2), Box::new(|_| affine_offset())),
    ];
    let mut failed = Vec::new();
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let out = if id == 9 { radial_monotonicity(&radial) } else { run(&mut radial) };
        let elapsed = start.elapsed();
        let pass = out.pass && elapsed <= budget;
        println!(
            "criterion {id:>2} {:<4} {name} [{:.2}s / {}s] {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs(),
            out.detail
        );
        if !pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
