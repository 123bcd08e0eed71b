//! Convex nonlinearities `f` on `[0, ∞)` and the two approximating
//! constructions built on them: the affine truncation `f_k` and the
//! concave contraction map `Φ_ε`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_simpson, scan_golden_min};

/// Scalar nonlinearity with a derivative, as consumed by the solvers.
pub trait Nonlinear: Send + Sync {
    fn value(&self, t: f64) -> f64;
    fn derivative(&self, t: f64) -> f64;

    /// Lipschitz constant on `[a, b]` for a convex function.
    fn lipschitz_on(&self, a: f64, b: f64) -> f64 {
        self.derivative(a).abs().max(self.derivative(b).abs())
    }
}

impl<T: Nonlinear + ?Sized> Nonlinear for &T {
    fn value(&self, t: f64) -> f64 {
        (**self).value(t)
    }
    fn derivative(&self, t: f64) -> f64 {
        (**self).derivative(t)
    }
}

/// A convex C¹ nonlinearity on `[0, ∞)`.
///
/// Kinds serialize as tagged records, e.g.
/// `{"kind":"shifted-exponential","c":16,"a":1,"b":0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Nonlinearity {
    /// `c·e^{a t}`
    Exponential { c: f64, a: f64 },
    /// `c·t^p + b`, extended by `b` for `t < 0`
    Power { c: f64, p: f64, b: f64 },
    /// `m·t + q`
    Affine { m: f64, q: f64 },
    /// `Σ coefficients[i]·t^i`
    Polynomial { coefficients: Vec<f64> },
    /// `c·e^{a t} + b`
    ShiftedExponential { c: f64, a: f64, b: f64 },
}

const CONVEXITY_SLACK: f64 = 1e-12;

impl Nonlinearity {
    pub fn exponential(c: f64, a: f64) -> Self {
        Nonlinearity::Exponential { c, a }
    }

    pub fn constant(q: f64) -> Self {
        Nonlinearity::Affine { m: 0.0, q }
    }

    pub fn affine(m: f64, q: f64) -> Self {
        Nonlinearity::Affine { m, q }
    }

    pub fn polynomial(coefficients: Vec<f64>) -> Self {
        Nonlinearity::Polynomial { coefficients }
    }

    /// Checks finiteness and samples convexity on a log grid of `[0, ∞)`.
    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Nonlinearity::Power { p, .. } if *p < 1.0 => {
                return Err(Error::InvalidInput(format!("power exponent p = {p} must be ≥ 1")));
            }
            Nonlinearity::Polynomial { coefficients } if coefficients.is_empty() => {
                return Err(Error::InvalidInput("polynomial needs at least one coefficient".into()));
            }
            _ => {}
        }
        let params_finite = match self {
            Nonlinearity::Exponential { c, a } => c.is_finite() && a.is_finite(),
            Nonlinearity::Power { c, p, b } => c.is_finite() && p.is_finite() && b.is_finite(),
            Nonlinearity::Affine { m, q } => m.is_finite() && q.is_finite(),
            Nonlinearity::Polynomial { coefficients } => coefficients.iter().all(|c| c.is_finite()),
            Nonlinearity::ShiftedExponential { c, a, b } => {
                c.is_finite() && a.is_finite() && b.is_finite()
            }
        };
        if !params_finite {
            return Err(Error::InvalidInput("nonlinearity parameters must be finite".into()));
        }
        let grid = self.sample_grid();
        let mut prev: Option<(f64, f64)> = None;
        for &t in &grid {
            let d = self.derivative(t);
            if !self.value(t).is_finite() || !d.is_finite() {
                return Err(Error::InvalidInput(format!("f or f' not finite at t = {t}")));
            }
            if let Some((tp, dp)) = prev {
                if dp > d + CONVEXITY_SLACK * (1.0 + dp.abs().max(d.abs())) {
                    return Err(Error::NotConvex { t1: tp, t2: t, d1: dp, d2: d });
                }
            }
            prev = Some((t, d));
        }
        Ok(())
    }

    /// Log-spaced samples on `[0, T]` where `T` keeps exponentials finite.
    fn sample_grid(&self) -> Vec<f64> {
        let growth = match self {
            Nonlinearity::Exponential { a, .. } | Nonlinearity::ShiftedExponential { a, .. } => {
                a.abs()
            }
            _ => 0.0,
        };
        let t_max = if growth > 0.0 { (600.0 / growth).min(1e4) } else { 1e4 };
        let mut grid = vec![0.0];
        let n = 400;
        let lo: f64 = 1e-6;
        let ratio = (t_max / lo).powf(1.0 / n as f64);
        let mut t = lo;
        for _ in 0..=n {
            grid.push(t.min(t_max));
            t *= ratio;
        }
        grid
    }

    /// Exact antiderivative with `F(0) = 0`.
    pub fn antiderivative(&self, t: f64) -> Option<f64> {
        Some(match self {
            Nonlinearity::Exponential { c, a } => exp_primitive(*c, *a, t),
            Nonlinearity::ShiftedExponential { c, a, b } => exp_primitive(*c, *a, t) + b * t,
            Nonlinearity::Power { c, p, b } => c * t.max(0.0).powf(p + 1.0) / (p + 1.0) + b * t,
            Nonlinearity::Affine { m, q } => 0.5 * m * t * t + q * t,
            Nonlinearity::Polynomial { coefficients } => coefficients
                .iter()
                .enumerate()
                .rev()
                .fold(0.0, |acc, (i, c)| acc * t + c / (i as f64 + 1.0))
                * t,
        })
    }

    /// `lim_{t→∞} f'(t)`; convexity makes this `sup f'` on `[0, ∞)`.
    pub fn derivative_limit(&self) -> f64 {
        match self {
            Nonlinearity::Exponential { c, a } | Nonlinearity::ShiftedExponential { c, a, .. } => {
                if *a > 0.0 && *c != 0.0 {
                    c.signum() * f64::INFINITY
                } else {
                    0.0
                }
            }
            Nonlinearity::Power { c, p, .. } => {
                if *c == 0.0 {
                    0.0
                } else if *p > 1.0 {
                    c.signum() * f64::INFINITY
                } else {
                    *c
                }
            }
            Nonlinearity::Affine { m, .. } => *m,
            Nonlinearity::Polynomial { coefficients } => {
                let deg = coefficients.iter().rposition(|c| *c != 0.0).unwrap_or(0);
                match deg {
                    0 => 0.0,
                    1 => coefficients[1],
                    _ => coefficients[deg].signum() * f64::INFINITY,
                }
            }
        }
    }

    /// `f' ≥ 0` on `[0, ∞)`, which for convex `f` reduces to `f'(0) ≥ 0`.
    pub fn is_nondecreasing(&self) -> bool {
        self.derivative(0.0) >= 0.0
    }

    /// `f > 0` on `[0, ∞)` for a nondecreasing convex `f`.
    pub fn is_positive(&self) -> bool {
        self.is_nondecreasing() && self.value(0.0) > 0.0
    }
}

fn exp_primitive(c: f64, a: f64, t: f64) -> f64 {
    if a == 0.0 {
        c * t
    } else {
        c * (a * t).exp_m1() / a
    }
}

impl Nonlinear for Nonlinearity {
    fn value(&self, t: f64) -> f64 {
        match self {
            Nonlinearity::Exponential { c, a } => c * (a * t).exp(),
            Nonlinearity::ShiftedExponential { c, a, b } => c * (a * t).exp() + b,
            Nonlinearity::Power { c, p, b } => c * t.max(0.0).powf(*p) + b,
            Nonlinearity::Affine { m, q } => m * t + q,
            Nonlinearity::Polynomial { coefficients } => {
                coefficients.iter().rev().fold(0.0, |acc, c| acc * t + c)
            }
        }
    }

    fn derivative(&self, t: f64) -> f64 {
        match self {
            Nonlinearity::Exponential { c, a } | Nonlinearity::ShiftedExponential { c, a, .. } => {
                c * a * (a * t).exp()
            }
            Nonlinearity::Power { c, p, .. } => {
                if t <= 0.0 {
                    if *p == 1.0 {
                        *c
                    } else {
                        0.0
                    }
                } else {
                    c * p * t.powf(p - 1.0)
                }
            }
            Nonlinearity::Affine { m, .. } => *m,
            Nonlinearity::Polynomial { coefficients } => coefficients
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (i, c)| acc * t + i as f64 * c),
        }
    }
}

/// `factor · f`, e.g. the `(1-ε)^j f` right-hand sides of the contraction stages.
#[derive(Clone, Debug)]
pub struct Scaled<F> {
    pub factor: f64,
    pub inner: F,
}

impl<F: Nonlinear> Nonlinear for Scaled<F> {
    fn value(&self, t: f64) -> f64 {
        self.factor * self.inner.value(t)
    }
    fn derivative(&self, t: f64) -> f64 {
        self.factor * self.inner.derivative(t)
    }
}

/// Outcome of the search for the truncation threshold `k₀`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "k0", rename_all = "kebab-case")]
pub enum PositivityIndex {
    /// Smallest integer `m ≥ 1` with `f(m) > 0` and `f'(m) > 0`.
    Index(u32),
    /// `f' ≤ 0` on all of `[0, ∞)`: `f` is already globally Lipschitz.
    NoTruncationNeeded,
    /// No admissible integer below the search cap.
    UnboundedSearch,
}

pub const DEFAULT_INDEX_CAP: u32 = 100_000;

pub fn positivity_index(f: &Nonlinearity) -> PositivityIndex {
    positivity_index_capped(f, DEFAULT_INDEX_CAP)
}

pub fn positivity_index_capped(f: &Nonlinearity, cap: u32) -> PositivityIndex {
    if f.derivative_limit() <= 0.0 {
        return PositivityIndex::NoTruncationNeeded;
    }
    (1..=cap)
        .find(|&m| {
            let t = m as f64;
            f.value(t) > 0.0 && f.derivative(t) > 0.0
        })
        .map_or(PositivityIndex::UnboundedSearch, PositivityIndex::Index)
}

/// `min_{t ∈ [0, k₀]} f(t)`.
pub fn floor_constant(f: &Nonlinearity, k0: u32) -> f64 {
    let g = |t: f64| f.value(t);
    scan_golden_min(&g, 0.0, k0 as f64, 256).1
}

/// `f` on `[0, k]` continued by its tangent line at `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedNonlinearity {
    pub base: Nonlinearity,
    pub level: u32,
    pub k0: u32,
    pub c0: f64,
    /// `false` when `f' ≤ 0` everywhere and the truncation is `f` itself.
    pub tangent: bool,
}

pub fn truncate(f: &Nonlinearity, k: u32) -> Result<TruncatedNonlinearity> {
    match positivity_index(f) {
        PositivityIndex::Index(k0) => {
            if k < k0 {
                return Err(Error::Domain(format!(
                    "truncation level k = {k} is below the positivity index k0 = {k0}"
                )));
            }
            Ok(TruncatedNonlinearity {
                base: f.clone(),
                level: k,
                k0,
                c0: floor_constant(f, k0),
                tangent: true,
            })
        }
        PositivityIndex::NoTruncationNeeded => Ok(TruncatedNonlinearity {
            base: f.clone(),
            level: k,
            k0: 1,
            c0: floor_constant(f, 1),
            tangent: false,
        }),
        PositivityIndex::UnboundedSearch => Err(Error::Domain(
            "no positivity index found below the search cap".into(),
        )),
    }
}

impl TruncatedNonlinearity {
    fn knot(&self) -> f64 {
        self.level as f64
    }

    /// Global Lipschitz constant `max(|f'(0)|, f'(k))`.
    pub fn lipschitz(&self) -> f64 {
        let d0 = self.base.derivative(0.0).abs();
        if self.tangent {
            d0.max(self.base.derivative(self.knot()))
        } else {
            d0
        }
    }
}

impl Nonlinear for TruncatedNonlinearity {
    fn value(&self, t: f64) -> f64 {
        let k = self.knot();
        if !self.tangent || t <= k {
            self.base.value(t)
        } else {
            self.base.value(k) + self.base.derivative(k) * (t - k)
        }
    }

    fn derivative(&self, t: f64) -> f64 {
        let k = self.knot();
        if !self.tangent || t <= k {
            self.base.derivative(t)
        } else {
            self.base.derivative(k)
        }
    }
}

/// The concave reparametrisation `Φ_ε` defined by
/// `∫₀^{Φ_ε(t)} ds/f(s) = (1-ε) ∫₀^t ds/f(s)`.
///
/// `h(t) = ∫₀^t ds/f` is tabulated at construction on a uniform grid and
/// completed by adaptive Simpson between table knots.
#[derive(Clone, Debug)]
pub struct ContractionMap {
    base: Nonlinearity,
    eps: f64,
    step: f64,
    table: Vec<f64>,
}

const H_TABLE_STEP: f64 = 0.25;
const H_TABLE_LEN: usize = 257;

impl ContractionMap {
    pub fn new(base: Nonlinearity, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidInput(format!("ε = {eps} must lie in (0, 1)")));
        }
        if !base.is_nondecreasing() {
            return Err(Error::InvalidInput(
                "contraction map needs a nondecreasing nonlinearity".into(),
            ));
        }
        let f0 = base.value(0.0);
        if f0 <= 0.0 {
            return Err(Error::NonPositive { at: 0.0, value: f0 });
        }
        let mut table = Vec::with_capacity(H_TABLE_LEN);
        table.push(0.0);
        let mut acc = 0.0;
        for j in 1..H_TABLE_LEN {
            let a = (j - 1) as f64 * H_TABLE_STEP;
            acc += integrate_reciprocal(&base, a, a + H_TABLE_STEP, acc);
            table.push(acc);
        }
        Ok(ContractionMap { base, eps, step: H_TABLE_STEP, table })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn base(&self) -> &Nonlinearity {
        &self.base
    }

    /// `h(t) = ∫₀^t ds/f(s)`.
    pub fn h(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        let last = (self.table.len() - 1) as f64 * self.step;
        let (j, a) = if t >= last {
            (self.table.len() - 1, last)
        } else {
            let j = (t / self.step).floor() as usize;
            (j, j as f64 * self.step)
        };
        let base = self.table[j];
        base + integrate_reciprocal(&self.base, a, t, base)
    }

    /// `Φ_ε(t) = h⁻¹((1-ε) h(t))`.
    pub fn apply(&self, t: f64) -> Result<f64> {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::InvalidInput(format!("Φ_ε needs a finite t ≥ 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        let ft = self.base.value(t);
        if ft <= 0.0 {
            return Err(Error::NonPositive { at: t, value: ft });
        }
        let target = (1.0 - self.eps) * self.h(t);
        Ok(self.invert_h(target, t))
    }

    /// `Φ_ε'(t) = (1-ε) f(Φ_ε(t)) / f(t)`.
    pub fn derivative(&self, t: f64) -> Result<f64> {
        let p = self.apply(t)?;
        Ok((1.0 - self.eps) * self.base.value(p) / self.base.value(t))
    }

    /// `j`-fold composition; `j = 0` is the identity.
    pub fn iterate(&self, j: u32, t: f64) -> Result<f64> {
        (0..j).try_fold(t, |acc, _| self.apply(acc))
    }

    /// Solves `h(s) = target` for `s ∈ [0, upper]` by bisection on the
    /// bracket followed by safeguarded Newton with `h' = 1/f`.
    fn invert_h(&self, target: f64, upper: f64) -> f64 {
        let mut lo: f64 = 0.0;
        let mut hi = upper;
        // narrow the bracket with the table first
        let last = self.table.len() - 1;
        let j = self.table.partition_point(|&v| v <= target);
        if j >= 1 && j <= last {
            lo = lo.max((j - 1) as f64 * self.step);
            hi = hi.min(j as f64 * self.step);
        } else if j > last {
            lo = lo.max(last as f64 * self.step);
        }
        if lo > hi {
            lo = 0.0;
            hi = upper;
        }
        for _ in 0..60 {
            if hi - lo <= 1e-6 * (1.0 + hi) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.h(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut s = 0.5 * (lo + hi);
        for _ in 0..50 {
            let g = self.h(s) - target;
            if g < 0.0 {
                lo = lo.max(s);
            } else {
                hi = hi.min(s);
            }
            let mut next = s - g * self.base.value(s);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let done = (next - s).abs() <= 1e-15 * (1.0 + s);
            s = next;
            if done || hi - lo <= 1e-15 * (1.0 + hi) {
                break;
            }
        }
        s
    }

    /// Smallest `C` with `f(Φ_ε(t)) ≤ (C/ε)(1+t)` on the sample points.
    pub fn empirical_growth_constant(&self, samples: &[f64]) -> Result<f64> {
        samples.iter().try_fold(0.0f64, |acc, &t| {
            let p = self.apply(t)?;
            Ok(acc.max(self.eps * self.base.value(p) / (1.0 + t)))
        })
    }
}

fn integrate_reciprocal(f: &Nonlinearity, a: f64, b: f64, scale: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let g = |s: f64| 1.0 / f.value(s);
    adaptive_simpson(&g, a, b, 1e-13 * (1.0 + scale.abs()), 48)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn closeish(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn truncation_of_exponential() {
        let f = Nonlinearity::exponential(1.0, 1.0);
        let fk = truncate(&f, 2).unwrap();
        assert!(closeish(fk.value(3.0), 2.0 * E * E, 1e-14));
        assert!(closeish(fk.value(1.0), E, 1e-15));
        // C¹ at the knot
        assert_eq!(fk.value(2.0), f.value(2.0));
        assert!(closeish(fk.value(2.0 + 1e-9), f.value(2.0) + 1e-9 * f.derivative(2.0), 1e-14));
        assert_eq!(fk.derivative(2.0), fk.derivative(2.5));
        assert!(closeish(fk.lipschitz(), E * E, 1e-15));
    }

    #[test]
    fn truncation_of_affine_is_identity() {
        let f = Nonlinearity::affine(1.0, -5.0);
        assert_eq!(positivity_index(&f), PositivityIndex::Index(6));
        let fk = truncate(&f, 7).unwrap();
        for t in [0.0, 1.0, 6.5, 7.0, 9.0, 100.0] {
            assert!(closeish(fk.value(t), f.value(t), 1e-15));
        }
        assert!(matches!(truncate(&f, 5), Err(Error::Domain(_))));
    }

    #[test]
    fn positivity_index_examples() {
        assert_eq!(positivity_index(&Nonlinearity::exponential(1.0, 1.0)), PositivityIndex::Index(1));
        // integer scan oracle for t² − 1
        let f = Nonlinearity::polynomial(vec![-1.0, 0.0, 1.0]);
        let oracle = (1..100u32)
            .find(|&m| {
                let t = m as f64;
                t * t - 1.0 > 0.0 && 2.0 * t > 0.0
            })
            .unwrap();
        assert_eq!(oracle, 2);
        assert_eq!(positivity_index(&f), PositivityIndex::Index(oracle));
        assert_eq!(
            positivity_index(&Nonlinearity::exponential(1.0, -1.0)),
            PositivityIndex::NoTruncationNeeded
        );
        assert_eq!(positivity_index(&Nonlinearity::constant(1.0)), PositivityIndex::NoTruncationNeeded);
        // f' > 0 but f stays negative below the cap
        let f = Nonlinearity::affine(1.0, -1e9);
        assert_eq!(positivity_index_capped(&f, 100), PositivityIndex::UnboundedSearch);
        assert!(truncate(&Nonlinearity::affine(1e-12, -1e9), 1).is_err());
    }

    #[test]
    fn floor_constant_examples() {
        assert_eq!(floor_constant(&Nonlinearity::exponential(1.0, 1.0), 1), 1.0);
        let f = Nonlinearity::ShiftedExponential { c: 1.0, a: 1.0, b: -2.0 };
        assert_eq!(floor_constant(&f, 1), -1.0);
        // grid minimisation oracle
        let f = Nonlinearity::polynomial(vec![-1.0, 0.0, 1.0]);
        let oracle = (0..=20_000)
            .map(|i| {
                let t = 2.0 * i as f64 / 20_000.0;
                t * t - 1.0
            })
            .fold(f64::INFINITY, f64::min);
        assert!(closeish(floor_constant(&f, 2), oracle, 1e-12));
        // interior minimum
        let f = Nonlinearity::polynomial(vec![0.0, -1.0, 1.0]);
        assert!(closeish(floor_constant(&f, 2), -0.25, 1e-10));
    }

    #[test]
    fn convexity_validator() {
        assert!(Nonlinearity::exponential(16.0, 1.0).validated().is_ok());
        assert!(Nonlinearity::polynomial(vec![0.0, 1.0, 1.0]).validated().is_ok());
        assert!(matches!(
            Nonlinearity::polynomial(vec![0.0, 0.0, -1.0]).validate(),
            Err(Error::NotConvex { .. })
        ));
        assert!(Nonlinearity::exponential(-1.0, 1.0).validate().is_err());
        assert!(Nonlinearity::Power { c: 1.0, p: 0.5, b: 0.0 }.validate().is_err());
    }

    #[test]
    fn antiderivatives_match_quadrature() {
        let fs = [
            Nonlinearity::exponential(2.0, 0.5),
            Nonlinearity::ShiftedExponential { c: 1.0, a: 1.0, b: -2.0 },
            Nonlinearity::Power { c: 3.0, p: 2.5, b: 1.0 },
            Nonlinearity::affine(2.0, -1.0),
            Nonlinearity::polynomial(vec![1.0, -2.0, 3.0, 0.5]),
        ];
        for f in &fs {
            let q = adaptive_simpson(&|s| f.value(s), 0.0, 1.7, 1e-13, 50);
            assert!(closeish(f.antiderivative(1.7).unwrap(), q, 1e-11), "{f:?}");
        }
    }

    #[test]
    fn config_record_round_trip() {
        let f: Nonlinearity =
            serde_json::from_str(r#"{"kind":"shifted-exponential","c":16,"a":1,"b":0}"#).unwrap();
        assert_eq!(f, Nonlinearity::ShiftedExponential { c: 16.0, a: 1.0, b: 0.0 });
        let f: Nonlinearity = serde_json::from_str(r#"{"kind":"polynomial","coefficients":[0,1,1]}"#).unwrap();
        assert_eq!(f.value(2.0), 6.0);
    }

    #[test]
    fn phi_eps_examples() {
        let map = ContractionMap::new(Nonlinearity::constant(1.0), 0.25).unwrap();
        assert!(closeish(map.apply(4.0).unwrap(), 3.0, 1e-12));
        let map = ContractionMap::new(Nonlinearity::exponential(1.0, 1.0), 0.5).unwrap();
        let closed = -(0.5 + 0.5 * (-1.0f64).exp()).ln();
        assert!(closeish(closed, 0.379885, 1e-6));
        assert!(closeish(map.apply(1.0).unwrap(), closed, 1e-10));
        assert_eq!(map.apply(0.0).unwrap(), 0.0);
    }

    #[test]
    fn phi_eps_iterate_examples() {
        let map = ContractionMap::new(Nonlinearity::constant(1.0), 0.5).unwrap();
        assert_eq!(map.iterate(0, 8.0).unwrap(), 8.0);
        assert!(closeish(map.iterate(3, 8.0).unwrap(), 1.0, 1e-12));
        // closed form composed twice: e^{-Φ²} = ε + ε(1-ε) + (1-ε)² e^{-t}
        let map = ContractionMap::new(Nonlinearity::exponential(1.0, 1.0), 0.5).unwrap();
        let closed = -(0.5 + 0.25 + 0.25 * (-1.0f64).exp()).ln();
        assert!(closeish(closed, 0.172011, 1e-5));
        assert!(closeish(map.iterate(2, 1.0).unwrap(), closed, 1e-10));
    }

    #[test]
    fn contraction_rejects_bad_input() {
        assert!(ContractionMap::new(Nonlinearity::constant(1.0), 1.0).is_err());
        assert!(ContractionMap::new(Nonlinearity::constant(-1.0), 0.5).is_err());
        assert!(ContractionMap::new(Nonlinearity::exponential(1.0, -1.0), 0.5).is_err());
        let map = ContractionMap::new(Nonlinearity::constant(1.0), 0.5).unwrap();
        assert!(map.apply(-1.0).is_err());
    }

    #[test]
    fn phi_eps_beyond_table() {
        let map = ContractionMap::new(Nonlinearity::affine(1.0, 1.0), 0.3).unwrap();
        // h(t) = ln(1+t): Φ(t) = (1+t)^{0.7} − 1
        for t in [0.1f64, 10.0, 63.9, 64.0, 80.0, 500.0] {
            let exact = (1.0 + t).powf(0.7) - 1.0;
            assert!(closeish(map.apply(t).unwrap(), exact, 1e-10), "t = {t}");
        }
    }
}
