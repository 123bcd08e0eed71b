//! Compact `name:key=value,...` descriptors for domains, nonlinearities and
//! potentials.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use stablelab::{DomainSpec, Nonlinearity};

use crate::CliError;

/// A domain given either compactly (`ball:N=10,R=1`) or as a JSON record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainArg {
    Compact(String),
    Record(DomainSpec),
}

/// A nonlinearity given compactly (`exp:c=16`) or as a JSON record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NonlinearityArg {
    Compact(String),
    Record(Nonlinearity),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Potential {
    /// `c/|x|²`
    Hardy { c: f64 },
    Constant { c: f64 },
}

impl Potential {
    pub fn eval(&self, p: [f64; 2]) -> f64 {
        match *self {
            Potential::Hardy { c } => c / (p[0] * p[0] + p[1] * p[1]),
            Potential::Constant { c } => c,
        }
    }
}

fn bad(what: &str, text: &str, why: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("invalid {what} `{text}`: {why}"))
}

fn split(text: &str) -> (&str, &str) {
    match text.split_once(':') {
        Some((n, rest)) => (n.trim(), rest.trim()),
        None => (text.trim(), ""),
    }
}

fn params(what: &str, text: &str, body: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for part in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| bad(what, text, format!("expected key=value, got `{part}`")))?;
        if out.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(bad(what, text, format!("duplicate key `{}`", k.trim())));
        }
    }
    Ok(out)
}

/// A number, optionally a multiple of the discrete `λ₁` (`lambda1`, `2*lambda1`, `0.5lambda1`).
pub fn number(text: &str, lambda1: Option<f64>) -> Result<f64, String> {
    let t = text.trim();
    if let Some(head) = t.strip_suffix("lambda1") {
        let head = head.trim().trim_end_matches('*').trim();
        let factor = if head.is_empty() { 1.0 } else { head.parse::<f64>().map_err(|e| format!("`{t}`: {e}"))? };
        return match lambda1 {
            Some(l) => Ok(factor * l),
            None => Err(format!("`{t}` needs the principal eigenvalue of the domain")),
        };
    }
    t.parse::<f64>().map_err(|e| format!("`{t}`: {e}"))
}

struct Keys<'a> {
    what: &'a str,
    text: &'a str,
    map: BTreeMap<String, String>,
    lambda1: Option<f64>,
}

impl Keys<'_> {
    fn take(&mut self, names: &[&str], default: Option<f64>) -> Result<f64, CliError> {
        for n in names {
            if let Some(v) = self.map.remove(*n) {
                return number(&v, self.lambda1).map_err(|e| bad(self.what, self.text, e));
            }
        }
        default.ok_or_else(|| bad(self.what, self.text, format!("missing `{}`", names[0])))
    }

    fn take_u32(&mut self, names: &[&str], default: Option<u32>) -> Result<u32, CliError> {
        let v = self.take(names, default.map(f64::from))?;
        if v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
            return Err(bad(self.what, self.text, format!("`{}` must be a nonnegative integer", names[0])));
        }
        Ok(v as u32)
    }

    fn done(self) -> Result<(), CliError> {
        match self.map.keys().next() {
            Some(k) => Err(bad(self.what, self.text, format!("unknown key `{k}`"))),
            None => Ok(()),
        }
    }
}

pub fn parse_domain(text: &str) -> Result<DomainSpec, CliError> {
    let (name, body) = split(text);
    let mut k = Keys { what: "domain", text, map: params("domain", text, body)?, lambda1: None };
    let d = match name {
        "interval" => DomainSpec::Interval { a: k.take(&["a"], Some(0.0))?, b: k.take(&["b"], Some(1.0))? },
        "ball" => DomainSpec::Ball { dim: k.take_u32(&["N", "dim"], None)?, radius: k.take(&["R", "radius"], Some(1.0))? },
        "annulus" => DomainSpec::Annulus {
            dim: k.take_u32(&["N", "dim"], None)?,
            inner: k.take(&["a", "inner"], None)?,
            outer: k.take(&["b", "outer"], Some(1.0))?,
        },
        "box" | "square" => {
            let lx = k.take(&["lx", "Lx"], Some(1.0))?;
            DomainSpec::Box2D { lx, ly: k.take(&["ly", "Ly"], Some(lx))? }
        }
        "disk" => DomainSpec::Disk2D { radius: k.take(&["R", "radius"], Some(1.0))? },
        "dumbbell" => {
            let stretch = k.take_u32(&["n", "stretch"], Some(1))?;
            DomainSpec::Dumbbell {
                dim: k.take_u32(&["N", "dim"], Some(11))?,
                stretch,
                layer: k.take(&["rho", "layer"], Some(1.0 / stretch.max(1) as f64))?,
            }
        }
        other => return Err(bad("domain", text, format!("unknown domain `{other}`"))),
    };
    k.done()?;
    d.validate().map_err(|e| bad("domain", text, e))?;
    Ok(d)
}

impl DomainArg {
    pub fn resolve(&self) -> Result<DomainSpec, CliError> {
        match self {
            DomainArg::Compact(s) => parse_domain(s),
            DomainArg::Record(d) => {
                d.validate().map_err(|e| CliError::Usage(format!("invalid domain record: {e}")))?;
                Ok(d.clone())
            }
        }
    }
}

/// Whether the descriptor refers to `λ₁` and therefore needs an eigen solve.
pub fn mentions_lambda1(text: &str) -> bool {
    text.contains("lambda1")
}

pub fn parse_nonlinearity(text: &str, lambda1: Option<f64>) -> Result<Nonlinearity, CliError> {
    let (name, body) = split(text);
    let f = match name {
        "const" | "constant" => {
            Nonlinearity::constant(number(body, lambda1).map_err(|e| bad("nonlinearity", text, e))?)
        }
        "poly" | "polynomial" => {
            let coefficients = body
                .split(',')
                .map(|c| number(c, lambda1))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| bad("nonlinearity", text, e))?;
            Nonlinearity::Polynomial { coefficients }
        }
        _ => {
            let mut k = Keys { what: "nonlinearity", text, map: params("nonlinearity", text, body)?, lambda1 };
            let f = match name {
                "exp" => Nonlinearity::Exponential { c: k.take(&["c"], Some(1.0))?, a: k.take(&["a"], Some(1.0))? },
                "shifted-exp" => Nonlinearity::ShiftedExponential {
                    c: k.take(&["c"], Some(1.0))?,
                    a: k.take(&["a"], Some(1.0))?,
                    b: k.take(&["b"], Some(0.0))?,
                },
                "power" => Nonlinearity::Power {
                    c: k.take(&["c"], Some(1.0))?,
                    p: k.take(&["p"], None)?,
                    b: k.take(&["b"], Some(0.0))?,
                },
                "affine" | "linear" => Nonlinearity::Affine { m: k.take(&["m"], None)?, q: k.take(&["q"], Some(0.0))? },
                other => return Err(bad("nonlinearity", text, format!("unknown kind `{other}`"))),
            };
            k.done()?;
            f
        }
    };
    f.validated().map_err(|e| bad("nonlinearity", text, e))
}

impl NonlinearityArg {
    pub fn needs_lambda1(&self) -> bool {
        matches!(self, NonlinearityArg::Compact(s) if mentions_lambda1(s))
    }

    pub fn resolve(&self, lambda1: Option<f64>) -> Result<Nonlinearity, CliError> {
        match self {
            // `x*lambda1` shorthand for the linear nonlinearity λ₁t scaled by x
            NonlinearityArg::Compact(s) if !s.contains(':') && mentions_lambda1(s) => {
                let m = number(s, lambda1).map_err(|e| bad("nonlinearity", s, e))?;
                Ok(Nonlinearity::affine(m, 0.0))
            }
            NonlinearityArg::Compact(s) => parse_nonlinearity(s, lambda1),
            NonlinearityArg::Record(f) => {
                f.clone().validated().map_err(|e| CliError::Usage(format!("invalid nonlinearity record: {e}")))
            }
        }
    }
}

pub fn parse_potential(text: &str) -> Result<Potential, CliError> {
    let (name, body) = split(text);
    match name {
        "zero" => Ok(Potential::Constant { c: 0.0 }),
        "const" | "constant" => {
            Ok(Potential::Constant { c: number(body, None).map_err(|e| bad("potential", text, e))? })
        }
        "hardy" => {
            let mut k = Keys { what: "potential", text, map: params("potential", text, body)?, lambda1: None };
            let c = k.take(&["c"], None)?;
            k.done()?;
            Ok(Potential::Hardy { c })
        }
        other => Err(bad("potential", text, format!("unknown potential `{other}`"))),
    }
}

pub fn parse_list<T: std::str::FromStr>(what: &str, text: &str) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|e| bad(what, text, e)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domains() {
        assert_eq!(parse_domain("ball:N=10,R=1").unwrap(), DomainSpec::Ball { dim: 10, radius: 1.0 });
        assert_eq!(parse_domain("interval").unwrap(), DomainSpec::Interval { a: 0.0, b: 1.0 });
        assert_eq!(parse_domain("box").unwrap(), DomainSpec::Box2D { lx: 1.0, ly: 1.0 });
        assert!(parse_domain("ball:N=10,Q=1").is_err());
        assert!(parse_domain("ball:N=2.5").is_err());
        assert!(parse_domain("torus").is_err());
    }

    #[test]
    fn nonlinearities() {
        assert_eq!(parse_nonlinearity("exp:c=16", None).unwrap(), Nonlinearity::exponential(16.0, 1.0));
        assert_eq!(parse_nonlinearity("const:1", None).unwrap(), Nonlinearity::constant(1.0));
        assert_eq!(
            parse_nonlinearity("poly:0,0.5*lambda1,1", Some(10.0)).unwrap(),
            Nonlinearity::polynomial(vec![0.0, 5.0, 1.0])
        );
        assert!(parse_nonlinearity("poly:0,lambda1", None).is_err());
        assert!(parse_nonlinearity("poly:0,0,-1", None).is_err());
        let f = NonlinearityArg::Compact("2*lambda1".into());
        assert!(f.needs_lambda1());
        assert_eq!(f.resolve(Some(3.0)).unwrap(), Nonlinearity::affine(6.0, 0.0));
    }

    #[test]
    fn potentials_and_lists() {
        assert_eq!(parse_potential("hardy:c=16").unwrap(), Potential::Hardy { c: 16.0 });
        assert_eq!(parse_list::<usize>("resolutions", "200,400, 800").unwrap(), vec![200, 400, 800]);
        assert!(parse_list::<u32>("k", "2,x").is_err());
    }
}
