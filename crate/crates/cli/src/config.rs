use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::spec::{DomainArg, NonlinearityArg};
use crate::CliError;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_stab: Option<f64>,
}

/// Every setting of a run. Files and flags both produce one; flags are
/// overlaid on the file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainArg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<NonlinearityArg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolutions: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<u32>>,
    #[serde(rename = "N", alias = "dim", default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Output directory; excluded from the report echo.
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),*) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field; } )*
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("{}: cannot read config: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<RunConfig, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config {
            origin: origin.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// `self` with every setting present in `top` replaced.
    pub fn overlay(mut self, top: RunConfig) -> RunConfig {
        let mut tol = self.tolerances.take().unwrap_or_default();
        let had_tol = top.tolerances.is_some() || tol != Tolerances::default();
        if let Some(t) = top.tolerances.clone() {
            overlay!(tol, t; solver_tol, max_iter, tol_stab);
        }
        overlay!(self, top; command, domain, f, potential, target, mode, method, resolution, resolutions,
            k, eps, n, dim, boundary, cap, csv, name, out);
        self.tolerances = had_tol.then_some(tol);
        self
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tolerances.clone().unwrap_or_default()
    }
}

/// Flag, then `STABLELAB_OUT`, then config file, then `./stablelab-out`.
pub fn output_dir(flag: Option<&Path>, config: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(env) = std::env::var_os("STABLELAB_OUT").filter(|v| !v.is_empty()) {
        return PathBuf::from(env);
    }
    config.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("stablelab-out"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected_with_position() {
        let err = RunConfig::parse("{\n  \"domain\": \"interval\",\n  \"colour\": 1\n}", "cfg.json").unwrap_err();
        match err {
            CliError::Config { line, .. } => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn flags_win() {
        let file = RunConfig::parse(r#"{"resolution": 50, "k": [1, 2], "tolerances": {"solver_tol": 1e-6}}"#, "x").unwrap();
        let flags = RunConfig {
            resolution: Some(80),
            tolerances: Some(Tolerances { max_iter: Some(7), ..Default::default() }),
            ..Default::default()
        };
        let merged = file.overlay(flags);
        assert_eq!(merged.resolution, Some(80));
        assert_eq!(merged.k, Some(vec![1, 2]));
        assert_eq!(merged.tolerances().solver_tol, Some(1e-6));
        assert_eq!(merged.tolerances().max_iter, Some(7));
    }

    #[test]
    fn records_are_accepted() {
        let cfg = RunConfig::parse(
            r#"{"domain": {"type": "ball", "dim": 10, "radius": 1.0}, "f": {"kind": "exponential", "c": 16.0, "a": 1.0}, "N": 10}"#,
            "x",
        )
        .unwrap();
        assert!(matches!(cfg.domain, Some(DomainArg::Record(_))));
        assert!(matches!(cfg.f, Some(NonlinearityArg::Record(_))));
        assert_eq!(cfg.dim, Some(10));
    }
}
