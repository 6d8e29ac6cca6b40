//! Run configuration: inputs, grids and tolerance overrides.

use std::collections::BTreeMap;
use std::path::PathBuf;

use renyi_core::io::{read_state, State};
use renyi_core::{tol, ClassicalState, DensityMatrix, PsiProfile};

use crate::error::{CliError, Result};

/// Environment variable holding a JSON object of tolerance overrides.
pub const TOL_ENV: &str = "RENYI_TOL_OVERRIDES";

/// Tolerances that can be changed at run time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub method_residual: f64,
    pub ratio_cluster: f64,
    pub verdict_margin: f64,
    pub optimizer_dim: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            method_residual: tol::METHOD_RESIDUAL,
            ratio_cluster: tol::RATIO_CLUSTER,
            verdict_margin: tol::VERDICT_MARGIN,
            optimizer_dim: tol::OPTIMIZER_DIM,
        }
    }
}

impl Tolerances {
    pub const KEYS: [&'static str; 4] = ["method_residual", "ratio_cluster", "verdict_margin", "optimizer_dim"];

    /// Applies a JSON object such as `{"method_residual": 1e-4}`.
    pub fn with_overrides(mut self, json: &str) -> Result<Self> {
        let map: BTreeMap<String, f64> = serde_json::from_str(json)
            .map_err(|e| CliError::Usage(format!("{TOL_ENV}: {e}")))?;
        for (k, v) in map {
            if !(v > 0.0) || !v.is_finite() {
                return Err(CliError::Usage(format!("{TOL_ENV}: `{k}` must be positive and finite")));
            }
            match k.as_str() {
                "method_residual" => self.method_residual = v,
                "ratio_cluster" => self.ratio_cluster = v,
                "verdict_margin" => self.verdict_margin = v,
                "optimizer_dim" => self.optimizer_dim = v as usize,
                _ => {
                    return Err(CliError::Usage(format!(
                        "{TOL_ENV}: unknown key `{k}` (known: {})",
                        Self::KEYS.join(", ")
                    )))
                }
            }
        }
        Ok(self)
    }

    pub fn from_env() -> Result<Self> {
        match std::env::var(TOL_ENV) {
            Ok(s) if !s.trim().is_empty() => Self::default().with_overrides(&s),
            _ => Ok(Self::default()),
        }
    }
}

/// A loaded pair of states with its ψ profile.
pub struct Pair {
    pub rho: State,
    pub sigma: State,
    pub profile: PsiProfile,
}

impl Pair {
    pub fn load(inputs: &[PathBuf]) -> Result<Self> {
        if inputs.len() != 2 {
            return Err(CliError::Usage(format!(
                "expected exactly two --input files (ρ then σ), got {}",
                inputs.len()
            )));
        }
        let rho = read_state(&inputs[0])?;
        let sigma = read_state(&inputs[1])?;
        if rho.dim() != sigma.dim() {
            return Err(CliError::Usage(format!(
                "dimension mismatch: {} has dimension {}, {} has dimension {}",
                inputs[0].display(),
                rho.dim(),
                inputs[1].display(),
                sigma.dim()
            )));
        }
        let profile = match (rho.as_classical(), sigma.as_classical()) {
            (Some(p), Some(q)) => PsiProfile::from_classical(p, q)?,
            _ => PsiProfile::from_states(&rho.to_density(), &sigma.to_density())?,
        };
        Ok(Self { rho, sigma, profile })
    }

    pub fn classical(&self) -> Option<(&ClassicalState, &ClassicalState)> {
        Some((self.rho.as_classical()?, self.sigma.as_classical()?))
    }

    pub fn dense(&self) -> (DensityMatrix, DensityMatrix) {
        (self.rho.to_density(), self.sigma.to_density())
    }
}

/// Parses `lo:hi:points`. Bounds may be named via `named`.
pub fn parse_grid(text: &str, named: impl Fn(&str) -> Option<f64>) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || CliError::Usage(format!("grid `{text}` is not lo:hi:points"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let bound = |s: &str| -> Result<f64> {
        match named(s) {
            Some(v) => Ok(v),
            None => s.trim().parse::<f64>().map_err(|_| bad()),
        }
    };
    let (lo, hi) = (bound(parts[0])?, bound(parts[1])?);
    let points: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if points == 0 || !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(CliError::Usage(format!(
            "grid `{text}` needs finite lo <= hi and at least one point"
        )));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..points)
        .map(|i| if i + 1 == points { hi } else { lo + (hi - lo) * i as f64 / (points - 1) as f64 })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0.1:0.9:5", |_| None).unwrap(), vec![0.1, 0.30000000000000004, 0.5, 0.7000000000000001, 0.9]);
        assert_eq!(parse_grid("0:x:2", |s| (s == "x").then_some(2.0)).unwrap(), vec![0.0, 2.0]);
        assert!(parse_grid("0.1:0.9", |_| None).is_err());
        assert!(parse_grid("0.9:0.1:3", |_| None).is_err());
    }

    #[test]
    fn overrides() {
        let t = Tolerances::default().with_overrides(r#"{"method_residual": 1e-3}"#).unwrap();
        assert_eq!(t.method_residual, 1e-3);
        assert!(Tolerances::default().with_overrides(r#"{"nope": 1}"#).is_err());
        assert!(Tolerances::default().with_overrides("[").is_err());
    }
}
