//! Run configuration: JSON schema, loading and validation.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use samrot_core::charts::{derive_params, sam_delta, AndoyerState, BodyParams};
use samrot_core::gravgrad::OrbitModel;
use samrot_core::lie::MAX_ORDER;

use crate::CliError;

/// Time grid: samples at `0, dt, 2 dt, ...` up to `t_max`.
#[derive(Debug, Clone, Copy, Deserialize)]
pub struct Grid {
    pub t_max: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
pub struct OrbitConfig {
    pub a: f64,
    pub e: f64,
    #[serde(rename = "n")]
    pub n_mean: f64,
    pub phase0: f64,
    pub theta0: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RunConfig {
    pub inertia: [f64; 3],
    pub andoyer: AndoyerState<f64>,
    pub order: usize,
    #[serde(default = "default_tol")]
    pub oracle_tol: f64,
    pub grid: Grid,
    #[serde(default)]
    pub orbit: Option<OrbitConfig>,
}

fn default_tol() -> f64 {
    1e-12
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("bad config {}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let _ = self.params()?;
        let a = &self.andoyer;
        if a.M <= 0.0 || a.M.is_nan() || a.N.abs() > a.M || a.Lambda.abs() > a.M {
            return Err(CliError::Validation(
                "andoyer state requires M > 0, |N| <= M, |Lambda| <= M".into(),
            ));
        }
        if self.order == 0 || self.order > MAX_ORDER {
            return Err(CliError::Validation(format!(
                "order must lie in 1..={MAX_ORDER}"
            )));
        }
        let span_ok = self.grid.t_max >= self.grid.dt;
        if self.grid.dt <= 0.0 || !span_ok {
            return Err(CliError::Validation("grid requires dt > 0 and t_max >= dt".into()));
        }
        if !(1e-14..=1e-6).contains(&self.oracle_tol) {
            return Err(CliError::Validation(
                "oracle_tol must lie in [1e-14, 1e-6]".into(),
            ));
        }
        if let Some(o) = &self.orbit {
            self.orbit_model(o).validate().map_err(|e| CliError::Validation(e.to_string()))?;
        }
        if sam_delta(a.M, a.N) > 0.5 {
            eprintln!(
                "warning: (M - N)/M = {:.3} exceeds 0.5; the short-axis-mode expansion is \
                 outside its ordering regime, results may be inaccurate",
                sam_delta(a.M, a.N)
            );
        }
        Ok(())
    }

    pub fn params(&self) -> Result<BodyParams<f64>, CliError> {
        derive_params(self.inertia[0], self.inertia[1], self.inertia[2])
            .map_err(|e| CliError::Validation(e.to_string()))
    }

    pub fn times(&self) -> Vec<f64> {
        let n = (self.grid.t_max / self.grid.dt + 1e-9).floor() as usize;
        (0..=n.max(1)).map(|i| i as f64 * self.grid.dt).collect()
    }

    fn orbit_model(&self, o: &OrbitConfig) -> OrbitModel<f64> {
        OrbitModel { a: o.a, e: o.e, n_mean: o.n_mean, phase0: o.phase0, theta0: o.theta0 }
    }

    pub fn orbit(&self) -> Result<OrbitModel<f64>, CliError> {
        let o = self
            .orbit
            .as_ref()
            .ok_or_else(|| CliError::Validation("config has no \"orbit\" block".into()))?;
        Ok(self.orbit_model(o))
    }
}

/// `A,B,C` triple for `--inertia`.
pub fn parse_inertia(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected three comma-separated moments A,B,C".into());
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad moment {part:?}: {e}"))?;
    }
    Ok(out)
}
