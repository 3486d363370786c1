use std::path::Path;

use serde::{Deserialize, Serialize};

use knads_core::geometry::BlackHoleParams;
use knads_core::operators::ModeContext;
use knads_core::{Error, Result};

fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

/// One run: background, mode, and the options each command reads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub m: f64,
    pub a: f64,
    #[serde(default)]
    pub q_e: f64,
    #[serde(default)]
    pub q_m: f64,
    pub l: f64,
    #[serde(default)]
    pub mu: f64,
    #[serde(default)]
    pub e: f64,
    #[serde(default = "half")]
    pub k: f64,
    #[serde(default)]
    pub omega: f64,
    #[serde(default)]
    pub gauge_b: f64,
    /// Spectral window [lo, hi] for angular/radial eigenvalues.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    /// Angular eigenvalue fed into the radial problem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    /// Radii for the tortoise command.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    /// Grid points per spinor component for the oracle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_n: Option<usize>,
}

impl RunConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidParams(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParams(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn params(&self) -> Result<BlackHoleParams> {
        BlackHoleParams::new(self.m, self.a, self.q_e, self.q_m, self.l)
    }

    pub fn ctx(&self) -> Result<ModeContext> {
        Ok(ModeContext::new(self.mu, self.e, self.k, self.omega)?.with_gauge(self.gauge_b))
    }

    pub fn window(&self) -> Result<(f64, f64)> {
        match self.window {
            Some([lo, hi]) if lo < hi => Ok((lo, hi)),
            Some([lo, hi]) => Err(Error::InvalidParams(format!("empty window [{lo}, {hi}]"))),
            None => Err(Error::InvalidParams("window is required".into())),
        }
    }
}
