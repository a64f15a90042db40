//! JSON configuration schema.
//!
//! One config file carries the model blocks; the model variant is selected
//! by block presence (chain alone: MS-SV; with jumps: MS-SVJ; with jumps and
//! impact: MS-SVCJ). Chain states are written as variance levels and
//! converted to volatilities on load.

use serde::{Deserialize, Serialize};

use mssvcj_core::error::CoreError;
use mssvcj_core::european::{MarketSpec, OptionKind};
use mssvcj_core::jumps::{JumpSpec, PeaSpec};
use mssvcj_core::model::{ModelSpec, Numerics};
use mssvcj_core::msvol::ChainSpec;

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainConfig {
    /// Variance levels (annualized), ascending.
    pub states_var: Vec<f64>,
    pub transition: Vec<Vec<f64>>,
    /// Chain step in years.
    pub tau: f64,
    /// Initial variance level; must equal one of `states_var`.
    pub initial_var: f64,
    /// Renormalize transition rows that drift from 1 by rounding.
    #[serde(default)]
    pub renormalize: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JumpConfig {
    pub lambda: f64,
    pub mu: f64,
    pub eps2: f64,
    #[serde(default = "default_trunc_eps")]
    pub trunc_eps: f64,
}

fn default_trunc_eps() -> f64 {
    5.5e-5
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeaConfig {
    pub b: f64,
    pub beta: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarketConfig {
    pub spot: f64,
    pub strike: f64,
    pub rate: f64,
    #[serde(default)]
    pub dividend: f64,
    pub maturity: f64,
    #[serde(default = "default_kind")]
    pub kind: String,
}

fn default_kind() -> String {
    "call".to_string()
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct NumericsConfig {
    pub hermite_order: Option<usize>,
    pub laguerre_order: Option<usize>,
    pub key_digits: Option<u32>,
    pub triple_cap: Option<u64>,
    pub enum_cap: Option<u64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelConfig {
    pub chain: ChainConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jumps: Option<JumpConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pea: Option<PeaConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub market: Option<MarketConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numerics: Option<NumericsConfig>,
}

impl ModelConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))
    }

    pub fn chain(&self) -> Result<ChainSpec, CliError> {
        let c = &self.chain;
        let initial = c
            .states_var
            .iter()
            .position(|&v| (v - c.initial_var).abs() <= 1e-9 * c.initial_var.abs().max(1e-12))
            .ok_or_else(|| {
                CliError::Validation(format!(
                    "initial_var {} is not one of states_var {:?}",
                    c.initial_var, c.states_var
                ))
            })?;
        let build = if c.renormalize {
            ChainSpec::from_variances(&c.states_var, c.transition.clone(), c.tau, initial)
                .or_else(|_| {
                    let states: Vec<f64> = c.states_var.iter().map(|v| v.sqrt()).collect();
                    ChainSpec::new_renormalized(states, c.transition.clone(), c.tau, initial)
                })
        } else {
            ChainSpec::from_variances(&c.states_var, c.transition.clone(), c.tau, initial)
        };
        build.map_err(CliError::from)
    }

    pub fn jumps(&self) -> Result<Option<JumpSpec>, CliError> {
        self.jumps
            .as_ref()
            .map(|j| JumpSpec::new(j.lambda, j.mu, j.eps2, j.trunc_eps).map_err(CliError::from))
            .transpose()
    }

    pub fn pea(&self) -> Result<Option<PeaSpec>, CliError> {
        self.pea
            .as_ref()
            .map(|p| PeaSpec::new(p.b, p.beta, p.delta).map_err(CliError::from))
            .transpose()
    }

    pub fn model(&self) -> Result<ModelSpec, CliError> {
        ModelSpec::new(self.chain()?, self.jumps()?, self.pea()?).map_err(CliError::from)
    }

    pub fn market(&self) -> Result<MarketSpec, CliError> {
        let m = self
            .market
            .as_ref()
            .ok_or_else(|| CliError::Validation("config is missing the market block".into()))?;
        let kind = match m.kind.as_str() {
            "call" => OptionKind::Call,
            "put" => OptionKind::Put,
            other => {
                return Err(CliError::Validation(format!(
                    "option kind must be \"call\" or \"put\", got \"{other}\""
                )))
            }
        };
        MarketSpec::new(m.spot, m.strike, m.rate, m.dividend, m.maturity, kind)
            .map_err(CliError::from)
    }

    pub fn numerics(&self) -> Numerics {
        let mut n = Numerics::default();
        if let Some(cfg) = &self.numerics {
            if let Some(v) = cfg.hermite_order {
                n.hermite_order = v;
            }
            if let Some(v) = cfg.laguerre_order {
                n.laguerre_order = v;
            }
            if let Some(v) = cfg.key_digits {
                n.key_digits = v;
            }
            if let Some(v) = cfg.triple_cap {
                n.triple_cap = v;
            }
            if let Some(v) = cfg.enum_cap {
                n.enum_cap = v;
            }
        }
        n
    }

    pub fn seed(&self) -> u64 {
        self.numerics.as_ref().and_then(|n| n.seed).unwrap_or(1)
    }

    pub fn threads(&self) -> Option<usize> {
        self.numerics.as_ref().and_then(|n| n.threads)
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::TripleCapExceeded { .. } | CoreError::EnumerationCapExceeded { .. } => {
                CliError::ResourceCap(e.to_string())
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}
