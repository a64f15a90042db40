//! Shared model bundle and numerical knobs.
//!
//! Model selection mirrors the nesting of the dynamics: a chain alone is the
//! pure switching-volatility model (MS-SV), adding a jump law gives MS-SVJ,
//! and adding the variance-impact process on top gives the full co-jump
//! model (MS-SVCJ).

use crate::error::{CoreError, Result};
use crate::jumps::{JumpSpec, PeaSpec};
use crate::msvol::ChainSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    MsSv,
    MsSvj,
    MsSvcj,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelKind::MsSv => write!(f, "MS-SV"),
            ModelKind::MsSvj => write!(f, "MS-SVJ"),
            ModelKind::MsSvcj => write!(f, "MS-SVCJ"),
        }
    }
}

/// Full model specification; presence of the optional blocks selects the
/// model variant.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub chain: ChainSpec,
    pub jumps: Option<JumpSpec>,
    pub pea: Option<PeaSpec>,
}

impl ModelSpec {
    pub fn new(chain: ChainSpec, jumps: Option<JumpSpec>, pea: Option<PeaSpec>) -> Result<Self> {
        if pea.is_some() && jumps.is_none() {
            return Err(CoreError::Invalid {
                what: "model",
                detail: "a variance-impact block requires a jump block".into(),
            });
        }
        Ok(ModelSpec { chain, jumps, pea })
    }

    pub fn kind(&self) -> ModelKind {
        match (&self.jumps, &self.pea) {
            (None, _) => ModelKind::MsSv,
            (Some(_), None) => ModelKind::MsSvj,
            (Some(_), Some(_)) => ModelKind::MsSvcj,
        }
    }
}

/// Numerical configuration shared by the pricers.
#[derive(Debug, Clone, Copy)]
pub struct Numerics {
    /// Gauss-Hermite order for the log-jump sum.
    pub hermite_order: usize,
    /// Generalized Gauss-Laguerre order for the squared-log-jump residual.
    pub laguerre_order: usize,
    /// Decimal digits of the fixed-point AIV recombination key.
    pub key_digits: u32,
    /// Cap on live recombination triples.
    pub triple_cap: u64,
    /// Cap on enumerated paths for the brute-force oracle.
    pub enum_cap: u64,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            hermite_order: crate::jumps::DEFAULT_HERMITE_ORDER,
            laguerre_order: crate::jumps::DEFAULT_LAGUERRE_ORDER,
            key_digits: crate::aiv::DEFAULT_KEY_DIGITS,
            triple_cap: crate::aiv::DEFAULT_TRIPLE_CAP,
            enum_cap: crate::aiv::DEFAULT_ENUM_CAP,
        }
    }
}
