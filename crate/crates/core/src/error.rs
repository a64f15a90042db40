//! Error types shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    /// A domain type was constructed from inputs violating its invariants.
    #[error("invalid {what}: {detail}")]
    Invalid { what: &'static str, detail: String },

    /// Complete enumeration would visit more sample paths than the cap allows.
    #[error(
        "path enumeration cap exceeded: m={num_states}, L={num_steps} would visit \
         {paths:.3e} paths (cap {cap:.3e})"
    )]
    EnumerationCapExceeded {
        num_states: usize,
        num_steps: usize,
        paths: f64,
        cap: f64,
    },

    /// The recursive-recombination layers grew past the configured memory cap.
    /// `bound` is the combinatorial worst case m*C(L-1+m, m) for the run.
    #[error(
        "triple cap exceeded: m={num_states}, L={num_steps} needs more than {cap} live \
         triples (worst-case total bound {bound})"
    )]
    TripleCapExceeded {
        num_states: usize,
        num_steps: usize,
        cap: u64,
        bound: u128,
    },

    /// Maturity is not an integer number of chain steps.
    #[error(
        "horizon {horizon} years is not an integer multiple of the chain step {tau} \
         (got {ratio} steps); adjust tau so the step count is integral"
    )]
    NonIntegralSteps { horizon: f64, tau: f64, ratio: f64 },

    /// The interpolation grid cannot bracket the value function.
    #[error("interpolation grid too narrow: {detail}; widen the grid span")]
    GridTooNarrow { detail: String },

    /// A numerical routine failed to converge.
    #[error("{what} failed to converge: {detail}")]
    NoConvergence { what: &'static str, detail: String },
}

pub type Result<T> = std::result::Result<T, CoreError>;
