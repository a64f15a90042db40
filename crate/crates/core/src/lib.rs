//! Pricing library for a discrete-time Markov-switching stochastic-volatility
//! model with co-jumps (MS-SVCJ).
//!
//! The underlying asset follows a jump-diffusion whose instantaneous variance
//! is the sum of a finite-state Markov chain component and transient spikes
//! triggered by price jumps (a proportional, exponentially attenuating
//! impact). All analytic prices reduce to mixtures of Black-Scholes values
//! over the exact distribution of average integrated variance (AIV), which is
//! computed by a recursive-recombination dynamic program in `aiv`.
//!
//! Module map:
//! - [`msvol`]: the volatility chain, its distributional evolution, and the
//!   brute-force path enumerator used as an oracle.
//! - [`aiv`]: exact AIV distribution via recursive recombination, plus the
//!   complete-enumeration oracle and combinatorial size bounds.
//! - [`jumps`]: lognormal co-jump law, Poisson truncation, the joint density
//!   of (sum, sum-of-squares) of log-jumps, quadrature expectations, and the
//!   jump-time relocation bias.
//! - [`european`]: Black-Scholes kernel and the MS-SV / MS-SVJ / MS-SVCJ
//!   analytic pricers.
//! - [`bermudan`]: tangent/secant lower and upper bounds via backward
//!   induction on convex piecewise-linear value functions.
//! - [`montecarlo`]: Euler and exact-conditional simulation estimators and
//!   least-squares Monte Carlo, used as statistical cross-checks.
//! - [`calibration`]: box-plot jump/diffusion split, moment formulas for the
//!   jump-impact process, and random-search calibration to option quotes.

pub mod aiv;
pub mod bermudan;
pub mod calibration;
pub mod error;
pub mod european;
pub mod jumps;
pub mod math;
pub mod model;
pub mod montecarlo;
pub mod msvol;
pub mod quadrature;

pub use aiv::{aiv_ce, aiv_rr, support_bound, triple_bound, AivDistribution};
pub use european::{bs_price, price_ms_sv, price_ms_svcj, price_ms_svj, MarketSpec, OptionKind, PriceResult};
pub use jumps::{expectation_over_jumps, jump_time_bias, pea_aggregate, truncate_poisson, JumpSpec, PeaSpec};
pub use model::{ModelSpec, Numerics};
pub use montecarlo::{lsm_bermudan, mc_european, mc_exact_conditional, McEstimate, SimConfig};

pub use calibration::{boxplot_split, calibrate_jumps, gmm_moments, BoxplotSplit, OptionQuote, ReturnSeries};
pub use bermudan::{price_bermudan, BermudanMethod, BermudanResult, ExerciseSchedule, PiecewiseValue};
pub use error::CoreError;




pub use msvol::{ChainSpec, SamplePath, StateDistribution};
