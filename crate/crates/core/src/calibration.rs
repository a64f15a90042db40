//! Data-facing calibration pipeline.
//!
//! Three stages: split daily log-returns into diffusion and jump subsamples
//! with the box-plot rule (returns outside (Q1 - k IQR, Q3 + k IQR) are
//! jumps), evaluate the closed-form central moments of the return law under
//! the jump-impact process (the estimating equations for a method-of-moments
//! fit of the impact parameters), and calibrate jump parameters to market
//! option quotes by seeded random search over the relative-squared-error
//! objective
//!
//!   sum_i (model_i - mid_i)^2 / mid_i^2
//!
//! with the analytic co-jump pricer as the forward model.

use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64Mcg;
use rayon::prelude::*;

use crate::error::{CoreError, Result};
use crate::european::{MarketSpec, OptionKind};
use crate::jumps::{JumpSpec, PeaSpec};
use crate::model::Numerics;
use crate::msvol::ChainSpec;

/// Daily price history with derived log-returns.
#[derive(Debug, Clone)]
pub struct ReturnSeries {
    /// Observation times in years (strictly increasing); only used for
    /// validation and total-span bookkeeping.
    pub times: Vec<f64>,
    pub closes: Vec<f64>,
    /// Sampling interval in years (1/252 for daily closes).
    pub interval: f64,
    returns: Vec<f64>,
}

impl ReturnSeries {
    pub fn new(times: Vec<f64>, closes: Vec<f64>, interval: f64) -> Result<Self> {
        if closes.len() < 2 || times.len() != closes.len() {
            return Err(CoreError::Invalid {
                what: "return series",
                detail: "need at least two aligned observations".into(),
            });
        }
        if closes.iter().any(|&c| !(c > 0.0)) {
            return Err(CoreError::Invalid { what: "return series", detail: "non-positive close".into() });
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CoreError::Invalid {
                what: "return series",
                detail: "observation times must be strictly increasing".into(),
            });
        }
        let returns = closes.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
        Ok(ReturnSeries { times, closes, interval, returns })
    }

    /// Convenience constructor for evenly spaced closes.
    pub fn from_closes(closes: Vec<f64>, interval: f64) -> Result<Self> {
        let times = (0..closes.len()).map(|i| i as f64 * interval).collect();
        Self::new(times, closes, interval)
    }

    pub fn log_returns(&self) -> &[f64] {
        &self.returns
    }

    /// Observation span in years covered by the returns.
    pub fn span_years(&self) -> f64 {
        self.returns.len() as f64 * self.interval
    }
}

/// Sample quantile with linear interpolation between order statistics
/// (position (n-1) p); this convention feeds a hard threshold, so it is
/// pinned here rather than left to a library default.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let pos = (n - 1) as f64 * p;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let w = pos - lo as f64;
        sorted[lo] * (1.0 - w) + sorted[hi] * w
    }
}

/// Box-plot split of returns into diffusion and jump subsamples.
#[derive(Debug, Clone)]
pub struct BoxplotSplit {
    pub k_fence: f64,
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    pub jump_indices: Vec<usize>,
    pub diffusion_indices: Vec<usize>,
    /// Jump-process estimates from the jump subsample, over the series span:
    /// intensity per year, mean and variance of the jump log-size.
    pub intensity: f64,
    pub jump_log_mean: f64,
    pub jump_log_var: f64,
    /// Set when the fence contains every return.
    pub no_jumps: bool,
}

/// Classifies returns outside (Q1 - k IQR, Q3 + k IQR) as jumps. A zero-width
/// fence (constant returns) keeps everything in the diffusion subsample.
pub fn boxplot_split(series: &ReturnSeries, k_fence: f64) -> Result<BoxplotSplit> {
    let returns = series.log_returns();
    if returns.len() < 8 {
        return Err(CoreError::Invalid {
            what: "return series",
            detail: format!("need at least 8 returns, got {}", returns.len()),
        });
    }
    let mut sorted = returns.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile(&sorted, 0.25);
    let q3 = quantile(&sorted, 0.75);
    let iqr = q3 - q1;
    let (lo, hi) = (q1 - k_fence * iqr, q3 + k_fence * iqr);
    let mut jump_indices = Vec::new();
    let mut diffusion_indices = Vec::new();
    for (i, &r) in returns.iter().enumerate() {
        // zero-width fence keeps equal values inside
        if iqr > 0.0 && (r < lo || r > hi) {
            jump_indices.push(i);
        } else {
            diffusion_indices.push(i);
        }
    }
    let no_jumps = jump_indices.is_empty();
    let n_jump = jump_indices.len() as f64;
    let intensity = n_jump / series.span_years();
    let (mean, var) = if no_jumps {
        (0.0, 0.0)
    } else {
        let m = jump_indices.iter().map(|&i| returns[i]).sum::<f64>() / n_jump;
        let v = jump_indices.iter().map(|&i| (returns[i] - m) * (returns[i] - m)).sum::<f64>() / n_jump;
        (m, v)
    };
    Ok(BoxplotSplit {
        k_fence,
        q1,
        q3,
        iqr,
        jump_indices,
        diffusion_indices,
        intensity,
        jump_log_mean: mean,
        jump_log_var: var,
        no_jumps,
    })
}

/// Raw moments of the lognormal log-jump law: m_i = E[(ln J)^i].
fn log_jump_raw_moments(mu: f64, eps2: f64) -> [f64; 5] {
    [
        1.0,
        mu,
        mu * mu + eps2,
        mu * mu * mu + 3.0 * mu * eps2,
        mu.powi(4) + 6.0 * mu * mu * eps2 + 3.0 * eps2 * eps2,
    ]
}

/// Closed-form central moments (variance, third, fourth) of the log-return
/// over an interval of length `a`, conditional on the diffusive variance
/// level, with jumps of intensity lambda and the proportional impact of size
/// b decaying at rate `attenuation`. With D = d a - 1 + e^{-d a}:
///
///   var  = a s2 + a (1 + b/d) M2
///   m3   = (a + (3b/d^2) D) M3
///   m4   = 3 (a s2)^2 + 6 a^2 s2 (1 + b/d) M2
///          + (a + (6b/d^2) D + (3b^2/d^3) D) M4 + 3 a^2 (1 + b/d)^2 M2^2
///
/// where d is the attenuation rate, M_i = lambda m_i and m_i the raw moments
/// of the log-jump law. The b-terms come from the marked-Poisson cumulants
/// of the impact process in steady state: a/d is the mean integrated impact
/// per unit intensity, D/d^2 its covariance with the in-interval jumps, and
/// D/d^3 its own variance. Each expression is pinned by the simulation
/// oracle in the tests, which is the arbiter for this moment set.
pub fn gmm_moments(
    variance_level: f64,
    jump: &JumpSpec,
    proportional_coeff: f64,
    attenuation: f64,
    interval: f64,
) -> (f64, f64, f64) {
    let a = interval;
    let s2 = variance_level;
    let b = proportional_coeff;
    let d = attenuation;
    let m = log_jump_raw_moments(jump.log_mean, jump.log_var);
    let m2 = jump.intensity * m[2];
    let m3 = jump.intensity * m[3];
    let m4 = jump.intensity * m[4];
    let decay = d * a - 1.0 + (-d * a).exp();
    let var = a * s2 + a * (1.0 + b / d) * m2;
    let third = (a + 3.0 * b / (d * d) * decay) * m3;
    let one_plus = 1.0 + b / d;
    let fourth = 3.0 * (a * s2) * (a * s2)
        + 6.0 * a * a * s2 * one_plus * m2
        + (a + (6.0 * b / (d * d) + 3.0 * b * b / (d * d * d)) * decay) * m4
        + 3.0 * a * a * one_plus * one_plus * m2 * m2;
    (var, third, fourth)
}

/// Linear interpolation of a deposit rate to the option maturity.
pub fn interp_rate(t1: f64, r1: f64, t2: f64, r2: f64, maturity: f64) -> f64 {
    r1 + (r2 - r1) * (maturity - t1) / (t2 - t1)
}

/// One market quote.
#[derive(Debug, Clone, Copy)]
pub struct OptionQuote {
    pub strike: f64,
    pub bid: f64,
    pub ask: f64,
}

impl OptionQuote {
    pub fn new(strike: f64, bid: f64, ask: f64) -> Result<Self> {
        if !(0.0 <= bid && bid <= ask) {
            return Err(CoreError::Invalid {
                what: "option quote",
                detail: format!("bid {bid} / ask {ask} violate 0 <= bid <= ask"),
            });
        }
        Ok(OptionQuote { strike, bid, ask })
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.bid + self.ask)
    }
}

/// Random-search configuration: iteration count, seed, and the box bounds
/// for (intensity, log-mean, log-variance). Intensity and log-variance are
/// drawn log-uniformly, the log-mean uniformly.
#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    pub iterations: usize,
    pub seed: u64,
    pub intensity_bounds: (f64, f64),
    pub log_mean_bounds: (f64, f64),
    pub log_var_bounds: (f64, f64),
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            iterations: 20_000,
            seed: 7,
            intensity_bounds: (0.05, 20.0),
            log_mean_bounds: (-0.3, 0.1),
            log_var_bounds: (1e-5, 0.05),
        }
    }
}

/// Calibration output: best parameters, objective, the best-so-far trace,
/// and how many candidates failed to price.
#[derive(Debug, Clone)]
pub struct CalibrationResult {
    pub jump: JumpSpec,
    pub objective: f64,
    /// (iteration, objective) pairs at each improvement.
    pub trace: Vec<(usize, f64)>,
    pub rejected_candidates: usize,
}

/// Market frame shared by all quotes of one maturity.
#[derive(Debug, Clone, Copy)]
pub struct QuoteFrame {
    pub spot: f64,
    pub rate: f64,
    pub dividend_yield: f64,
    pub maturity: f64,
}

/// Relative-squared-error objective against mid prices.
pub fn quote_objective(
    chain: &ChainSpec,
    pea: &PeaSpec,
    frame: &QuoteFrame,
    quotes: &[OptionQuote],
    jump: &JumpSpec,
    numerics: &Numerics,
) -> Result<f64> {
    let steps = chain.steps_for_horizon(frame.maturity)?;
    let (aiv, _) = crate::aiv::aiv_rr_with(chain, steps, numerics.key_digits, numerics.triple_cap)?;
    objective_against_aiv(&aiv, pea, frame, quotes, jump, numerics)
}

fn objective_against_aiv(
    aiv: &crate::aiv::AivDistribution,
    pea: &PeaSpec,
    frame: &QuoteFrame,
    quotes: &[OptionQuote],
    jump: &JumpSpec,
    numerics: &Numerics,
) -> Result<f64> {
    let mixture = crate::european::JumpMixture::co_jump(jump, pea, frame.maturity, numerics)?;
    let mut total = 0.0;
    for q in quotes {
        let market = MarketSpec::new(
            frame.spot,
            q.strike,
            frame.rate,
            frame.dividend_yield,
            frame.maturity,
            OptionKind::Call,
        )?;
        let model = crate::european::price_mixture(&market, aiv, &mixture, false).price;
        let mid = q.mid();
        let rel = (model - mid) / mid;
        total += rel * rel;
    }
    Ok(total)
}

/// Seeded random search for the jump parameters, chain and impact process
/// held fixed. Candidates are pre-generated from the seed, so the result is
/// independent of evaluation parallelism; the best-so-far objective is
/// non-increasing in the iteration count by construction.
pub fn calibrate_jumps(
    chain: &ChainSpec,
    pea: &PeaSpec,
    frame: &QuoteFrame,
    quotes: &[OptionQuote],
    search: &SearchConfig,
    numerics: &Numerics,
) -> Result<CalibrationResult> {
    if quotes.is_empty() {
        return Err(CoreError::Invalid { what: "quotes", detail: "need at least one quote".into() });
    }
    if search.iterations == 0 {
        return Err(CoreError::Invalid { what: "search", detail: "need at least one iteration".into() });
    }
    // The chain is fixed across candidates: compute its AIV distribution
    // once and price against a compressed copy (the support of a non-lattice
    // variance grid runs to thousands of atoms, far past what quote-level
    // accuracy needs).
    let steps = chain.steps_for_horizon(frame.maturity)?;
    let (aiv_exact, _) =
        crate::aiv::aiv_rr_with(chain, steps, numerics.key_digits, numerics.triple_cap)?;
    let aiv = aiv_exact.compressed(256);
    let mut rng = Pcg64Mcg::seed_from_u64(search.seed);
    let log_range = |lo: f64, hi: f64, u: f64| (lo.ln() + (hi.ln() - lo.ln()) * u).exp();
    let candidates: Vec<(f64, f64, f64)> = (0..search.iterations)
        .map(|_| {
            let u1: f64 = rng.random();
            let u2: f64 = rng.random();
            let u3: f64 = rng.random();
            (
                log_range(search.intensity_bounds.0, search.intensity_bounds.1, u1),
                search.log_mean_bounds.0 + (search.log_mean_bounds.1 - search.log_mean_bounds.0) * u2,
                log_range(search.log_var_bounds.0, search.log_var_bounds.1, u3),
            )
        })
        .collect();

    let evaluated: Vec<Option<f64>> = candidates
        .par_iter()
        .map(|&(lambda, mu, eps2)| {
            let jump = JumpSpec::new(lambda, mu, eps2, 5.5e-5).ok()?;
            objective_against_aiv(&aiv, pea, frame, quotes, &jump, numerics).ok()
        })
        .collect();

    let mut best: Option<(usize, f64)> = None;
    let mut trace = Vec::new();
    let mut rejected = 0usize;
    for (i, value) in evaluated.iter().enumerate() {
        match value {
            Some(obj) => {
                if best.map_or(true, |(_, b)| *obj < b) {
                    best = Some((i, *obj));
                    trace.push((i, *obj));
                }
            }
            None => rejected += 1,
        }
    }
    let Some((best_idx, objective)) = best else {
        return Err(CoreError::NoConvergence {
            what: "random search",
            detail: "every candidate failed to price".into(),
        });
    };
    let (lambda, mu, eps2) = candidates[best_idx];
    Ok(CalibrationResult {
        jump: JumpSpec::new(lambda, mu, eps2, 5.5e-5)?,
        objective,
        trace,
        rejected_candidates: rejected,
    })
}
