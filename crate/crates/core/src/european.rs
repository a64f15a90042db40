//! Analytic European pricing.
//!
//! Conditional on the chain path and on the jump pair (X_n, Y_n), the
//! terminal price is lognormal, so the option value is the Black-Scholes
//! formula evaluated at a shifted spot S exp(-lambda zeta T + X_n) and a
//! shifted variance v + b_hat Y_n. The unconditional price is the triple
//! mixture over the truncated jump count, the AIV distribution, and the
//! quadrature nodes of (X_n, Y_n):
//!
//!   C = sum_n p(N_T = n) sum_v p_V(v) E[BS(S e^{-lambda zeta T + X_n},
//!                                           v + b_hat Y_n, r, T, K)].
//!
//! Dropping the variance impact (b = 0) reduces the inner expectation to a
//! jump-diffusion price, and dropping jumps entirely leaves the plain
//! mixture of Black-Scholes values over the AIV support. Dividends enter as
//! a continuous yield q on the forward.

use crate::aiv::{aiv_rr_with, AivDistribution};
use crate::error::{CoreError, Result};
use crate::jumps::{truncate_poisson, JumpQuadrature, JumpSpec, PeaSpec};
use crate::jumps::pea_aggregate;
use crate::math::norm_cdf;
use crate::model::Numerics;
use crate::msvol::ChainSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptionKind {
    Call,
    Put,
}

/// Contract and market frame for a single European option.
#[derive(Debug, Clone, Copy)]
pub struct MarketSpec {
    pub spot: f64,
    pub strike: f64,
    pub rate: f64,
    pub dividend_yield: f64,
    pub maturity: f64,
    pub kind: OptionKind,
}

impl MarketSpec {
    pub fn new(spot: f64, strike: f64, rate: f64, dividend_yield: f64, maturity: f64, kind: OptionKind) -> Result<Self> {
        if !(spot > 0.0) || !(strike > 0.0) || !(maturity > 0.0) {
            return Err(CoreError::Invalid {
                what: "market spec",
                detail: format!("spot {spot}, strike {strike} and maturity {maturity} must be positive"),
            });
        }
        Ok(MarketSpec { spot, strike, rate, dividend_yield, maturity, kind })
    }

    pub fn call(spot: f64, strike: f64, rate: f64, dividend_yield: f64, maturity: f64) -> Result<Self> {
        Self::new(spot, strike, rate, dividend_yield, maturity, OptionKind::Call)
    }
}

/// Per-(jump count, AIV atom) contribution to a price, for diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct Contribution {
    pub n_jumps: usize,
    pub variance: f64,
    pub weight: f64,
    pub value: f64,
}

/// Price plus diagnostics.
#[derive(Debug, Clone)]
pub struct PriceResult {
    pub price: f64,
    pub delta: f64,
    /// Poisson tail mass dropped by the jump-count truncation.
    pub truncation_mass_dropped: f64,
    /// Populated only when explicitly requested.
    pub components: Option<Vec<Contribution>>,
}

/// Black-Scholes price and delta as a function of annualized variance.
///
/// `variance` is the total-rate form: the lognormal terminal law has
/// variance `variance * maturity`. Dividends are handled through the forward
/// `spot * exp(-q T)`. A zero variance degenerates to the discounted
/// intrinsic value of the forward.
pub fn bs_price(
    spot: f64,
    variance: f64,
    rate: f64,
    dividend_yield: f64,
    maturity: f64,
    strike: f64,
    kind: OptionKind,
) -> (f64, f64) {
    let disc_r = (-rate * maturity).exp();
    let disc_q = (-dividend_yield * maturity).exp();
    let w = variance * maturity;
    if w <= 0.0 {
        let fwd = spot * ((rate - dividend_yield) * maturity).exp();
        return match kind {
            OptionKind::Call => {
                let price = disc_r * (fwd - strike).max(0.0);
                let delta = if fwd > strike { disc_q } else { 0.0 };
                (price, delta)
            }
            OptionKind::Put => {
                let price = disc_r * (strike - fwd).max(0.0);
                let delta = if fwd < strike { -disc_q } else { 0.0 };
                (price, delta)
            }
        };
    }
    let sw = w.sqrt();
    let d1 = ((spot / strike).ln() + (rate - dividend_yield) * maturity) / sw + 0.5 * sw;
    let d2 = d1 - sw;
    match kind {
        OptionKind::Call => {
            let price = spot * disc_q * norm_cdf(d1) - strike * disc_r * norm_cdf(d2);
            (price, disc_q * norm_cdf(d1))
        }
        OptionKind::Put => {
            let price = strike * disc_r * norm_cdf(-d2) - spot * disc_q * norm_cdf(-d1);
            (price, -disc_q * norm_cdf(-d1))
        }
    }
}

/// Implied Black-Scholes volatility by bisection.
pub fn implied_vol(price: f64, market: &MarketSpec) -> Result<f64> {
    let value = |sigma: f64| {
        bs_price(
            market.spot,
            sigma * sigma,
            market.rate,
            market.dividend_yield,
            market.maturity,
            market.strike,
            market.kind,
        )
        .0
    };
    let (mut lo, mut hi) = (0.0f64, 10.0f64);
    if price < value(lo) || price > value(hi) {
        return Err(CoreError::NoConvergence {
            what: "implied volatility",
            detail: format!("price {price} outside attainable range"),
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if value(mid) < price {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One atom of the jump mixture: a multiplicative spot shift, an additive
/// variance shift, and a weight (Poisson probability times quadrature
/// weight).
#[derive(Debug, Clone, Copy)]
pub struct JumpAtom {
    pub n_jumps: usize,
    pub spot_mult: f64,
    pub var_add: f64,
    pub weight: f64,
}

/// Collapsed jump randomness for one maturity. Pricing any payoff under the
/// model is a weighted sum of Black-Scholes evaluations over these atoms
/// crossed with the AIV support.
#[derive(Debug, Clone)]
pub struct JumpMixture {
    pub atoms: Vec<JumpAtom>,
    pub dropped_mass: f64,
}

impl JumpMixture {
    /// No jumps: the identity atom.
    pub fn none() -> Self {
        JumpMixture {
            atoms: vec![JumpAtom { n_jumps: 0, spot_mult: 1.0, var_add: 0.0, weight: 1.0 }],
            dropped_mass: 0.0,
        }
    }

    /// Lognormal jumps without variance impact, with the per-count
    /// expectation absorbed in closed form: mixing a lognormal factor into a
    /// lognormal terminal law shifts the spot by e^{n mu + n eps2/2} and adds
    /// n eps2 of total variance. One atom per jump count.
    pub fn merton(jump: &JumpSpec, maturity: f64) -> Self {
        let trunc = truncate_poisson(jump.intensity, maturity, jump.truncation_eps);
        let zeta = jump.zeta();
        let comp = (-jump.intensity * zeta * maturity).exp();
        let atoms = trunc
            .weights
            .iter()
            .enumerate()
            .map(|(n, &w)| {
                let nf = n as f64;
                JumpAtom {
                    n_jumps: n,
                    spot_mult: comp * (nf * jump.log_mean + 0.5 * nf * jump.log_var).exp(),
                    var_add: nf * jump.log_var / maturity,
                    weight: w,
                }
            })
            .collect();
        JumpMixture { atoms, dropped_mass: trunc.dropped_mass }
    }

    /// Full co-jump mixture: per jump count, tensor quadrature over
    /// (X_n, Y_n) with spot shift e^{-lambda zeta T + x} and variance shift
    /// b_hat y.
    pub fn co_jump(jump: &JumpSpec, pea: &PeaSpec, maturity: f64, numerics: &Numerics) -> Result<Self> {
        let trunc = truncate_poisson(jump.intensity, maturity, jump.truncation_eps);
        let b_hat = pea_aggregate(pea, maturity);
        let comp = (-jump.intensity * jump.zeta() * maturity).exp();
        let mut atoms = Vec::new();
        for (n, &pn) in trunc.weights.iter().enumerate() {
            let quad = JumpQuadrature::new(
                n,
                jump.log_mean,
                jump.log_var,
                numerics.hermite_order,
                numerics.laguerre_order,
            )?;
            for &(x, y, w) in &quad.nodes {
                atoms.push(JumpAtom {
                    n_jumps: n,
                    spot_mult: comp * x.exp(),
                    var_add: b_hat * y,
                    weight: pn * w,
                });
            }
        }
        Ok(JumpMixture { atoms, dropped_mass: trunc.dropped_mass })
    }
}

/// Mixture price over AIV atoms and jump atoms; the shared kernel behind all
/// analytic pricers.
pub fn price_mixture(
    market: &MarketSpec,
    aiv: &AivDistribution,
    mixture: &JumpMixture,
    want_components: bool,
) -> PriceResult {
    let mut price = 0.0;
    let mut delta = 0.0;
    let mut components: Option<Vec<Contribution>> = want_components.then(Vec::new);
    for (v, pv) in aiv.iter() {
        for atom in &mixture.atoms {
            let (value, dv) = bs_price(
                market.spot * atom.spot_mult,
                v + atom.var_add,
                market.rate,
                market.dividend_yield,
                market.maturity,
                market.strike,
                market.kind,
            );
            let w = pv * atom.weight;
            price += w * value;
            delta += w * atom.spot_mult * dv;
            if let Some(comps) = components.as_mut() {
                match comps
                    .iter_mut()
                    .find(|c| c.n_jumps == atom.n_jumps && c.variance == v)
                {
                    Some(c) => {
                        c.weight += w;
                        c.value += w * value;
                    }
                    None => comps.push(Contribution { n_jumps: atom.n_jumps, variance: v, weight: w, value: w * value }),
                }
            }
        }
    }
    PriceResult { price, delta, truncation_mass_dropped: mixture.dropped_mass, components }
}

fn aiv_for(market: &MarketSpec, chain: &ChainSpec, numerics: &Numerics) -> Result<AivDistribution> {
    let steps = chain.steps_for_horizon(market.maturity)?;
    Ok(aiv_rr_with(chain, steps, numerics.key_digits, numerics.triple_cap)?.0)
}

/// Pure switching-volatility price: the Black-Scholes mixture over the AIV
/// distribution.
pub fn price_ms_sv(market: &MarketSpec, chain: &ChainSpec, numerics: &Numerics) -> Result<PriceResult> {
    let aiv = aiv_for(market, chain, numerics)?;
    Ok(price_mixture(market, &aiv, &JumpMixture::none(), false))
}

/// European pricer under a jump-diffusion with fixed diffusive variance;
/// plugged into the AIV mixture for the jump model without variance impact.
pub trait JumpDiffusionPricer {
    /// Price and delta at diffusive variance `variance` (annualized).
    fn price(&self, market: &MarketSpec, variance: f64) -> (f64, f64);
    /// Poisson mass dropped by any internal truncation.
    fn dropped_mass(&self, maturity: f64) -> f64 {
        let _ = maturity;
        0.0
    }
}

/// Lognormal-jump series pricer.
#[derive(Debug, Clone)]
pub struct MertonPricer {
    pub jump: JumpSpec,
}

impl JumpDiffusionPricer for MertonPricer {
    fn price(&self, market: &MarketSpec, variance: f64) -> (f64, f64) {
        let mixture = JumpMixture::merton(&self.jump, market.maturity);
        let mut price = 0.0;
        let mut delta = 0.0;
        for atom in &mixture.atoms {
            let (value, dv) = bs_price(
                market.spot * atom.spot_mult,
                variance + atom.var_add,
                market.rate,
                market.dividend_yield,
                market.maturity,
                market.strike,
                market.kind,
            );
            price += atom.weight * value;
            delta += atom.weight * atom.spot_mult * dv;
        }
        (price, delta)
    }

    fn dropped_mass(&self, maturity: f64) -> f64 {
        truncate_poisson(self.jump.intensity, maturity, self.jump.truncation_eps).dropped_mass
    }
}

/// Switching volatility with jumps in the asset only: the AIV mixture of
/// jump-diffusion prices.
pub fn price_ms_svj(
    market: &MarketSpec,
    chain: &ChainSpec,
    jd_pricer: &dyn JumpDiffusionPricer,
    numerics: &Numerics,
) -> Result<PriceResult> {
    let aiv = aiv_for(market, chain, numerics)?;
    let mut price = 0.0;
    let mut delta = 0.0;
    for (v, pv) in aiv.iter() {
        let (value, dv) = jd_pricer.price(market, v);
        price += pv * value;
        delta += pv * dv;
    }
    Ok(PriceResult {
        price,
        delta,
        truncation_mass_dropped: jd_pricer.dropped_mass(market.maturity),
        components: None,
    })
}

/// Full co-jump price: triple sum over jump counts, AIV atoms, and
/// quadrature nodes.
pub fn price_ms_svcj(
    market: &MarketSpec,
    chain: &ChainSpec,
    jump: &JumpSpec,
    pea: &PeaSpec,
    numerics: &Numerics,
) -> Result<PriceResult> {
    price_ms_svcj_detailed(market, chain, jump, pea, numerics, false)
}

/// As [`price_ms_svcj`], optionally collecting the per-(n, v) contribution
/// table.
pub fn price_ms_svcj_detailed(
    market: &MarketSpec,
    chain: &ChainSpec,
    jump: &JumpSpec,
    pea: &PeaSpec,
    numerics: &Numerics,
    want_components: bool,
) -> Result<PriceResult> {
    let aiv = aiv_for(market, chain, numerics)?;
    let mixture = JumpMixture::co_jump(jump, pea, market.maturity, numerics)?;
    Ok(price_mixture(market, &aiv, &mixture, want_components))
}
