//! Bermudan bounds by backward induction on convex piecewise-linear value
//! functions.
//!
//! The value function at each exercise date is convex in the asset price, so
//! it can be carried backwards as a portfolio: a bond, a forward, and a
//! strip of European calls (one per kink). The continuation value of such a
//! portfolio is analytic:
//!
//!   cont(S) = alpha e^{-r dt} + beta S e^{-q dt}
//!             + sum_j gamma_j EuroPrice(S, k_j, dt),
//!
//! where EuroPrice mixes the per-state AIV distributions Psi(sigma) with the
//! distribution pi of the (unobserved) chain state at the date, and the
//! forward term uses the martingale identity E[e^{-r dt} S'] = S e^{-q dt}.
//!
//! At each date the exercise max H(S) = max(payoff, cont) is re-approximated
//! on a price grid: the TANGENT construction keeps the upper envelope of
//! tangent lines (a minorant of the convex H, so the rollback propagates a
//! lower bound), while the SECANT construction interpolates chords through
//! the grid values, extended by the asymptotic slopes of the value function
//! (a majorant, propagating an upper bound). The gap between the two bounds
//! shrinks like the square of the grid spacing.

use rayon::prelude::*;
use std::sync::Arc;

use crate::aiv::{aiv_rr_with, AivDistribution};
use crate::error::{CoreError, Result};
use crate::european::{JumpMixture, MarketSpec, OptionKind};
use crate::math::norm_cdf;
use crate::model::{ModelSpec, Numerics};
use crate::msvol::{evolve_distribution, StateDistribution};

/// Equally spaced exercise dates t_0 = 0 < t_1 < ... < t_N = T, each
/// interval an integer number of chain steps.
#[derive(Debug, Clone)]
pub struct ExerciseSchedule {
    dates: Vec<f64>,
    interval: f64,
    steps_per_interval: usize,
}

impl ExerciseSchedule {
    /// `interval` years between dates, `count` intervals, on a chain with
    /// step `tau`.
    pub fn uniform(interval: f64, count: usize, tau: f64) -> Result<Self> {
        if count == 0 || !(interval > 0.0) {
            return Err(CoreError::Invalid {
                what: "exercise schedule",
                detail: format!("need a positive interval ({interval}) and count >= 1 ({count})"),
            });
        }
        let ratio = interval / tau;
        let steps = ratio.round();
        if steps < 1.0 || (ratio - steps).abs() > 1e-9 * ratio.max(1.0) {
            return Err(CoreError::NonIntegralSteps { horizon: interval, tau, ratio });
        }
        let dates = (0..=count).map(|i| i as f64 * interval).collect();
        Ok(ExerciseSchedule { dates, interval, steps_per_interval: steps as usize })
    }

    pub fn dates(&self) -> &[f64] {
        &self.dates
    }

    pub fn num_intervals(&self) -> usize {
        self.dates.len() - 1
    }

    pub fn interval(&self) -> f64 {
        self.interval
    }

    pub fn steps_per_interval(&self) -> usize {
        self.steps_per_interval
    }

    pub fn maturity(&self) -> f64 {
        *self.dates.last().unwrap()
    }
}

/// Convex piecewise-linear function of the asset price:
/// f(S) = intercept + base_slope * S + sum_j gamma_j (S - k_j)^+, valid on
/// S >= 0, with all gamma_j >= 0.
#[derive(Debug, Clone)]
pub struct PiecewiseValue {
    intercept: f64,
    base_slope: f64,
    kinks: Vec<(f64, f64)>,
}

impl PiecewiseValue {
    pub fn new(intercept: f64, base_slope: f64, kinks: Vec<(f64, f64)>) -> Result<Self> {
        if kinks.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(CoreError::Invalid {
                what: "piecewise value",
                detail: "kink positions must be strictly increasing".into(),
            });
        }
        if kinks.iter().any(|&(_, g)| g < 0.0) {
            return Err(CoreError::Invalid {
                what: "piecewise value",
                detail: "negative slope increment breaks convexity".into(),
            });
        }
        Ok(PiecewiseValue { intercept, base_slope, kinks })
    }

    pub fn zero() -> Self {
        PiecewiseValue { intercept: 0.0, base_slope: 0.0, kinks: Vec::new() }
    }

    /// Terminal payoff as a one-kink portfolio.
    pub fn terminal_payoff(kind: OptionKind, strike: f64) -> Self {
        match kind {
            OptionKind::Call => {
                PiecewiseValue { intercept: 0.0, base_slope: 0.0, kinks: vec![(strike, 1.0)] }
            }
            OptionKind::Put => {
                PiecewiseValue { intercept: strike, base_slope: -1.0, kinks: vec![(strike, 1.0)] }
            }
        }
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn base_slope(&self) -> f64 {
        self.base_slope
    }

    pub fn kinks(&self) -> &[(f64, f64)] {
        &self.kinks
    }

    pub fn eval(&self, s: f64) -> f64 {
        let mut v = self.intercept + self.base_slope * s;
        for &(k, g) in &self.kinks {
            if s > k {
                v += g * (s - k);
            } else {
                break;
            }
        }
        v
    }

    /// One-sided (right) slope at `s`.
    pub fn slope_at(&self, s: f64) -> f64 {
        let mut b = self.base_slope;
        for &(k, g) in &self.kinks {
            if s >= k {
                b += g;
            } else {
                break;
            }
        }
        b
    }

    /// Slope beyond the last kink.
    pub fn total_slope(&self) -> f64 {
        self.base_slope + self.kinks.iter().map(|&(_, g)| g).sum::<f64>()
    }

    /// Upper envelope of a set of lines (slope, intercept). Kinks at
    /// non-positive prices are folded into the base line since the function
    /// only lives on S >= 0.
    pub fn from_lines(lines: &[(f64, f64)]) -> Result<Self> {
        if lines.is_empty() {
            return Err(CoreError::Invalid { what: "tangent envelope", detail: "no lines".into() });
        }
        let mut sorted: Vec<(f64, f64)> = lines.to_vec();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        // equal slopes: keep the highest intercept
        let mut dedup: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
        for line in sorted {
            match dedup.last_mut() {
                Some(last) if (line.0 - last.0).abs() <= 1e-14 * (1.0 + line.0.abs()) => {
                    if line.1 > last.1 {
                        *last = line;
                    }
                }
                _ => dedup.push(line),
            }
        }
        // upper hull: drop lines that never attain the max
        let cross = |a: &(f64, f64), b: &(f64, f64)| -> f64 { (a.1 - b.1) / (b.0 - a.0) };
        let mut hull: Vec<(f64, f64)> = Vec::with_capacity(dedup.len());
        for line in dedup {
            while hull.len() >= 2 {
                let last = hull[hull.len() - 1];
                let prev = hull[hull.len() - 2];
                if cross(&last, &line) <= cross(&prev, &last) {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(line);
        }
        let mut base = hull[0];
        let mut kinks: Vec<(f64, f64)> = Vec::with_capacity(hull.len().saturating_sub(1));
        for w in hull.windows(2) {
            let x = cross(&w[0], &w[1]);
            let gamma = w[1].0 - w[0].0;
            if x <= 0.0 {
                // active from the origin onwards; fold into the base line
                base = w[1];
                kinks.clear();
            } else {
                kinks.push((x, gamma));
            }
        }
        // crossings of an upper hull are increasing; guard roundoff ties
        kinks.dedup_by(|b, a| {
            if b.0 <= a.0 {
                a.1 += b.1;
                true
            } else {
                false
            }
        });
        PiecewiseValue::new(base.1, base.0, kinks)
    }

    /// Chord interpolant through `points` (ascending in S), extended to the
    /// left and right with the given asymptotic slopes. Errors when the grid
    /// is too narrow for the extensions to stay above the sampled values.
    pub fn from_chords(points: &[(f64, f64)], left_slope: f64, right_slope: f64) -> Result<Self> {
        if points.len() < 2 {
            return Err(CoreError::Invalid {
                what: "chord interpolant",
                detail: "need >= 2 points".into(),
            });
        }
        let slope_tol = 1e-6;
        let mut slopes = Vec::with_capacity(points.len() - 1);
        let mut prev = left_slope;
        for w in points.windows(2) {
            let c = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            if c < prev - slope_tol {
                return Err(CoreError::GridTooNarrow {
                    detail: format!(
                        "chord slope {c:.6} at S = {:.4} falls below the running slope {prev:.6}",
                        w[0].0
                    ),
                });
            }
            let c = c.max(prev);
            slopes.push(c);
            prev = c;
        }
        if *slopes.last().unwrap() > right_slope + slope_tol {
            return Err(CoreError::GridTooNarrow {
                detail: format!(
                    "terminal chord slope {:.6} exceeds the asymptotic slope {right_slope:.6}",
                    slopes.last().unwrap()
                ),
            });
        }
        let (s1, h1) = points[0];
        let intercept = h1 - left_slope * s1;
        let mut kinks: Vec<(f64, f64)> = Vec::with_capacity(points.len());
        let mut running = left_slope;
        for (i, &c) in slopes.iter().enumerate() {
            let g = c - running;
            if g > 0.0 {
                kinks.push((points[i].0, g));
                running = c;
            }
        }
        let g_last = right_slope.max(running) - running;
        if g_last > 0.0 {
            kinks.push((points[points.len() - 1].0, g_last));
        }
        PiecewiseValue::new(intercept, left_slope, kinks)
    }

    /// Merges kinks closer than `1e-9 * scale` and drops slope increments
    /// below 1e-12, keeping the portfolio evaluation cost linear in the grid
    /// size.
    pub fn compact(mut self, scale: f64) -> Self {
        let tol_k = 1e-9 * scale;
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(self.kinks.len());
        for (k, g) in self.kinks.drain(..) {
            match merged.last_mut() {
                Some(last) if k - last.0 <= tol_k => last.1 += g,
                _ => merged.push((k, g)),
            }
        }
        merged.retain(|&(_, g)| g >= 1e-12);
        self.kinks = merged;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BermudanMethod {
    Tangent,
    Secant,
    Both,
}

/// Bermudan price bounds and diagnostics.
#[derive(Debug, Clone)]
pub struct BermudanResult {
    /// Tangent (minorant) rollback value.
    pub lower_bound: Option<f64>,
    /// Secant (majorant) rollback value.
    pub upper_bound: Option<f64>,
    pub n_points: usize,
    /// Estimated exercise boundary per date t_1..t_{N-1} (None when the
    /// payoff never crosses the continuation value on the grid).
    pub exercise_boundary: Vec<(f64, Option<f64>)>,
}

/// Grid and method configuration for the rollback.
#[derive(Debug, Clone)]
pub struct BermudanConfig {
    pub n_points: usize,
    pub method: BermudanMethod,
    /// Half-width of the geometric grid in units of sigma_bar * sqrt(T)
    /// around the strike, sigma_bar being the stationary chain volatility.
    pub span_sigmas: f64,
    pub numerics: Numerics,
}

/// Default grid half-width multiplier; pinned by the reference Bermudan
/// tables this module is validated against.
pub const DEFAULT_SPAN_SIGMAS: f64 = 2.05;

impl BermudanConfig {
    /// Rollback configuration with the default grid span and reduced
    /// quadrature orders. The interval pricing operator is analytic in the
    /// jump variables, so Hermite 12 x Laguerre 2 already prices half-year
    /// intervals to ~1e-7, far inside the rollback's own grid error.
    pub fn new(n_points: usize, method: BermudanMethod) -> Self {
        let mut numerics = Numerics::default();
        numerics.hermite_order = 12;
        numerics.laguerre_order = 2;
        BermudanConfig { n_points, method, span_sigmas: DEFAULT_SPAN_SIGMAS, numerics }
    }
}

/// Precomputed pricing data for one exercise interval: per-initial-state AIV
/// distributions and the jump mixture for the interval maturity.
struct IntervalPricer {
    aivs: Vec<Arc<AivDistribution>>,
    mixture: JumpMixture,
    dt: f64,
    rate: f64,
    dividend: f64,
}

/// Combined (AIV atom x jump atom) terms: weight, spot multiplier, and
/// sqrt of total variance over the interval.
struct CombinedAtoms {
    terms: Vec<(f64, f64, f64)>,
}

impl IntervalPricer {
    fn new(model: &ModelSpec, dt: f64, steps: usize, numerics: &Numerics) -> Result<Self> {
        let m = model.chain.num_states();
        let mut aivs = Vec::with_capacity(m);
        for state in 0..m {
            let chain = model.chain.with_initial_state(state)?;
            let (dist, _) = aiv_rr_with(&chain, steps, numerics.key_digits, numerics.triple_cap)?;
            aivs.push(Arc::new(dist));
        }
        let mixture = match (&model.jumps, &model.pea) {
            (None, _) => JumpMixture::none(),
            (Some(j), None) => JumpMixture::merton(j, dt),
            (Some(j), Some(p)) => JumpMixture::co_jump(j, p, dt, numerics)?,
        };
        Ok(IntervalPricer { aivs, mixture, dt, rate: 0.0, dividend: 0.0 })
    }

    fn with_market(mut self, rate: f64, dividend: f64) -> Self {
        self.rate = rate;
        self.dividend = dividend;
        self
    }

    /// Mixes the per-state AIV supports under the state distribution `pi`,
    /// merging atoms that share a recombination key, then crosses them with
    /// the jump atoms.
    fn date_atoms(&self, pi: &StateDistribution) -> CombinedAtoms {
        let mut merged: std::collections::BTreeMap<i64, (f64, f64)> =
            std::collections::BTreeMap::new();
        for (state, &weight) in pi.probs.iter().enumerate() {
            if weight == 0.0 {
                continue;
            }
            let dist = &self.aivs[state];
            for ((v, p), &key) in dist.iter().zip(dist.sum_keys()) {
                let e = merged.entry(key).or_insert((v, 0.0));
                if v < e.0 {
                    e.0 = v;
                }
                e.1 += weight * p;
            }
        }
        let mut terms = Vec::with_capacity(merged.len() * self.mixture.atoms.len());
        for (_, (v, pv)) in merged {
            for atom in &self.mixture.atoms {
                let w_total = (v + atom.var_add) * self.dt;
                terms.push((pv * atom.weight, atom.spot_mult, w_total.sqrt()));
            }
        }
        CombinedAtoms { terms }
    }

    /// Values and deltas of the portfolio's discounted expectation at each
    /// spot: bond and forward terms analytically, the call strip through the
    /// Black-Scholes kernel per combined atom.
    fn continuation_batch(
        &self,
        atoms: &CombinedAtoms,
        portfolio: &PiecewiseValue,
        spots: &[f64],
    ) -> Vec<(f64, f64)> {
        let disc_r = (-self.rate * self.dt).exp();
        let disc_q = (-self.dividend * self.dt).exp();
        let rq_dt = (self.rate - self.dividend) * self.dt;
        let kinks: Vec<(f64, f64, f64)> = portfolio
            .kinks()
            .iter()
            .map(|&(k, g)| (k.ln(), k * disc_r, g))
            .collect();
        let alpha = portfolio.intercept();
        let beta = portfolio.base_slope();

        let eval_one = |&s: &f64| -> (f64, f64) {
            let mut value = alpha * disc_r + beta * s * disc_q;
            let mut delta = beta * disc_q;
            for &(w, c, sw) in &atoms.terms {
                let sc = s * c;
                let lsc = sc.ln();
                let s_disc = sc * disc_q;
                let mut v_atom = 0.0;
                let mut d_atom = 0.0;
                for &(lnk, k_disc, gamma) in &kinks {
                    let d1 = (lsc - lnk + rq_dt) / sw + 0.5 * sw;
                    let n1 = norm_cdf(d1);
                    let n2 = norm_cdf(d1 - sw);
                    v_atom += gamma * (s_disc * n1 - k_disc * n2);
                    d_atom += gamma * c * disc_q * n1;
                }
                value += w * v_atom;
                delta += w * d_atom;
            }
            (value, delta)
        };

        if spots.len() * atoms.terms.len() * kinks.len().max(1) > 200_000 {
            spots.par_iter().map(eval_one).collect()
        } else {
            spots.iter().map(eval_one).collect()
        }
    }
}

/// Discounted expectation (and its spot derivative) of a convex
/// piecewise-linear claim paid after `dt` years, mixing the chain state over
/// `state_dist` and the per-state AIV distributions.
#[allow(clippy::too_many_arguments)]
pub fn continuation_value(
    portfolio: &PiecewiseValue,
    model: &ModelSpec,
    state_dist: &StateDistribution,
    spot: f64,
    dt: f64,
    rate: f64,
    dividend_yield: f64,
    numerics: &Numerics,
) -> Result<(f64, f64)> {
    let steps = model.chain.steps_for_horizon(dt)?;
    let pricer = IntervalPricer::new(model, dt, steps, numerics)?.with_market(rate, dividend_yield);
    let atoms = pricer.date_atoms(state_dist);
    let out = pricer.continuation_batch(&atoms, portfolio, &[spot]);
    Ok(out[0])
}

fn payoff_value(kind: OptionKind, strike: f64, s: f64) -> f64 {
    match kind {
        OptionKind::Call => (s - strike).max(0.0),
        OptionKind::Put => (strike - s).max(0.0),
    }
}

fn asymptotic_slopes(kind: OptionKind) -> (f64, f64) {
    match kind {
        OptionKind::Call => (0.0, 1.0),
        OptionKind::Put => (-1.0, 0.0),
    }
}

fn build_grid(market: &MarketSpec, model: &ModelSpec, config: &BermudanConfig) -> Vec<f64> {
    let sigma_bar = model.chain.stationary_mean_variance().sqrt();
    let half_width = config.span_sigmas * sigma_bar * market.maturity.sqrt();
    let ln_k = market.strike.ln();
    let n = config.n_points.max(3);
    let mut grid: Vec<f64> = (0..n)
        .map(|i| (ln_k - half_width + 2.0 * half_width * i as f64 / (n - 1) as f64).exp())
        .collect();
    for extra in [market.spot, market.strike] {
        if grid.iter().all(|&g| (g - extra).abs() > 1e-9 * extra) {
            grid.push(extra);
        }
    }
    grid.sort_by(f64::total_cmp);
    grid
}

enum Side {
    Tangent,
    Secant,
}

/// One rollback pass. Returns the date-0 value and the per-date boundary
/// estimates.
fn rollback(
    model: &ModelSpec,
    market: &MarketSpec,
    schedule: &ExerciseSchedule,
    config: &BermudanConfig,
    side: Side,
) -> Result<(f64, Vec<(f64, Option<f64>)>)> {
    let pricer = IntervalPricer::new(
        model,
        schedule.interval(),
        schedule.steps_per_interval(),
        &config.numerics,
    )?
    .with_market(market.rate, market.dividend_yield);
    let grid = build_grid(market, model, config);
    let (left_slope, right_slope) = asymptotic_slopes(market.kind);
    let payoff = PiecewiseValue::terminal_payoff(market.kind, market.strike);
    let n_intervals = schedule.num_intervals();

    let mut value = payoff.clone();
    let mut boundary: Vec<(f64, Option<f64>)> = Vec::new();

    for date_idx in (1..n_intervals).rev() {
        let pi = evolve_distribution(
            &model.chain,
            &model.chain.initial_distribution(),
            date_idx * schedule.steps_per_interval(),
        );
        let atoms = pricer.date_atoms(&pi);
        let cont = pricer.continuation_batch(&atoms, &value, &grid);

        // locate the payoff/continuation crossover on the grid
        let diff: Vec<f64> = grid
            .iter()
            .zip(&cont)
            .map(|(&s, &(cv, _))| cv - payoff_value(market.kind, market.strike, s))
            .collect();
        let mut crossover: Option<f64> = None;
        for g in 0..grid.len() - 1 {
            if (diff[g] > 0.0) != (diff[g + 1] > 0.0) {
                let t = diff[g] / (diff[g] - diff[g + 1]);
                crossover = Some(grid[g] + t * (grid[g + 1] - grid[g]));
                break;
            }
        }
        boundary.push((schedule.dates()[date_idx], crossover));

        let mut eval_spots = grid.clone();
        let mut cont_all = cont;
        if let Some(s_star) = crossover {
            let extra = pricer.continuation_batch(&atoms, &value, &[s_star]);
            let pos = eval_spots.partition_point(|&s| s < s_star);
            eval_spots.insert(pos, s_star);
            cont_all.insert(pos, extra[0]);
        }

        value = match side {
            Side::Tangent => {
                // minorant: payoff pieces plus tangents to the continuation
                let mut lines: Vec<(f64, f64)> = Vec::with_capacity(eval_spots.len() + 2);
                match market.kind {
                    OptionKind::Call => {
                        lines.push((0.0, 0.0));
                        lines.push((1.0, -market.strike));
                    }
                    OptionKind::Put => {
                        lines.push((-1.0, market.strike));
                        lines.push((0.0, 0.0));
                    }
                }
                for (&s, &(cv, cd)) in eval_spots.iter().zip(&cont_all) {
                    lines.push((cd, cv - cd * s));
                }
                PiecewiseValue::from_lines(&lines)?
            }
            Side::Secant => {
                let points: Vec<(f64, f64)> = eval_spots
                    .iter()
                    .zip(&cont_all)
                    .map(|(&s, &(cv, _))| {
                        (s, cv.max(payoff_value(market.kind, market.strike, s)))
                    })
                    .collect();
                PiecewiseValue::from_chords(&points, left_slope, right_slope)?
            }
        }
        .compact(market.strike);
    }

    // date 0: the chain state is known, no approximation needed
    let atoms0 = pricer.date_atoms(&model.chain.initial_distribution());
    let cont0 = pricer.continuation_batch(&atoms0, &value, &[market.spot]);
    let price = cont0[0].0.max(payoff_value(market.kind, market.strike, market.spot));
    boundary.reverse();
    Ok((price, boundary))
}

/// Bermudan price bounds under the given model.
pub fn price_bermudan(
    model: &ModelSpec,
    market: &MarketSpec,
    schedule: &ExerciseSchedule,
    config: &BermudanConfig,
) -> Result<BermudanResult> {
    if config.n_points < 3 {
        return Err(CoreError::Invalid {
            what: "interpolation points",
            detail: format!("{} < 3", config.n_points),
        });
    }
    if (schedule.maturity() - market.maturity).abs() > 1e-9 * market.maturity {
        return Err(CoreError::Invalid {
            what: "exercise schedule",
            detail: format!(
                "schedule maturity {} does not match the market maturity {}",
                schedule.maturity(),
                market.maturity
            ),
        });
    }
    let (lower, upper, boundary) = match config.method {
        BermudanMethod::Tangent => {
            let (lo, b) = rollback(model, market, schedule, config, Side::Tangent)?;
            (Some(lo), None, b)
        }
        BermudanMethod::Secant => {
            let (hi, b) = rollback(model, market, schedule, config, Side::Secant)?;
            (None, Some(hi), b)
        }
        BermudanMethod::Both => {
            let (lo, b) = rollback(model, market, schedule, config, Side::Tangent)?;
            let (hi, _) = rollback(model, market, schedule, config, Side::Secant)?;
            (Some(lo), Some(hi), b)
        }
    };
    if let (Some(lo), Some(hi)) = (lower, upper) {
        if lo > hi + 1e-9 {
            return Err(CoreError::Invalid {
                what: "bermudan bounds",
                detail: format!("lower bound {lo} exceeds upper bound {hi}"),
            });
        }
    }
    Ok(BermudanResult {
        lower_bound: lower,
        upper_bound: upper,
        n_points: config.n_points,
        exercise_boundary: boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::european::{bs_price, price_ms_sv};
    use crate::jumps::{JumpSpec, PeaSpec};
    use crate::msvol::ChainSpec;
    use rand::{RngExt, SeedableRng};

    fn section52_chain() -> ChainSpec {
        ChainSpec::from_variances(
            &[0.02, 0.04, 0.06, 0.08],
            vec![
                vec![0.70, 0.15, 0.10, 0.05],
                vec![0.03, 0.90, 0.06, 0.01],
                vec![0.05, 0.05, 0.85, 0.05],
                vec![0.03, 0.07, 0.10, 0.80],
            ],
            0.5 / 30.0,
            1,
        )
        .unwrap()
    }

    fn ms_sv_model() -> ModelSpec {
        ModelSpec::new(section52_chain(), None, None).unwrap()
    }

    #[test]
    fn piecewise_eval_matches_segment_oracle() {
        let mut rng = rand_pcg::Pcg64Mcg::seed_from_u64(3);
        for _ in 0..20 {
            let n_kinks = rng.random_range(0usize..8);
            let mut ks: Vec<f64> =
                (0..n_kinks).map(|_| rng.random_range(10.0f64..200.0)).collect();
            ks.sort_by(f64::total_cmp);
            ks.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
            let kinks: Vec<(f64, f64)> =
                ks.iter().map(|&k| (k, rng.random_range(0.0f64..2.0))).collect();
            let pw = PiecewiseValue::new(
                rng.random_range(-50.0f64..50.0),
                rng.random_range(-1.0f64..1.0),
                kinks.clone(),
            )
            .unwrap();

            // oracle: locate the segment, evaluate its accumulated line
            let direct = |s: f64| -> f64 {
                let mut slope = pw.base_slope();
                let mut value_at = pw.intercept(); // value at S = 0
                let mut last_k = 0.0;
                for &(k, g) in &kinks {
                    if s <= k {
                        break;
                    }
                    value_at += slope * (k - last_k);
                    last_k = k;
                    slope += g;
                }
                value_at + slope * (s - last_k)
            };
            for _ in 0..1000 {
                let s = rng.random_range(0.0f64..250.0);
                assert!((pw.eval(s) - direct(s)).abs() < 1e-10 * (1.0 + pw.eval(s).abs()));
            }
        }
    }

    #[test]
    fn envelope_of_lines_is_their_max() {
        let lines = vec![(0.0, 1.0), (0.5, -10.0), (1.0, -40.0), (0.25, -4.0)];
        let pw = PiecewiseValue::from_lines(&lines).unwrap();
        for s in [0.0, 5.0, 20.0, 35.0, 60.0, 100.0, 200.0] {
            let max_line = lines.iter().map(|&(b, a)| a + b * s).fold(f64::MIN, f64::max);
            assert!((pw.eval(s) - max_line).abs() < 1e-10, "s = {s}");
        }
        assert!(pw.kinks().iter().all(|&(_, g)| g > 0.0));
    }

    #[test]
    fn chords_interpolate_and_extend() {
        // convex samples from a smoothed hockey stick
        let points: Vec<(f64, f64)> = (0..12)
            .map(|i| {
                let s = 40.0 + 12.0 * i as f64;
                (s, ((s - 100.0f64).max(0.0).powi(2) + 25.0).sqrt())
            })
            .collect();
        let pw = PiecewiseValue::from_chords(&points, 0.0, 1.0).unwrap();
        for &(s, h) in &points {
            assert!((pw.eval(s) - h).abs() < 1e-9);
        }
        // flat left extension, unit-slope right extension
        assert!((pw.eval(0.0) - points[0].1).abs() < 1e-9);
        let far = pw.eval(1000.0);
        let farther = pw.eval(1100.0);
        assert!((farther - far - 100.0).abs() < 1e-9);
    }

    #[test]
    fn narrow_grid_is_rejected() {
        // concave samples cannot come from a convex value function
        let points = vec![(50.0, 0.0), (60.0, 20.0), (70.0, 25.0)];
        assert!(matches!(
            PiecewiseValue::from_chords(&points, 0.0, 1.0),
            Err(CoreError::GridTooNarrow { .. })
        ));
    }

    #[test]
    fn zero_portfolio_has_zero_continuation() {
        let model = ms_sv_model();
        let pi = model.chain.initial_distribution();
        let (v, d) = continuation_value(
            &PiecewiseValue::zero(),
            &model,
            &pi,
            100.0,
            0.5,
            0.05,
            0.04,
            &Numerics::default(),
        )
        .unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(d, 0.0);
    }

    #[test]
    fn single_call_kink_single_state_is_black_scholes() {
        let chain = ChainSpec::new(vec![0.2], vec![vec![1.0]], 0.5 / 30.0, 0).unwrap();
        let model = ModelSpec::new(chain, None, None).unwrap();
        let pw = PiecewiseValue::terminal_payoff(OptionKind::Call, 100.0);
        let pi = model.chain.initial_distribution();
        let (v, d) =
            continuation_value(&pw, &model, &pi, 95.0, 0.5, 0.05, 0.0, &Numerics::default())
                .unwrap();
        let (bs, bs_delta) = bs_price(95.0, 0.04, 0.05, 0.0, 0.5, 100.0, OptionKind::Call);
        assert!((v - bs).abs() < 1e-12);
        assert!((d - bs_delta).abs() < 1e-12);
    }

    #[test]
    fn terminal_payoff_continuation_matches_direct_mixture() {
        // Continuation of the raw payoff equals the European price mixed
        // over the state distribution at the date.
        let model = ms_sv_model();
        let steps = 30usize;
        let pi = evolve_distribution(&model.chain, &model.chain.initial_distribution(), 5 * steps);
        let pw = PiecewiseValue::terminal_payoff(OptionKind::Call, 100.0);
        let numerics = Numerics::default();
        let (v, d) =
            continuation_value(&pw, &model, &pi, 103.0, 0.5, 0.05, 0.04, &numerics).unwrap();

        let market = MarketSpec::call(103.0, 100.0, 0.05, 0.04, 0.5).unwrap();
        let mut direct_v = 0.0;
        let mut direct_d = 0.0;
        for (state, &w) in pi.probs.iter().enumerate() {
            let chain = model.chain.with_initial_state(state).unwrap();
            let r = price_ms_sv(&market, &chain, &numerics).unwrap();
            direct_v += w * r.price;
            direct_d += w * r.delta;
        }
        assert!((v - direct_v).abs() < 1e-10, "{v} vs {direct_v}");
        assert!((d - direct_d).abs() < 1e-10);
    }

    #[test]
    fn single_exercise_date_equals_european() {
        let model = ms_sv_model();
        let market = MarketSpec::call(100.0, 100.0, 0.05, 0.04, 0.5).unwrap();
        let schedule = ExerciseSchedule::uniform(0.5, 1, model.chain.step()).unwrap();
        let config = BermudanConfig::new(60, BermudanMethod::Both);
        let result = price_bermudan(&model, &market, &schedule, &config).unwrap();
        let euro = price_ms_sv(&market, &model.chain, &config.numerics).unwrap().price;
        assert!((result.lower_bound.unwrap() - euro).abs() < 1e-9);
        assert!((result.upper_bound.unwrap() - euro).abs() < 1e-9);
    }

    #[test]
    fn bounds_bracket_and_tighten_with_grid_size() {
        let model = ms_sv_model();
        let market = MarketSpec::call(100.0, 100.0, 0.05, 0.04, 3.0).unwrap();
        let schedule = ExerciseSchedule::uniform(0.5, 6, model.chain.step()).unwrap();
        let mut last_gap = f64::INFINITY;
        let mut last_lower = f64::MIN;
        let mut last_upper = f64::MAX;
        for n in [25usize, 50, 100] {
            let config = BermudanConfig::new(n, BermudanMethod::Both);
            let r = price_bermudan(&model, &market, &schedule, &config).unwrap();
            let (lo, hi) = (r.lower_bound.unwrap(), r.upper_bound.unwrap());
            assert!(lo <= hi + 1e-9);
            assert!(lo >= last_lower - 1e-9, "lower bound not monotone in n");
            assert!(hi <= last_upper + 1e-9, "upper bound not monotone in n");
            let gap = hi - lo;
            assert!(gap <= last_gap + 1e-9);
            last_gap = gap;
            last_lower = lo;
            last_upper = hi;
        }
    }

    #[test]
    fn bermudan_dominates_european() {
        let model = ms_sv_model();
        let market = MarketSpec::call(100.0, 100.0, 0.05, 0.04, 3.0).unwrap();
        let schedule = ExerciseSchedule::uniform(0.5, 6, model.chain.step()).unwrap();
        let config = BermudanConfig::new(100, BermudanMethod::Tangent);
        let r = price_bermudan(&model, &market, &schedule, &config).unwrap();
        let euro = price_ms_sv(&market, &model.chain, &config.numerics).unwrap().price;
        assert!(r.lower_bound.unwrap() >= euro - 1e-9);
    }

    #[test]
    fn no_dividend_call_collapses_to_european() {
        let model = ms_sv_model();
        let market = MarketSpec::call(100.0, 100.0, 0.05, 0.0, 3.0).unwrap();
        let schedule = ExerciseSchedule::uniform(0.5, 6, model.chain.step()).unwrap();
        let config = BermudanConfig::new(120, BermudanMethod::Both);
        let r = price_bermudan(&model, &market, &schedule, &config).unwrap();
        let euro = price_ms_sv(&market, &model.chain, &config.numerics).unwrap().price;
        let gap = r.upper_bound.unwrap() - r.lower_bound.unwrap();
        assert!((r.lower_bound.unwrap() - euro).abs() <= 2.0 * gap + 1e-6);
        assert!(r.upper_bound.unwrap() >= euro - 1e-9);
    }

    #[test]
    fn co_jump_model_prices_above_pure_switching() {
        let jumps = JumpSpec::new(3.0, -0.025, 0.005, 5.5e-5).unwrap();
        let pea = PeaSpec::new(2.0, 250.0, 0.02).unwrap();
        let sv = ms_sv_model();
        let svcj = ModelSpec::new(section52_chain(), Some(jumps), Some(pea)).unwrap();
        let market = MarketSpec::call(100.0, 100.0, 0.05, 0.04, 3.0).unwrap();
        let schedule = ExerciseSchedule::uniform(0.5, 6, sv.chain.step()).unwrap();
        let mut config = BermudanConfig::new(40, BermudanMethod::Tangent);
        config.numerics.hermite_order = 16;
        config.numerics.laguerre_order = 6;
        let lo_sv = price_bermudan(&sv, &market, &schedule, &config).unwrap().lower_bound.unwrap();
        let lo_cj =
            price_bermudan(&svcj, &market, &schedule, &config).unwrap().lower_bound.unwrap();
        assert!(lo_cj > lo_sv);
    }
}
