//! Simulation estimators.
//!
//! Three oracles for the analytic pricers:
//! - [`mc_european`]: Euler discretization of the full dynamics with jumps at
//!   their actual times (no relocation), the slow-but-assumption-free
//!   benchmark.
//! - [`mc_exact_conditional`]: conditional on the volatility path and the
//!   jumps, the terminal price is lognormal, so each path contributes a
//!   closed-form conditional price. Zero discretization error and much lower
//!   variance; runs with or without the jump-time relocation to isolate the
//!   relocation bias.
//! - [`lsm_bermudan`]: regression-based early exercise on simulated paths,
//!   the statistical cross-check for the tangent/secant bounds.
//!
//! Estimates are reported as the mean over independent runs with the spread
//! across runs as the error measure. Randomness is drawn from per-(run, path)
//! substreams derived from the seed, so results are bit-identical regardless
//! of thread count.

use rand::{RngExt, SeedableRng};
use rand_distr::{Distribution, StandardNormal};
use rand_pcg::Pcg64Mcg;
use rayon::prelude::*;

use crate::bermudan::ExerciseSchedule;
use crate::error::{CoreError, Result};
use crate::european::{bs_price, MarketSpec, OptionKind};
use crate::math::solve_dense;
use crate::model::ModelSpec;

/// Euler and path-count configuration.
#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    /// Euler subintervals over the full horizon; must be a multiple of the
    /// chain step count so switch times align with the Euler grid.
    pub n_substeps: usize,
    pub n_paths: usize,
    pub n_runs: usize,
    pub seed: u64,
    pub antithetic: bool,
}

impl SimConfig {
    pub fn new(n_substeps: usize, n_paths: usize, n_runs: usize, seed: u64) -> Self {
        SimConfig { n_substeps, n_paths, n_runs, seed, antithetic: false }
    }
}

/// Mean estimate with the spread of per-run values.
#[derive(Debug, Clone)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation across runs.
    pub std_err: f64,
    pub runs: Vec<f64>,
}

impl McEstimate {
    fn from_runs(runs: Vec<f64>) -> Self {
        let n = runs.len() as f64;
        let mean = runs.iter().sum::<f64>() / n;
        let std_err = if runs.len() > 1 {
            (runs.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        McEstimate { mean, std_err, runs }
    }

    /// Standard error of the mean across runs.
    pub fn stderr_of_mean(&self) -> f64 {
        self.std_err / (self.runs.len() as f64).sqrt()
    }
}

/// Distinct stream per (seed, run, path) by SplitMix64 mixing.
fn path_rng(seed: u64, run: u64, path: u64) -> Pcg64Mcg {
    let mut z = seed
        ^ run.wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ path.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    Pcg64Mcg::seed_from_u64(z ^ (z >> 31))
}

fn sample_poisson(rng: &mut Pcg64Mcg, rate: f64) -> usize {
    if rate == 0.0 {
        return 0;
    }
    let limit = (-rate).exp();
    let mut k = 0usize;
    let mut prod: f64 = rng.random();
    while prod > limit {
        k += 1;
        prod *= rng.random::<f64>();
        if k > 1_000 {
            break;
        }
    }
    k
}

struct JumpDraw {
    times: Vec<f64>,
    log_sizes: Vec<f64>,
}

fn sample_jumps(rng: &mut Pcg64Mcg, model: &ModelSpec, horizon: f64) -> JumpDraw {
    let Some(jump) = &model.jumps else {
        return JumpDraw { times: Vec::new(), log_sizes: Vec::new() };
    };
    let count = sample_poisson(rng, jump.intensity * horizon);
    let mut times: Vec<f64> = (0..count).map(|_| rng.random::<f64>() * horizon).collect();
    times.sort_by(f64::total_cmp);
    let eps = jump.log_var.sqrt();
    let log_sizes = (0..count)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            jump.log_mean + eps * z
        })
        .collect();
    JumpDraw { times, log_sizes }
}

fn sample_chain_path(
    rng: &mut Pcg64Mcg,
    cum_rows: &[Vec<f64>],
    start: usize,
    steps: usize,
) -> Vec<usize> {
    let mut path = Vec::with_capacity(steps);
    let mut state = start;
    for _ in 0..steps {
        path.push(state);
        let u: f64 = rng.random();
        let row = &cum_rows[state];
        state = row.iter().position(|&c| u <= c).unwrap_or(row.len() - 1);
    }
    path
}

fn cumulative_rows(model: &ModelSpec) -> Vec<Vec<f64>> {
    model
        .chain
        .transition()
        .iter()
        .map(|row| {
            let mut acc = 0.0;
            row.iter()
                .map(|p| {
                    acc += p;
                    acc
                })
                .collect()
        })
        .collect()
}

fn validate_sim(model: &ModelSpec, market: &MarketSpec, sim: &SimConfig) -> Result<usize> {
    let steps = model.chain.steps_for_horizon(market.maturity)?;
    if sim.n_substeps == 0 || sim.n_substeps % steps != 0 {
        return Err(CoreError::Invalid {
            what: "substep count",
            detail: format!(
                "{} is not a positive multiple of the {} chain steps",
                sim.n_substeps, steps
            ),
        });
    }
    if sim.n_paths == 0 || sim.n_runs == 0 {
        return Err(CoreError::Invalid {
            what: "simulation size",
            detail: "need at least one path and one run".into(),
        });
    }
    Ok(steps)
}

fn payoff(kind: OptionKind, s: f64, k: f64) -> f64 {
    match kind {
        OptionKind::Call => (s - k).max(0.0),
        OptionKind::Put => (k - s).max(0.0),
    }
}

/// Euler Monte Carlo under the full dynamics, jumps at their drawn times.
///
/// Per substep the instantaneous variance is the chain level plus the decayed
/// impacts b ln^2(J_i) e^{-beta (t - t_i)} of every jump whose window covers
/// the substep start. The terminal price applies the exact jump multipliers.
pub fn mc_european(model: &ModelSpec, market: &MarketSpec, sim: &SimConfig) -> Result<McEstimate> {
    let steps = validate_sim(model, market, sim)?;
    let cum_rows = cumulative_rows(model);
    let t = market.maturity;
    let n_sub = sim.n_substeps;
    let dt = t / n_sub as f64;
    let per_chain_step = n_sub / steps;
    let comp = model.jumps.as_ref().map_or(0.0, |j| j.intensity * j.zeta());
    let drift_base = market.rate - market.dividend_yield - comp;
    let disc = (-market.rate * t).exp();
    let (b, beta, delta) = model
        .pea
        .as_ref()
        .map_or((0.0, 1.0, 0.0), |p| (p.proportional_coeff, p.attenuation, p.duration));

    let run_estimate = |run: usize| -> f64 {
        let base_paths = if sim.antithetic { (sim.n_paths / 2).max(1) } else { sim.n_paths };
        let mut sum = 0.0;
        let mut total = 0usize;
        for path in 0..base_paths {
            let mut rng = path_rng(sim.seed, run as u64, path as u64);
            let chain = sample_chain_path(&mut rng, &cum_rows, model.chain.initial_state(), steps);
            let jumps = sample_jumps(&mut rng, model, t);
            let log_jump_total: f64 = jumps.log_sizes.iter().sum();
            let zs: Vec<f64> = (0..n_sub).map(|_| StandardNormal.sample(&mut rng)).collect();

            let reps: &[f64] = if sim.antithetic { &[1.0, -1.0] } else { &[1.0] };
            for &flip in reps {
                let mut log_s = 0.0;
                for (k, &z) in zs.iter().enumerate() {
                    let t_k = k as f64 * dt;
                    let mut var = model.chain.states_sq()[chain[k / per_chain_step]];
                    for (ti, lj) in jumps.times.iter().zip(&jumps.log_sizes) {
                        if *ti < t_k && t_k <= *ti + delta {
                            var += b * lj * lj * (-beta * (t_k - *ti)).exp();
                        }
                    }
                    log_s += (drift_base - 0.5 * var) * dt + var.sqrt() * dt.sqrt() * flip * z;
                }
                let s_t = market.spot * (log_s + log_jump_total).exp();
                sum += disc * payoff(market.kind, s_t, market.strike);
                total += 1;
            }
        }
        sum / total as f64
    };

    let runs: Vec<f64> = (0..sim.n_runs).into_par_iter().map(run_estimate).collect();
    Ok(McEstimate::from_runs(runs))
}

/// Zero-discretization estimator: conditional on the chain path and the
/// jumps, average integrated variance is computed exactly (per-jump decay
/// integrals truncated at the horizon) and the path contributes the
/// closed-form lognormal price. `relocate_jumps` applies the window-start
/// relocation, matching the analytic pricer's assumption.
pub fn mc_exact_conditional(
    model: &ModelSpec,
    market: &MarketSpec,
    sim: &SimConfig,
    relocate_jumps: bool,
) -> Result<McEstimate> {
    let steps = model.chain.steps_for_horizon(market.maturity)?;
    if sim.n_paths == 0 || sim.n_runs == 0 {
        return Err(CoreError::Invalid {
            what: "simulation size",
            detail: "need at least one path and one run".into(),
        });
    }
    let cum_rows = cumulative_rows(model);
    let t = market.maturity;
    let comp = model.jumps.as_ref().map_or(0.0, |j| j.intensity * j.zeta());
    let (b, beta, delta) = model
        .pea
        .as_ref()
        .map_or((0.0, 1.0, 0.0), |p| (p.proportional_coeff, p.attenuation, p.duration));

    let run_estimate = |run: usize| -> f64 {
        let mut sum = 0.0;
        for path in 0..sim.n_paths {
            let mut rng = path_rng(sim.seed, run as u64, path as u64);
            let chain = sample_chain_path(&mut rng, &cum_rows, model.chain.initial_state(), steps);
            let jumps = sample_jumps(&mut rng, model, t);

            let v_chain: f64 =
                chain.iter().map(|&s| model.chain.states_sq()[s]).sum::<f64>() / steps as f64;
            let mut v_jump = 0.0;
            let mut log_jump_total = 0.0;
            for (ti, lj) in jumps.times.iter().zip(&jumps.log_sizes) {
                log_jump_total += lj;
                let window = if relocate_jumps { delta } else { delta.min(t - ti) };
                v_jump += b * lj * lj * (1.0 - (-beta * window).exp()) / beta;
            }
            let aiv = v_chain + v_jump / t;
            let shifted_spot = market.spot * ((-comp * t + log_jump_total).exp());
            let (price, _) = bs_price(
                shifted_spot,
                aiv,
                market.rate,
                market.dividend_yield,
                t,
                market.strike,
                market.kind,
            );
            sum += price;
        }
        sum / sim.n_paths as f64
    };

    let runs: Vec<f64> = (0..sim.n_runs).into_par_iter().map(run_estimate).collect();
    Ok(McEstimate::from_runs(runs))
}

/// Exact per-interval path simulation at the exercise dates: conditional on
/// the chain sub-path and the jumps, each interval's log increment is normal
/// with the integrated variance computed in closed form (decay windows are
/// carried across interval boundaries).
fn simulate_exercise_paths(
    model: &ModelSpec,
    market: &MarketSpec,
    schedule: &ExerciseSchedule,
    seed: u64,
    run: u64,
    n_paths: usize,
) -> Vec<Vec<f64>> {
    let cum_rows = cumulative_rows(model);
    let steps = schedule.steps_per_interval();
    let n_int = schedule.num_intervals();
    let dt = schedule.interval();
    let tau = model.chain.step();
    let comp = model.jumps.as_ref().map_or(0.0, |j| j.intensity * j.zeta());
    let drift = (market.rate - market.dividend_yield - comp) * dt;
    let (b, beta, delta) = model
        .pea
        .as_ref()
        .map_or((0.0, 1.0, 0.0), |p| (p.proportional_coeff, p.attenuation, p.duration));

    (0..n_paths)
        .map(|path| {
            let mut rng = path_rng(seed, run, path as u64);
            let mut state = model.chain.initial_state();
            let mut log_s = market.spot.ln();
            let mut out = Vec::with_capacity(n_int);
            // decay windows spilling over from the previous interval
            let mut carry: Vec<(f64, f64)> = Vec::new(); // (elapsed window time, b ln^2 J)
            for _ in 0..n_int {
                let mut iv = 0.0;
                for _ in 0..steps {
                    iv += model.chain.states_sq()[state] * tau;
                    let u: f64 = rng.random();
                    let row = &cum_rows[state];
                    state = row.iter().position(|&c| u <= c).unwrap_or(row.len() - 1);
                }
                for &(elapsed, impact) in &carry {
                    let remaining = (delta - elapsed).min(dt);
                    if remaining > 0.0 {
                        iv += impact / beta
                            * ((-beta * elapsed).exp() - (-beta * (elapsed + remaining)).exp());
                    }
                }
                carry.clear();
                let jumps = sample_jumps(&mut rng, model, dt);
                let mut log_jump_total = 0.0;
                for (local_t, lj) in jumps.times.iter().zip(&jumps.log_sizes) {
                    log_jump_total += lj;
                    let impact = b * lj * lj;
                    let in_interval = delta.min(dt - local_t);
                    iv += impact / beta * (1.0 - (-beta * in_interval).exp());
                    if local_t + delta > dt {
                        carry.push((dt - local_t, impact));
                    }
                }
                let z: f64 = StandardNormal.sample(&mut rng);
                log_s += drift - 0.5 * iv + iv.sqrt() * z + log_jump_total;
                out.push(log_s.exp());
            }
            out
        })
        .collect()
}

/// Least-squares Monte Carlo estimate of the Bermudan price.
///
/// Regression basis: monomials of S/K up to `basis_degree` plus the payoff,
/// fitted on in-the-money paths only; the stopping rule is applied to the
/// simulated cashflows, giving the usual lower-biased estimate.
pub fn lsm_bermudan(
    model: &ModelSpec,
    market: &MarketSpec,
    schedule: &ExerciseSchedule,
    sim: &SimConfig,
    basis_degree: usize,
) -> Result<McEstimate> {
    if basis_degree == 0 {
        return Err(CoreError::Invalid { what: "basis degree", detail: "need degree >= 1".into() });
    }
    if (schedule.maturity() - market.maturity).abs() > 1e-9 * market.maturity {
        return Err(CoreError::Invalid {
            what: "exercise schedule",
            detail: "schedule maturity does not match the market".into(),
        });
    }
    let n_int = schedule.num_intervals();
    let disc = (-market.rate * schedule.interval()).exp();

    let run_estimate = |run: usize| -> f64 {
        let paths =
            simulate_exercise_paths(model, market, schedule, sim.seed, run as u64, sim.n_paths);
        let mut cashflow: Vec<f64> = paths
            .iter()
            .map(|p| payoff(market.kind, p[n_int - 1], market.strike))
            .collect();
        for date in (0..n_int - 1).rev() {
            for cf in cashflow.iter_mut() {
                *cf *= disc;
            }
            let itm: Vec<usize> = (0..paths.len())
                .filter(|&p| payoff(market.kind, paths[p][date], market.strike) > 0.0)
                .collect();
            let n_basis = basis_degree + 2;
            if itm.len() < n_basis * 2 {
                continue;
            }
            // normal equations on (1, s, ..., s^deg, payoff), s = S/K
            let mut xtx = vec![vec![0.0; n_basis]; n_basis];
            let mut xty = vec![0.0; n_basis];
            let mut feats = vec![0.0; n_basis];
            for &p in &itm {
                let s = paths[p][date] / market.strike;
                feats[0] = 1.0;
                for d in 1..=basis_degree {
                    feats[d] = feats[d - 1] * s;
                }
                feats[n_basis - 1] =
                    payoff(market.kind, paths[p][date], market.strike) / market.strike;
                for a in 0..n_basis {
                    for bcol in a..n_basis {
                        xtx[a][bcol] += feats[a] * feats[bcol];
                    }
                    xty[a] += feats[a] * cashflow[p] / market.strike;
                }
            }
            for a in 0..n_basis {
                for bcol in 0..a {
                    xtx[a][bcol] = xtx[bcol][a];
                }
            }
            // The payoff column is collinear with {1, s} for vanilla payoffs
            // on in-the-money paths; a tiny ridge keeps the normal equations
            // solvable without moving the fitted values.
            let trace: f64 = (0..n_basis).map(|a| xtx[a][a]).sum();
            for (a, row) in xtx.iter_mut().enumerate() {
                row[a] += 1e-10 * trace;
            }
            let Some(coef) = solve_dense(&xtx, &xty) else { continue };
            for &p in &itm {
                let s = paths[p][date] / market.strike;
                let exercise = payoff(market.kind, paths[p][date], market.strike);
                let mut fitted = coef[0];
                let mut pow = 1.0;
                for d in 1..=basis_degree {
                    pow *= s;
                    fitted += coef[d] * pow;
                }
                fitted += coef[n_basis - 1] * exercise / market.strike;
                if exercise > fitted * market.strike {
                    cashflow[p] = exercise;
                }
            }
        }
        let cont = cashflow.iter().sum::<f64>() / cashflow.len() as f64 * disc;
        cont.max(payoff(market.kind, market.spot, market.strike))
    };

    let runs: Vec<f64> = (0..sim.n_runs).into_par_iter().map(run_estimate).collect();
    Ok(McEstimate::from_runs(runs))
}
