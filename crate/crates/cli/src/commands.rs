//! Command implementations. Each writes a JSON result (stdout or file) with
//! algorithm outputs separated from a `timing` block, so reruns of the same
//! config are bit-identical apart from timings.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};

use mssvcj_core::aiv::{aiv_ce_with, aiv_rr_with, support_bound, triple_bound};
use mssvcj_core::bermudan::{
    price_bermudan, BermudanConfig, BermudanMethod, ExerciseSchedule,
};
use mssvcj_core::calibration::{
    boxplot_split, calibrate_jumps, OptionQuote, QuoteFrame, ReturnSeries, SearchConfig,
};
use mssvcj_core::european::{
    implied_vol, price_ms_sv, price_ms_svcj_detailed, price_ms_svj, MertonPricer, PriceResult,
};
use mssvcj_core::jumps::{jump_time_bias, truncate_poisson};
use mssvcj_core::math::Fnv1a;
use mssvcj_core::model::ModelKind;
use mssvcj_core::montecarlo::{lsm_bermudan, mc_european, mc_exact_conditional, SimConfig};
use mssvcj_core::msvol::ChainSpec;

use crate::config::ModelConfig;
use crate::{CliError, Command};

pub fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Aiv { config, steps, check_ce, out } => {
            cmd_aiv(&config.config, steps, check_ce, &out)
        }
        Command::PriceEu { config, components, out } => {
            cmd_price_eu(&config.config, components, out.as_deref())
        }
        Command::PriceBerm { config, schedule, n, method, span, table, out } => cmd_price_berm(
            &config.config,
            &schedule,
            &n,
            &method,
            span,
            table.as_deref(),
            out.as_deref(),
        ),
        Command::Mc {
            config,
            substeps,
            paths,
            runs,
            seed,
            conditional,
            relocate,
            antithetic,
            out_runs,
            out,
        } => cmd_mc(
            &config.config,
            substeps,
            paths,
            runs,
            seed,
            conditional,
            relocate,
            antithetic,
            out_runs.as_deref(),
            out.as_deref(),
        ),
        Command::Lsm { config, schedule, paths, runs, degree, seed, out_runs, out } => cmd_lsm(
            &config.config,
            &schedule,
            paths,
            runs,
            degree,
            seed,
            out_runs.as_deref(),
            out.as_deref(),
        ),
        Command::Bias { config, nmax, out } => cmd_bias(&config.config, nmax, out.as_deref()),
        Command::Calibrate { config, prices, quotes, iters, seed, kfence, out } => cmd_calibrate(
            &config.config,
            prices.as_deref(),
            &quotes,
            iters,
            seed,
            kfence,
            out.as_deref(),
        ),
        Command::Bench { m_list, l_list, algos, repeats, ce_cap, triple_cap, seed, out } => {
            cmd_bench(&m_list, &l_list, &algos, repeats, ce_cap, triple_cap, seed, &out)
        }
    }
}

fn write_json(out: Option<&Path>, value: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Io(format!("serialize result: {e}")))?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| CliError::Io(format!("write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn parse_schedule(spec: &str, tau: f64) -> Result<ExerciseSchedule, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 2 {
        return Err(CliError::Validation(format!(
            "schedule must look like interval:count, got \"{spec}\""
        )));
    }
    let interval: f64 = parts[0]
        .parse()
        .map_err(|_| CliError::Validation(format!("bad schedule interval \"{}\"", parts[0])))?;
    let count: usize = parts[1]
        .parse()
        .map_err(|_| CliError::Validation(format!("bad schedule count \"{}\"", parts[1])))?;
    ExerciseSchedule::uniform(interval, count, tau).map_err(CliError::from)
}

fn parse_usize_list(text: &str, what: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Validation(format!("bad {what} entry \"{p}\"")))
        })
        .collect()
}

fn cmd_aiv(
    config_path: &Path,
    steps: Option<usize>,
    check_ce: bool,
    out: &Path,
) -> Result<(), CliError> {
    let config = ModelConfig::load(config_path)?;
    let chain = config.chain()?;
    let numerics = config.numerics();
    let steps = match steps {
        Some(s) if s >= 1 => s,
        Some(_) => return Err(CliError::Validation("steps must be >= 1".into())),
        None => {
            let market = config.market()?;
            chain.steps_for_horizon(market.maturity).map_err(CliError::from)?
        }
    };

    let t0 = Instant::now();
    let (dist, stats) =
        aiv_rr_with(&chain, steps, numerics.key_digits, numerics.triple_cap).map_err(CliError::from)?;
    let wall = t0.elapsed().as_secs_f64();

    let mut csv = String::from("v,prob\n");
    for (v, p) in dist.iter() {
        csv.push_str(&format!("{v},{p}\n"));
    }
    std::fs::write(out, csv).map_err(|e| CliError::Io(format!("write {}: {e}", out.display())))?;

    let ce_agrees = if check_ce {
        let ce = aiv_ce_with(&chain, steps, numerics.key_digits, numerics.enum_cap)
            .map_err(CliError::from)?;
        let same = ce.sum_keys() == dist.sum_keys()
            && ce
                .probs()
                .iter()
                .zip(dist.probs())
                .all(|(a, b)| (a - b).abs() < 1e-12);
        if !same {
            return Err(CliError::Validation(
                "enumeration oracle disagrees with the recombination result".into(),
            ));
        }
        Some(true)
    } else {
        None
    };

    let sidecar = json!({
        "num_steps": steps,
        "num_states": chain.num_states(),
        "support_size": dist.len(),
        "support_bound": support_bound(chain.num_states(), steps).to_string(),
        "triple_bound": triple_bound(chain.num_states(), steps).to_string(),
        "peak_live_triples": stats.peak_live_triples,
        "total_triples": stats.total_triples,
        "final_layer_triples": stats.final_layer_triples,
        "mean": dist.mean(),
        "chain_fingerprint": format!("{:016x}", dist.chain_fingerprint()),
        "ce_agrees": ce_agrees,
        "timing": { "wall_seconds": wall },
    });
    write_json(Some(&out.with_extension("json")), &sidecar)
}

fn price_result_json(config: &ModelConfig, result: &PriceResult, kind: ModelKind, psi_size: usize, n_max: Option<usize>, wall: f64) -> Value {
    json!({
        "model": kind.to_string(),
        "price": result.price,
        "delta": result.delta,
        "n_max": n_max,
        "psi_size": psi_size,
        "dropped_mass": result.truncation_mass_dropped,
        "components": result.components.as_ref().map(|comps| {
            comps.iter().map(|c| json!({
                "n_jumps": c.n_jumps,
                "variance": c.variance,
                "weight": c.weight,
                "value": c.value,
            })).collect::<Vec<_>>()
        }),
        "config": serde_json::to_value(config).unwrap_or(Value::Null),
        "timing": { "wall_seconds": wall },
    })
}

fn cmd_price_eu(
    config_path: &Path,
    components: bool,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let config = ModelConfig::load(config_path)?;
    let model = config.model()?;
    let market = config.market()?;
    let numerics = config.numerics();

    let t0 = Instant::now();
    let result = match model.kind() {
        ModelKind::MsSv => price_ms_sv(&market, &model.chain, &numerics),
        ModelKind::MsSvj => {
            let merton = MertonPricer { jump: model.jumps.unwrap() };
            price_ms_svj(&market, &model.chain, &merton, &numerics)
        }
        ModelKind::MsSvcj => price_ms_svcj_detailed(
            &market,
            &model.chain,
            model.jumps.as_ref().unwrap(),
            model.pea.as_ref().unwrap(),
            &numerics,
            components,
        ),
    }
    .map_err(CliError::from)?;
    let wall = t0.elapsed().as_secs_f64();

    let steps = model.chain.steps_for_horizon(market.maturity).map_err(CliError::from)?;
    let psi = aiv_rr_with(&model.chain, steps, numerics.key_digits, numerics.triple_cap)
        .map_err(CliError::from)?
        .0;
    let n_max = config
        .jumps()?
        .map(|j| truncate_poisson(j.intensity, market.maturity, j.truncation_eps).n_max);
    write_json(out, &price_result_json(&config, &result, model.kind(), psi.len(), n_max, wall))
}

fn cmd_price_berm(
    config_path: &Path,
    schedule: &str,
    n_list: &str,
    method: &str,
    span: Option<f64>,
    table: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let config = ModelConfig::load(config_path)?;
    let model = config.model()?;
    let market = config.market()?;
    let schedule = parse_schedule(schedule, model.chain.step())?;
    let ns = parse_usize_list(n_list, "interpolation-point")?;
    let method = match method {
        "tangent" => BermudanMethod::Tangent,
        "secant" => BermudanMethod::Secant,
        "both" => BermudanMethod::Both,
        other => {
            return Err(CliError::Validation(format!(
                "method must be tangent, secant or both, got \"{other}\""
            )))
        }
    };

    let mut runs = Vec::new();
    let mut table_rows = String::from("n,tangent,secant,tangent_seconds,secant_seconds\n");
    let mut boundary = Vec::new();
    for &n in &ns {
        let mut base = BermudanConfig::new(n, method);
        if let Some(s) = span {
            base.span_sigmas = s;
        }
        if let Some(cfg) = &config.numerics {
            if let Some(v) = cfg.hermite_order {
                base.numerics.hermite_order = v;
            }
            if let Some(v) = cfg.laguerre_order {
                base.numerics.laguerre_order = v;
            }
        }
        let side = |m: BermudanMethod| -> Result<(Option<f64>, Option<f64>, f64, Vec<(f64, Option<f64>)>), CliError> {
            let mut config_side = base.clone();
            config_side.method = m;
            let t0 = Instant::now();
            let r = price_bermudan(&model, &market, &schedule, &config_side).map_err(CliError::from)?;
            Ok((r.lower_bound, r.upper_bound, t0.elapsed().as_secs_f64(), r.exercise_boundary))
        };
        let (lower, upper, t_tan, t_sec, bound) = match method {
            BermudanMethod::Tangent => {
                let (lo, _, t, b) = side(BermudanMethod::Tangent)?;
                (lo, None, Some(t), None, b)
            }
            BermudanMethod::Secant => {
                let (_, hi, t, b) = side(BermudanMethod::Secant)?;
                (None, hi, None, Some(t), b)
            }
            BermudanMethod::Both => {
                let (lo, _, t1, b) = side(BermudanMethod::Tangent)?;
                let (_, hi, t2, _) = side(BermudanMethod::Secant)?;
                (lo, hi, Some(t1), Some(t2), b)
            }
        };
        boundary = bound;
        table_rows.push_str(&format!(
            "{n},{},{},{},{}\n",
            lower.map_or(String::new(), |v| v.to_string()),
            upper.map_or(String::new(), |v| v.to_string()),
            t_tan.map_or(String::new(), |v| format!("{v:.3}")),
            t_sec.map_or(String::new(), |v| format!("{v:.3}")),
        ));
        runs.push(json!({
            "n": n,
            "lower_bound": lower,
            "upper_bound": upper,
            "timing": { "tangent_seconds": t_tan, "secant_seconds": t_sec },
        }));
    }
    if let Some(path) = table {
        std::fs::write(path, &table_rows)
            .map_err(|e| CliError::Io(format!("write {}: {e}", path.display())))?;
    }
    let result = json!({
        "model": model.kind().to_string(),
        "schedule": { "interval": schedule.interval(), "intervals": schedule.num_intervals() },
        "runs": runs,
        "exercise_boundary": boundary
            .iter()
            .map(|(t, s)| json!({ "date": t, "boundary": s }))
            .collect::<Vec<_>>(),
    });
    write_json(out, &result)
}

#[allow(clippy::too_many_arguments)]
fn cmd_mc(
    config_path: &Path,
    substeps: usize,
    paths: usize,
    runs: usize,
    seed: Option<u64>,
    conditional: bool,
    relocate: bool,
    antithetic: bool,
    out_runs: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let config = ModelConfig::load(config_path)?;
    let model = config.model()?;
    let market = config.market()?;
    let mut sim = SimConfig::new(substeps, paths, runs, seed.unwrap_or_else(|| config.seed()));
    sim.antithetic = antithetic;

    let t0 = Instant::now();
    let estimate = if conditional {
        mc_exact_conditional(&model, &market, &sim, relocate)
    } else {
        mc_european(&model, &market, &sim)
    }
    .map_err(CliError::from)?;
    let wall = t0.elapsed().as_secs_f64();

    if let Some(path) = out_runs {
        let mut csv = String::from("run,estimate\n");
        for (i, r) in estimate.runs.iter().enumerate() {
            csv.push_str(&format!("{i},{r}\n"));
        }
        std::fs::write(path, csv)
            .map_err(|e| CliError::Io(format!("write {}: {e}", path.display())))?;
    }
    let result = json!({
        "estimator": if conditional { "exact-conditional" } else { "euler" },
        "relocate_jumps": conditional.then_some(relocate),
        "mean": estimate.mean,
        "std_err": estimate.std_err,
        "stderr_of_mean": estimate.stderr_of_mean(),
        "substeps": substeps,
        "paths": paths,
        "runs": runs,
        "seed": sim.seed,
        "timing": { "wall_seconds": wall },
    });
    write_json(out, &result)
}

#[allow(clippy::too_many_arguments)]
fn cmd_lsm(
    config_path: &Path,
    schedule: &str,
    paths: usize,
    runs: usize,
    degree: usize,
    seed: Option<u64>,
    out_runs: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let config = ModelConfig::load(config_path)?;
    let model = config.model()?;
    let market = config.market()?;
    let schedule = parse_schedule(schedule, model.chain.step())?;
    let sim = SimConfig::new(1, paths, runs, seed.unwrap_or_else(|| config.seed()));

    let t0 = Instant::now();
    let estimate = lsm_bermudan(&model, &market, &schedule, &sim, degree).map_err(CliError::from)?;
    let wall = t0.elapsed().as_secs_f64();

    if let Some(path) = out_runs {
        let mut csv = String::from("run,estimate\n");
        for (i, r) in estimate.runs.iter().enumerate() {
            csv.push_str(&format!("{i},{r}\n"));
        }
        std::fs::write(path, csv)
            .map_err(|e| CliError::Io(format!("write {}: {e}", path.display())))?;
    }
    let result = json!({
        "mean": estimate.mean,
        "std_err": estimate.std_err,
        "stderr_of_mean": estimate.stderr_of_mean(),
        "paths": paths,
        "runs": runs,
        "basis_degree": degree,
        "seed": sim.seed,
        "timing": { "wall_seconds": wall },
    });
    write_json(out, &result)
}

fn cmd_bias(config_path: &Path, nmax: Option<usize>, out: Option<&Path>) -> Result<(), CliError> {
    let config = ModelConfig::load(config_path)?;
    let model = config.model()?;
    let market = config.market()?;
    let (Some(jump), Some(pea)) = (model.jumps.as_ref(), model.pea.as_ref()) else {
        return Err(CliError::Validation(
            "the bias report needs both the jumps and pea blocks".into(),
        ));
    };
    let n_max = nmax.unwrap_or_else(|| {
        truncate_poisson(jump.intensity, market.maturity, jump.truncation_eps)
            .n_max
            .max(10)
    });
    let eb = jump_time_bias(jump, pea, market.maturity, n_max).map_err(CliError::from)?;
    let numerics = config.numerics();
    let price =
        price_ms_svcj_detailed(&market, &model.chain, jump, pea, &numerics, false)
            .map_err(CliError::from)?
            .price;
    let sigma = implied_vol(price, &market).map_err(CliError::from)?;
    let impact = sigma - (sigma * sigma - eb).max(0.0).sqrt();
    let result = json!({
        "expected_bias": eb,
        "n_max": n_max,
        "price": price,
        "implied_vol": sigma,
        "vol_impact": impact,
    });
    write_json(out, &result)
}

fn read_quotes(path: &Path) -> Result<Vec<OptionQuote>, CliError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::Io(format!("open {}: {e}", path.display())))?;
    let mut quotes = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Validation(format!("quotes csv: {e}")))?;
        if record.len() < 3 {
            return Err(CliError::Validation("quotes csv needs strike,bid,ask columns".into()));
        }
        let parse = |i: usize| -> Result<f64, CliError> {
            record[i]
                .trim()
                .parse()
                .map_err(|_| CliError::Validation(format!("bad quotes value \"{}\"", &record[i])))
        };
        quotes.push(OptionQuote::new(parse(0)?, parse(1)?, parse(2)?).map_err(CliError::from)?);
    }
    if quotes.is_empty() {
        return Err(CliError::Validation("quotes csv has no data rows".into()));
    }
    Ok(quotes)
}

fn read_closes(path: &Path) -> Result<Vec<f64>, CliError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::Io(format!("open {}: {e}", path.display())))?;
    let mut closes = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Validation(format!("prices csv: {e}")))?;
        let close_field = if record.len() >= 2 { &record[1] } else { &record[0] };
        let close: f64 = close_field
            .trim()
            .parse()
            .map_err(|_| CliError::Validation(format!("bad close value \"{close_field}\"")))?;
        closes.push(close);
    }
    Ok(closes)
}

fn cmd_calibrate(
    config_path: &Path,
    prices: Option<&Path>,
    quotes_path: &Path,
    iters: usize,
    seed: Option<u64>,
    kfence: f64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let config = ModelConfig::load(config_path)?;
    let chain = config.chain()?;
    let pea = config
        .pea()?
        .ok_or_else(|| CliError::Validation("calibration needs the pea block".into()))?;
    let market = config.market()?;
    let numerics = config.numerics();
    let frame = QuoteFrame {
        spot: market.spot,
        rate: market.rate,
        dividend_yield: market.dividend_yield,
        maturity: market.maturity,
    };
    let quotes = read_quotes(quotes_path)?;

    let split_json = match prices {
        Some(path) => {
            let closes = read_closes(path)?;
            let series =
                ReturnSeries::from_closes(closes, 1.0 / 252.0).map_err(CliError::from)?;
            let split = boxplot_split(&series, kfence).map_err(CliError::from)?;
            json!({
                "k_fence": split.k_fence,
                "q1": split.q1,
                "q3": split.q3,
                "iqr": split.iqr,
                "jump_count": split.jump_indices.len(),
                "diffusion_count": split.diffusion_indices.len(),
                "intensity": split.intensity,
                "jump_log_mean": split.jump_log_mean,
                "jump_log_var": split.jump_log_var,
            })
        }
        None => Value::Null,
    };

    let search = SearchConfig {
        iterations: iters,
        seed: seed.unwrap_or_else(|| config.seed()),
        ..SearchConfig::default()
    };
    let t0 = Instant::now();
    let result =
        calibrate_jumps(&chain, &pea, &frame, &quotes, &search, &numerics).map_err(CliError::from)?;
    let wall = t0.elapsed().as_secs_f64();

    let model_prices: Vec<Value> = quotes
        .iter()
        .map(|q| {
            let market = mssvcj_core::european::MarketSpec::call(
                frame.spot,
                q.strike,
                frame.rate,
                frame.dividend_yield,
                frame.maturity,
            )
            .map_err(CliError::from)?;
            let model = mssvcj_core::european::price_ms_svcj(
                &market,
                &chain,
                &result.jump,
                &pea,
                &numerics,
            )
            .map_err(CliError::from)?
            .price;
            Ok(json!({
                "strike": q.strike,
                "bid": q.bid,
                "ask": q.ask,
                "mid": q.mid(),
                "model": model,
                "bias_pct": 100.0 * (model - q.mid()) / q.mid(),
            }))
        })
        .collect::<Result<_, CliError>>()?;

    let value = json!({
        "boxplot": split_json,
        "search": {
            "lambda": result.jump.intensity,
            "mu": result.jump.log_mean,
            "eps2": result.jump.log_var,
            "objective": result.objective,
            "iterations": iters,
            "seed": search.seed,
            "rejected_candidates": result.rejected_candidates,
            "improvements": result.trace.len(),
        },
        "model_prices": model_prices,
        "timing": { "wall_seconds": wall },
    });
    write_json(out, &value)
}

/// Seeded chain used by the scaling bench: volatility levels drawn without
/// lattice structure so recombination cannot collapse the support below its
/// combinatorial size, and a dense random stochastic matrix.
pub fn bench_chain(num_states: usize, seed: u64) -> ChainSpec {
    use rand::{RngExt, SeedableRng};
    let mut rng = rand_pcg::Pcg64Mcg::seed_from_u64(seed ^ (num_states as u64) << 32);
    let mut states: Vec<f64> = (0..num_states)
        .map(|_| rng.random_range(0.10f64..0.80))
        .collect();
    states.sort_by(f64::total_cmp);
    for i in 1..states.len() {
        if states[i] - states[i - 1] < 1e-3 {
            states[i] = states[i - 1] + 1e-3;
        }
    }
    let transition: Vec<Vec<f64>> = (0..num_states)
        .map(|_| {
            let raw: Vec<f64> = (0..num_states).map(|_| rng.random_range(0.05f64..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / sum).collect()
        })
        .collect();
    ChainSpec::new_renormalized(states, transition, 0.01, 0).expect("bench chain construction")
}

fn hash_distribution(dist: &mssvcj_core::aiv::AivDistribution) -> String {
    let mut h = Fnv1a::new();
    for (&key, &p) in dist.sum_keys().iter().zip(dist.probs()) {
        h.write(&key.to_le_bytes());
        h.write(&((p * 1e10).round() as i64).to_le_bytes());
    }
    format!("{:016x}", h.finish())
}

/// Runs `f` repeatedly, auto-scaling the inner iteration count so each
/// measurement is long enough for the clock, and returns the median seconds
/// per call together with the last result.
fn time_with_repeats<T>(repeats: usize, mut f: impl FnMut() -> T) -> (f64, T) {
    let mut times = Vec::with_capacity(repeats);
    let mut result = None;
    for _ in 0..repeats.max(1) {
        let mut iters = 1usize;
        loop {
            let t0 = Instant::now();
            for _ in 0..iters {
                result = Some(std::hint::black_box(f()));
            }
            let dt = t0.elapsed().as_secs_f64();
            if dt > 0.025 || iters >= 4096 {
                times.push(dt / iters as f64);
                break;
            }
            let scale = (0.03 / dt.max(1e-9)).ceil() as usize;
            iters = (iters * scale.max(2)).min(4096);
        }
    }
    times.sort_by(f64::total_cmp);
    (times[times.len() / 2], result.unwrap())
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    m_list: &str,
    l_list: &str,
    algos: &str,
    repeats: usize,
    ce_cap: u64,
    triple_cap: u64,
    seed: u64,
    out: &Path,
) -> Result<(), CliError> {
    let ms = parse_usize_list(m_list, "state-count")?;
    let ls = parse_usize_list(l_list, "step-count")?;
    let algos: Vec<&str> = algos.split(',').map(str::trim).collect();
    for a in &algos {
        if *a != "ce" && *a != "rr" {
            return Err(CliError::Validation(format!("unknown algorithm \"{a}\"")));
        }
    }

    let mut csv = String::from("algo,m,L,seconds,repeats,result_hash,status\n");
    for &m in &ms {
        let chain = bench_chain(m, seed);
        for &l in &ls {
            let mut rr_hash = None;
            if algos.contains(&"rr") {
                match aiv_rr_with(&chain, l, 12, triple_cap) {
                    Ok(_) => {
                        let (secs, dist) = time_with_repeats(repeats, || {
                            aiv_rr_with(&chain, l, 12, triple_cap).unwrap().0
                        });
                        let hash = hash_distribution(&dist);
                        rr_hash = Some(hash.clone());
                        csv.push_str(&format!("rr,{m},{l},{secs:.6},{repeats},{hash},ok\n"));
                    }
                    Err(_) => {
                        csv.push_str(&format!("rr,{m},{l},,{repeats},,skipped\n"));
                    }
                }
            }
            if algos.contains(&"ce") {
                let paths = (m as f64).powi(l as i32);
                if paths > ce_cap as f64 {
                    csv.push_str(&format!("ce,{m},{l},,{repeats},,skipped\n"));
                } else {
                    let (secs, dist) =
                        time_with_repeats(repeats, || aiv_ce_with(&chain, l, 12, ce_cap).unwrap());
                    let hash = hash_distribution(&dist);
                    let status = match &rr_hash {
                        Some(rr) if *rr != hash => "mismatch",
                        _ => "ok",
                    };
                    csv.push_str(&format!("ce,{m},{l},{secs:.6},{repeats},{hash},{status}\n"));
                }
            }
        }
    }
    let mut file = std::fs::File::create(out)
        .map_err(|e| CliError::Io(format!("create {}: {e}", out.display())))?;
    file.write_all(csv.as_bytes())
        .map_err(|e| CliError::Io(format!("write {}: {e}", out.display())))?;
    Ok(())
}
