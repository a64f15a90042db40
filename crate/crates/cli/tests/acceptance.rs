//! End-to-end acceptance suite: one line per criterion, exit code nonzero
//! when a gating criterion fails. Reference values come from the published
//! tables this library is validated against; tolerances are pinned here.
//!
//! Run with `cargo test --test acceptance` (or the whole workspace suite).

use std::time::Instant;

use mssvcj_core::aiv::{aiv_ce_with, aiv_rr_with, support_bound, triple_bound};
use mssvcj_core::bermudan::{price_bermudan, BermudanConfig, BermudanMethod, ExerciseSchedule};
use mssvcj_core::calibration::{calibrate_jumps, OptionQuote, QuoteFrame, SearchConfig};
use mssvcj_core::european::{
    bs_price, implied_vol, price_ms_sv, price_ms_svcj, price_ms_svj, MarketSpec, MertonPricer,
    OptionKind,
};
use mssvcj_core::jumps::{jump_time_bias, JumpSpec, PeaSpec};
use mssvcj_core::model::{ModelSpec, Numerics};
use mssvcj_core::montecarlo::{lsm_bermudan, mc_european, SimConfig};
use mssvcj_core::msvol::{evolve_distribution, ChainSpec};
use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64Mcg;

struct Gate {
    gating_failures: usize,
    notes: Vec<String>,
}

impl Gate {
    fn new() -> Self {
        Gate { gating_failures: 0, notes: Vec::new() }
    }

    fn check(&mut self, label: &str, pass: bool, gating: bool, detail: String) {
        let status = match (pass, gating) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "FAIL (non-gating)",
        };
        println!("[{status}] {label}: {detail}");
        if !pass && gating {
            self.gating_failures += 1;
            self.notes.push(format!("{label}: {detail}"));
        }
    }
}

fn table2_chain(tau: f64) -> ChainSpec {
    ChainSpec::from_variances(
        &[0.02, 0.04, 0.06, 0.08],
        vec![
            vec![0.70, 0.15, 0.10, 0.05],
            vec![0.03, 0.90, 0.06, 0.01],
            vec![0.05, 0.05, 0.85, 0.05],
            vec![0.03, 0.07, 0.10, 0.80],
        ],
        tau,
        1,
    )
    .unwrap()
}

fn table2_jumps() -> JumpSpec {
    JumpSpec::new(3.0, -0.025, 0.005, 5.5e-5).unwrap()
}

fn table2_pea() -> PeaSpec {
    PeaSpec::new(2.0, 250.0, 0.02).unwrap()
}

fn random_chain(rng: &mut Pcg64Mcg, max_states: usize, max_steps: usize) -> (ChainSpec, usize) {
    let m = rng.random_range(1usize..=max_states);
    let steps = rng.random_range(1usize..=max_steps);
    let mut states: Vec<f64> = (0..m).map(|_| rng.random_range(0.05f64..0.9)).collect();
    states.sort_by(f64::total_cmp);
    for i in 1..states.len() {
        if states[i] - states[i - 1] < 1e-4 {
            states[i] = states[i - 1] + 1e-4;
        }
    }
    let transition: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            let raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.01f64..1.0)).collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / s).collect()
        })
        .collect();
    let init = rng.random_range(0usize..m);
    (ChainSpec::new_renormalized(states, transition, 0.01, init).unwrap(), steps)
}

fn criterion_1(gate: &mut Gate) -> f64 {
    let chain = table2_chain(0.25 / 30.0);
    let market = MarketSpec::call(50.0, 55.0, 0.05, 0.0, 0.25).unwrap();
    let t0 = Instant::now();
    let result =
        price_ms_svcj(&market, &chain, &table2_jumps(), &table2_pea(), &Numerics::default())
            .unwrap();
    let wall = t0.elapsed().as_secs_f64();
    let dev = (result.price - 0.9696).abs();
    gate.check(
        "criterion 1 (European co-jump price)",
        dev < 1e-3 && wall < 60.0,
        true,
        format!("price {:.6} vs 0.9696 (|dev| {:.1e}), {:.2}s", result.price, dev, wall),
    );
    result.price
}

fn criterion_2(gate: &mut Gate, analytic: f64) {
    let chain = table2_chain(0.25 / 30.0);
    let model = ModelSpec::new(chain, Some(table2_jumps()), Some(table2_pea())).unwrap();
    let market = MarketSpec::call(50.0, 55.0, 0.05, 0.0, 0.25).unwrap();
    let sim = SimConfig::new(1500, 100_000, 10, 20240601);
    let mc = mc_european(&model, &market, &sim).unwrap();
    let bracket_lo = 0.9689 - 3.0 * mc.std_err;
    let bracket_hi = 0.9696 + 3.0 * mc.std_err;
    let in_bracket = mc.mean >= bracket_lo && mc.mean <= bracket_hi;
    let ci_half = 1.96 * mc.stderr_of_mean();
    let analytic_in_ci = (analytic - mc.mean).abs() <= ci_half;
    gate.check(
        "criterion 2 (Monte-Carlo bracketing)",
        in_bracket && analytic_in_ci,
        true,
        format!(
            "MC {:.4} (std {:.4}) in [{bracket_lo:.4}, {bracket_hi:.4}]; analytic {:.4} within 95% CI half-width {:.4}",
            mc.mean, mc.std_err, analytic, ci_half
        ),
    );
}

fn criterion_3(gate: &mut Gate) {
    let eb = jump_time_bias(&table2_jumps(), &table2_pea(), 0.25, 10).unwrap();
    let chain = table2_chain(0.25 / 30.0);
    let market = MarketSpec::call(50.0, 55.0, 0.05, 0.0, 0.25).unwrap();
    let price = price_ms_svcj(&market, &chain, &table2_jumps(), &table2_pea(), &Numerics::default())
        .unwrap()
        .price;
    let sigma = implied_vol(price, &market).unwrap();
    let impact = sigma - (sigma * sigma - eb).sqrt();
    let eb_ok = (eb - 2.07e-6).abs() < 0.01 * 2.07e-6;
    let impact_ok = (impact - 4.18e-6).abs() < 0.01 * 4.18e-6;
    gate.check(
        "criterion 3 (jump-time relocation bias)",
        eb_ok && impact_ok,
        true,
        format!("EB {eb:.4e} vs 2.07e-6; vol impact {impact:.4e} vs 4.18e-6 (sigma_imp {sigma:.4})"),
    );
}

const TABLE4_SPOTS: [f64; 5] = [60.0, 90.0, 100.0, 110.0, 140.0];
const TABLE4_NS: [usize; 3] = [50, 100, 200];
const TABLE4_TANGENT: [[f64; 5]; 3] = [
    [1.294, 9.846, 14.867, 20.848, 43.204],
    [1.302, 9.861, 14.883, 20.861, 43.212],
    [1.305, 9.864, 14.886, 20.864, 43.213],
];
const TABLE4_SECANT: [[f64; 5]; 3] = [
    [1.328, 9.904, 14.925, 20.899, 43.234],
    [1.311, 9.875, 14.897, 20.873, 43.219],
    [1.307, 9.868, 14.890, 20.867, 43.215],
];

const TABLE5_NS: [usize; 3] = [20, 50, 100];
const TABLE5_TANGENT: [[f64; 5]; 3] = [
    [1.970, 11.624, 16.815, 22.845, 44.864],
    [2.040, 11.723, 16.911, 22.932, 44.924],
    [2.050, 11.737, 16.924, 22.945, 44.933],
];
const TABLE5_SECANT: [[f64; 5]; 3] = [
    [2.223, 11.977, 17.154, 23.157, 45.078],
    [2.080, 11.780, 16.965, 22.982, 44.958],
    [2.060, 11.752, 16.938, 22.957, 44.941],
];

struct BermudanSweep {
    tangent: Vec<Vec<f64>>, // [n index][spot index]
    secant: Vec<Vec<f64>>,
    wall: f64,
}

fn bermudan_sweep(model: &ModelSpec, ns: &[usize]) -> BermudanSweep {
    let schedule = ExerciseSchedule::uniform(0.5, 6, model.chain.step()).unwrap();
    let t0 = Instant::now();
    let mut tangent = Vec::new();
    let mut secant = Vec::new();
    for &n in ns {
        let mut tan_row = Vec::new();
        let mut sec_row = Vec::new();
        for &s0 in &TABLE4_SPOTS {
            let market = MarketSpec::call(s0, 100.0, 0.05, 0.04, 3.0).unwrap();
            let config = BermudanConfig::new(n, BermudanMethod::Both);
            let r = price_bermudan(model, &market, &schedule, &config).unwrap();
            tan_row.push(r.lower_bound.unwrap());
            sec_row.push(r.upper_bound.unwrap());
        }
        tangent.push(tan_row);
        secant.push(sec_row);
    }
    BermudanSweep { tangent, secant, wall: t0.elapsed().as_secs_f64() }
}

fn criterion_4(gate: &mut Gate) -> BermudanSweep {
    let model = ModelSpec::new(table2_chain(0.5 / 30.0), None, None).unwrap();
    let sweep = bermudan_sweep(&model, &TABLE4_NS);
    let mut worst = 0.0f64;
    let mut monotone = true;
    for ni in 0..TABLE4_NS.len() {
        for si in 0..TABLE4_SPOTS.len() {
            worst = worst
                .max((sweep.tangent[ni][si] - TABLE4_TANGENT[ni][si]).abs())
                .max((sweep.secant[ni][si] - TABLE4_SECANT[ni][si]).abs());
            if ni > 0 {
                monotone &= sweep.tangent[ni][si] >= sweep.tangent[ni - 1][si] - 1e-9;
                monotone &= sweep.secant[ni][si] <= sweep.secant[ni - 1][si] + 1e-9;
            }
        }
    }
    gate.check(
        "criterion 4 (Bermudan switching-volatility table)",
        worst < 0.01 && monotone && sweep.wall < 60.0,
        true,
        format!(
            "worst |dev| {:.4} over 30 cells (tol 0.01), bounds monotone in n: {}, {:.1}s",
            worst, monotone, sweep.wall
        ),
    );
    sweep
}

fn criterion_5(gate: &mut Gate) -> BermudanSweep {
    let model = ModelSpec::new(
        table2_chain(0.5 / 30.0),
        Some(table2_jumps()),
        Some(table2_pea()),
    )
    .unwrap();
    let sweep = bermudan_sweep(&model, &TABLE5_NS);
    let mut worst = 0.0f64;
    let mut cells_out = 0usize;
    for ni in 0..TABLE5_NS.len() {
        for si in 0..TABLE4_SPOTS.len() {
            let dt = (sweep.tangent[ni][si] - TABLE5_TANGENT[ni][si]).abs();
            let ds = (sweep.secant[ni][si] - TABLE5_SECANT[ni][si]).abs();
            if dt >= 0.03 {
                cells_out += 1;
                println!(
                    "         criterion 5 detail: tangent n={} S0={} ours {:.4} published {:.4}",
                    TABLE5_NS[ni], TABLE4_SPOTS[si], sweep.tangent[ni][si], TABLE5_TANGENT[ni][si]
                );
            }
            if ds >= 0.03 {
                cells_out += 1;
                println!(
                    "         criterion 5 detail: secant n={} S0={} ours {:.4} published {:.4}",
                    TABLE5_NS[ni], TABLE4_SPOTS[si], sweep.secant[ni][si], TABLE5_SECANT[ni][si]
                );
            }
            worst = worst.max(dt).max(ds);
        }
    }
    gate.check(
        "criterion 5 (Bermudan co-jump table)",
        worst < 0.03,
        true,
        format!(
            "worst |dev| {:.4} over 30 cells (tol 0.03), {cells_out} cells outside; the published \
             bound columns sit below the published LSM column (which this implementation matches \
             at every spot) — see the decisions ledger",
            worst
        ),
    );
    sweep
}

fn criterion_6(gate: &mut Gate, table4: &BermudanSweep, table5: &BermudanSweep) {
    let sv = ModelSpec::new(table2_chain(0.5 / 30.0), None, None).unwrap();
    let svcj = ModelSpec::new(
        table2_chain(0.5 / 30.0),
        Some(table2_jumps()),
        Some(table2_pea()),
    )
    .unwrap();
    let market = MarketSpec::call(100.0, 100.0, 0.05, 0.04, 3.0).unwrap();
    let schedule = ExerciseSchedule::uniform(0.5, 6, 0.5 / 30.0).unwrap();
    let sim = SimConfig::new(1, 100_000, 10, 424242);

    // S0 = 100 column, largest n from each table
    let (tan_sv, sec_sv) = (table4.tangent[2][2], table4.secant[2][2]);
    let (tan_cj, sec_cj) = (table5.tangent[2][2], table5.secant[2][2]);

    let lsm_sv = lsm_bermudan(&sv, &market, &schedule, &sim, 3).unwrap();
    let lsm_cj = lsm_bermudan(&svcj, &market, &schedule, &sim, 3).unwrap();

    let sv_ok = lsm_sv.mean >= tan_sv - 3.0 * lsm_sv.std_err && lsm_sv.mean <= sec_sv + 3.0 * lsm_sv.std_err;
    let cj_ok = lsm_cj.mean >= tan_cj - 3.0 * lsm_cj.std_err && lsm_cj.mean <= sec_cj + 3.0 * lsm_cj.std_err;
    // error magnitudes comparable to the published (.043) / (.082)
    let spread_ok = lsm_sv.std_err < 3.0 * 0.043 && lsm_cj.std_err < 3.0 * 0.082;
    gate.check(
        "criterion 6 (LSM cross-check)",
        sv_ok && cj_ok && spread_ok,
        true,
        format!(
            "LSM {:.3} (std {:.3}) vs bounds [{:.3}, {:.3}]; co-jump LSM {:.3} (std {:.3}) vs [{:.3}, {:.3}]",
            lsm_sv.mean, lsm_sv.std_err, tan_sv, sec_sv, lsm_cj.mean, lsm_cj.std_err, tan_cj, sec_cj
        ),
    );
}

fn criteria_7_8(gate: &mut Gate) {
    let mut rng = Pcg64Mcg::seed_from_u64(20240707);
    let mut worst_prob = 0.0f64;
    let mut worst_mean = 0.0f64;
    let mut bounds_ok = true;
    let mut all_equal = true;
    for _ in 0..200 {
        let (chain, steps) = random_chain(&mut rng, 3, 12);
        let (rr, stats) = aiv_rr_with(&chain, steps, 12, 100_000_000).unwrap();
        let ce = aiv_ce_with(&chain, steps, 12, 100_000_000).unwrap();
        if rr.sum_keys() != ce.sum_keys() {
            all_equal = false;
            continue;
        }
        for ((_, p1), (_, p2)) in rr.iter().zip(ce.iter()) {
            worst_prob = worst_prob.max((p1 - p2).abs());
        }
        // independent mean oracle through the marginal state distributions
        let mut oracle = 0.0;
        let mut pi = chain.initial_distribution();
        for _ in 0..steps {
            oracle += pi.probs.iter().zip(chain.states_sq()).map(|(p, v)| p * v).sum::<f64>();
            pi = evolve_distribution(&chain, &pi, 1);
        }
        oracle /= steps as f64;
        worst_mean = worst_mean.max((rr.mean() - oracle).abs());

        let sb = support_bound(chain.num_states(), steps);
        let tb = triple_bound(chain.num_states(), steps);
        bounds_ok &= (rr.len() as u128) <= sb.value;
        bounds_ok &= (stats.total_triples as u128) <= tb.value;
        bounds_ok &= (stats.peak_live_triples as u128) <= tb.value;
    }
    gate.check(
        "criterion 7 (recombination equals enumeration)",
        all_equal && worst_prob < 1e-12 && worst_mean < 1e-12,
        true,
        format!(
            "200 random chains: supports identical {all_equal}, worst prob dev {worst_prob:.2e}, worst mean dev {worst_mean:.2e}"
        ),
    );

    // the two-state toy support
    let toy = ChainSpec::new(vec![0.2, 0.4], vec![vec![0.7, 0.3], vec![0.4, 0.6]], 0.1, 1).unwrap();
    let dist = aiv_rr_with(&toy, 3, 12, 1_000_000).unwrap().0;
    let toy_ok = dist.len() == 3
        && (dist.support()[0] - 0.08).abs() < 1e-12
        && (dist.support()[1] - 0.12).abs() < 1e-12
        && (dist.support()[2] - 0.16).abs() < 1e-12;
    gate.check(
        "criterion 8 (combinatorial bounds + toy support)",
        bounds_ok && toy_ok,
        true,
        format!("bounds held on every run: {bounds_ok}; toy support {{0.08, 0.12, 0.16}}: {toy_ok}"),
    );
}

fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn criterion_9(gate: &mut Gate) {
    // feasibility pattern
    let ce_cap = 100_000_000u64;
    let chain4 = mssvcj_cli::commands::bench_chain(4, 1);
    let ce_infeasible = (4f64).powi(16) > ce_cap as f64
        && aiv_ce_with(&chain4, 16, 12, ce_cap).is_err();
    let chain2 = mssvcj_cli::commands::bench_chain(2, 1);
    let rr2 = aiv_rr_with(&chain2, 15, 12, 100_000_000).unwrap().0;
    let ce2 = aiv_ce_with(&chain2, 15, 12, ce_cap).unwrap();
    let ce_matches = rr2.sum_keys() == ce2.sum_keys()
        && rr2.probs().iter().zip(ce2.probs()).all(|(a, b)| (a - b).abs() < 1e-12);

    // RR completes m=6, L=50
    let chain6 = mssvcj_cli::commands::bench_chain(6, 1);
    let t0 = Instant::now();
    let big = aiv_rr_with(&chain6, 50, 12, 200_000_000).unwrap();
    let big_secs = t0.elapsed().as_secs_f64();
    let big_ok = big_secs < 600.0;
    println!(
        "         criterion 9 detail: m=6 L=50 completed in {big_secs:.1}s, support {} atoms, peak {} triples",
        big.0.len(),
        big.1.peak_live_triples
    );

    // log-log slope of RR runtime in L at fixed m
    let ls = [20usize, 25, 30, 35, 40, 45, 50];
    let mut slopes_ok = true;
    let mut slope_report = String::new();
    for m in 2..=5usize {
        let chain = mssvcj_cli::commands::bench_chain(m, 1);
        let mut points = Vec::new();
        for &l in &ls {
            let mut best = f64::INFINITY;
            for _ in 0..3 {
                // scale inner iterations so each measurement is well above
                // timer resolution
                let mut iters = 1usize;
                let secs = loop {
                    let t0 = Instant::now();
                    for _ in 0..iters {
                        std::hint::black_box(aiv_rr_with(&chain, l, 12, 200_000_000).unwrap());
                    }
                    let dt = t0.elapsed().as_secs_f64();
                    if dt > 0.05 || iters >= 4096 {
                        break dt / iters as f64;
                    }
                    iters = (iters * ((0.06 / dt.max(1e-9)).ceil() as usize).max(2)).min(4096);
                };
                best = best.min(secs);
            }
            points.push(((l as f64).ln(), best.ln()));
        }
        let slope = fit_slope(&points);
        slope_report.push_str(&format!("m={m}: {slope:.2}  "));
        slopes_ok &= (slope - m as f64).abs() <= 0.5;
    }
    gate.check(
        "criterion 9 (scaling study)",
        ce_infeasible && ce_matches && big_ok && slopes_ok,
        true,
        format!(
            "CE infeasible at m=4 L=16: {ce_infeasible}; CE == RR at m=2 L=15: {ce_matches}; \
             m=6 L=50 in {big_secs:.0}s; slopes {slope_report}(target m +/- 0.5)"
        ),
    );
}

fn criterion_10(gate: &mut Gate) {
    let numerics = Numerics::default();
    let mut rng = Pcg64Mcg::seed_from_u64(31337);

    // reduction identities on the reference setup
    let chain = table2_chain(0.25 / 30.0);
    let market = MarketSpec::call(50.0, 55.0, 0.05, 0.0, 0.25).unwrap();
    let no_jumps = JumpSpec::new(0.0, -0.025, 0.005, 5.5e-5).unwrap();
    let pea0 = PeaSpec::new(0.0, 250.0, 0.02).unwrap();
    let sv = price_ms_sv(&market, &chain, &numerics).unwrap().price;
    let svcj_reduced = price_ms_svcj(&market, &chain, &no_jumps, &pea0, &numerics).unwrap().price;
    let red1 = (sv - svcj_reduced).abs() < 1e-10;

    let jumps = table2_jumps();
    let svcj_b0 = price_ms_svcj(&market, &chain, &jumps, &pea0, &numerics).unwrap().price;
    let merton = MertonPricer { jump: jumps };
    let svj = price_ms_svj(&market, &chain, &merton, &numerics).unwrap().price;
    let red2 = (svcj_b0 - svj).abs() < 1e-8;

    let single = ChainSpec::new(vec![0.2], vec![vec![1.0]], 0.25 / 30.0, 0).unwrap();
    let single_price = price_ms_sv(&market, &single, &numerics).unwrap().price;
    let bs = bs_price(50.0, 0.04, 0.05, 0.0, 0.25, 55.0, OptionKind::Call).0;
    let red3 = (single_price - bs).abs() < 1e-12;

    // put-call parity across 50 randomized configurations
    let mut worst_parity = 0.0f64;
    for _ in 0..50 {
        let (pchain, steps) = random_chain(&mut rng, 3, 10);
        let t = pchain.step() * steps as f64;
        let s0 = rng.random_range(20.0f64..150.0);
        let k = s0 * rng.random_range(0.6f64..1.4);
        let r = rng.random_range(0.0f64..0.08);
        let q = rng.random_range(0.0f64..0.05);
        let pjump = JumpSpec::new(
            rng.random_range(0.0f64..4.0),
            rng.random_range(-0.1f64..0.05),
            rng.random_range(0.0f64..0.01),
            1e-12,
        )
        .unwrap();
        let ppea = PeaSpec::new(rng.random_range(0.0f64..3.0), 250.0, t.min(0.02) * 0.5).unwrap();
        let call = MarketSpec::new(s0, k, r, q, t, OptionKind::Call).unwrap();
        let put = MarketSpec::new(s0, k, r, q, t, OptionKind::Put).unwrap();
        let c = price_ms_svcj(&call, &pchain, &pjump, &ppea, &numerics).unwrap().price;
        let p = price_ms_svcj(&put, &pchain, &pjump, &ppea, &numerics).unwrap().price;
        let forward_leg = s0 * (-q * t).exp() - k * (-r * t).exp();
        worst_parity = worst_parity.max((c - p - forward_leg).abs());
    }
    let parity_ok = worst_parity < 1e-9;

    gate.check(
        "criterion 10 (model reductions + parity)",
        red1 && red2 && red3 && parity_ok,
        true,
        format!(
            "no-jump reduction {red1}, zero-impact vs jump-diffusion {red2}, single state vs Black-Scholes {red3}, worst parity {worst_parity:.2e}"
        ),
    );
}

fn criterion_11(gate: &mut Gate) {
    // inverse crime: quotes generated by the model, tight box, tiny objective
    let chain = ChainSpec::from_variances(
        &[0.0059, 0.0151, 0.0332, 0.0577],
        vec![
            vec![0.0000, 0.9946, 0.0000, 0.0054],
            vec![0.2679, 0.6506, 0.0815, 0.0000],
            vec![0.0479, 0.0102, 0.9403, 0.0016],
            vec![0.0000, 0.0062, 0.0000, 0.9938],
        ],
        0.125 / 31.0,
        1,
    )
    .unwrap();
    let pea = PeaSpec::new(4.45, 550.0, 0.02).unwrap();
    let truth = JumpSpec::new(4.40, -0.0572, 0.0029, 5.5e-5).unwrap();
    let mut numerics = Numerics::default();
    numerics.hermite_order = 12;
    numerics.laguerre_order = 3;
    let frame = QuoteFrame { spot: 140.0, rate: 0.0236, dividend_yield: 0.0, maturity: 0.125 };
    let quotes: Vec<OptionQuote> = [130.0, 140.0, 150.0]
        .iter()
        .map(|&k| {
            let market = MarketSpec::call(frame.spot, k, frame.rate, 0.0, frame.maturity).unwrap();
            let p = price_ms_svcj(&market, &chain, &truth, &pea, &numerics).unwrap().price;
            OptionQuote::new(k, p, p).unwrap()
        })
        .collect();
    let search = SearchConfig {
        iterations: 400,
        seed: 11,
        intensity_bounds: (4.40 * 0.999, 4.40 * 1.001),
        log_mean_bounds: (-0.0572 * 1.001, -0.0572 * 0.999),
        log_var_bounds: (0.0029 * 0.999, 0.0029 * 1.001),
    };
    let recovered = calibrate_jumps(&chain, &pea, &frame, &quotes, &search, &numerics).unwrap();
    gate.check(
        "criterion 11a (inverse-crime recovery)",
        recovered.objective < 1e-8,
        true,
        format!("objective {:.2e} after {} iterations", recovered.objective, search.iterations),
    );

    // published quote table: the spot (and initial state) were never stated,
    // so scan plausible values and report the best reproduction. Non-gating.
    let published_strikes = [125.0, 130.0, 135.0, 140.0, 145.0, 150.0, 155.0, 160.0];
    let published_model: [f64; 8] = [15.83, 11.44, 7.52, 4.32, 2.10, 0.84, 0.29, 0.09];
    let published_mid: [f64; 8] = [15.95, 11.70, 7.65, 4.375, 2.115, 0.82, 0.285, 0.09];
    let published_bias_pct: [f64; 8] = [-0.75, -2.22, -1.70, -1.26, -0.71, 2.44, 1.75, 0.00];
    let mut best: Option<(f64, usize, f64)> = None; // (worst rel dev, state, spot)
    for state in 0..4 {
        let chain_s = chain.with_initial_state(state).unwrap();
        let mut spot = 130.0;
        while spot <= 150.0 {
            let mut worst = 0.0f64;
            for (i, &k) in published_strikes.iter().enumerate() {
                let market = MarketSpec::call(spot, k, frame.rate, 0.0, frame.maturity).unwrap();
                let p = price_ms_svcj(&market, &chain_s, &truth, &pea, &numerics).unwrap().price;
                // tolerance per strike: the bias the published fit itself
                // carries against the mid, floored at a penny
                let tol = (published_bias_pct[i].abs() / 100.0 * published_mid[i]).max(0.01);
                worst = worst.max((p - published_model[i]).abs() / tol);
            }
            if best.map_or(true, |(w, _, _)| worst < w) {
                best = Some((worst, state, spot));
            }
            spot += 0.125;
        }
    }
    let (worst, state, spot) = best.unwrap();
    gate.check(
        "criterion 11b (published quote table, unstated spot)",
        worst <= 1.0,
        false,
        format!(
            "best reproduction at spot {spot:.3}, initial state {state}: worst deviation {worst:.2}x the per-strike tolerance"
        ),
    );
}

fn main() {
    let t0 = Instant::now();
    let mut gate = Gate::new();

    let analytic = criterion_1(&mut gate);
    criterion_3(&mut gate);
    criteria_7_8(&mut gate);
    criterion_10(&mut gate);
    criterion_11(&mut gate);
    let table4 = criterion_4(&mut gate);
    let table5 = criterion_5(&mut gate);
    criterion_6(&mut gate, &table4, &table5);
    criterion_2(&mut gate, analytic);
    criterion_9(&mut gate);

    println!(
        "acceptance finished in {:.1}s with {} gating failure(s)",
        t0.elapsed().as_secs_f64(),
        gate.gating_failures
    );
    if gate.gating_failures > 0 {
        for note in &gate.notes {
            println!("  failing: {note}");
        }
        std::process::exit(1);
    }
}
