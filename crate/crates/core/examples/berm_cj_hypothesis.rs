//! What variance-impact scaling reproduces the reference co-jump table?
use mssvcj_core::bermudan::{price_bermudan, BermudanConfig, BermudanMethod, ExerciseSchedule};
use mssvcj_core::european::MarketSpec;
use mssvcj_core::jumps::{JumpSpec, PeaSpec};
use mssvcj_core::model::ModelSpec;
use mssvcj_core::montecarlo::{lsm_bermudan, SimConfig};
use mssvcj_core::msvol::ChainSpec;

fn chain() -> ChainSpec {
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

fn main() {
    let jumps = JumpSpec::new(3.0, -0.025, 0.005, 5.5e-5).unwrap();
    let market = MarketSpec::call(100.0, 100.0, 0.05, 0.04, 3.0).unwrap();
    let schedule = ExerciseSchedule::uniform(0.5, 6, 0.5 / 30.0).unwrap();
    let mut config = BermudanConfig::new(100, BermudanMethod::Both);
    config.numerics.hermite_order = 12;
    config.numerics.laguerre_order = 2;

    // reference: tangent 16.924, secant 16.938, LSM 16.957 (.082)
    for (label, b) in [("b = 2 (full)", 2.0), ("b = 0 (no variance impact)", 1e-12), ("b = 2/6 (total-T scaling)", 2.0 / 6.0)] {
        let pea = PeaSpec::new(b, 250.0, 0.02).unwrap();
        let model = ModelSpec::new(chain(), Some(jumps), Some(pea)).unwrap();
        let r = price_bermudan(&model, &market, &schedule, &config).unwrap();
        println!("{label:>28}: tangent {:.4}  secant {:.4}", r.lower_bound.unwrap(), r.upper_bound.unwrap());
    }

    // our own LSM under the full dynamics
    let pea = PeaSpec::new(2.0, 250.0, 0.02).unwrap();
    let model = ModelSpec::new(chain(), Some(jumps), Some(pea)).unwrap();
    let sim = SimConfig::new(180, 100_000, 10, 31);
    let lsm = lsm_bermudan(&model, &market, &schedule, &sim, 3).unwrap();
    println!("LSM full dynamics: {:.4} (std across runs {:.4})", lsm.mean, lsm.std_err);
}
