//! Order/span sweep for the co-jump Bermudan rollback against reference values.
use mssvcj_core::bermudan::{price_bermudan, BermudanConfig, BermudanMethod, ExerciseSchedule};
use mssvcj_core::european::MarketSpec;
use mssvcj_core::jumps::{JumpSpec, PeaSpec};
use mssvcj_core::model::ModelSpec;
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

const SPOTS: [f64; 5] = [60.0, 90.0, 100.0, 110.0, 140.0];
const NS: [usize; 3] = [20, 50, 100];
const TAN: [[f64; 5]; 3] = [
    [1.970, 11.624, 16.815, 22.845, 44.864],
    [2.040, 11.723, 16.911, 22.932, 44.924],
    [2.050, 11.737, 16.924, 22.945, 44.933],
];
const SEC: [[f64; 5]; 3] = [
    [2.223, 11.977, 17.154, 23.157, 45.078],
    [2.080, 11.780, 16.965, 22.982, 44.958],
    [2.060, 11.752, 16.938, 22.957, 44.941],
];

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let span: f64 = args.get(1).map(|a| a.parse().unwrap()).unwrap_or(2.05);
    let hermite: usize = args.get(2).map(|a| a.parse().unwrap()).unwrap_or(16);
    let laguerre: usize = args.get(3).map(|a| a.parse().unwrap()).unwrap_or(6);
    let jumps = JumpSpec::new(3.0, -0.025, 0.005, 5.5e-5).unwrap();
    let pea = PeaSpec::new(2.0, 250.0, 0.02).unwrap();
    let model = ModelSpec::new(chain(), Some(jumps), Some(pea)).unwrap();
    let schedule = ExerciseSchedule::uniform(0.5, 6, model.chain.step()).unwrap();
    let t0 = std::time::Instant::now();
    let mut worst_tan = 0.0f64;
    let mut worst_sec = 0.0f64;
    for (ni, &n) in NS.iter().enumerate() {
        for (si, &s0) in SPOTS.iter().enumerate() {
            let market = MarketSpec::call(s0, 100.0, 0.05, 0.04, 3.0).unwrap();
            let mut config = BermudanConfig::new(n, BermudanMethod::Both);
            config.span_sigmas = span;
            config.numerics.hermite_order = hermite;
            config.numerics.laguerre_order = laguerre;
            let r = price_bermudan(&model, &market, &schedule, &config).unwrap();
            let dt = r.lower_bound.unwrap() - TAN[ni][si];
            let ds = r.upper_bound.unwrap() - SEC[ni][si];
            if dt.abs() > worst_tan.abs() { worst_tan = dt; }
            if ds.abs() > worst_sec.abs() { worst_sec = ds; }
            if n == 100 && s0 == 100.0 {
                println!("  n=100 S0=100: tan {:.4} (ref 16.924) sec {:.4} (ref 16.938)",
                    r.lower_bound.unwrap(), r.upper_bound.unwrap());
            }
        }
    }
    println!(
        "span {span} H{hermite} L{laguerre}: worst tangent dev {worst_tan:+.4}, worst secant dev {worst_sec:+.4}  ({:?})",
        t0.elapsed()
    );
}
