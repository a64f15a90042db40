//! Grid-span sweep for the Bermudan rollback against reference values.
use mssvcj_core::bermudan::{price_bermudan, BermudanConfig, BermudanMethod, ExerciseSchedule};
use mssvcj_core::european::MarketSpec;
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

// published MS-SV values: [n][spot] for tangent and secant
const SPOTS: [f64; 5] = [60.0, 90.0, 100.0, 110.0, 140.0];
const NS: [usize; 3] = [50, 100, 200];
const TAN: [[f64; 5]; 3] = [
    [1.294, 9.846, 14.867, 20.848, 43.204],
    [1.302, 9.861, 14.883, 20.861, 43.212],
    [1.305, 9.864, 14.886, 20.864, 43.213],
];
const SEC: [[f64; 5]; 3] = [
    [1.328, 9.904, 14.925, 20.899, 43.234],
    [1.311, 9.875, 14.897, 20.873, 43.219],
    [1.307, 9.868, 14.890, 20.867, 43.215],
];

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let spans: Vec<f64> = if args.len() > 1 {
        args[1..].iter().map(|a| a.parse().unwrap()).collect()
    } else {
        vec![1.6, 1.8, 2.0, 2.2, 2.4, 2.8, 3.2, 4.0]
    };
    let model = ModelSpec::new(chain(), None, None).unwrap();
    let schedule = ExerciseSchedule::uniform(0.5, 6, model.chain.step()).unwrap();
    println!("sigma_bar = {:.6}", model.chain.stationary_mean_variance().sqrt());
    for &span in &spans {
        let mut worst_tan = 0.0f64;
        let mut worst_sec = 0.0f64;
        let t0 = std::time::Instant::now();
        for (ni, &n) in NS.iter().enumerate() {
            for (si, &s0) in SPOTS.iter().enumerate() {
                let market = MarketSpec::call(s0, 100.0, 0.05, 0.04, 3.0).unwrap();
                let mut config = BermudanConfig::new(n, BermudanMethod::Both);
                config.span_sigmas = span;
                let r = price_bermudan(&model, &market, &schedule, &config).unwrap();
                let dt = r.lower_bound.unwrap() - TAN[ni][si];
                let ds = r.upper_bound.unwrap() - SEC[ni][si];
                if dt.abs() > worst_tan.abs() { worst_tan = dt; }
                if ds.abs() > worst_sec.abs() { worst_sec = ds; }
                if span == spans[0] && n == 200 && s0 == 100.0 {
                    println!("  sample n=200 S0=100: tan {:.4} sec {:.4}", r.lower_bound.unwrap(), r.upper_bound.unwrap());
                }
            }
        }
        println!(
            "span {span:>4}: worst tangent dev {worst_tan:+.4}, worst secant dev {worst_sec:+.4}   ({:?})",
            t0.elapsed()
        );
    }
}
