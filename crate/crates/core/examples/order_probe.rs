//! Order sensitivity of the half-year co-jump pricing operator.
use mssvcj_core::european::{price_ms_svcj, MarketSpec};
use mssvcj_core::jumps::{JumpSpec, PeaSpec};
use mssvcj_core::model::Numerics;
use mssvcj_core::msvol::ChainSpec;

fn main() {
    let chain = ChainSpec::from_variances(
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
    .unwrap();
    let jumps = JumpSpec::new(3.0, -0.025, 0.005, 5.5e-5).unwrap();
    let pea = PeaSpec::new(2.0, 250.0, 0.02).unwrap();
    // strikes across the rollback's active range, spots likewise
    let cases: Vec<(f64, f64)> = vec![
        (60.0, 100.0), (100.0, 100.0), (140.0, 100.0),
        (100.0, 60.0), (100.0, 140.0), (45.0, 100.0), (220.0, 100.0),
    ];
    let reference: Vec<f64> = cases
        .iter()
        .map(|&(s, k)| {
            let market = MarketSpec::call(s, k, 0.05, 0.04, 0.5).unwrap();
            let mut num = Numerics::default();
            num.hermite_order = 64;
            num.laguerre_order = 32;
            price_ms_svcj(&market, &chain, &jumps, &pea, &num).unwrap().price
        })
        .collect();
    for (h, l) in [(40usize, 40usize), (24, 8), (16, 6), (16, 2), (12, 3), (12, 2), (8, 2), (8, 1), (6, 2)] {
        let mut worst = 0.0f64;
        for (ci, &(s, k)) in cases.iter().enumerate() {
            let market = MarketSpec::call(s, k, 0.05, 0.04, 0.5).unwrap();
            let mut num = Numerics::default();
            num.hermite_order = h;
            num.laguerre_order = l;
            let p = price_ms_svcj(&market, &chain, &jumps, &pea, &num).unwrap().price;
            worst = worst.max((p - reference[ci]).abs());
        }
        println!("H{h:>2} L{l:>2}: worst abs dev {worst:.3e}");
    }
}
