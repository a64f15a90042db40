//! Analytic pricer throughput on the reference parameter set.

use criterion::{criterion_group, criterion_main, Criterion};
use mssvcj_core::european::{price_ms_sv, price_ms_svcj, MarketSpec};
use mssvcj_core::jumps::{JumpSpec, PeaSpec};
use mssvcj_core::model::Numerics;
use mssvcj_core::msvol::ChainSpec;

fn reference_chain() -> ChainSpec {
    ChainSpec::from_variances(
        &[0.02, 0.04, 0.06, 0.08],
        vec![
            vec![0.70, 0.15, 0.10, 0.05],
            vec![0.03, 0.90, 0.06, 0.01],
            vec![0.05, 0.05, 0.85, 0.05],
            vec![0.03, 0.07, 0.10, 0.80],
        ],
        0.25 / 30.0,
        1,
    )
    .unwrap()
}

fn bench_pricers(c: &mut Criterion) {
    let chain = reference_chain();
    let market = MarketSpec::call(50.0, 55.0, 0.05, 0.0, 0.25).unwrap();
    let jumps = JumpSpec::new(3.0, -0.025, 0.005, 5.5e-5).unwrap();
    let pea = PeaSpec::new(2.0, 250.0, 0.02).unwrap();
    let numerics = Numerics::default();

    c.bench_function("price_ms_sv", |b| {
        b.iter(|| price_ms_sv(&market, &chain, &numerics).unwrap())
    });
    c.bench_function("price_ms_svcj", |b| {
        b.iter(|| price_ms_svcj(&market, &chain, &jumps, &pea, &numerics).unwrap())
    });
}

criterion_group!(benches, bench_pricers);
criterion_main!(benches);
