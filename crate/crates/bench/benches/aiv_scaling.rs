//! Recombination vs enumeration runtime across chain sizes.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mssvcj_core::aiv::{aiv_ce_with, aiv_rr_with};
use mssvcj_core::msvol::ChainSpec;
use rand::{RngExt, SeedableRng};

/// Non-lattice random chain so the support cannot collapse below its
/// combinatorial size.
fn chain(num_states: usize, seed: u64) -> ChainSpec {
    let mut rng = rand_pcg::Pcg64Mcg::seed_from_u64(seed ^ (num_states as u64) << 32);
    let mut states: Vec<f64> = (0..num_states).map(|_| rng.random_range(0.10f64..0.80)).collect();
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
    ChainSpec::new_renormalized(states, transition, 0.01, 0).unwrap()
}

fn bench_rr(c: &mut Criterion) {
    let mut group = c.benchmark_group("rr");
    for m in [2usize, 3, 4] {
        let ch = chain(m, 1);
        for l in [20usize, 30, 40] {
            group.bench_with_input(BenchmarkId::new(format!("m{m}"), l), &l, |b, &l| {
                b.iter(|| aiv_rr_with(&ch, l, 12, 100_000_000).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_ce(c: &mut Criterion) {
    let mut group = c.benchmark_group("ce");
    group.sample_size(10);
    for (m, l) in [(2usize, 15usize), (2, 18), (3, 12)] {
        let ch = chain(m, 1);
        group.bench_with_input(BenchmarkId::new(format!("m{m}"), l), &l, |b, &l| {
            b.iter(|| aiv_ce_with(&ch, l, 12, 100_000_000).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_rr, bench_ce);
criterion_main!(benches);
