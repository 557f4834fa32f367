//! Parallel-versus-sequential lanes of the data-parallel workloads. The two
//! lanes are bit-identical in output (asserted here before timing), so the
//! benches measure pure scheduling overhead and speedup.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use market_model::exec;
use market_model::model::{BuyerGroup, CostModel, Population, ProductLine};
use market_model::montecarlo::{simulate_market, simulate_market_seq};
use market_model::optimizer::maximize_qualities;
use market_model::spam::{spam_best_m, SpamScenario};

type ScanFn<'a> = &'a (dyn Fn(usize) -> (u64, f64) + Send + Sync);

fn two_group(c2: f64) -> Population {
    Population::new(
        vec![
            BuyerGroup::new(0.2, 0.5, 1.0 - c2).unwrap(),
            BuyerGroup::new(3.0, 3.0, c2).unwrap(),
        ],
        1,
    )
    .unwrap()
}

fn bench_monte_carlo(c: &mut Criterion) {
    let pop = two_group(0.4);
    let cost = CostModel::independent(0.002).unwrap();
    let line = ProductLine::new(vec![0.15, 0.7]).unwrap();
    let n = 200_000u64;
    assert_eq!(
        simulate_market(&line, &pop, &cost, n, 1).unwrap(),
        simulate_market_seq(&line, &pop, &cost, n, 1).unwrap()
    );

    let mut group = c.benchmark_group("simulate_market_200k");
    group.sample_size(20);
    group.bench_function(BenchmarkId::from_parameter(lane()), |b| {
        b.iter(|| simulate_market(&line, &pop, &cost, n, 1).unwrap())
    });
    group.bench_function(BenchmarkId::from_parameter("sequential"), |b| {
        b.iter(|| simulate_market_seq(&line, &pop, &cost, n, 1).unwrap())
    });
    group.finish();
}

fn bench_quality_sweep(c: &mut Criterion) {
    let cost = CostModel::independent(0.002).unwrap();
    let points = 32usize;
    let sweep = |mapper: fn(usize, &(dyn Fn(usize) -> f64 + Send + Sync)) -> Vec<f64>| {
        let f = |i: usize| {
            let c2 = i as f64 / (points - 1) as f64;
            maximize_qualities(2, &two_group(c2), &cost, None, 1.0)
                .unwrap()
                .global_value
        };
        mapper(points, &f)
    };
    let par = sweep(|n, f| exec::map_indexed(n, f));
    let seq = sweep(|n, f| exec::map_indexed_seq(n, f));
    assert_eq!(par, seq);

    let mut group = c.benchmark_group("two_variant_sweep_32pts");
    group.sample_size(10);
    group.bench_function(BenchmarkId::from_parameter(lane()), |b| {
        b.iter(|| sweep(|n, f| exec::map_indexed(n, f)))
    });
    group.bench_function(BenchmarkId::from_parameter("sequential"), |b| {
        b.iter(|| sweep(|n, f| exec::map_indexed_seq(n, f)))
    });
    group.finish();
}

fn bench_spam_scan(c: &mut Criterion) {
    let scenario = SpamScenario::new(0.3, 1e-4).unwrap();
    let grid: Vec<f64> = (1..=2000).map(|i| i as f64 * 4e-4).collect();
    let scan =
        |mapper: fn(usize, ScanFn) -> Vec<(u64, f64)>| {
            let f = |i: usize| spam_best_m(grid[i], &scenario).unwrap();
            mapper(grid.len(), &f)
        };
    assert_eq!(
        scan(|n, f| exec::map_indexed(n, f)),
        scan(|n, f| exec::map_indexed_seq(n, f))
    );

    let mut group = c.benchmark_group("spam_scan_2000pts");
    group.sample_size(20);
    group.bench_function(BenchmarkId::from_parameter(lane()), |b| {
        b.iter(|| scan(|n, f| exec::map_indexed(n, f)))
    });
    group.bench_function(BenchmarkId::from_parameter("sequential"), |b| {
        b.iter(|| scan(|n, f| exec::map_indexed_seq(n, f)))
    });
    group.finish();
}

fn lane() -> &'static str {
    if cfg!(feature = "parallel") {
        "parallel"
    } else {
        "sequential-fallback"
    }
}

criterion_group!(
    benches,
    bench_monte_carlo,
    bench_quality_sweep,
    bench_spam_scan
);
criterion_main!(benches);
