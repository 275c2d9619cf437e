use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use chp_core::exec::Execution;
use chp_core::hawkes::HawkesParams;
use chp_core::kernels::KernelSpec;
use chp_core::chains::TickChainParams;
use chp_core::mc::{self, MCConfig};
use chp_core::price::PriceModel;
use chp_core::reference;

fn day1() -> PriceModel {
    let hawkes = HawkesParams::new(
        reference::BASELINE[0],
        KernelSpec::exponential(reference::ALPHA[0], reference::BETA[0]).unwrap(),
    )
    .unwrap();
    let (p, q) = reference::TRANSITIONS[0];
    PriceModel::chp(hawkes, TickChainParams::new(reference::TICK_SIZE, p, q).unwrap(), 24.5)
}

fn replications(c: &mut Criterion) {
    let model = day1();
    let mut group = c.benchmark_group("fclt_replications");
    group.sample_size(10);
    for (label, workers) in [("sequential", Some(1)), ("parallel", None)] {
        let config = MCConfig::new(64, 20_000.0, 1.0, 7).unwrap().with_workers(workers);
        let label = match config.execution() {
            Execution::Sequential => label.to_string(),
            Execution::Parallel(_) => format!("{label}-{}t", std::thread::available_parallelism().map_or(1, |n| n.get())),
        };
        group.bench_with_input(BenchmarkId::from_parameter(label), &config, |b, config| {
            b.iter(|| mc::verify_fclt_model(config, &model).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, replications);
criterion_main!(benches);
