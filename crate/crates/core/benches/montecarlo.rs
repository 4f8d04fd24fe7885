use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gkpforge::gkp::ElectronicCoefficients;
use gkpforge::montecarlo::{sample_kappa, Execution, SamplingSpec};
use gkpforge::resources;

fn kappa_sampling(c: &mut Criterion) {
    let chain = resources::mo_chain().unwrap();
    let coeffs = ElectronicCoefficients::bundled().unwrap();
    let base = SamplingSpec::bundled(resources::MO91_SAMPLING).unwrap();
    let mut group = c.benchmark_group("sample_kappa");
    group.sample_size(10);
    for n in [10_000usize, 100_000] {
        let mut spec = base.clone();
        spec.sample_count = n;
        for (name, exec) in [
            ("sequential", Execution::Sequential),
            ("parallel", Execution::Parallel),
        ] {
            group.bench_with_input(BenchmarkId::new(name, n), &spec, |b, s| {
                b.iter(|| sample_kappa(&chain, &coeffs, s, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, kappa_sampling);
criterion_main!(benches);
