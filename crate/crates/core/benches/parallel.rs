// Learning and cross-validation on one rayon thread versus the default
// pool. Built with `--no-default-features` both arms run the sequential
// fallback, which gives the baseline for the parallel build.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use idt_core::harness::{run_experiment, ExperimentConfig, FoldPlan, Variant};
use idt_core::idt::{learn_idt, FinalTarget, IdtConfig};
use idt_core::logic::parse_formula;
use idt_core::synth::{gen_bamultishapes, gen_er_dataset};

fn pools() -> Vec<(String, rayon::ThreadPool)> {
    // at least two threads so the comparison exists on single-core hosts
    let default = rayon::current_num_threads().max(2);
    let backend = if idt_core::par::is_parallel() { "rayon" } else { "sequential" };
    [1, default]
        .into_iter()
        .map(|n| (format!("{backend}/{n}t"), rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap()))
        .collect()
}

fn learn(c: &mut Criterion) {
    let ds = gen_bamultishapes(300, 1).unwrap();
    let mut group = c.benchmark_group("learn_idt_bamultishapes_300");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| learn_idt(&ds, None, FinalTarget::TrueLabels, &IdtConfig::default()).unwrap()))
        });
    }
    group.finish();
}

fn cross_validate(c: &mut Criterion) {
    let ds = gen_er_dataset(300, 13, 0.5, &parse_formula("1 U1 > 0.5").unwrap(), 1).unwrap();
    let plan = FoldPlan::new(ds.len(), 5, 0).unwrap();
    let mut group = c.benchmark_group("cv5_psi0_300");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| run_experiment(&ds, &[Variant::True], &plan, None, &ExperimentConfig::default()).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, learn, cross_validate);
criterion_main!(benches);
