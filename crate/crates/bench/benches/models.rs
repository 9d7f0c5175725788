use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use spindle_bench::paired_sample;
use spindle_core::design::{self, DesignConstraints};
use spindle_core::geometry::{PouchGeometry, VolumeModelConfig};
use spindle_core::pneumatics::{self, PneumaticCircuit};
use spindle_core::{pouch, stats};

fn models(c: &mut Criterion) {
    let g = PouchGeometry::haa_pouch();
    let h_max = 2.0 * g.r4();
    c.bench_function("pouch_curve_1001", |b| {
        b.iter(|| pouch::force_height_curve(&g, black_box(90.0), 0.0, h_max, 1001).unwrap())
    });

    let circuit = PneumaticCircuit::default();
    let mut slow = c.benchmark_group("slow");
    slow.sample_size(10);
    slow.bench_function("step_response_6s", |b| {
        b.iter(|| {
            pneumatics::step_response(&circuit, black_box(90.0), 6.0, pneumatics::DEFAULT_DT)
                .unwrap()
        })
    });
    let constraints = DesignConstraints::reference_box(9.0, 50.0);
    let cfg = VolumeModelConfig::default();
    slow.bench_function("optimize_spindle", |b| {
        b.iter(|| design::optimize_spindle(black_box(&constraints), &cfg).unwrap())
    });
    slow.finish();

    let pairs = paired_sample(25);
    c.bench_function("wilcoxon_exact_n25", |b| {
        b.iter(|| stats::wilcoxon_signed_rank(black_box(&pairs)).unwrap())
    });
}

criterion_group!(benches, models);
criterion_main!(benches);
