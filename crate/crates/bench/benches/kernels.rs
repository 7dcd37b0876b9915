use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use rootshell::exponent::exponent_table;
use rootshell::geometry::mc_intersection_ratio;
use rootshell::harmonic::spherical_sl2r;
use rootshell::{CartanType, RootSystem, DEFAULT_CAP};
use rootshell_bench::{sl2_shell, system_with_levi};

fn weyl_enumerate(c: &mut Criterion) {
    let mut g = c.benchmark_group("weyl_enumerate");
    for (t, n) in [(CartanType::B, 4), (CartanType::F, 4), (CartanType::E, 6)] {
        let rs = RootSystem::split(t, n).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(rs.label()), &rs, |b, rs| b.iter(|| rs.weyl_enumerate(DEFAULT_CAP).unwrap().len()));
    }
    g.finish();
}

fn exponent(c: &mut Criterion) {
    let mut g = c.benchmark_group("exponent_table");
    g.sample_size(10);
    for (t, n) in [(CartanType::A, 3), (CartanType::B, 3), (CartanType::C, 4)] {
        let (rs, m) = system_with_levi(t, n).unwrap();
        g.bench_function(rs.label(), |b| b.iter(|| exponent_table(&rs, &m).unwrap().rows.len()));
    }
    g.finish();
}

fn spherical(c: &mut Criterion) {
    let mut g = c.benchmark_group("spherical_sl2r");
    for t in [1.0, 10.0, 30.0] {
        g.bench_with_input(BenchmarkId::from_parameter(t), &t, |b, &t| b.iter(|| spherical_sl2r(Complex64::new(2.5, 0.1), t).unwrap()));
    }
    g.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let spec = sl2_shell(8.0).unwrap();
    let h = vec![2.0, -2.0];
    let mut g = c.benchmark_group("mc_intersection");
    g.sample_size(10);
    g.bench_function("sl2_t8_1e4", |b| b.iter(|| mc_intersection_ratio(&spec, &h, 10_000, 1).unwrap().hits));
    g.finish();
}

criterion_group!(benches, weyl_enumerate, exponent, spherical, monte_carlo);
criterion_main!(benches);
