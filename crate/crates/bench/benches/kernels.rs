use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use mmot_core::mmot::{build_qsigma, f_sigma_n, relaxed_cn};
use mmot_core::packing::{candidate_grid, pack_count_2d, weighted_pack_1d, w2_to_separated, AxisBox, BoundaryMode, Measure1d, PackingInstance};
use mmot_core::qp;
use mmot_core::radial::{solve_radial, RadialPotential};
use mmot_core::{CostKind, CostSpec, DiscreteMeasure};

fn line_measure(m: usize) -> DiscreteMeasure {
    let points = (0..m).map(|i| vec![i as f64]).collect();
    DiscreteMeasure::new(1, points, vec![1.0 / m as f64; m]).unwrap()
}

fn relaxed(c: &mut Criterion) {
    let cost = CostSpec::new(CostKind::Exponential { a: 1.0 }).unwrap();
    let mut g = c.benchmark_group("relaxed_cn");
    for (m, n) in [(2, 8), (3, 6), (4, 5)] {
        let rho = line_measure(m);
        g.bench_with_input(BenchmarkId::from_parameter(format!("m{m}_N{n}")), &n, |b, &n| b.iter(|| relaxed_cn(&cost, black_box(&rho), n).unwrap()));
    }
    g.finish();
}

fn f_sigma(c: &mut Criterion) {
    let cost = CostSpec::new(CostKind::Exponential { a: 0.5 }).unwrap();
    let q = build_qsigma(&cost, &line_measure(3).points);
    c.bench_function("f_sigma_n/m3_N6", |b| b.iter(|| f_sigma_n(&q, 6, black_box(&[2.0, 1.5, 2.5])).unwrap()));
}

fn quadratic_program(c: &mut Criterion) {
    let n = 40;
    let cost = CostSpec::new(CostKind::Exponential { a: 2.0 }).unwrap();
    let l: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| cost.value((i as f64 - j as f64).abs() / 10.0)).collect()).collect();
    let v: Vec<f64> = (0..n).map(|i| 1.0 - (i as f64 / n as f64 - 0.5).powi(2)).collect();
    c.bench_function("qp_maximize/n40", |b| b.iter(|| qp::maximize(black_box(&l), &v, 0)));
}

fn radial(c: &mut Criterion) {
    let pot = RadialPotential::v2();
    c.bench_function("solve_radial/v2", |b| b.iter(|| solve_radial(&pot, black_box(3.0)).unwrap()));
}

fn packing(c: &mut Criterion) {
    let line = PackingInstance::new(vec![AxisBox::interval(0.0, 1.0).unwrap()], 0.01, BoundaryMode::Points).unwrap();
    let cands = candidate_grid(&line, 0.0025, &[]).unwrap();
    let values: Vec<f64> = cands.iter().map(|x| 1.0 + x).collect();
    c.bench_function("weighted_pack_1d/N50", |b| b.iter(|| weighted_pack_1d(&line, black_box(&cands), &values, 50).unwrap()));

    let square = PackingInstance::new(vec![AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()], 0.05, BoundaryMode::Points).unwrap();
    c.bench_function("pack_count_2d/eps0.05", |b| b.iter(|| pack_count_2d(black_box(&square)).unwrap()));

    let rho = Measure1d::uniform(0.0, 0.4);
    c.bench_function("w2_to_separated/N1000", |b| b.iter(|| w2_to_separated(black_box(&rho), 1000, 0.0008, (0.0, 1.0)).unwrap()));
}

criterion_group!(benches, relaxed, f_sigma, quadratic_program, radial, packing);
criterion_main!(benches);
