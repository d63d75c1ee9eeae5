use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use hwroots::enumerate::{enumerate_roots, EnumerateOptions};
use hwroots::hw::{hw_solve, HwQuery};
use hwroots::{all_roots, jet_of_expr, parse, Complex64, Poly};

fn polyroots(c: &mut Criterion) {
    let mut group = c.benchmark_group("all_roots");
    for degree in [4usize, 8, 16, 32] {
        // roots of unity scaled off the unit circle, shifted to break symmetry
        let roots: Vec<Complex64> = (0..degree)
            .map(|k| {
                Complex64::from_polar(1.3, 0.1 + k as f64 * std::f64::consts::TAU / degree as f64)
            })
            .collect();
        let p = Poly::from_roots(Complex64::new(1.0, 0.0), &roots);
        group.bench_with_input(BenchmarkId::from_parameter(degree), &p, |b, p| {
            b.iter(|| all_roots(black_box(p)).unwrap())
        });
    }
    group.finish();
}

fn series(c: &mut Criterion) {
    let f = parse("sin(z)+exp(sin(z))/sqrt(1+tanh(z))").unwrap();
    let mut group = c.benchmark_group("jet_of_expr");
    for order in [10usize, 20, 40] {
        group.bench_with_input(BenchmarkId::from_parameter(order), &order, |b, &n| {
            b.iter(|| jet_of_expr(black_box(&f), Complex64::new(0.0, 0.0), n).unwrap())
        });
    }
    group.finish();
}

fn solvers(c: &mut Criterion) {
    let lambert = HwQuery::new(vec![parse("z").unwrap()], Complex64::new(1.0, 0.0), 10).unwrap();
    c.bench_function("hw_solve lambert", |b| {
        b.iter(|| hw_solve(black_box(&lambert)).unwrap())
    });

    let cubic = parse("(z-2)*(z-3)*(z-5)").unwrap();
    let opts = EnumerateOptions::default();
    c.bench_function("enumerate cubic", |b| {
        b.iter(|| enumerate_roots(black_box(&cubic), Complex64::new(2.0, 0.0), 3, &opts).unwrap())
    });

    let trans = parse("sin(z)+exp(sin(z))/sqrt(1+tanh(z))").unwrap();
    c.bench_function("enumerate transcendental", |b| {
        b.iter(|| enumerate_roots(black_box(&trans), Complex64::new(0.5, 0.0), 4, &opts).unwrap())
    });
}

criterion_group!(benches, polyroots, series, solvers);
criterion_main!(benches);
