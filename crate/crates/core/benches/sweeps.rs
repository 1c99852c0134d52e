//! Sequential against rayon-parallel execution of the data-parallel sweeps.
//! Without the `parallel` feature both variants run sequentially.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use refraction_billiard::orbit::section;
use refraction_billiard::return_map::jacobian_grid;
use refraction_billiard::{BoundaryState, Execution, MapMethod, PerturbationProfile, PhysParams};

fn params() -> PhysParams {
    PhysParams::new(2.5, 2.0, 2.0, 1.0).unwrap()
}

fn grid(n: usize, frac: f64) -> Vec<BoundaryState> {
    let ic = params().action_bound();
    (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            let xi = std::f64::consts::TAU * i as f64 / n as f64;
            let a = -frac * ic + 2.0 * frac * ic * j as f64 / (n - 1) as f64;
            BoundaryState::new(xi, a)
        })
        .collect()
}

const STRATEGIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn section_sweep(c: &mut Criterion) {
    let p = params();
    let b = PerturbationProfile::cosine(0.02, 2).unwrap();
    let starts = grid(4, 0.7);
    let mut g = c.benchmark_group("section_16x20");
    g.sample_size(10);
    for (name, exec) in STRATEGIES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |bch, &exec| {
            bch.iter(|| section(black_box(&starts), 20, &b, &p, MapMethod::Numeric, exec))
        });
    }
    g.finish();
}

fn closed_form_section(c: &mut Criterion) {
    let p = params();
    let b = PerturbationProfile::circle();
    let starts = grid(16, 0.9);
    let mut g = c.benchmark_group("closed_form_section_256x200");
    for (name, exec) in STRATEGIES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |bch, &exec| {
            bch.iter(|| section(black_box(&starts), 200, &b, &p, MapMethod::ClosedForm, exec))
        });
    }
    g.finish();
}

fn jacobian_sweep(c: &mut Criterion) {
    let p = params();
    let b = PerturbationProfile::cosine(0.02, 2).unwrap();
    let states = grid(3, 0.7);
    let mut g = c.benchmark_group("jacobian_9");
    g.sample_size(10);
    for (name, exec) in STRATEGIES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |bch, &exec| {
            bch.iter(|| jacobian_grid(black_box(&states), &b, &p, MapMethod::Numeric, 1e-5, exec))
        });
    }
    g.finish();
}

criterion_group!(benches, closed_form_section, section_sweep, jacobian_sweep);
criterion_main!(benches);
