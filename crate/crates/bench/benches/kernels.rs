use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use sqzq_core::fields::Rectangle;
use sqzq_core::nonsepstates::{self, NonSepParams};
use sqzq_core::pdm::{self, SolverOptions};
use sqzq_core::quantmap::{self, ClassicalFunction, StateFamily};
use sqzq_core::onemode::SqueezeParameter;
use sqzq_core::sepstates::PhasePoint;
use sqzq_core::C64;

fn params() -> NonSepParams {
    NonSepParams::from_taus([C64::new(0.3, 0.2), C64::new(-0.4, 0.1)], [0.9, 1.2], 1.0, 0.7).unwrap()
}

fn overlaps(c: &mut Criterion) {
    let p = params();
    let (a, b) = (PhasePoint::new(0.1, -0.2, 0.3, 0.0), PhasePoint::new(-0.4, 0.2, 0.1, 0.5));
    c.bench_function("nonsep_overlap_closed", |bn| bn.iter(|| nonsepstates::nonsep_overlap_sq_closed(black_box(a), b, &p)));
    c.bench_function("nonsep_overlap_gaussian_integral", |bn| bn.iter(|| nonsepstates::nonsep_overlap_sq(black_box(a), b, &p)));
}

fn portraits(c: &mut Criterion) {
    let p = params();
    let r = Rectangle::centred([0.8, 0.5]);
    let pt = PhasePoint::new(0.2, 0.1, 0.0, 0.0);
    c.bench_function("coupled_portrait_box", |bn| bn.iter(|| nonsepstates::nonsep_portrait_hq(&r, black_box(pt), &p)));
    let (m, s) = pdm::fig6_params().unwrap();
    let semi = pdm::SemiclassicalModel::new(m, s).unwrap();
    c.bench_function("landscape", |bn| bn.iter(|| semi.landscape(black_box([0.3, -0.2]))));
}

fn fock(c: &mut Criterion) {
    let p = params();
    let alpha = [C64::new(0.5, 0.2), C64::new(-0.3, 0.4)];
    let mut g = c.benchmark_group("fock");
    g.sample_size(10);
    g.bench_function("bogoliubov_n40", |bn| bn.iter(|| nonsepstates::bogoliubov_check(&p, black_box(alpha), 40)));
    let one = SqueezeParameter::from_tau(C64::new(0.5, 0.0), 1.0, 1.0).unwrap();
    g.bench_function("quantise_qp_nmax8", |bn| {
        bn.iter(|| quantmap::quantise(&ClassicalFunction::qp(), &StateFamily::OneMode(one), black_box(8)))
    });
    g.finish();
}

fn dynamics(c: &mut Criterion) {
    let fig6c = pdm::preset("fig6c").unwrap();
    let fig3c = pdm::preset("fig3c").unwrap();
    let mut g = c.benchmark_group("dynamics");
    g.sample_size(20);
    g.bench_function("fig6c_semiclassical", |bn| bn.iter(|| fig6c.run(SolverOptions::default())));
    g.bench_function("fig3c_classical", |bn| bn.iter(|| fig3c.run(SolverOptions::default())));
    g.finish();
}

criterion_group!(benches, overlaps, portraits, fock, dynamics);
criterion_main!(benches);
