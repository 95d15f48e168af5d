use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use twistor_core::curvature::{action_matrix, constant_curvature, four_i_component};
use twistor_core::lie::{killing_via_ad, m_space_basis, random_so, OrthogonalComplexStructure, RANDOM_SCALE};
use twistor_core::octonion::{CrossProductAlgebra, OctonionStructure};
use twistor_core::sphere::{fd_curvature, nearly_kahler_defect, PseudoSphere};
use twistor_core::twistor::{d_omega_cyclic, horizontal_lift, nominal_t, TwistorPoint};
use twistor_core::{DiagonalMetric, GaussianStream};

fn algebra(c: &mut Criterion) {
    let g = DiagonalMetric::from_counts(4, 2);
    let mut rng = GaussianStream::new(1);
    let a = random_so(&g, &mut rng, RANDOM_SCALE);
    let b = random_so(&g, &mut rng, RANDOM_SCALE);
    c.bench_function("killing_via_ad so(4,2)", |bch| {
        bch.iter(|| killing_via_ad(&g, black_box(&a), black_box(&b)))
    });

    let j = OrthogonalComplexStructure::random(2, 1, &mut rng);
    c.bench_function("m_space_basis (2,1)", |bch| {
        bch.iter(|| m_space_basis(black_box(&j)).unwrap())
    });
    let r0 = constant_curvature(j.metric());
    c.bench_function("four_i_component dim 6", |bch| {
        bch.iter(|| four_i_component(black_box(&j), &r0))
    });
    let j4 = OrthogonalComplexStructure::random(1, 1, &mut rng);
    c.bench_function("action_matrix dim 4", |bch| bch.iter(|| action_matrix(black_box(&j4))));
}

fn twistor(c: &mut Criterion) {
    let mut rng = GaussianStream::new(2);
    let pt = TwistorPoint::random(2, 1, &mut rng);
    let x = pt.random_horizontal_vector(&mut rng);
    let y = pt.random_horizontal_vector(&mut rng);
    let hx = horizontal_lift(&pt, &x).unwrap().matrix().clone();
    let hy = horizontal_lift(&pt, &y).unwrap().matrix().clone();
    let a = pt.random_vertical(&mut rng).unwrap();
    c.bench_function("d_omega_cyclic (2,1)", |bch| {
        bch.iter(|| d_omega_cyclic(&pt, &hx, &hy, black_box(&a), nominal_t(3)))
    });
}

fn finite_differences(c: &mut Criterion) {
    let mut rng = GaussianStream::new(3);
    let s = PseudoSphere::with_signature(1, 1);
    let x = s.random_point(&mut rng);
    let [u, v, w] = [0, 1, 2].map(|_| s.random_tangent(&x, &mut rng));
    c.bench_function("fd_curvature S4_2", |bch| {
        bch.iter(|| fd_curvature(&s, black_box(&x), &u, &v, &w, 1e-3).unwrap())
    });

    let alg = CrossProductAlgebra::Split;
    let s6 = alg.sphere();
    let x = s6.random_point(&mut rng);
    let u = s6.random_tangent(&x, &mut rng);
    let j = OctonionStructure::new(alg);
    c.bench_function("nearly_kahler_defect S6_4", |bch| {
        bch.iter(|| nearly_kahler_defect(&s6, &j, black_box(&x), &u, 1e-3).unwrap())
    });
}

criterion_group!(benches, algebra, twistor, finite_differences);
criterion_main!(benches);
