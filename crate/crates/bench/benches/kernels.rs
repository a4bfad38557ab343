use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use specdiff_bench::disk_phase_points;
use specdiff_core::geometry::{eta_disk, jacobian_disk, second_derivative_disk, trace_eta};
use specdiff_core::kinetic::{init_ensemble, step, BoundaryCondition, InitialLaw};
use specdiff_core::macroscopic::{assemble_operator, BcKind, HeatProblem};
use specdiff_core::operators::{apply_specular_op, GridFunction, OperatorConfig, RadialCosine};
use specdiff_core::rng::aux_stream;
use specdiff_core::stable::{ou_step_in_place, sample_equilibrium, EquilibriumSpec};
use specdiff_core::DomainShape;
use std::hint::black_box;

fn geometry(c: &mut Criterion) {
    let mut group = c.benchmark_group("eta");
    for speed in [1.0, 10.0, 100.0] {
        let pts = disk_phase_points(256, speed, 1);
        group.bench_with_input(BenchmarkId::new("closed_form", speed), &pts, |b, pts| {
            b.iter(|| pts.iter().map(|(x, v)| eta_disk(x, v).unwrap().endpoint[0]).sum::<f64>())
        });
        group.bench_with_input(BenchmarkId::new("stepper", speed), &pts, |b, pts| {
            b.iter(|| pts.iter().map(|(x, v)| trace_eta(DomainShape::UnitBall(2), x, v).unwrap().endpoint[0]).sum::<f64>())
        });
    }
    group.finish();

    let pts = disk_phase_points(256, 5.0, 2);
    c.bench_function("jacobian_disk", |b| {
        b.iter(|| pts.iter().filter_map(|(x, v)| jacobian_disk(x, v).ok()).map(|j| j.det_v).sum::<f64>())
    });
    c.bench_function("second_derivative_disk", |b| {
        b.iter(|| pts.iter().filter_map(|(x, v)| second_derivative_disk(x, v).ok()).map(|d| d[0][0][0]).sum::<f64>())
    });
}

fn sampling(c: &mut Criterion) {
    let spec = EquilibriumSpec::new(0.75, 2).unwrap();
    c.bench_function("sample_equilibrium_10k_d2", |b| {
        let mut rng = aux_stream(3, 0);
        b.iter(|| sample_equilibrium(&spec, 10_000, &mut rng).unwrap())
    });
    c.bench_function("ou_step_10k_d2", |b| {
        let mut rng = aux_stream(4, 0);
        let mut vs = sample_equilibrium(&spec, 10_000, &mut rng).unwrap();
        b.iter(|| {
            for v in vs.iter_mut() {
                ou_step_in_place(v, 1e-2, 0.75, &mut rng);
            }
        })
    });
}

fn operators(c: &mut Criterion) {
    let cfg = OperatorConfig::new(2, 0.6).unwrap();
    let psi = RadialCosine { dim: 2, m: 1.0 };
    let mut group = c.benchmark_group("specular_op_disk");
    for x in [[0.0, 0.0], [0.0, 0.9], [0.0, 0.999]] {
        group.bench_with_input(BenchmarkId::from_parameter(x[1]), &x, |b, x| {
            b.iter(|| apply_specular_op(DomainShape::UnitBall(2), &psi, black_box(x), &cfg).unwrap())
        });
    }
    group.finish();
}

fn kinetic(c: &mut Criterion) {
    let disk = DomainShape::UnitBall(2);
    let law = InitialLaw::UniformBall { center: vec![0.0, 0.0], radius: 1.0 };
    let mut group = c.benchmark_group("kinetic_step_10k");
    for (name, bc) in [("specular", BoundaryCondition::Specular), ("absorb", BoundaryCondition::Absorb)] {
        group.bench_function(name, |b| {
            let mut ens = init_ensemble(10_000, &law, disk, 0.5, 0.1, 5).unwrap();
            b.iter(|| step(&mut ens, 1e-3, disk, bc).unwrap())
        });
    }
    group.finish();
}

fn macroscopic(c: &mut Criterion) {
    let rho = GridFunction { lo: vec![-1.0, -1.0], h: vec![2.0, 2.0], shape: vec![2, 2], values: vec![1.0; 4] };
    let mut group = c.benchmark_group("assemble");
    group.sample_size(10);
    for (name, bc) in [("dirichlet_disk", BcKind::DirichletExterior), ("specular_disk", BcKind::Specular)] {
        let mut p = HeatProblem::new(DomainShape::UnitBall(2), bc, 0.5, rho.clone(), 0.1).unwrap();
        p.grid_n = 16;
        group.bench_function(name, |b| b.iter(|| assemble_operator(&p).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, geometry, sampling, operators, kinetic, macroscopic);
criterion_main!(benches);
