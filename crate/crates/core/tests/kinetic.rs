//! Kinetic simulator: initial marginals, conservation, histogram identities
//! and estimator consistency.

use specdiff_core::kinetic::*;
use specdiff_core::stats::ks_one_sample;
use specdiff_core::DomainShape;
use std::f64::consts::PI;

fn disk_law() -> InitialLaw {
    InitialLaw::UniformBall { center: vec![0.0, 0.0], radius: 1.0 }
}

#[test]
fn initial_marginals() {
    let n = 100_000;
    let ens = init_ensemble(n, &disk_law(), DomainShape::UnitBall(2), 0.75, 0.1, 11).unwrap();
    assert_eq!(ens.mass(), 1.0);
    let dens = density(&ens, &HistogramGrid::DiskCartesian { n: 8 }).unwrap();
    for (c, v) in dens.counts.iter().zip(&dens.volumes) {
        let expected = n as f64 * v / PI;
        assert!((*c as f64 - expected).abs() <= 4.0 * expected.sqrt(), "{c} vs {expected}");
    }
    // velocity characteristic function against exp(-|xi|^{2s} / 2s)
    for xi in [[0.5, 0.0], [0.7, -0.7], [0.0, 2.0]] {
        let emp: f64 = ens.particles.iter().map(|p| (xi[0] * p.v[0] + xi[1] * p.v[1]).cos()).sum::<f64>() / n as f64;
        let norm: f64 = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
        let exact = (-norm.powf(1.5) / 1.5).exp();
        assert!((emp - exact).abs() <= 3.0 / (n as f64).sqrt(), "xi={xi:?}: {emp} vs {exact}");
    }
}

#[test]
fn cauchy_velocity_marginal() {
    let n = 100_000;
    let law = InitialLaw::UniformBox { lo: vec![0.0], hi: vec![1.0] };
    let ens = init_ensemble(n, &law, DomainShape::HalfSpace(1), 0.5, 0.1, 12).unwrap();
    let v: Vec<f64> = ens.particles.iter().map(|p| p.v[0]).collect();
    let d = ks_one_sample(&v, |t| 0.5 + t.atan() / PI);
    assert!(d <= 0.01, "KS distance {d}");
    let x: Vec<f64> = ens.particles.iter().map(|p| p.x[0]).collect();
    assert!(ks_one_sample(&x, |t| t.clamp(0.0, 1.0)) <= 0.01);
}

#[test]
fn histogram_moments() {
    let mut ens = init_ensemble(20_000, &InitialLaw::UniformBox { lo: vec![0.0], hi: vec![1.0] }, DomainShape::HalfSpace(1), 0.6, 0.3, 3).unwrap();
    for _ in 0..20 {
        step(&mut ens, 1e-2, DomainShape::HalfSpace(1), BoundaryCondition::Specular).unwrap();
    }
    let d = density(&ens, &HistogramGrid::Interval { lo: 0.0, hi: 4.0, n: 64 }).unwrap();
    assert!(d.rho.iter().all(|r| *r >= 0.0));
    assert!((d.histogram_mass() + d.overflow - d.mass).abs() < 1e-12);

    let point = init_ensemble(100, &InitialLaw::Point(vec![0.1, -0.2]), DomainShape::UnitBall(2), 0.5, 0.1, 0).unwrap();
    let d = density(&point, &HistogramGrid::DiskCartesian { n: 16 }).unwrap();
    assert_eq!(d.counts.iter().filter(|c| **c > 0).count(), 1);
    assert!((d.histogram_mass() - 1.0).abs() < 1e-12);
}

#[test]
fn conservation_laws() {
    let mut spec = init_ensemble(5_000, &disk_law(), DomainShape::UnitBall(2), 0.5, 0.2, 5).unwrap();
    let mut abs = spec.clone();
    let mut last = abs.alive_count();
    for _ in 0..200 {
        let st = step(&mut spec, 1e-3, DomainShape::UnitBall(2), BoundaryCondition::Specular).unwrap();
        assert_eq!(st.alive_after, 5_000);
        let st = step(&mut abs, 1e-3, DomainShape::UnitBall(2), BoundaryCondition::Absorb).unwrap();
        assert!(st.alive_after <= last);
        last = st.alive_after;
    }
    assert!(spec.particles.iter().all(|p| p.x[0].hypot(p.x[1]) <= 1.0));
    assert!(abs.particles.iter().filter(|p| p.alive).all(|p| p.x[0].hypot(p.x[1]) <= 1.0));
}

#[test]
fn same_seed_same_ensemble() {
    let run = || {
        let mut e = init_ensemble(2_000, &disk_law(), DomainShape::UnitBall(2), 0.7, 0.1, 42).unwrap();
        for _ in 0..20 {
            step(&mut e, 1e-3, DomainShape::UnitBall(2), BoundaryCondition::Absorb).unwrap();
        }
        e
    };
    assert_eq!(run(), run());
}

#[test]
fn pure_equilibrium_ensemble_has_unit_norm() {
    // rho uniform on [0, 1]: int int f^2 / F = int rho^2 = mass^2 = 1
    let law = InitialLaw::UniformBox { lo: vec![0.0], hi: vec![1.0] };
    let ens = init_ensemble(200_000, &law, DomainShape::HalfSpace(1), 0.5, 0.1, 8).unwrap();
    let grid = PhaseGrid { space: HistogramGrid::Interval { lo: 0.0, hi: 1.0, n: 10 }, n_speed: 20, n_angle: 1 };
    let r = weighted_l2(&ens, &grid).unwrap();
    assert!((r.value - 1.0).abs() < 4.0 * r.stderr + 1e-2, "{r:?}");
}

#[test]
fn doubling_n_stays_within_noise() {
    let base = LimitStudyConfig {
        eps_list: vec![0.2],
        t_final: 0.1,
        dt: 2e-3,
        n: 20_000,
        ..LimitStudyConfig::half_line_specular()
    };
    let a = limit_study(&base).unwrap()[0];
    let b = limit_study(&LimitStudyConfig { n: 40_000, ..base }).unwrap()[0];
    // both errors are (bias^2 + floor^2)^{1/2} up to fluctuations
    let bias_a = (a.l2_error.powi(2) - a.mc_stderr.powi(2)).max(0.0).sqrt();
    let bias_b = (b.l2_error.powi(2) - b.mc_stderr.powi(2)).max(0.0).sqrt();
    assert!((bias_a - bias_b).abs() <= 3.0 * a.mc_stderr, "{a:?} {b:?}");
}
