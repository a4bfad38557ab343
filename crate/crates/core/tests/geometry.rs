//! Trajectory maps through the public API: worked examples from hand
//! constructions, the stepper as an independent oracle and reverse-map
//! identities.

use specdiff_core::geometry::*;
use specdiff_core::DomainShape;

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn hand_constructed_disk_trajectories() {
    let disk = DomainShape::UnitBall(2);
    // first hit (1/2, sqrt(3)/2), reflected direction (-sqrt(3)/2, -1/2),
    // remaining length 1 - sqrt(3)/2
    let r = 1.0 - 3f64.sqrt() / 2.0;
    let expected = [0.5 - r * 3f64.sqrt() / 2.0, 3f64.sqrt() / 2.0 - r / 2.0];
    for route in [eta(disk, &[0.5, 0.0], &[0.0, 1.0]).unwrap(), trace_eta(disk, &[0.5, 0.0], &[0.0, 1.0]).unwrap()] {
        assert!(close(&route.endpoint, &expected, 1e-10), "{:?}", route.endpoint);
        assert_eq!(route.k, 1);
        assert!((route.chord - 3f64.sqrt()).abs() < 1e-12);
    }
    assert!(close(&expected, &[0.38397, 0.79904], 1e-5));

    let head_on = eta(disk, &[0.0, 0.0], &[2.0, 0.0]).unwrap();
    assert!(close(&head_on.endpoint, &[0.0, 0.0], 1e-15) && head_on.k == 1);
    let past = eta(disk, &[0.0, 0.0], &[2.5, 0.0]).unwrap();
    assert!(close(&past.endpoint, &[-0.5, 0.0], 1e-15) && past.k == 1);
    let inside = eta(disk, &[0.0, 0.0], &[0.5, 0.0]).unwrap();
    assert!(close(&inside.endpoint, &[0.5, 0.0], 0.0) && inside.k == 0);
}

#[test]
fn half_space_and_whole_space_examples() {
    let h = DomainShape::HalfSpace(2);
    let a = eta(h, &[0.0, 1.0], &[0.0, -3.0]).unwrap();
    assert_eq!((a.endpoint.clone(), a.k), (vec![0.0, 2.0], 1));
    let b = eta(h, &[1.0, 1.0], &[1.0, 0.5]).unwrap();
    assert_eq!((b.endpoint.clone(), b.k), (vec![2.0, 1.5], 0));
    let c = eta(h, &[0.0, 0.5], &[0.0, -0.5]).unwrap();
    assert_eq!((c.endpoint.clone(), c.k), (vec![0.0, 0.0], 0));
    let w = eta(DomainShape::WholeSpace(2), &[0.3, 0.3], &[1.0, -2.0]).unwrap();
    assert!(close(&w.endpoint, &[1.3, -1.7], 1e-15) && w.k == 0);
}

#[test]
fn chord_examples() {
    let c = chord_quantities([0.0, 0.0], [0.6, 0.8]);
    assert!((c.chord - 2.0).abs() < 1e-15 && c.incidence.abs() < 1e-15 && (c.l_in - 1.0).abs() < 1e-15);
    let c = chord_quantities([0.5, 0.0], [0.0, 1.0]);
    assert!((c.chord - 3f64.sqrt()).abs() < 1e-15);
    assert!((c.incidence.abs() - std::f64::consts::FRAC_PI_6).abs() < 1e-12);
    assert!((c.l_in - 3f64.sqrt() / 2.0).abs() < 1e-15);
    assert_eq!(chord_quantities([1.0, 0.0], [0.0, 1.0]).chord, 0.0);
}

#[test]
fn reverse_map_examples() {
    let (m1, m2) = reverse_eigenvalues(2);
    assert!((m1 - (-7.0 - 4.0 * 3f64.sqrt())).abs() < 1e-12);
    assert!((m2 - (-7.0 + 4.0 * 3f64.sqrt())).abs() < 1e-12);
    assert_eq!(eigen_product_exact(2), 1);
    let free = reverse_map(DomainShape::UnitBall(2), &[0.1, 0.2], &[0.3, -0.1]).unwrap();
    assert_eq!(free.k, 0);
    assert!(close(&free.y, &[0.4, 0.1], 1e-15) && close(&free.w, &[-0.3, 0.1], 0.0));
}

#[test]
fn three_d_axis_trajectory_matches_planar_lift() {
    let x = [0.0, 0.0, 0.5];
    let v = [0.0, 0.0, 1.0];
    let direct = trace_eta(DomainShape::UnitBall(3), &x, &v).unwrap();
    let lifted = eta(DomainShape::UnitBall(3), &x, &v).unwrap();
    assert!(close(&direct.endpoint, &[0.0, 0.0, 0.5], 1e-12));
    assert!(close(&direct.endpoint, &lifted.endpoint, 1e-12));
}
