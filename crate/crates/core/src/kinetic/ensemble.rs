//! Particle ensemble and the split transport / Ornstein–Uhlenbeck step.

use crate::error::{GeometryError, KineticError};
use crate::geometry::{disk_closed_form, eta, norm, DomainShape};
use crate::rng::{stream, StreamRng};
use crate::stable::{draw_stable_into, ou_step_in_place, EquilibriumSpec};
use rand::Rng;
use rand_distr::{Open01, StandardNormal};
use rayon::prelude::*;

/// Maximum number of step halvings for a single particle.
pub const MAX_SUBSTEP_DEPTH: u32 = 24;
const INIT_STEP: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    /// Particles leaving the domain are removed.
    Absorb,
    /// Particles are reflected specularly.
    Specular,
}

/// Spatial law of the initial positions.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialLaw {
    /// Uniform on the ball of given centre and radius.
    UniformBall { center: Vec<f64>, radius: f64 },
    /// Uniform on the box `[lo, hi]`.
    UniformBox { lo: Vec<f64>, hi: Vec<f64> },
    Point(Vec<f64>),
}

impl InitialLaw {
    pub fn dim(&self) -> usize {
        match self {
            InitialLaw::UniformBall { center, .. } => center.len(),
            InitialLaw::UniformBox { lo, .. } => lo.len(),
            InitialLaw::Point(x) => x.len(),
        }
    }

    /// True when the support lies in the closed domain.
    pub fn supported_in(&self, domain: DomainShape) -> bool {
        match (self, domain) {
            (_, DomainShape::WholeSpace(_)) => true,
            (InitialLaw::Point(x), _) => domain.contains(x),
            (InitialLaw::UniformBox { lo, hi }, DomainShape::HalfSpace(d)) => lo[d - 1] >= 0.0 && hi[d - 1] >= lo[d - 1],
            (InitialLaw::UniformBox { lo, hi }, DomainShape::UnitBall(_)) => {
                lo.iter().zip(hi).map(|(a, b)| a.abs().max(b.abs()).powi(2)).sum::<f64>() <= 1.0
            }
            (InitialLaw::UniformBall { center, radius }, DomainShape::HalfSpace(d)) => center[d - 1] >= *radius,
            (InitialLaw::UniformBall { center, radius }, DomainShape::UnitBall(_)) => norm(center) + radius <= 1.0 + 1e-12,
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R, out: &mut [f64]) {
        match self {
            InitialLaw::Point(x) => out.copy_from_slice(x),
            InitialLaw::UniformBox { lo, hi } => {
                for i in 0..out.len() {
                    out[i] = lo[i] + (hi[i] - lo[i]) * rng.random::<f64>();
                }
            }
            InitialLaw::UniformBall { center, radius } => {
                let d = out.len();
                let mut g = [0.0f64; 3];
                let mut n2: f64 = 0.0;
                while n2 == 0.0 {
                    n2 = 0.0;
                    for gi in g.iter_mut().take(d) {
                        *gi = rng.sample(StandardNormal);
                        n2 += *gi * *gi;
                    }
                }
                let u: f64 = rng.sample(Open01);
                let r = radius * u.powf(1.0 / d as f64) / n2.sqrt();
                for i in 0..d {
                    out[i] = center[i] + r * g[i];
                }
            }
        }
    }
}

/// One particle; coordinates beyond `dim` are unused.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub x: [f64; 3],
    pub v: [f64; 3],
    pub alive: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleEnsemble {
    pub dim: usize,
    pub particles: Vec<Particle>,
    pub eps: f64,
    pub s: f64,
    /// Macroscopic time.
    pub t: f64,
    pub seed: u64,
    /// Number of steps taken; keys the random streams.
    pub step_index: u64,
}

impl ParticleEnsemble {
    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn alive_count(&self) -> usize {
        self.particles.iter().filter(|p| p.alive).count()
    }

    /// Fraction of particles still alive.
    pub fn mass(&self) -> f64 {
        self.alive_count() as f64 / self.len() as f64
    }

    pub fn positions(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.particles.iter().map(move |p| &p.x[..self.dim])
    }
}

/// Positions from `rho_in`, velocities from the equilibrium `F`.
pub fn init_ensemble(
    n: usize,
    rho_in: &InitialLaw,
    domain: DomainShape,
    s: f64,
    eps: f64,
    seed: u64,
) -> Result<ParticleEnsemble, KineticError> {
    let dim = domain.dim();
    if n == 0 || !(eps > 0.0 && eps.is_finite()) {
        return Err(KineticError::InvalidParams(format!("need n > 0 and eps > 0 (n = {n}, eps = {eps})")));
    }
    if !(1..=3).contains(&dim) {
        return Err(KineticError::InvalidParams(format!("dimension {dim} not in 1..=3")));
    }
    if rho_in.dim() != dim {
        return Err(GeometryError::DimensionMismatch { expected: dim, got: rho_in.dim() }.into());
    }
    if !rho_in.supported_in(domain) {
        return Err(KineticError::InvalidSupport);
    }
    let params = EquilibriumSpec::new(s, dim)?.params();
    let particles = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i as u64, INIT_STEP);
            let mut p = Particle { x: [0.0; 3], v: [0.0; 3], alive: true };
            rho_in.sample(&mut rng, &mut p.x[..dim]);
            draw_stable_into(&params, &mut rng, &mut p.v[..dim]);
            p
        })
        .collect();
    Ok(ParticleEnsemble { dim, particles, eps, s, t: 0.0, seed, step_index: 0 })
}

/// Moves along the boundary circle by arc length `len` (grazing limit).
fn glide_disk(x: &mut [f64], v: &mut [f64], len: f64) {
    let r = x[0].hypot(x[1]);
    let sign = if x[0] * v[1] - x[1] * v[0] >= 0.0 { 1.0 } else { -1.0 };
    let (sn, cs) = (sign * len / r).sin_cos();
    let (x0, x1) = (x[0], x[1]);
    x[0] = cs * x0 - sn * x1;
    x[1] = sn * x0 + cs * x1;
    let (v0, v1) = (v[0], v[1]);
    v[0] = cs * v0 - sn * v1;
    v[1] = sn * v0 + cs * v1;
}

/// Free flight of length `scale * |v|` with the boundary rule applied.
fn transport(domain: DomainShape, bc: BoundaryCondition, p: &mut Particle, d: usize, scale: f64) -> Result<(), GeometryError> {
    let x = &mut p.x[..d];
    let v = &mut p.v[..d];
    let nv = norm(v);
    if nv == 0.0 || scale == 0.0 {
        return Ok(());
    }
    let len = nv * scale;
    match (domain, bc) {
        (DomainShape::WholeSpace(_), _) => {
            for i in 0..d {
                x[i] += scale * v[i];
            }
        }
        (_, BoundaryCondition::Absorb) => {
            let dir: Vec<f64> = v.iter().map(|c| c / nv).collect();
            if len > domain.exit_distance(x, &dir) {
                p.alive = false;
                return Ok(());
            }
            for i in 0..d {
                x[i] += scale * v[i];
            }
            clamp_inside(domain, x);
        }
        (DomainShape::HalfSpace(_), BoundaryCondition::Specular) => {
            for i in 0..d {
                x[i] += scale * v[i];
            }
            if x[d - 1] < 0.0 {
                x[d - 1] = -x[d - 1];
                v[d - 1] = -v[d - 1];
            }
        }
        (DomainShape::UnitBall(2), BoundaryCondition::Specular) => {
            match disk_closed_form([x[0], x[1]], [scale * v[0], scale * v[1]]) {
                Ok(r) => {
                    x.copy_from_slice(&r.endpoint);
                    v[0] = nv * r.final_dir[0];
                    v[1] = nv * r.final_dir[1];
                }
                Err(GeometryError::GrazingUnderflow(_)) => glide_disk(x, v, len),
                Err(e) => return Err(e),
            }
            clamp_inside(domain, x);
        }
        (_, BoundaryCondition::Specular) => {
            let w: Vec<f64> = v.iter().map(|c| scale * c).collect();
            let out = eta(domain, x, &w)?;
            x.copy_from_slice(&out.endpoint);
            for i in 0..d {
                v[i] = nv * out.final_dir[i];
            }
            clamp_inside(domain, x);
        }
    }
    Ok(())
}

/// Removes rounding excursions outside the closed domain.
fn clamp_inside(domain: DomainShape, x: &mut [f64]) {
    match domain {
        DomainShape::HalfSpace(d) => x[d - 1] = x[d - 1].max(0.0),
        DomainShape::UnitBall(_) => {
            let r = norm(x);
            if r > 1.0 {
                for c in x.iter_mut() {
                    *c /= r;
                }
            }
        }
        DomainShape::WholeSpace(_) => {}
    }
}

/// Parameters of a time step that do not change between steps.
#[derive(Debug, Clone, Copy)]
struct Stepper {
    domain: DomainShape,
    bc: BoundaryCondition,
    eps: f64,
    s: f64,
    d: usize,
    /// Displacement above which a step is halved.
    max_disp: f64,
}

impl Stepper {
    fn advance(&self, p: &mut Particle, tau: f64, depth: u32, rng: &mut StreamRng) -> Result<(), GeometryError> {
        let speed = norm(&p.v[..self.d]);
        if self.eps * speed * tau > self.max_disp && depth < MAX_SUBSTEP_DEPTH {
            self.advance(p, 0.5 * tau, depth + 1, rng)?;
            if p.alive {
                self.advance(p, 0.5 * tau, depth + 1, rng)?;
            }
            return Ok(());
        }
        transport(self.domain, self.bc, p, self.d, self.eps * tau)?;
        if p.alive {
            ou_step_in_place(&mut p.v[..self.d], tau, self.s, rng);
        }
        Ok(())
    }
}

/// Summary of one macroscopic step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepStats {
    pub alive_before: usize,
    pub alive_after: usize,
}

/// Advances the ensemble by the macroscopic time `dt`, i.e. the kinetic
/// time `dt / eps^{2s}`: free transport of `eps v` with the boundary rule,
/// then the exact Ornstein–Uhlenbeck velocity update. Steps whose
/// displacement exceeds a quarter of the domain diameter are halved.
pub fn step(
    ens: &mut ParticleEnsemble,
    dt: f64,
    domain: DomainShape,
    bc: BoundaryCondition,
) -> Result<StepStats, KineticError> {
    if !(dt >= 0.0 && dt.is_finite()) {
        return Err(KineticError::InvalidParams(format!("dt = {dt} must be finite and non-negative")));
    }
    if domain.dim() != ens.dim {
        return Err(GeometryError::DimensionMismatch { expected: ens.dim, got: domain.dim() }.into());
    }
    let stepper = Stepper {
        domain,
        bc,
        eps: ens.eps,
        s: ens.s,
        d: ens.dim,
        max_disp: 0.25 * domain.diameter(),
    };
    let tau = dt / ens.eps.powf(2.0 * ens.s);
    let (seed, k) = (ens.seed, ens.step_index);
    let alive_before = ens.alive_count();
    ens.particles
        .par_iter_mut()
        .enumerate()
        .try_for_each(|(i, p)| {
            if !p.alive {
                return Ok(());
            }
            let mut rng = stream(seed, i as u64, k);
            stepper.advance(p, tau, 0, &mut rng).map_err(|_| KineticError::StepTooLarge(i))?;
            if p.x.iter().chain(&p.v).any(|c| !c.is_finite()) {
                return Err(KineticError::StepTooLarge(i));
            }
            Ok(())
        })?;
    ens.t += dt;
    ens.step_index += 1;
    Ok(StepStats { alive_before, alive_after: ens.alive_count() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk_ens(n: usize, seed: u64) -> ParticleEnsemble {
        let law = InitialLaw::UniformBall { center: vec![0.0, 0.0], radius: 1.0 };
        init_ensemble(n, &law, DomainShape::UnitBall(2), 0.6, 0.2, seed).unwrap()
    }

    #[test]
    fn bad_support_is_rejected() {
        let law = InitialLaw::UniformBox { lo: vec![-1.0], hi: vec![1.0] };
        assert_eq!(
            init_ensemble(10, &law, DomainShape::HalfSpace(1), 0.5, 0.1, 0),
            Err(KineticError::InvalidSupport)
        );
    }

    #[test]
    fn specular_keeps_everyone_inside() {
        let mut ens = disk_ens(2000, 1);
        for _ in 0..50 {
            let st = step(&mut ens, 1e-2, DomainShape::UnitBall(2), BoundaryCondition::Specular).unwrap();
            assert_eq!(st.alive_after, 2000);
        }
        assert!(ens.particles.iter().all(|p| p.x[0].hypot(p.x[1]) <= 1.0));
    }

    #[test]
    fn absorbing_mass_decreases() {
        let mut ens = disk_ens(2000, 2);
        let mut last = ens.alive_count();
        for _ in 0..20 {
            let st = step(&mut ens, 1e-2, DomainShape::UnitBall(2), BoundaryCondition::Absorb).unwrap();
            assert!(st.alive_after <= last);
            last = st.alive_after;
        }
        assert!(last < 2000);
    }

    #[test]
    fn resting_particle_does_not_move_in_transport() {
        let mut p = Particle { x: [0.3, 0.2, 0.0], v: [0.0; 3], alive: true };
        transport(DomainShape::UnitBall(2), BoundaryCondition::Specular, &mut p, 2, 1.0).unwrap();
        assert_eq!(p.x, [0.3, 0.2, 0.0]);
    }

    #[test]
    fn transport_preserves_speed() {
        let mut p = Particle { x: [0.3, 0.2, 0.0], v: [3.0, -7.0, 0.0], alive: true };
        let before = norm(&p.v[..2]);
        transport(DomainShape::UnitBall(2), BoundaryCondition::Specular, &mut p, 2, 1.3).unwrap();
        assert!((norm(&p.v[..2]) - before).abs() < 1e-12 * before);
    }

    proptest::proptest! {
        #[test]
        fn transport_is_an_isometry_and_stays_inside(
            r in 0.0f64..0.999, th in 0.0f64..6.3, v0 in -50.0f64..50.0, v1 in -50.0f64..50.0,
            scale in 0.0f64..3.0, specular in proptest::bool::ANY,
        ) {
            let bc = if specular { BoundaryCondition::Specular } else { BoundaryCondition::Absorb };
            let mut p = Particle { x: [r * th.cos(), r * th.sin(), 0.0], v: [v0, v1, 0.0], alive: true };
            let speed = norm(&p.v[..2]);
            transport(DomainShape::UnitBall(2), bc, &mut p, 2, scale).unwrap();
            proptest::prop_assert!((norm(&p.v[..2]) - speed).abs() <= 1e-12 * speed.max(1.0));
            if p.alive {
                proptest::prop_assert!(p.x[0].hypot(p.x[1]) <= 1.0);
            } else {
                proptest::prop_assert!(!specular);
            }
        }

        #[test]
        fn half_line_transport_reflects(x in 0.0f64..5.0, v in -100.0f64..100.0, scale in 0.0f64..1.0) {
            let mut p = Particle { x: [x, 0.0, 0.0], v: [v, 0.0, 0.0], alive: true };
            transport(DomainShape::HalfSpace(1), BoundaryCondition::Specular, &mut p, 1, scale).unwrap();
            proptest::prop_assert_eq!(p.x[0], (x + scale * v).abs());
            proptest::prop_assert_eq!(p.v[0].abs(), v.abs());
        }
    }

    #[test]
    fn runs_are_reproducible_across_thread_counts() {
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                let mut ens = disk_ens(500, 9);
                for _ in 0..10 {
                    step(&mut ens, 1e-2, DomainShape::UnitBall(2), BoundaryCondition::Specular).unwrap();
                }
                ens
            })
        };
        assert_eq!(run(1), run(3));
    }
}
