//! Subcommand implementations. Each returns the files it produced; the
//! caller writes them atomically with their metadata sidecars.

use crate::config::{Bc, Method, RunConfig, Subcommand, TestFunction};
use crate::output::{emit, fmt_f64, git_revision, Csv, RunMeta};
use rayon::prelude::*;
use serde_json::{json, Value};
use specdiff_core::error::{GeometryError, KineticError, MacroError, OperatorError, StableError};
use specdiff_core::geometry::trace_polyline;
use specdiff_core::kinetic::{
    cell_averages, density, init_ensemble, initial_node_values, limit_study_with, step, BoundaryCondition,
    HistogramGrid, InitialLaw, LimitStudyConfig,
};
use specdiff_core::macroscopic::{assemble_operator, solve_with, BcKind, HeatProblem, TimeMethod};
use specdiff_core::operators::{apply_specular_op, Constant, Field, Gaussian, GridFunction, OperatorConfig, RadialCosine};
use specdiff_core::rng::aux_stream;
use specdiff_core::stable::{equilibrium_density_1d, sample_equilibrium, tail_exponent, EquilibriumSpec};
use specdiff_core::{DomainShape, ErrorClass};
use std::path::PathBuf;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error(transparent)]
    Core(#[from] specdiff_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

macro_rules! core_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Core(e.into())
            }
        }
    )*};
}
core_from!(GeometryError, StableError, OperatorError, KineticError, MacroError);

impl CliError {
    /// 2 for configuration problems, 3 for numerical failures, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e.class() {
                ErrorClass::Config => 2,
                ErrorClass::Numeric => 3,
            },
            CliError::Io { .. } => 4,
        }
    }
}

/// One output file: name, contents and subcommand-specific metadata.
struct Artifact {
    name: &'static str,
    csv: Csv,
    details: Value,
}

/// Runs `cfg` and writes its artifacts below `cfg.output_dir`. Returns the
/// paths of the data files (sidecars are written next to them).
pub fn run(cfg: &RunConfig, workers: usize) -> Result<Vec<PathBuf>, CliError> {
    let start = Instant::now();
    let artifacts = match cfg.subcommand {
        Subcommand::Trace => trace(cfg)?,
        Subcommand::Operator => operator(cfg)?,
        Subcommand::Equilibrium => equilibrium(cfg)?,
        Subcommand::Kinetic => kinetic(cfg)?,
        Subcommand::Macro => macroscopic(cfg)?,
        Subcommand::LimitStudy => limit(cfg)?,
    };
    let wall = start.elapsed().as_secs_f64();
    let meta = RunMeta {
        subcommand: cfg.subcommand.name().into(),
        canonical_config: cfg.canonical(),
        settings: json!(cfg.as_map()),
        workers,
        git_revision: git_revision(),
    };
    std::fs::create_dir_all(&cfg.output_dir).map_err(|source| CliError::Io { path: cfg.output_dir.clone(), source })?;
    let mut written = Vec::new();
    for a in artifacts {
        let path = cfg.output_dir.join(a.name);
        emit(&path, a.csv.as_str(), &meta, wall, a.details).map_err(|source| CliError::Io { path: path.clone(), source })?;
        written.push(path);
    }
    Ok(written)
}

fn coord_header(prefix: &str, d: usize) -> Vec<String> {
    (1..=d).map(|i| format!("{prefix}{i}")).collect()
}

fn header_refs(h: &[String]) -> Vec<&str> {
    h.iter().map(String::as_str).collect()
}

fn trace(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let d = cfg.domain.dim();
    let (out, poly) = trace_polyline(cfg.domain, &cfg.x, &cfg.v)?;
    let mut h = vec!["seg_index".to_string()];
    h.extend(coord_header("x", d));
    h.push("len".into());
    let mut csv = Csv::new(&header_refs(&h));
    for (i, (p, len)) in poly.vertices.iter().zip(&poly.lengths).enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(p.iter().map(|c| fmt_f64(*c)));
        row.push(fmt_f64(*len));
        csv.row(&row);
    }
    let details = json!({ "endpoint": out.endpoint, "reflections": out.k, "total_length": poly.total_length() });
    Ok(vec![Artifact { name: "trace.csv", csv, details }])
}

/// Cell-centred evaluation points of the operator grid inside the domain.
fn operator_points(cfg: &RunConfig) -> Vec<Vec<f64>> {
    let d = cfg.domain.dim();
    let (lo, hi): (Vec<f64>, Vec<f64>) = match cfg.domain {
        DomainShape::UnitBall(_) => (vec![-1.0; d], vec![1.0; d]),
        DomainShape::HalfSpace(_) => {
            let mut lo = vec![-cfg.window; d];
            lo[d - 1] = 0.0;
            (lo, vec![cfg.window; d])
        }
        DomainShape::WholeSpace(_) => (vec![-cfg.window; d], vec![cfg.window; d]),
    };
    let n = cfg.grid_n;
    let total = n.pow(d as u32);
    (0..total)
        .map(|mut idx| {
            let mut x = vec![0.0; d];
            for (k, xk) in x.iter_mut().enumerate() {
                let i = idx % n;
                idx /= n;
                *xk = lo[k] + (i as f64 + 0.5) * (hi[k] - lo[k]) / n as f64;
            }
            x
        })
        .filter(|x| match cfg.domain {
            DomainShape::UnitBall(_) => x.iter().map(|c| c * c).sum::<f64>() < 1.0,
            _ => true,
        })
        .collect()
}

fn operator(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let d = cfg.domain.dim();
    let ocfg = OperatorConfig { r_trunc: cfg.r_trunc, n_radial: cfg.n_radial, n_angular: cfg.n_angular, ..OperatorConfig::new(d, cfg.s)? };
    ocfg.validate()?;
    let field: Box<dyn Field> = match cfg.function {
        TestFunction::Gaussian => Box::new(Gaussian::isotropic(vec![0.0; d], 1.0)),
        TestFunction::Ridge => Box::new(Gaussian::ridge(d, 1.0)),
        TestFunction::RadialCosine => Box::new(RadialCosine { dim: d, m: 1.0 }),
        TestFunction::Constant => Box::new(Constant { dim: d, value: 1.0 }),
    };
    let points = operator_points(cfg);
    let values: Result<Vec<f64>, OperatorError> =
        points.par_iter().map(|x| apply_specular_op(cfg.domain, field.as_ref(), x, &ocfg)).collect();
    let values = values?;
    let mut h = coord_header("x", d);
    h.push("value".into());
    let mut csv = Csv::new(&header_refs(&h));
    for (x, v) in points.iter().zip(&values) {
        let mut row: Vec<f64> = x.clone();
        row.push(*v);
        csv.row_f64(&row);
    }
    let details = json!({
        "function": format!("{:?}", cfg.function),
        "operator_config": {
            "s": ocfg.s, "delta": ocfg.delta, "r_trunc": ocfg.r_trunc,
            "n_radial": ocfg.n_radial, "n_angular": ocfg.n_angular, "c_ds": ocfg.c_ds,
        },
        "points": points.len(),
    });
    Ok(vec![Artifact { name: "operator.csv", csv, details }])
}

fn equilibrium(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let spec = EquilibriumSpec::new(cfg.s, cfg.dim)?;
    let mut rng = aux_stream(cfg.seed, 0);
    let samples = sample_equilibrium(&spec, cfg.n, &mut rng)?;
    // first-component histogram against the one-dimensional marginal
    let width = 2.0 * cfg.vmax / cfg.bins as f64;
    let mut counts = vec![0u64; cfg.bins];
    for v in &samples {
        let t = (v[0] + cfg.vmax) / width;
        if t >= 0.0 && (t as usize) < cfg.bins {
            counts[t as usize] += 1;
        }
    }
    let mut hist = Csv::new(&["v", "density", "exact"]);
    for (i, c) in counts.iter().enumerate() {
        let v = -cfg.vmax + (i as f64 + 0.5) * width;
        hist.row_f64(&[v, *c as f64 / (cfg.n as f64 * width), equilibrium_density_1d(cfg.s, v)]);
    }
    let mut chr = Csv::new(&["xi", "empirical", "exact"]);
    for j in 0..cfg.n_xi {
        let xi = cfg.xi_max * j as f64 / (cfg.n_xi - 1) as f64;
        let mut dir = vec![0.0; cfg.dim];
        dir[0] = xi;
        chr.row_f64(&[xi, specdiff_core::stable::empirical_char(&samples, &dir), spec.char_function(xi)]);
    }
    let mags: Vec<f64> = samples.iter().map(|v| v.iter().map(|c| c * c).sum::<f64>().sqrt()).collect();
    let mut tail_csv = Csv::new(&["exponent", "ci_low", "ci_high", "k", "expected"]);
    let details = match tail_exponent(&mags, cfg.dim, cfg.seed) {
        Ok(t) => {
            tail_csv.row(&[fmt_f64(t.exponent), fmt_f64(t.ci.0), fmt_f64(t.ci.1), t.k.to_string(), fmt_f64(spec.tail_exponent())]);
            json!({ "heavy_tailed": t.heavy_tailed, "alpha": t.alpha })
        }
        Err(e) => json!({ "tail_estimate": e.to_string() }),
    };
    Ok(vec![
        Artifact { name: "histogram.csv", csv: hist, details: json!({ "bins": cfg.bins, "vmax": cfg.vmax }) },
        Artifact { name: "char.csv", csv: chr, details: json!({ "direction": "e1" }) },
        Artifact { name: "tail.csv", csv: tail_csv, details },
    ])
}

fn initial_law(domain: DomainShape) -> InitialLaw {
    match domain {
        DomainShape::HalfSpace(d) => InitialLaw::UniformBox { lo: vec![0.0; d], hi: vec![1.0; d] },
        _ => InitialLaw::UniformBall { center: vec![0.0; domain.dim()], radius: 1.0 },
    }
}

fn histogram_grid(cfg: &RunConfig) -> HistogramGrid {
    match cfg.domain {
        DomainShape::HalfSpace(_) => HistogramGrid::Interval { lo: 0.0, hi: cfg.hist_max, n: cfg.grid },
        DomainShape::UnitBall(1) => HistogramGrid::Interval { lo: -1.0, hi: 1.0, n: cfg.grid },
        _ => HistogramGrid::DiskCartesian { n: cfg.grid },
    }
}

fn boundary(bc: Bc) -> BoundaryCondition {
    match bc {
        Bc::Specular => BoundaryCondition::Specular,
        Bc::Absorb => BoundaryCondition::Absorb,
    }
}

/// Steps at which kinetic and macroscopic runs record a snapshot.
fn snapshot_every(steps: usize, snapshots: usize) -> usize {
    (steps / snapshots).max(1)
}

fn density_header(d: usize) -> Csv {
    let mut h = vec!["t".to_string()];
    h.extend(coord_header("x", d));
    h.push("rho".into());
    Csv::new(&header_refs(&h))
}

fn push_density(csv: &mut Csv, t: f64, centers: &[Vec<f64>], rho: &[f64]) {
    for (c, r) in centers.iter().zip(rho) {
        let mut row = vec![t];
        row.extend(c);
        row.push(*r);
        csv.row_f64(&row);
    }
}

fn kinetic(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let grid = histogram_grid(cfg);
    let bc = boundary(cfg.bc);
    let mut ens = init_ensemble(cfg.n, &initial_law(cfg.domain), cfg.domain, cfg.s, cfg.eps, cfg.seed)?;
    let steps = (cfg.t_final / cfg.dt).round() as usize;
    let every = snapshot_every(steps, cfg.snapshots);
    let mut dens_csv = density_header(cfg.domain.dim());
    let mut mass_csv = Csv::new(&["t", "mass", "overflow"]);
    for k in 0..=steps {
        if k > 0 {
            step(&mut ens, cfg.dt, cfg.domain, bc)?;
        }
        if k % every == 0 || k == steps {
            let t = k as f64 * cfg.dt;
            let d = density(&ens, &grid)?;
            push_density(&mut dens_csv, t, &d.centers, &d.rho);
            mass_csv.row_f64(&[t, d.mass, d.overflow]);
        }
    }
    let details = json!({ "steps": steps, "eps": cfg.eps, "particles": cfg.n, "histogram": format!("{grid:?}") });
    Ok(vec![
        Artifact { name: "density.csv", csv: dens_csv, details: details.clone() },
        Artifact { name: "mass.csv", csv: mass_csv, details },
    ])
}

fn macroscopic(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let d = cfg.domain.dim();
    let bc = match cfg.bc {
        Bc::Specular => BcKind::Specular,
        Bc::Absorb => BcKind::DirichletExterior,
    };
    let law = initial_law(cfg.domain);
    // the solver starts from node values of the law; `rho_in` records it on a coarse grid
    let rho_in = GridFunction::sample(
        &specdiff_core::operators::FnField::new(d, {
            let law = law.clone();
            move |x: &[f64]| law.density(x)
        }),
        match cfg.domain {
            DomainShape::HalfSpace(_) => vec![0.0; d],
            _ => vec![-1.0; d],
        },
        vec![1.0 / cfg.grid_n as f64; d],
        match cfg.domain {
            DomainShape::HalfSpace(_) => vec![(cfg.extent * cfg.grid_n as f64).round() as usize + 1; d],
            _ => vec![2 * cfg.grid_n + 1; d],
        },
    );
    let mut problem = HeatProblem::new(cfg.domain, bc, cfg.s, rho_in, cfg.t_final)?;
    problem.dt = cfg.dt;
    problem.grid_n = cfg.grid_n;
    problem.extent = cfg.extent;
    problem.method = match cfg.method {
        Method::ImplicitEuler => TimeMethod::ImplicitEuler,
        Method::Exponential => TimeMethod::Exponential,
    };
    problem.snapshot_every = snapshot_every(problem.n_steps(), cfg.snapshots);
    let op = assemble_operator(&problem)?;
    let sol = solve_with(&op, &problem, initial_node_values(&op, &law))?;
    let layout = histogram_grid(cfg).layout();
    let mut dens_csv = density_header(d);
    let mut mass_csv = Csv::new(&["t", "mass", "l2"]);
    for (t, u) in sol.times.iter().zip(&sol.values) {
        let rho = cell_averages(&op, u, &layout, cfg.domain);
        push_density(&mut dens_csv, *t, &layout.centers, &rho);
        mass_csv.row_f64(&[*t, op.mass(u), op.l2(u)]);
    }
    let details = json!({
        "nodes": op.len(),
        "symmetry_residual": op.symmetry_residual(),
        "steps": problem.n_steps(),
    });
    Ok(vec![
        Artifact { name: "density.csv", csv: dens_csv, details: details.clone() },
        Artifact { name: "mass.csv", csv: mass_csv, details },
    ])
}

fn limit(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let study = LimitStudyConfig {
        domain: cfg.domain,
        bc: boundary(cfg.bc),
        s: cfg.s,
        rho_in: initial_law(cfg.domain),
        eps_list: cfg.eps_list.clone(),
        t_final: cfg.t_final,
        dt: cfg.dt,
        n: cfg.n,
        grid: histogram_grid(cfg),
        seed: cfg.seed,
        macro_grid_n: cfg.macro_grid_n,
        macro_dt: cfg.macro_dt,
    };
    let rows = limit_study_with(&study, |eps, row| {
        eprintln!("eps = {eps:e}: l2_error = {:.6e}, mc_stderr = {:.6e}", row.l2_error, row.mc_stderr);
    })?;
    let mut csv = Csv::new(&["eps", "l2_error", "mc_stderr"]);
    for r in &rows {
        csv.row_f64(&[r.eps, r.l2_error, r.mc_stderr]);
    }
    let decreasing = rows.windows(2).all(|w| w[1].l2_error < w[0].l2_error);
    let details = json!({
        "strictly_decreasing": decreasing,
        "alive_mass": rows.iter().map(|r| r.mass).collect::<Vec<_>>(),
    });
    Ok(vec![Artifact { name: "errors.csv", csv, details }])
}
