//! Flat `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Every key must be
//! known; values are validated before any work is dispatched.

use specdiff_core::DomainShape;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("cannot parse `{field}`: {message}")]
    Parse { field: String, message: String },
    #[error("invalid `{field}`: {reason}")]
    Validation { field: String, reason: String },
}

impl ConfigError {
    pub fn field(&self) -> &str {
        match self {
            ConfigError::Parse { field, .. } | ConfigError::Validation { field, .. } => field,
        }
    }
}

fn parse_err(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Parse { field: field.into(), message: message.into() }
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Validation { field: field.into(), reason: reason.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Trace,
    Operator,
    Equilibrium,
    Kinetic,
    Macro,
    LimitStudy,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Trace => "trace",
            Subcommand::Operator => "operator",
            Subcommand::Equilibrium => "equilibrium",
            Subcommand::Kinetic => "kinetic",
            Subcommand::Macro => "macro",
            Subcommand::LimitStudy => "limit-study",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bc {
    Specular,
    Absorb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ImplicitEuler,
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFunction {
    Gaussian,
    Ridge,
    RadialCosine,
    Constant,
}

/// Fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub domain: DomainShape,
    pub bc: Bc,
    pub s: f64,
    pub eps: f64,
    /// Sorted in decreasing order.
    pub eps_list: Vec<f64>,
    pub n: usize,
    pub t_final: f64,
    pub dt: f64,
    /// Macroscopic solver resolution (nodes per unit length).
    pub grid_n: usize,
    /// Histogram cells per dimension.
    pub grid: usize,
    /// Upper end of the half-line histogram.
    pub hist_max: f64,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub snapshots: usize,
    pub method: Method,
    /// Half-line truncation length of the macroscopic solver.
    pub extent: f64,
    pub macro_grid_n: usize,
    pub macro_dt: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub function: TestFunction,
    pub n_radial: usize,
    pub n_angular: usize,
    pub r_trunc: f64,
    /// Half-width of the evaluation window on unbounded domains.
    pub window: f64,
    pub dim: usize,
    pub bins: usize,
    pub vmax: f64,
    pub xi_max: f64,
    pub n_xi: usize,
    /// Notes produced while normalising the input (e.g. re-sorted lists).
    pub warnings: Vec<String>,
}

pub const KEYS: &[&str] = &[
    "domain", "bc", "s", "eps", "eps_list", "n", "T", "dt", "grid_n", "grid", "hist_max", "seed", "output_dir",
    "snapshots", "method", "extent", "macro_grid_n", "macro_dt", "x", "v", "function", "n_radial", "n_angular",
    "r_trunc", "window", "dim", "bins", "vmax", "xi_max", "n_xi",
];

impl RunConfig {
    pub fn defaults(subcommand: Subcommand) -> Self {
        RunConfig {
            subcommand,
            domain: DomainShape::UnitBall(2),
            bc: Bc::Specular,
            s: 0.5,
            eps: 0.1,
            eps_list: vec![0.4, 0.2, 0.1, 0.05],
            n: 100_000,
            t_final: 0.5,
            dt: 1e-3,
            grid_n: 32,
            grid: 32,
            hist_max: 4.0,
            seed: 0,
            output_dir: PathBuf::from("out"),
            snapshots: 10,
            method: Method::ImplicitEuler,
            extent: 32.0,
            macro_grid_n: 64,
            macro_dt: 1e-3,
            x: vec![0.0, 0.0],
            v: vec![1.0, 0.5],
            function: TestFunction::Gaussian,
            n_radial: 256,
            n_angular: 64,
            r_trunc: 40.0,
            window: 2.0,
            dim: 1,
            bins: 200,
            vmax: 10.0,
            xi_max: 5.0,
            n_xi: 51,
            warnings: Vec::new(),
        }
    }

    /// Canonical `key = value` listing of every setting. Feeding it back
    /// through [`parse_config`] reproduces the configuration.
    pub fn canonical(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(",");
        let mut out = String::new();
        for (k, v) in self.entries(list) {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    fn entries(&self, list: impl Fn(&[f64]) -> String) -> Vec<(&'static str, String)> {
        vec![
            ("domain", domain_name(self.domain)),
            ("bc", match self.bc { Bc::Specular => "specular", Bc::Absorb => "absorb" }.into()),
            ("s", format!("{:e}", self.s)),
            ("eps", format!("{:e}", self.eps)),
            ("eps_list", list(&self.eps_list)),
            ("n", self.n.to_string()),
            ("T", format!("{:e}", self.t_final)),
            ("dt", format!("{:e}", self.dt)),
            ("grid_n", self.grid_n.to_string()),
            ("grid", self.grid.to_string()),
            ("hist_max", format!("{:e}", self.hist_max)),
            ("seed", self.seed.to_string()),
            ("output_dir", self.output_dir.display().to_string()),
            ("snapshots", self.snapshots.to_string()),
            ("method", match self.method { Method::ImplicitEuler => "implicit_euler", Method::Exponential => "exponential" }.into()),
            ("extent", format!("{:e}", self.extent)),
            ("macro_grid_n", self.macro_grid_n.to_string()),
            ("macro_dt", format!("{:e}", self.macro_dt)),
            ("x", list(&self.x)),
            ("v", list(&self.v)),
            (
                "function",
                match self.function {
                    TestFunction::Gaussian => "gaussian",
                    TestFunction::Ridge => "ridge",
                    TestFunction::RadialCosine => "radial_cosine",
                    TestFunction::Constant => "constant",
                }
                .into(),
            ),
            ("n_radial", self.n_radial.to_string()),
            ("n_angular", self.n_angular.to_string()),
            ("r_trunc", format!("{:e}", self.r_trunc)),
            ("window", format!("{:e}", self.window)),
            ("dim", self.dim.to_string()),
            ("bins", self.bins.to_string()),
            ("vmax", format!("{:e}", self.vmax)),
            ("xi_max", format!("{:e}", self.xi_max)),
            ("n_xi", self.n_xi.to_string()),
        ]
    }

    /// Settings as a sorted map (for metadata).
    pub fn as_map(&self) -> BTreeMap<String, String> {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(",");
        self.entries(list).into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }
}

pub fn domain_name(d: DomainShape) -> String {
    match d {
        DomainShape::UnitBall(2) => "disk".into(),
        DomainShape::HalfSpace(1) => "halfline".into(),
        DomainShape::UnitBall(k) => format!("ball{k}"),
        DomainShape::HalfSpace(k) => format!("halfspace{k}"),
        DomainShape::WholeSpace(k) => format!("whole{k}"),
    }
}

fn parse_domain(v: &str) -> Result<DomainShape, ConfigError> {
    let v = v.to_ascii_lowercase();
    let with_dim = |prefix: &str, make: fn(usize) -> DomainShape| -> Option<Result<DomainShape, ConfigError>> {
        let rest = v.strip_prefix(prefix)?;
        Some(match rest.parse::<usize>() {
            Ok(d) if (1..=3).contains(&d) => Ok(make(d)),
            _ => Err(invalid("domain", format!("dimension in `{v}` must be 1, 2 or 3"))),
        })
    };
    match v.as_str() {
        "disk" => Ok(DomainShape::UnitBall(2)),
        "interval" => Ok(DomainShape::UnitBall(1)),
        "halfline" => Ok(DomainShape::HalfSpace(1)),
        "halfplane" => Ok(DomainShape::HalfSpace(2)),
        _ => with_dim("ball", DomainShape::UnitBall)
            .or_else(|| with_dim("halfspace", DomainShape::HalfSpace))
            .or_else(|| with_dim("whole", DomainShape::WholeSpace))
            .unwrap_or_else(|| {
                Err(parse_err("domain", format!("unknown domain `{v}` (disk, interval, halfline, halfplane, ballD, halfspaceD, wholeD)")))
            }),
    }
}

fn num<T: std::str::FromStr>(field: &str, v: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| parse_err(field, format!("`{v}`: {e}")))
}

fn float_list(field: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',').map(|t| num::<f64>(field, t.trim())).collect()
}

/// Splits `key = value` lines into pairs, rejecting malformed lines and
/// duplicate keys.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(parse_err(line, format!("line {}: expected `key = value`", lineno + 1)));
        };
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        if pairs.iter().any(|(p, _)| *p == k) {
            return Err(parse_err(&k, format!("line {}: duplicate key", lineno + 1)));
        }
        pairs.push((k, v));
    }
    Ok(pairs)
}

/// Builds a validated configuration from file contents plus overrides;
/// later overrides win.
pub fn parse_config(subcommand: Subcommand, text: &str, overrides: &[(String, String)]) -> Result<RunConfig, ConfigError> {
    let mut merged = parse_pairs(text)?;
    for (k, v) in overrides {
        merged.retain(|(p, _)| p != k);
        merged.push((k.clone(), v.clone()));
    }
    let mut c = RunConfig::defaults(subcommand);
    for (k, v) in &merged {
        let f = k.as_str();
        match f {
            "domain" => c.domain = parse_domain(v)?,
            "bc" => {
                c.bc = match v.to_ascii_lowercase().as_str() {
                    "specular" => Bc::Specular,
                    "absorb" | "absorbing" | "dirichlet" => Bc::Absorb,
                    _ => return Err(parse_err(f, format!("`{v}` is not `specular` or `absorb`"))),
                }
            }
            "s" => c.s = num(f, v)?,
            "eps" => c.eps = num(f, v)?,
            "eps_list" => c.eps_list = float_list(f, v)?,
            "n" => c.n = num(f, v)?,
            "T" => c.t_final = num(f, v)?,
            "dt" => c.dt = num(f, v)?,
            "grid_n" => c.grid_n = num(f, v)?,
            "grid" => c.grid = num(f, v)?,
            "hist_max" => c.hist_max = num(f, v)?,
            "seed" => c.seed = num(f, v)?,
            "output_dir" => c.output_dir = PathBuf::from(v),
            "snapshots" => c.snapshots = num(f, v)?,
            "method" => {
                c.method = match v.to_ascii_lowercase().as_str() {
                    "implicit_euler" | "euler" => Method::ImplicitEuler,
                    "exponential" | "exp" => Method::Exponential,
                    _ => return Err(parse_err(f, format!("`{v}` is not `implicit_euler` or `exponential`"))),
                }
            }
            "extent" => c.extent = num(f, v)?,
            "macro_grid_n" => c.macro_grid_n = num(f, v)?,
            "macro_dt" => c.macro_dt = num(f, v)?,
            "x" => c.x = float_list(f, v)?,
            "v" => c.v = float_list(f, v)?,
            "function" => {
                c.function = match v.to_ascii_lowercase().as_str() {
                    "gaussian" => TestFunction::Gaussian,
                    "ridge" => TestFunction::Ridge,
                    "radial_cosine" => TestFunction::RadialCosine,
                    "constant" => TestFunction::Constant,
                    _ => return Err(parse_err(f, format!("unknown test function `{v}`"))),
                }
            }
            "n_radial" => c.n_radial = num(f, v)?,
            "n_angular" => c.n_angular = num(f, v)?,
            "r_trunc" => c.r_trunc = num(f, v)?,
            "window" => c.window = num(f, v)?,
            "dim" => c.dim = num(f, v)?,
            "bins" => c.bins = num(f, v)?,
            "vmax" => c.vmax = num(f, v)?,
            "xi_max" => c.xi_max = num(f, v)?,
            "n_xi" => c.n_xi = num(f, v)?,
            _ => return Err(parse_err(f, "unknown key")),
        }
    }
    validate(&mut c)?;
    Ok(c)
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 { Ok(()) } else { Err(invalid(field, "must be a positive finite number")) }
}

fn at_least(field: &str, v: usize, min: usize) -> Result<(), ConfigError> {
    if v >= min { Ok(()) } else { Err(invalid(field, format!("must be at least {min}"))) }
}

fn validate(c: &mut RunConfig) -> Result<(), ConfigError> {
    if !(c.s > 0.0 && c.s < 1.0) {
        return Err(invalid("s", "must be in (0,1)"));
    }
    if !(c.eps > 0.0 && c.eps.is_finite()) {
        return Err(invalid("eps", "must be positive"));
    }
    if c.eps_list.is_empty() || c.eps_list.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(invalid("eps_list", "must be a non-empty list of positive numbers"));
    }
    if c.eps_list.windows(2).any(|w| w[0] < w[1]) {
        c.eps_list.sort_by(|a, b| b.total_cmp(a));
        c.warnings.push(format!("eps_list was not in decreasing order; sorted to {:?}", c.eps_list));
    }
    if c.eps_list.windows(2).any(|w| w[0] == w[1]) {
        return Err(invalid("eps_list", "entries must be distinct"));
    }
    positive("T", c.t_final)?;
    positive("dt", c.dt)?;
    if c.dt > c.t_final {
        return Err(invalid("dt", "must not exceed T"));
    }
    positive("macro_dt", c.macro_dt)?;
    positive("hist_max", c.hist_max)?;
    positive("extent", c.extent)?;
    positive("r_trunc", c.r_trunc)?;
    positive("window", c.window)?;
    positive("vmax", c.vmax)?;
    positive("xi_max", c.xi_max)?;
    at_least("n", c.n, 1)?;
    at_least("grid_n", c.grid_n, 16)?;
    at_least("macro_grid_n", c.macro_grid_n, 16)?;
    at_least("grid", c.grid, 1)?;
    at_least("snapshots", c.snapshots, 1)?;
    at_least("n_radial", c.n_radial, 4)?;
    at_least("n_angular", c.n_angular, 4)?;
    at_least("bins", c.bins, 1)?;
    at_least("n_xi", c.n_xi, 2)?;
    if !(1..=3).contains(&c.dim) {
        return Err(invalid("dim", "must be 1, 2 or 3"));
    }
    let d = c.domain.dim();
    match c.subcommand {
        Subcommand::Trace => {
            if c.x.len() != d {
                return Err(invalid("x", format!("needs {d} coordinates for this domain")));
            }
            if c.v.len() != d {
                return Err(invalid("v", format!("needs {d} coordinates for this domain")));
            }
            if !c.domain.contains(&c.x) {
                return Err(invalid("x", "must lie in the closed domain"));
            }
        }
        Subcommand::Kinetic | Subcommand::LimitStudy => {
            if !matches!(c.domain, DomainShape::UnitBall(1 | 2) | DomainShape::HalfSpace(1)) {
                return Err(invalid("domain", "kinetic runs support interval, disk and halfline"));
            }
        }
        Subcommand::Macro => match (c.domain, c.bc) {
            (DomainShape::UnitBall(1 | 2), Bc::Absorb) | (DomainShape::UnitBall(2) | DomainShape::HalfSpace(1), Bc::Specular) => {}
            _ => return Err(invalid("domain", "macro solvers cover interval/disk with absorb, disk/halfline with specular")),
        },
        Subcommand::Operator => {
            if c.function == TestFunction::Ridge && matches!(c.domain, DomainShape::UnitBall(_)) {
                return Err(invalid("function", "ridge needs an unbounded domain"));
            }
        }
        Subcommand::Equilibrium => {}
    }
    if c.subcommand == Subcommand::LimitStudy {
        match (c.domain, c.bc) {
            (DomainShape::HalfSpace(1), Bc::Specular) | (DomainShape::UnitBall(1 | 2), Bc::Absorb) | (DomainShape::UnitBall(2), Bc::Specular) => {}
            _ => return Err(invalid("bc", "no macroscopic reference for this domain and boundary condition")),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_gets_defaults() {
        let c = parse_config(Subcommand::Kinetic, "# nothing but a comment\n\n", &[]).unwrap();
        assert_eq!(c, RunConfig::defaults(Subcommand::Kinetic));
    }

    #[test]
    fn s_out_of_range_is_rejected_by_field() {
        let e = parse_config(Subcommand::Kinetic, "s = 1.5", &[]).unwrap_err();
        assert_eq!(e, invalid("s", "must be in (0,1)"));
    }

    #[test]
    fn eps_list_is_sorted_descending_with_warning() {
        let c = parse_config(Subcommand::LimitStudy, "eps_list = 0.1, 0.4, 0.05, 0.2", &[]).unwrap();
        assert_eq!(c.eps_list, vec![0.4, 0.2, 0.1, 0.05]);
        assert_eq!(c.warnings.len(), 1);
    }

    #[test]
    fn unknown_and_malformed_keys_name_the_field() {
        assert_eq!(parse_config(Subcommand::Macro, "colour = red", &[]).unwrap_err().field(), "colour");
        assert_eq!(parse_config(Subcommand::Macro, "n = many", &[]).unwrap_err().field(), "n");
        assert!(matches!(parse_config(Subcommand::Macro, "s 0.3", &[]), Err(ConfigError::Parse { .. })));
        assert_eq!(parse_config(Subcommand::Macro, "s = 0.3\ns = 0.4", &[]).unwrap_err().field(), "s");
    }

    #[test]
    fn overrides_win() {
        let c = parse_config(Subcommand::Kinetic, "seed = 1", &[("seed".into(), "9".into())]).unwrap();
        assert_eq!(c.seed, 9);
    }

    #[test]
    fn canonical_form_round_trips() {
        let text = "domain = halfline\nbc = specular\ns = 0.75\neps_list = 0.3,0.1\nx = 0.5\nv = -2\ngrid = 64";
        let c = parse_config(Subcommand::Kinetic, text, &[]).unwrap();
        let again = parse_config(Subcommand::Kinetic, &c.canonical(), &[]).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn domain_names() {
        for (name, d) in [
            ("disk", DomainShape::UnitBall(2)),
            ("ball3", DomainShape::UnitBall(3)),
            ("halfline", DomainShape::HalfSpace(1)),
            ("halfspace2", DomainShape::HalfSpace(2)),
            ("whole1", DomainShape::WholeSpace(1)),
        ] {
            assert_eq!(parse_domain(name).unwrap(), d);
        }
        assert!(parse_domain("ball7").is_err());
        assert!(parse_domain("torus").is_err());
    }
}
