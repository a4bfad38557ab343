//! End-to-end runs of the `specdiff` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn specdiff(args: &[&str], workers: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specdiff"))
        .args(args)
        .env("SPECDIFF_WORKERS", workers)
        .output()
        .expect("binary runs")
}

fn small_limit_config(dir: &Path) -> String {
    let path = dir.join("limit.conf");
    fs::write(
        &path,
        "# tiny half-line ladder\n\
         domain = halfline\n\
         bc = specular\n\
         s = 0.75\n\
         eps_list = 0.1, 0.4, 0.2\n\
         n = 4000\n\
         T = 0.02\n\
         dt = 2e-3\n\
         grid = 16\n\
         macro_grid_n = 32\n\
         seed = 7\n",
    )
    .unwrap();
    path.display().to_string()
}

#[test]
fn limit_study_writes_errors_table_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let conf = small_limit_config(dir.path());
    let out = dir.path().join("nested/run");
    let o = specdiff(&["limit-study", "--config", &conf, "--out", out.to_str().unwrap()], "1");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning: eps_list"));

    let csv = fs::read_to_string(out.join("errors.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("eps,l2_error,mc_stderr"));
    let eps: Vec<f64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(eps, vec![0.4, 0.2, 0.1]);

    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("errors.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["subcommand"], "limit-study");
    assert_eq!(meta["config_sha256"].as_str().unwrap().len(), 64);
    assert!(meta["git_revision"].is_string());
    assert!(meta["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert_eq!(meta["config"]["eps_list"], "4e-1,2e-1,1e-1");
}

#[test]
fn reruns_are_byte_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let conf = small_limit_config(dir.path());
    let run = |name: &str, workers: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = specdiff(&["kinetic", "--config", &conf, "--seed", seed, "--set", "n=3000", "--out", out.to_str().unwrap()], workers);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read(out.join("density.csv")).unwrap()
    };
    let a = run("a", "1", "11");
    assert_eq!(a, run("b", "1", "11"));
    assert_eq!(a, run("c", "3", "11"));
    assert_ne!(a, run("d", "1", "12"));
}

#[test]
fn kinetic_and_macro_densities_share_a_layout() {
    let dir = tempfile::tempdir().unwrap();
    let common = ["--set", "domain=disk", "--set", "bc=absorb", "--set", "T=0.01", "--set", "grid=8", "--set", "snapshots=2"];
    let mut k = vec!["kinetic", "--set", "n=2000", "--out"];
    let kout = dir.path().join("k");
    k.push(kout.to_str().unwrap());
    k.extend(common);
    let mut m = vec!["macro", "--set", "grid_n=16", "--set", "dt=5e-3", "--out"];
    let mout = dir.path().join("m");
    m.push(mout.to_str().unwrap());
    m.extend(common);
    for args in [&k, &m] {
        let o = specdiff(args, "1");
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let keys = |p: &Path| -> Vec<String> {
        fs::read_to_string(p.join("density.csv"))
            .unwrap()
            .lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect()
    };
    let (kk, mk) = (keys(&kout), keys(&mout));
    assert_eq!(kk, mk);
    assert_eq!(kk[0], "t,x1,x2");
    // every numeric field carries 17 significant digits
    let first = fs::read_to_string(mout.join("density.csv")).unwrap().lines().nth(1).unwrap().to_string();
    for cell in first.split(',') {
        let mantissa = cell.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.len(), 18, "{cell}");
    }
}

#[test]
fn trace_polyline_ends_at_the_endpoint() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t");
    let o = specdiff(&["trace", "--set", "x=0.2,0.1", "--set", "v=3,2", "--out", out.to_str().unwrap()], "1");
    assert!(o.status.success());
    let csv = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert!(csv.starts_with("seg_index,x1,x2,len\n"));
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("trace.csv.meta.json")).unwrap()).unwrap();
    let last: Vec<f64> = csv.lines().last().unwrap().split(',').skip(1).take(2).map(|c| c.parse().unwrap()).collect();
    let end: Vec<f64> = meta["details"]["endpoint"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(last, end);
    let total: f64 = csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 13f64.sqrt()).abs() < 1e-12);
}

#[test]
fn exit_codes_follow_error_class() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = out.to_str().unwrap();
    let code = |args: &[&str]| specdiff(args, "1").status.code().unwrap();
    assert_eq!(code(&["kinetic", "--set", "s=1.5", "--out", o]), 2);
    assert_eq!(code(&["kinetic", "--set", "colour=red", "--out", o]), 2);
    assert_eq!(code(&["macro", "--set", "domain=halfline", "--set", "bc=absorb", "--out", o]), 2);
    assert_eq!(code(&["kinetic", "--config", "/definitely/not/here.conf", "--out", o]), 2);
    // trace from a point outside the disk is rejected by geometry
    assert_eq!(code(&["trace", "--set", "x=2,0", "--out", o]), 2);
    // the output directory is an existing regular file
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    assert_eq!(code(&["trace", "--out", blocker.to_str().unwrap()]), 4);
    assert_eq!(code(&["equilibrium", "--set", "n=1000", "--out", o]), 0);
}

#[test]
fn shipped_configs_parse() {
    use specdiff_cli::config::{parse_config, Subcommand};
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/configs");
    for (file, sub) in [
        ("limit_half_line.conf", Subcommand::LimitStudy),
        ("limit_disk.conf", Subcommand::LimitStudy),
        ("kinetic_disk.conf", Subcommand::Kinetic),
    ] {
        let text = fs::read_to_string(Path::new(dir).join(file)).unwrap();
        let cfg = parse_config(sub, &text, &[]).unwrap_or_else(|e| panic!("{file}: {e}"));
        assert!(cfg.warnings.is_empty());
    }
}
