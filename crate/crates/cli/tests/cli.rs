use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BASE: &str = r#"
model = "tree"
energy = 0.0
kappa = 0.0
seed = 3

[disorder]
nu = { kind = "uniform", k = 1.0 }
sigma = { kind = "antisymmetric_pair" }
"#;

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("run.toml");
    fs::write(&p, body).unwrap();
    p
}

fn treeloc(cmd: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treeloc"))
        .arg(cmd)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn assert_stamped(v: &Value) {
    assert_eq!(v["tool"], "treeloc");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn certify_then_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cert");
    let cfg = write_config(dir.path(), BASE);
    let o = treeloc("certify", &cfg, &out, &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let cert = json(&out.join("certificate.json"));
    assert_stamped(&cert);
    let c = &cert["payload"]["certificates"][0];
    let delta = c["delta"].as_f64().unwrap();
    assert!(delta > 0.0 && delta <= 0.995, "{delta}");
    let m = c["m"].as_u64().unwrap();

    let sim = format!(
        "{BASE}\n[mc]\nn_samples = 2000\nn_values = [0, {m}, {}]\ncertificate = {:?}\n",
        2 * m,
        out.join("certificate.json")
    );
    let cfg = write_config(dir.path(), &sim);
    let runs: Vec<PathBuf> = (0..3).map(|k| dir.path().join(format!("sim{k}"))).collect();
    assert_eq!(code(&treeloc("simulate", &cfg, &runs[0], &[])), 0);
    assert_eq!(code(&treeloc("simulate", &cfg, &runs[1], &[])), 0);
    assert_eq!(code(&treeloc("simulate", &cfg, &runs[2], &["--threads", "1"])), 0);
    let csv: Vec<String> = runs.iter().map(|r| fs::read_to_string(r.join("estimates.csv")).unwrap()).collect();
    assert_eq!(csv[0], csv[1]);
    assert_eq!(csv[0], csv[2]);
    let lines: Vec<&str> = csv[0].lines().collect();
    assert!(lines[0].starts_with(&format!("# treeloc {} config_hash=", env!("CARGO_PKG_VERSION"))));
    assert_eq!(lines[1], "n,E,epsilon,s,kappa,mean,stderr,n_samples,seed");
    assert_eq!(lines.len(), 5);
    let summary = json(&runs[0].join("simulate_summary.json"));
    assert_stamped(&summary);
    let s = &summary["payload"][0];
    assert_eq!(s["initial_bound_ok"], true);
    assert_eq!(s["decay_consistent"], true);
    assert_eq!(s["moment_bound_ok"], true);
    assert!(fs::read_to_string(runs[0].join("run_config.toml")).unwrap().contains("config_hash"));
}

#[test]
fn atomic_nu_is_invalid_input() {
    let dir = tempfile::tempdir().unwrap();
    let body = BASE.replace(r#"{ kind = "uniform", k = 1.0 }"#, r#"{ kind = "atoms", values = [-1.0, 1.0] }"#);
    let o = treeloc("certify", &write_config(dir.path(), &body), &dir.path().join("o"), &[]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("density required"));
}

#[test]
fn unreachable_contraction_is_certification_failure() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!("s_scan = [0.45]\n{BASE}\n[search]\nm_cap = 40\n");
    let out = dir.path().join("o");
    let o = treeloc("certify", &write_config(dir.path(), &body), &out, &[]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    assert_stamped(&json(&out.join("certify_failure.json")));
}

#[test]
fn crosscheck_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = treeloc("crosscheck", &write_config(dir.path(), BASE), &out, &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&out.join("crosscheck.json"));
    assert_stamped(&v);
    assert!(v["payload"].as_array().unwrap().iter().all(|c| c["passed"] == true));

    let bad = format!("{BASE}\n[crosscheck]\ninject_perturbation = 1e-6\n");
    assert_eq!(code(&treeloc("crosscheck", &write_config(dir.path(), &bad), &out, &[])), 3);

    let deep = format!("{BASE}\n[crosscheck]\ndepth = 13\n");
    assert_eq!(code(&treeloc("crosscheck", &write_config(dir.path(), &deep), &out, &[])), 1);
}

#[test]
fn keyest_writes_zeta() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = treeloc("keyest", &write_config(dir.path(), BASE), &out, &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_stamped(&json(&out.join("keyest.json")));
}

#[test]
fn sweep_covers_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let body = BASE.replace("energy = 0.0", "energy = [-1.0, 0.0, 1.0]").replace("kappa = 0.0", "kappa = [0.0, 0.1]")
        + "\n[mc]\nn_samples = 200\nn_values = [0, 2, 4]\ns = 0.1\n";
    let out = dir.path().join("o");
    let o = treeloc("sweep", &write_config(dir.path(), &body), &out, &["--seed", "11"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(2).collect();
    assert_eq!(rows.len(), 18);
    assert!(rows.iter().all(|r| r.ends_with(",11")));
}

#[test]
fn invalid_configs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    for body in [
        format!("{BASE}\nunknown_key = 1\n"),
        BASE.replace("k = 1.0", "k = -1.0"),
        "model = [".to_string(),
        format!("{BASE}\n[grid]\nn_nodes = 0\n"),
    ] {
        let o = treeloc("certify", &write_config(dir.path(), &body), &out, &[]);
        assert_eq!(code(&o), 1, "{body}\n{}", String::from_utf8_lossy(&o.stderr));
    }
    let missing = Command::new(env!("CARGO_BIN_EXE_treeloc")).arg("certify").output().unwrap();
    assert_eq!(code(&missing), 1);
    let o = treeloc("sweep", &write_config(dir.path(), BASE), &out, &[]);
    assert_eq!(code(&o), 1);
}
