use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const MINIMAL: &str = "[model]\ndirac_mass = 1.0\nboson_mass = 1.0\ncoupling = 0.5\n";

fn yukawa(dir: &Path, config: &str, args: &[&str]) -> Output {
    let path = dir.join("run.toml");
    fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_yukawa"))
        .args(args)
        .arg("--config")
        .arg(&path)
        .env_remove("YUKAWA_OUT_DIR")
        .current_dir(dir)
        .output()
        .unwrap()
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn free_spectrum_on_minimal_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = MINIMAL
        .replace("coupling = 0.5", "coupling = 0.0")
        .replace("boson_mass = 1.0", "boson_mass = 0.5");
    let o = yukawa(dir.path(), &config, &["spectrum", "--out", "s.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(dir.path().join("s.json"));
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["E_0"], 0.0);
    assert_eq!(v["gap"], 0.5);
    assert_eq!(v["dimension"], 64);
    assert_eq!(v["config"]["model"]["boson_mass"], 0.5);
    assert_eq!(v["config"]["solver"]["k"], 2);
    assert!(v["timings"].is_null());
}

#[test]
fn missing_mass_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = yukawa(dir.path(), "[model]\nboson_mass = 1.0\ncoupling = 0.5\n", &["spectrum"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("dirac_mass"), "{}", stderr(&o));
}

#[test]
fn unknown_field_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = yukawa(dir.path(), &format!("{MINIMAL}colour = 3\n"), &["spectrum"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("colour"), "{}", stderr(&o));
    let o = yukawa(
        dir.path(),
        &MINIMAL.replace("dirac_mass = 1.0", "dirac_mass = -1.0"),
        &["spectrum"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("dirac_mass"), "{}", stderr(&o));
}

#[test]
fn dense_cap_exceeded_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let config = format!("{MINIMAL}[solver]\nmethod = \"dense\"\ndense_cap = 10\n");
    let o = yukawa(dir.path(), &config, &["spectrum"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("64"), "{}", stderr(&o));
    let config = format!("{MINIMAL}max_dimension = 32\n");
    let o = yukawa(dir.path(), &config, &["spectrum"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("64"), "{}", stderr(&o));
}

#[test]
fn non_convergence_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let config = format!("{MINIMAL}[solver]\nmethod = \"lanczos\"\nmax_iter = 3\nkrylov_dim = 3\n");
    let o = yukawa(dir.path(), &config, &["spectrum"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn kappa_scan_writes_table_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let o = yukawa(dir.path(), MINIMAL, &["scan-kappa", "--out", "scan.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "kappa,E0,gap,residual");
    assert_eq!(lines.len(), 12);
    let kappas: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(kappas.windows(2).all(|w| w[0] < w[1]));
    let side = json(dir.path().join("scan.json"));
    assert_eq!(side["all_gaps_positive"], true);
    assert_eq!(side["perturbation_bound_holds"], true);
    assert_eq!(side["rows"], 11);
    assert_eq!(side["complete"], true);
}

#[test]
fn single_point_grid_reports_mass_gap() {
    let dir = tempfile::tempdir().unwrap();
    let config = format!("{MINIMAL}[scan]\nkappas = [0.0]\n").replace("boson_mass = 1.0", "boson_mass = 0.25");
    let o = yukawa(dir.path(), &config, &["scan-kappa", "--out", "k.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = fs::read_to_string(dir.path().join("k.csv")).unwrap();
    assert_eq!(table.lines().nth(1).unwrap(), "0,0,0.25,0");
    let o = yukawa(dir.path(), &format!("{MINIMAL}[scan]\nkappas = []\n"), &["scan-kappa"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn converge_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = format!("{MINIMAL}[converge.refinement]\nkind = \"boson_cap\"\nvalues = [2]\n");
    let o = yukawa(dir.path(), &config, &["converge", "--out", "c.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(dir.path().join("c.json"));
    assert_eq!(v["report"]["rows"].as_array().unwrap().len(), 1);
    assert!(v["report"]["rows"][0]["delta"].is_null());

    let config = format!("{MINIMAL}[converge.refinement]\nkind = \"boson_cap\"\nvalues = [3, 2]\n");
    let o = yukawa(dir.path(), &config, &["converge"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("refinement"), "{}", stderr(&o));
}

#[test]
fn verify_default_config_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = yukawa(dir.path(), MINIMAL, &["verify", "--out", "v.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(dir.path().join("v.json"));
    assert_eq!(v["report"]["all_pass"], true);
    assert_eq!(v["report"]["checks"].as_array().unwrap().len(), 8);
}

#[test]
fn output_directory_override() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("elsewhere");
    let path = dir.path().join("run.toml");
    fs::write(&path, format!("{MINIMAL}[output]\ndirectory = \"ignored\"\n")).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_yukawa"))
        .args(["spectrum", "--config"])
        .arg(&path)
        .env("YUKAWA_OUT_DIR", &target)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(target.join("spectrum.json").exists());
    assert!(!dir.path().join("ignored").exists());
}

#[test]
fn outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let config = format!("{MINIMAL}[solver]\nmethod = \"lanczos\"\n");
    for name in ["a.json", "b.json"] {
        let o = yukawa(
            dir.path(),
            &config,
            &["spectrum", "--threads", "1", "--seed", "5", "--out", name],
        );
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let a = fs::read(dir.path().join("a.json")).unwrap();
    let b = fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);
    assert_eq!(json(dir.path().join("a.json"))["config"]["solver"]["seed"], 5);
}

#[test]
fn timings_only_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let o = yukawa(dir.path(), MINIMAL, &["spectrum", "--timings", "--out", "t.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(json(dir.path().join("t.json"))["timings"]["total_seconds"].is_number());
}

#[test]
fn config_is_required() {
    let o = Command::new(env!("CARGO_BIN_EXE_yukawa"))
        .arg("spectrum")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
