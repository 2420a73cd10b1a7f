use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gbopt"))
}

fn u12() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/u12.toml")
}

fn sweep(out: &Path, extra: &[&str]) -> std::process::Output {
    let output = bin().args(["sweep", "--config"]).arg(u12()).arg("--out").arg(out).args(extra).output().unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    output
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    names
}

#[test]
fn sweep_writes_reports_and_is_repeatable() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    sweep(a.path(), &[]);
    sweep(b.path(), &[]);
    assert_eq!(listing(a.path()), ["comparison.md", "results_esspg.csv", "results_isspg.csv", "sheets", "sweep.json"]);
    for name in ["sweep.json", "results_isspg.csv", "results_esspg.csv", "comparison.md"] {
        assert_eq!(std::fs::read(a.path().join(name)).unwrap(), std::fs::read(b.path().join(name)).unwrap(), "{name} differs");
    }

    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(a.path().join("sweep.json")).unwrap()).unwrap();
    assert_eq!(doc["sweeps"].as_array().unwrap().len(), 2);
    assert_eq!(doc["config"]["efficiency"]["friction_coefficient"], 0.06);
    assert!(doc["config"]["defaults_applied"].as_array().unwrap().iter().any(|k| k == "strength.safety_factor"));

    let csv = std::fs::read_to_string(a.path().join("results_isspg.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 11);
    assert!(lines[0].starts_with("bin_lo,bin_hi,status"));
    assert!(lines[3].starts_with("7,8,empty"));
    assert!(lines[3].ends_with("ring-diameter"));
    assert!(!listing(&a.path().join("sheets")).is_empty());
}

#[test]
fn architecture_filter_and_candidate_log() {
    let dir = tempfile::tempdir().unwrap();
    sweep(dir.path(), &["--architectures", "isspg", "--log-candidates"]);
    let names = listing(dir.path());
    assert!(names.contains(&"results_isspg.csv".to_string()));
    assert!(!names.contains(&"results_esspg.csv".to_string()));
    let candidates = std::fs::read_to_string(dir.path().join("candidates.csv")).unwrap();
    assert!(candidates.lines().skip(1).all(|l| l.starts_with("isspg,")));
    assert!(listing(&dir.path().join("sheets")).iter().all(|n| n.starts_with("isspg_")));
}

#[test]
fn eval_prints_evaluation_and_sheet() {
    let out = bin().args(["eval", "--config"]).arg(u12()).args(["--design", "20,40,100,0.5,3,isspg"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut stream = serde_json::Deserializer::from_str(&text).into_iter::<serde_json::Value>();
    let ev = stream.next().unwrap().unwrap();
    let sheet = stream.next().unwrap().unwrap();
    assert_eq!(ev["feasible"], true);
    assert_eq!(sheet["layout"]["pin_circle_diameter_mm"], 30.0);
    assert_eq!(sheet["mass_kg"], ev["mass"]);
}

#[test]
fn eval_reports_infeasible_and_rejects_malformed() {
    let out = bin().args(["eval", "--config"]).arg(u12()).args(["--design", "20,40,101,0.5,3,isspg"]).output().unwrap();
    assert!(out.status.success());
    let ev: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(ev["feasible"], false);
    assert!(ev["failures"].as_array().unwrap().iter().any(|f| f["code"] == "geometric"));
    let out = bin().args(["eval", "--config"]).arg(u12()).args(["--design", "20,40,100"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn bad_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(u12()).unwrap().replace("stator_inner_diameter_mm = 65.0", "stator_inner_diameter_mm = 130.0");
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, text).unwrap();
    let out = bin().args(["sweep", "--config"]).arg(&path).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("motor.stator_inner_diameter_mm"));
}

#[test]
fn fit_bearings_reports_residuals() {
    let out = bin().arg("fit-bearings").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("R2(log)"));
    // one residual row per table row plus headers
    assert!(text.lines().filter(|l| l.trim_start().chars().next().is_some_and(|c| c.is_ascii_digit())).count() >= 28);
}

#[test]
fn external_actuator_is_thicker() {
    let sheet = |design: &str| {
        let out = bin().args(["eval", "--config"]).arg(u12()).args(["--design", design]).output().unwrap();
        let text = String::from_utf8(out.stdout).unwrap();
        let mut stream = serde_json::Deserializer::from_str(&text).into_iter::<serde_json::Value>();
        stream.nth(1).unwrap().unwrap()
    };
    let internal = sheet("20,40,100,0.5,3,isspg");
    let external = sheet("20,52,124,0.5,3,esspg");
    let len = |s: &serde_json::Value| s["layout"]["casing_length_mm"].as_f64().unwrap();
    assert!(len(&external) > len(&internal));
    assert!(external["layout"]["stack_height_mm"].as_f64().unwrap() >= internal["layout"]["stack_height_mm"].as_f64().unwrap());
}
