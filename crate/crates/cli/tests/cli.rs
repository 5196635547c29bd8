use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use critorbit::diagnostics::DiagnosticsReport;
use critorbit::orbit::Spectrum;
use critorbit_cli::pipeline::{
    MeasuresArtifact, ResidualsArtifact, SummabilityArtifact, DIAGNOSTICS_JSON, ERRORS_JSON, MEASURES_JSON,
    RESIDUALS_JSON, SPECTRUM_CSV, SUMMABILITY_JSON,
};
use critorbit_cli::{RunConfig, EXIT_ERROR, EXIT_INSTABILITY, EXIT_OK};

fn critorbit(dir: &Path, config: &str, args: &[&str]) -> Output {
    let path = dir.join("run.json");
    fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_critorbit"))
        .args(args)
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn malformed_and_unknown_configs_exit_with_error() {
    let dir = tempfile::tempdir().unwrap();
    for bad in [
        "{ not json",
        r#"{"map": {"num": [-2, 0, 1]}, "horizn": 64}"#,
        r#"{"map": {"num": [-2, 0, 1]}, "horizon": 1}"#,
        r#"{"map": {"num": [-2, 0, 1]}, "critical_point": {"index": 3}}"#,
        r#"{"map": {"num": [-2, 0, 1]}, "path": {"kind": "stolz", "alpha": 0.5, "count": 8}}"#,
    ] {
        let o = critorbit(dir.path(), bad, &["spectrum"]);
        assert_eq!(code(&o), EXIT_ERROR, "{bad}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn exit_code_reflects_instability_evidence() {
    let dir = tempfile::tempdir().unwrap();
    let o = critorbit(dir.path(), r#"{"map": {"num": [-0.1, 0, 1]}}"#, &["diagnose"]);
    assert_eq!(code(&o), EXIT_OK, "{}", String::from_utf8_lossy(&o.stderr));
    let o = critorbit(dir.path(), r#"{"map": {"num": [-2, 0, 1]}}"#, &["diagnose"]);
    assert_eq!(code(&o), EXIT_INSTABILITY);
}

#[test]
fn stage_error_keeps_partial_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"map": {"num": [-2, 0, 1]}, "ruelle": {"map": "config"}}"#;
    let o = critorbit(dir.path(), cfg, &["all"]);
    assert_eq!(code(&o), EXIT_ERROR);
    let out = dir.path().join("out");
    assert!(out.join(SPECTRUM_CSV).exists());
    assert!(out.join(DIAGNOSTICS_JSON).exists());
    let errors: serde_json::Value = serde_json::from_slice(&fs::read(out.join(ERRORS_JSON)).unwrap()).unwrap();
    assert_eq!(errors.as_array().unwrap().len(), 1);

    // a clean rerun removes the stale error file
    let o = critorbit(dir.path(), r#"{"map": {"num": [-2, 0, 1]}}"#, &["spectrum"]);
    assert_eq!(code(&o), EXIT_OK);
    assert!(!out.join(ERRORS_JSON).exists());
}

#[test]
fn artifacts_parse_back_into_their_types() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"map": {"num": [-2, 0, 1]}, "horizon": 48, "ruelle": {}, "seed": 3}"#;
    let o = critorbit(dir.path(), cfg, &["all"]);
    assert_eq!(code(&o), EXIT_INSTABILITY, "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out");
    let read = |name: &str| fs::read(out.join(name)).unwrap();

    let s = Spectrum::read_csv(read(SPECTRUM_CSV).as_slice()).unwrap();
    // σ_0 through σ_N
    assert_eq!(s.len(), 49);
    let summ: SummabilityArtifact = serde_json::from_slice(&read(SUMMABILITY_JSON)).unwrap();
    assert_eq!(summ.horizon, 48);
    let meas: MeasuresArtifact = serde_json::from_slice(&read(MEASURES_JSON)).unwrap();
    assert_eq!(meas.seed, 3);
    let diag: DiagnosticsReport = serde_json::from_slice(&read(DIAGNOSTICS_JSON)).unwrap();
    assert!(diag.has_instability_evidence());
    assert!(diag.citations.iter().all(|c| !Path::new(c).is_absolute()));
    let res: ResidualsArtifact = serde_json::from_slice(&read(RESIDUALS_JSON)).unwrap();
    assert_eq!(res.seed, 3);
}

#[test]
fn map_from_file_and_value_selector() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cubic.json"), r#"{"num": [0, -3, 0, 1]}"#).unwrap();
    let cfg = r#"{"map": {"file": "cubic.json"}, "critical_point": {"value": [1, 0]}, "horizon": 16}"#;
    let o = critorbit(dir.path(), cfg, &["spectrum"]);
    assert_eq!(code(&o), EXIT_OK, "{}", String::from_utf8_lossy(&o.stderr));
    let s = Spectrum::read_csv(fs::read(dir.path().join("out").join(SPECTRUM_CSV)).unwrap().as_slice()).unwrap();
    // the critical value -2 of z^3 - 3z is fixed with multiplier 9, so σ_n = 9^-n
    for n in 0..s.len() {
        let exact = 9f64.powi(-(n as i32));
        assert!((s.sigma(n) - critorbit::Complex64::new(exact, 0.0)).norm() <= 1e-12 * exact);
    }
}

#[test]
fn config_round_trips() {
    let text = r#"{
        "map": {"num": [[0.25, 0.1], 0, 1]},
        "horizon": 80,
        "path": {"kind": "stolz", "alpha": 2.0, "count": 12},
        "weights": {"q": [1, 1, 1, 1, 1, 1, 1, 1]},
        "ruelle": {"lambda": 0.1, "N": 3},
        "render": {"max_iter": 50},
        "seed": 9
    }"#;
    let (cfg, _) = RunConfig::parse(text, Path::new(".")).unwrap();
    let again = serde_json::to_string(&cfg).unwrap();
    let (back, _) = RunConfig::parse(&again, Path::new(".")).unwrap();
    assert_eq!(back, cfg);
}
