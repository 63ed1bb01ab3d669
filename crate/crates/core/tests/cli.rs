use std::path::Path;
use std::process::{Command, Output};

use gatemon_sim::cli::{config_digest, parse_config, RunConfig};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gatemon-sim"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn params_reports_transmon_relations() {
    let out = run(&["params", "--ej", "12500", "--ec", "250"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("f01_MHz,4750.0"), "{text}");
    assert!(text.contains("# model_tag: transmon-asymptotic"));
}

#[test]
fn headers_carry_version_digest_and_tag() {
    let out = run(&["loss"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let digest = config_digest(&RunConfig::default());
    assert!(text.starts_with("# gatemon-sim "));
    assert!(text.contains(&format!("# config_digest: {digest}")));
    assert!(text.contains("# command: loss"));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains(&format!("config_digest={digest}")));
}

#[test]
fn unknown_config_key_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", "{\n  \"noise\": {\"sigma\": 1.0}\n}\n");
    let out = run(&["--config", &cfg, "loss"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("noise") && stderr.contains("line 2"), "{stderr}");
}

#[test]
fn malformed_json_and_bad_flags_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "broken.json", "{ \"seed\": ");
    assert_eq!(run(&["--config", &cfg, "loss"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["--preset", "set9", "idle"]).status.code(), Some(2));
}

#[test]
fn malformed_participation_table_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let table = write_config(dir.path(), "t.csv", "# provenance: test\nthickness_um,P_planar,P_tsv\n1.0,0.5\n");
    let cfg = write_config(dir.path(), "q.json", &format!("{{\"qratio\": {{\"table\": \"{table}\"}}}}"));
    let out = run(&["--config", &cfg, "qratio"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 3"));
}

#[test]
fn domain_errors_exit_1() {
    assert_eq!(run(&["params", "--capacitance-ff=-1"]).status.code(), Some(1));
    assert_eq!(run(&["idle", "--bracket-lo", "2000", "--bracket-hi", "3400"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "l.json", r#"{"loss": {"channels": [{"name": "x", "participation": 1.5, "loss_tangent": 1e-5}], "gamma0": 0.0, "frequency_ghz": 5.0}}"#);
    assert_eq!(run(&["--config", &cfg, "loss"]).status.code(), Some(1));
}

#[test]
fn zero_noise_gives_single_bin_at_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n.json", r#"{"noise": {"n_samples": 50}}"#);
    let out = run(&["--config", &cfg, "noise", "--sigma-wc", "0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows, vec![vec!["0.0".to_string(), "50.0".into(), "50.0".into()]]);
}

#[test]
fn idle_points_agree_across_presets() {
    let mut freqs = Vec::new();
    for preset in ["set1", "set2", "set3"] {
        let out = run(&["--preset", preset, "idle"]);
        assert!(out.status.success());
        let rows = data_rows(&String::from_utf8(out.stdout).unwrap());
        let f: f64 = rows[0][0].parse().unwrap();
        let z: f64 = rows[0][1].parse().unwrap();
        assert!(z.abs() < 1e-3);
        freqs.push(f);
    }
    let spread = freqs.iter().cloned().fold(f64::MIN, f64::max) - freqs.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 200.0, "{freqs:?}");
}

#[test]
fn out_flag_writes_file_and_does_not_change_digest() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.csv");
    let out = run(&["--out", path.to_str().unwrap(), "qratio"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let file = std::fs::read_to_string(&path).unwrap();
    assert_eq!(file.into_bytes(), run(&["qratio"]).stdout);
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let text = std::fs::read_to_string(&path).unwrap();
            let cfg = parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            cfg.system_spec().validate().unwrap();
            seen += 1;
        }
    }
    assert!(seen >= 3);
}

#[test]
fn explicit_system_overrides_preset() {
    let spec = gatemon_sim::presets::ParameterSet::Set3.system();
    let body = serde_json::json!({ "preset": "set1", "system": spec }).to_string();
    let cfg = parse_config(&body).unwrap();
    assert_eq!(cfg.system_spec(), spec);
}
