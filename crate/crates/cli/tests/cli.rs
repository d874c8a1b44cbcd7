use rotminkowski::bodies::BodySpec;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    root.join(name).to_string_lossy().into_owned()
}

fn rotmink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotmink")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn value(text: &str, key: &str) -> f64 {
    let prefix = format!("{key}: ");
    let line = text.lines().find(|l| l.starts_with(&prefix)).unwrap_or_else(|| panic!("no {key} in\n{text}"));
    line[prefix.len()..].trim().parse().unwrap()
}

fn temp_path(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rotmink-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn certify_ball_has_vanishing_first_order() {
    let o = rotmink(&["certify", "--body", &fixture("ball.json"), "--m-max", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(value(&text, "norm 1") < 1e-12);
    assert!(value(&text, "norm 0") > 1.0);
    assert!(text.contains("verdict_universal: false"));
}

#[test]
fn decompose_segment_into_even_target() {
    let o = rotmink(&[
        "decompose",
        "--generator",
        &fixture("segment.json"),
        "--target",
        &fixture("even_target.json"),
        "--m-max",
        "6",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(value(&text, "residual_sup") <= 1e-3);
    assert!(text.contains("variant: central"));
}

#[test]
fn decompose_csv_lists_rotated_parts() {
    let o = rotmink(&[
        "decompose",
        "--generator",
        &fixture("segment.json"),
        "--target",
        &fixture("even_target.json"),
        "--m-max",
        "4",
        "--rotations",
        "64",
        "--format",
        "csv",
    ]);
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "side,weight,r11,r12,r21,r22");
    assert_eq!(rows.len(), 65);
    for row in &rows[1..] {
        let fields: Vec<&str> = row.split(',').collect();
        assert!(fields[0] == "t1" || fields[0] == "t2");
        let w: f64 = fields[1].parse().unwrap();
        assert!(w > 0.0);
    }
}

#[test]
fn coarse_rotation_rule_is_a_tolerance_failure() {
    let o = rotmink(&[
        "decompose",
        "--generator",
        &fixture("segment.json"),
        "--target",
        &fixture("even_target.json"),
        "--m-max",
        "6",
        "--rotations",
        "16",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("residual_sup"), "diagnostics still printed");
    assert!(stderr(&o).contains("exceeds tolerance"));
}

#[test]
fn lemma2_on_pentagon() {
    let o = rotmink(&["verify", "lemma2", "--body", &fixture("pentagon.json"), "--matrix", "1,0;0,1.3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(value(&stdout(&o), "abs_error") <= 1e-6);
}

#[test]
fn steiner_and_mean_width_match_closed_forms() {
    for check in ["steiner", "meanwidth"] {
        for body in ["pentagon.json", "triangle.json", "disc.json", "ball.json"] {
            let o = rotmink(&["verify", check, "--body", &fixture(body)]);
            assert_eq!(o.status.code(), Some(0), "{check} {body}: {}", stderr(&o));
            assert!(value(&stdout(&o), "max_error") <= 1e-6);
        }
    }
}

#[test]
fn form1_reports_both_forms() {
    let o = rotmink(&["verify", "form1", "--body", &fixture("constant_width.json"), "--m", "3", "--rotations", "64"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(value(&text, "max_effective_error") < 1e-12);
    assert!(text.contains("order 3: textbook"));
}

#[test]
fn symmetric_body_cannot_be_made_universal() {
    let o = rotmink(&["perturb", "--body", &fixture("disc.json"), "--goal", "universal"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("precondition") && err.contains("centrally symmetric"), "{err}");
}

#[test]
fn perturb_is_reproducible() {
    let out = temp_path("report.txt");
    let mut runs = Vec::new();
    for _ in 0..2 {
        let o = rotmink(&[
            "perturb",
            "--body",
            &fixture("constant_width.json"),
            "--seed",
            "7",
            "--m-max",
            "8",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        runs.push(std::fs::read(&out).unwrap());
        std::fs::remove_file(&out).unwrap();
    }
    assert!(!runs[0].is_empty());
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn scan_finds_central_image_of_disc() {
    let o = rotmink(&["scan-f", "--body", &fixture("disc.json"), "--goal", "central", "--m-max", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("\"winner\": {"));
}

#[test]
fn outputs_carry_version_and_effective_config() {
    let o = rotmink(&["expand", "--body", &fixture("triangle.json"), "--m-max", "3", "--format", "csv"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), format!("# rotmink {}", env!("CARGO_PKG_VERSION")));
    let config = lines.next().unwrap().strip_prefix("# config ").unwrap();
    let parsed: serde_json::Value = serde_json::from_str(config).unwrap();
    assert_eq!(parsed["command"], "expand");
    assert_eq!(parsed["m_max"], 3);
    // 17 significant digits on every coefficient.
    for row in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let x = row.rsplit(',').next().unwrap();
        let mantissa = x.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
        assert_eq!(mantissa.len(), 17, "{x}");
    }
}

#[test]
fn config_file_supplies_fields_and_flags_override() {
    let cfg = temp_path("cfg.json");
    let body = fixture("disc.json");
    std::fs::write(&cfg, format!(r#"{{"command":"certify","body":{body:?},"m_max":3,"tau":1e-6}}"#)).unwrap();
    let o = rotmink(&["--config", cfg.to_str().unwrap(), "--m-max", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("\"m_max\":2") && text.contains("\"tau\":1e-6"));
    assert!(text.contains("norm 2") && !text.contains("norm 3"));
}

#[test]
fn input_errors_exit_one_with_diagnostics() {
    let cfg = temp_path("bad_cfg.json");
    std::fs::write(&cfg, r#"{"command":"certify","mmax":3}"#).unwrap();
    let o = rotmink(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown field `mmax`"));

    let bad = temp_path("bad_body.json");
    std::fs::write(&bad, "{\"type\": \"ball\",\n \"center\": [0, 0],\n \"radius\": \"one\"}").unwrap();
    let o = rotmink(&["certify", "--body", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("body: invalid type"), "{}", stderr(&o));
    std::fs::write(&bad, "{\"type\": \"ball\",\n \"center\": [0, 0],\n \"radius\": }").unwrap();
    let o = rotmink(&["certify", "--body", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let nested = temp_path("nested.json");
    std::fs::write(
        &nested,
        r#"{"type":"minkowski","dimension":2,"parts":[{"weight":-1,"body":{"type":"ball","center":[0,0],"radius":1}}]}"#,
    )
    .unwrap();
    let o = rotmink(&["certify", "--body", nested.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("parts[0]"), "{}", stderr(&o));

    let o = rotmink(&["certify", "--body", "/nonexistent/body.json"]);
    assert_eq!(o.status.code(), Some(1));
    let o = rotmink(&["certify"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing --body"));
    let o = rotmink(&["verify", "lemma2", "--body", &fixture("pentagon.json"), "--matrix", "1,0;0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn fixtures_round_trip_through_the_schema() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        let spec = BodySpec::from_json(&text).unwrap();
        let again = BodySpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(spec, again);
        assert!(spec.build().is_ok());
        count += 1;
    }
    assert!(count >= 8);
}

#[test]
fn run_config_fuzz_seeds_replay() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus/parse_run_config");
    let mut accepted = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        if let Ok(config) = rotminkowski_cli::RunConfig::from_json(&text) {
            let again = rotminkowski_cli::RunConfig::from_json(&config.to_json()).unwrap();
            assert_eq!(config, again);
            accepted += 1;
        }
    }
    assert!(accepted >= 3);
}
