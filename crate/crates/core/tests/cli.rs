mod common;

use std::fs;

use common::{golden, run_cli, GOLDEN_CASES};

// Regenerate with `UPDATE_GOLDEN=1 cargo test --test cli`.
#[test]
fn golden_reports() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for (fixture, case, args) in GOLDEN_CASES {
        let out = run_cli(fixture, args);
        assert_eq!(out.code, 0, "{} {}: {}", fixture, case, out.stderr);
        let path = golden(fixture, case);
        if update {
            fs::write(&path, &out.stdout).unwrap();
            continue;
        }
        let expected =
            fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {}", path.display(), e));
        assert_eq!(out.stdout, expected, "{} {}", fixture, case);
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for (fixture, _, args) in GOLDEN_CASES.iter().take(6) {
        assert_eq!(run_cli(fixture, args).stdout, run_cli(fixture, args).stdout);
    }
}

#[test]
fn documented_examples() {
    let v: serde_json::Value =
        serde_json::from_str(&run_cli("yaxis", &["fibre", "GX", "at", "P2:(0,5)"]).stdout).unwrap();
    assert_eq!(v["result"]["case"], "GlueLocus");
    assert_eq!(v["result"]["dim"], 3);
    let v: serde_json::Value =
        serde_json::from_str(&run_cli("yaxis", &["check-compat", "GX", "w1", "w2"]).stdout)
            .unwrap();
    assert_eq!(
        v["result"],
        serde_json::json!({"compatible": true, "mode": "exact"})
    );
    let v: serde_json::Value = serde_json::from_str(
        &run_cli("yaxis", &["oracle", "GX", "at", "P2:(0,5)", "degree", "2"]).stdout,
    )
    .unwrap();
    assert_eq!(v["result"]["dim"], 3);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["seed"], 0);
}

#[test]
fn exit_codes_and_streams() {
    let out = run_cli("yaxis", &["glue-form", "GX", "w1", "w3"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.is_empty());
    assert!(out.stderr.contains("not compatible"));

    let out = run_cli("yaxis", &["no-such-command", "GX"]);
    assert_eq!(out.code, 2);
    let out = run_cli("yaxis", &["fibre", "GX", "at", "P7:(1)"]);
    assert_eq!(out.code, 2);
    let out = run_cli("missing", &["fibre", "GX"]);
    assert_eq!(out.code, 2);
    let out = run_cli(
        "yaxis",
        &["gram-rank", "GX", "g1", "g2", "at", "P2:(0,1,2)"],
    );
    assert_eq!(out.code, 1);
}

#[test]
fn text_mode() {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_gluedforms"))
        .arg(common::fixture("wedge"))
        .args(["fibre", "W", "at", "P1:(0,0)", "--text"])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("dim: 4"), "{}", text);
    assert!(text.contains("case: GlueLocus"), "{}", text);
}

#[test]
fn scene_errors_name_the_declaration() {
    let dir = std::env::temp_dir().join(format!("gluedforms-scene-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.scene");
    fs::write(
        &path,
        "space X1 = R^2;\nsubset Y of X1 = param(t0 -> (t0^2, 0));\n",
    )
    .unwrap();
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_gluedforms"))
        .arg(&path)
        .args(["fibre", "GX", "at", "P1:(0,0)"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("2:") && err.contains("\"Y\"") && err.contains("not affine"),
        "{}",
        err
    );
    fs::remove_dir_all(&dir).ok();
}
