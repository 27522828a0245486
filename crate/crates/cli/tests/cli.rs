//! End-to-end runs of the binary against generated fixtures.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_crossed-cohom"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

#[test]
fn full_cli_round() {
    let dir = std::env::temp_dir().join(format!("crossed-cohom-cli-{}", std::process::id()));
    let dir_arg = format!("dir={}", dir.display());
    let out = run(&["gen-fixtures", &dir_arg]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let site = format!("site={}", dir.join("pseudo-circle/site.json").display());
    let group = format!(
        "group={}",
        dir.join("pseudo-circle/Z2-const.json").display()
    );
    let seq = format!("seq={}", dir.join("pseudo-circle/Z2-Z4-Z2.json").display());

    // h1: two classes, exit 0
    let out = run(&["h1", &site, &group]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("2 classes"));

    // verify-exact: all-pass, exit 0
    let out = run(&["verify-exact", &seq, &site]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("verdict: pass"));

    // malformed fixture: exit 2 with a parse location
    let broken = dir.join("broken.json");
    std::fs::write(&broken, "{\"points\": [1,2").unwrap();
    let out = run(&["validate-site", &format!("site={}", broken.display())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    // a failed verification exits 1 and carries a witness
    let presheaf = format!(
        "presheaf={}",
        dir.join("pseudo-circle/Z2-constant-presheaf.json")
            .display()
    );
    let out = run(&["check-sheaf", &site, &presheaf]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("no gluing"));

    // a refused bound exits 3
    let crossed = format!(
        "crossed={}",
        dir.join("pseudo-circle/S3-int.json").display()
    );
    let out = run(&["--bound", "2", "h2", &site, &crossed]);
    assert_eq!(out.status.code(), Some(3));

    // the environment variable supplies the default bound
    let out = bin()
        .env("CROSSED_COHOM_BOUND", "2")
        .args(["h2", &site, &crossed])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    // --json emits machine-readable output
    let out = run(&["--json", "h2", &site, &crossed]);
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed["command"], "h2");
    assert_eq!(parsed["pass"], true);

    // reports are deterministic
    let a = stdout(&run(&["h2", &site, &crossed]));
    let b = stdout(&run(&["h2", &site, &crossed]));
    assert_eq!(a, b);

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn oracle_flag_cross_checks_h1_and_h2() {
    let dir = std::env::temp_dir().join(format!("crossed-cohom-cli2-{}", std::process::id()));
    let dir_arg = format!("dir={}", dir.display());
    assert!(run(&["gen-fixtures", &dir_arg]).status.success());
    let site = format!("site={}", dir.join("pt/site.json").display());
    let group = format!("group={}", dir.join("pt/Z4-const.json").display());
    let out = run(&["--oracle", "h1", &site, &group]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("oracle"));
    let out = run(&["--oracle", "h2", &site, &group]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("oracle"));
    std::fs::remove_dir_all(&dir).ok();
}
