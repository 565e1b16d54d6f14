//! End-to-end tests of the `slowreveal` binary: the five-step workflow,
//! determinism, tamper handling, exit codes, and file hygiene.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_slowreveal"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "expected success, got {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        stdout(out),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn setup_desk(dir: &Path, seed: &str) {
    let out = run(&["setup", "--preset", "desk", "--out", dir.to_str().unwrap(), "--seed", seed]);
    assert_ok(&out);
}

#[test]
fn five_step_workflow() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    setup_desk(root, "1001");
    assert!(root.join("bulletin.json").exists());
    assert!(root.join("secret.json").exists());
    assert!(root.join("codes.csv").exists());

    // reveal 20 of 24 digits, leaving a 4000-candidate space
    let out = run(&["reveal", "--out", root.to_str().unwrap(), "--count", "20"]);
    assert_ok(&out);
    assert!(stdout(&out).contains("4 remaining"));

    let bulletin = root.join("bulletin.json");
    let out = run(&["crack", bulletin.to_str().unwrap(), "--budget", "10000"]);
    assert_ok(&out);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["outcome"], "found");
    assert_eq!(report["candidateCount"], "4000");

    let out = run(&["reveal", "--out", root.to_str().unwrap(), "--count", "4"]);
    assert_ok(&out);
    assert!(stdout(&out).contains("0 remaining"));

    let out = run(&["verify", bulletin.to_str().unwrap()]);
    assert_ok(&out);
    let text = stdout(&out);
    let json_part = &text[..text.rfind("payout:").unwrap()];
    let report: serde_json::Value = serde_json::from_str(json_part.trim()).unwrap();
    for check in ["primeCheck", "dividesCheck", "cofactorCheck", "winnerCheck"] {
        assert_eq!(report[check], true, "{check}");
    }

    // the cracked prime matches what verify reconstructed
    let w = report["winner"].as_u64().unwrap();
    assert!(text.contains(&format!("to code {w}")));
}

#[test]
fn setup_is_byte_identical_for_a_seed() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    setup_desk(a.path(), "7");
    setup_desk(b.path(), "7");
    let ba = fs::read(a.path().join("bulletin.json")).unwrap();
    let bb = fs::read(b.path().join("bulletin.json")).unwrap();
    assert_eq!(ba, bb);
    let sa = fs::read(a.path().join("secret.json")).unwrap();
    let sb = fs::read(b.path().join("secret.json")).unwrap();
    assert_eq!(sa, sb);
}

#[test]
fn bulletin_file_carries_no_secret_material() {
    let dir = tempfile::tempdir().unwrap();
    setup_desk(dir.path(), "13");
    run(&["reveal", "--out", dir.path().to_str().unwrap(), "--count", "5"]);

    let bulletin = fs::read_to_string(dir.path().join("bulletin.json")).unwrap();
    let secret: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("secret.json")).unwrap())
            .unwrap();
    let p = secret["p"].as_str().unwrap();
    let q = secret["q"].as_str().unwrap();
    assert!(!bulletin.contains(p), "bulletin leaks p");
    assert!(!bulletin.contains(q), "bulletin leaks q");
    assert!(!bulletin.contains("\"w\""), "bulletin leaks the winner field");

    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        let mode = fs::metadata(dir.path().join("secret.json")).unwrap().permissions().mode();
        assert_eq!(mode & 0o777, 0o600, "secret file must be owner-only");
    }
}

#[test]
fn reveal_past_completion_fails_without_touching_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_str().unwrap().to_string();
    setup_desk(dir.path(), "3");
    assert_ok(&run(&["reveal", "--out", &root, "--count", "24"]));
    let before = fs::read(dir.path().join("bulletin.json")).unwrap();

    let out = run(&["reveal", "--out", &root]);
    assert!(!out.status.success());
    let after = fs::read(dir.path().join("bulletin.json")).unwrap();
    assert_eq!(before, after, "failed reveal must not rewrite the bulletin");

    // over-long reveal on a fresh run is also rejected atomically
    let dir2 = tempfile::tempdir().unwrap();
    setup_desk(dir2.path(), "3");
    let before = fs::read(dir2.path().join("bulletin.json")).unwrap();
    let out = run(&["reveal", "--out", dir2.path().to_str().unwrap(), "--count", "25"]);
    assert!(!out.status.success());
    let after = fs::read(dir2.path().join("bulletin.json")).unwrap();
    assert_eq!(before, after);
}

#[test]
fn crack_exit_codes_distinguish_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_str().unwrap().to_string();
    setup_desk(dir.path(), "17");
    assert_ok(&run(&["reveal", "--out", &root, "--count", "20"]));
    let bulletin = dir.path().join("bulletin.json");
    let bpath = bulletin.to_str().unwrap();

    // 4000 candidates > budget 10
    let out = run(&["crack", bpath, "--budget", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["outcome"], "budgetExceeded");
    assert_eq!(report["required"], "4000");

    // corrupt the published semiprime: nothing divides it anymore
    let mut value: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&bulletin).unwrap()).unwrap();
    let n = value["n"].as_str().unwrap().to_string();
    let bumped = if n.ends_with('1') {
        format!("{}2", &n[..n.len() - 1])
    } else {
        format!("{}1", &n[..n.len() - 1])
    };
    value["n"] = serde_json::Value::String(bumped);
    fs::write(&bulletin, serde_json::to_string(&value).unwrap()).unwrap();
    let out = run(&["crack", bpath, "--budget", "10000"]);
    assert_eq!(out.status.code(), Some(3));

    // no digits revealed: refused outright
    let dir2 = tempfile::tempdir().unwrap();
    setup_desk(dir2.path(), "17");
    let b2 = dir2.path().join("bulletin.json");
    let out = run(&["crack", b2.to_str().unwrap(), "--budget", "10000"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no digits revealed"));
}

#[test]
fn verify_rejects_a_tampered_digit() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_str().unwrap().to_string();
    setup_desk(dir.path(), "23");
    assert_ok(&run(&["reveal", "--out", &root, "--count", "24"]));

    let bulletin = dir.path().join("bulletin.json");
    let mut value: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&bulletin).unwrap()).unwrap();
    let revealed = value["revealed"].as_str().unwrap();
    let mut chars: Vec<char> = revealed.chars().collect();
    chars[5] = if chars[5] == '9' { '0' } else { char::from(chars[5] as u8 + 1) };
    value["revealed"] = serde_json::Value::String(chars.into_iter().collect());
    fs::write(&bulletin, serde_json::to_string(&value).unwrap()).unwrap();

    let out = run(&["verify", bulletin.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["dividesCheck"], false);
}

#[test]
fn verify_refuses_an_incomplete_reveal() {
    let dir = tempfile::tempdir().unwrap();
    setup_desk(dir.path(), "29");
    let bulletin = dir.path().join("bulletin.json");
    let out = run(&["verify", bulletin.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("incomplete"));
}

#[test]
fn simulate_writes_reports_and_prints_the_jump_day() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_str().unwrap();
    let out = run(&["simulate", "--preset", "desk", "--out", root, "--seed", "5"]);
    assert_ok(&out);
    let text = stdout(&out);
    let jump: u32 = text
        .lines()
        .find_map(|l| l.strip_prefix("jump_day: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(jump > 1 && jump < 24, "jump day {jump} outside the window");

    let timeline = fs::read_to_string(dir.path().join("timeline.csv")).unwrap();
    assert_eq!(timeline.lines().count(), 1 + 24 * 100);
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.contains(&format!("jump_day,{jump}")));
    assert!(summary.contains("crack_day:budget-1e6,"));
}

#[test]
fn config_file_round_trip_and_validation() {
    let dir = tempfile::tempdir().unwrap();
    // a digits=4 config violates the protocol floor
    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        r#"{"numCodes":10,"digits":4,"days":4,"payout":100,"baseCapDefault":50,"agents":[]}"#,
    )
    .unwrap();
    let out = run(&["setup", "--config", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("digits"));

    // a valid config with an embedded seed and output dir needs no flags
    let outdir = dir.path().join("run");
    let good = dir.path().join("good.json");
    fs::write(
        &good,
        format!(
            r#"{{"numCodes":20,"digits":8,"days":8,"payout":1000000,"baseCapDefault":500,
                "agents":[{{"name":"a","maxCandidates":100000}}],"seed":99,
                "outputDir":{:?}}}"#,
            outdir.to_str().unwrap()
        ),
    )
    .unwrap();
    let out = run(&["setup", "--config", good.to_str().unwrap()]);
    assert_ok(&out);
    assert!(stdout(&out).contains("seed: 99"));
    assert!(outdir.join("bulletin.json").exists());

    let out = run(&["simulate", "--config", good.to_str().unwrap()]);
    assert_ok(&out);
    assert!(outdir.join("timeline.csv").exists());
}

#[test]
fn missing_inputs_are_reported() {
    let out = run(&["setup"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--config"));

    let dir = tempfile::tempdir().unwrap();
    setup_desk(dir.path(), "31");
    let bulletin = dir.path().join("bulletin.json");
    let out = run(&["crack", bulletin.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--budget"));

    let out = run(&["reveal"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--out"));
}
