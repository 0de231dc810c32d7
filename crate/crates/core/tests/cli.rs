use std::process::Command;

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_bpk-rzk")).args(args).output().expect("spawn");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn honest_run_accepts() {
    let (code, out) = cli(&["--seed", "1", "run"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().any(|l| l == "verdict 0 accept"), "{out}");
    assert!(out.lines().last().unwrap().starts_with("RESULT"));
}

#[test]
fn same_seed_same_transcript() {
    assert_eq!(cli(&["--seed", "4", "run"]), cli(&["--seed", "4", "run"]));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(cli(&["no-such-command"]).0, 2);
    assert_eq!(cli(&["--profile", "huge", "run"]).0, 2);
}

#[test]
fn keygen_writes_a_public_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pf.txt");
    let (code, _) = cli(&["--seed", "2", "keygen", "--public-file", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&path).unwrap();
    bpk_rzk::bpk::PublicFile::from_text(&text).unwrap();
}
