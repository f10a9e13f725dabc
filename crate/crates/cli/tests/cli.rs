use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn fcrs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fcrs")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn normalize_prints_trace_and_final_word() {
    let o = fcrs(&["normalize", path(&data("z2.prs")), "a a a"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "a a a →[rule 3 @ pos 0] e a\ne a →[rule 1 @ pos 0] a\nfinal: a\n");
}

#[test]
fn normalize_budget_exhaustion_exits_one() {
    let o = fcrs(&["normalize", path(&data("grow.prs")), "a", "--budget", "10"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_letter_exits_two() {
    let o = fcrs(&["normalize", path(&data("z2.prs")), "q"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_reports_unresolved_pair() {
    let o = fcrs(&["check", path(&data("nonconfluent.prs"))]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("UNRESOLVED PAIR a b a"), "{text}");
    assert!(text.contains("pairs=2 unresolved=2 undecided=0"), "{text}");
}

#[test]
fn check_complete_system_with_ball() {
    let o = fcrs(&["check", path(&data("z2.prs")), "--confluence", "--termination-ball", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("verdict: complete-certified-at-scale"));
}

#[test]
fn check_growing_rule_fails_ball() {
    let o = fcrs(&["check", path(&data("grow.prs")), "--termination-ball", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("violations=6"));
}

#[test]
fn check_rejects_oversized_ball() {
    let o = fcrs(&["check", path(&data("z2.prs")), "--termination-ball", "9"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_json_lines_parse() {
    let o = fcrs(&["check", path(&data("z2.prs")), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    for line in stdout(&o).lines() {
        serde_json::from_str::<serde_json::Value>(line).unwrap();
    }
}

#[test]
fn construct_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b2.fcrs");
    let o = fcrs(&["construct", "regular", path(&data("b2.cayley")), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("products=25 passed=25"));
    let o = fcrs(&["verify", out.to_str().unwrap(), path(&data("b2.cayley"))]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "products=25 passed=25");
}

#[test]
fn verify_flags_tampered_witness() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("z2.fcrs");
    let o = fcrs(&["construct", "regular", path(&data("z2.cayley")), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let witness_start = text.find("witness:").unwrap();
    let (head, tail) = text.split_at(witness_start);
    let mut lines: Vec<String> = tail.lines().map(String::from).collect();
    let words: Vec<String> = lines[1..3].iter().map(|l| l.split(" = ").nth(1).unwrap().to_string()).collect();
    lines[1] = format!("{} = {}", lines[1].split(" = ").next().unwrap(), words[1]);
    lines[2] = format!("{} = {}", lines[2].split(" = ").next().unwrap(), words[0]);
    std::fs::write(&out, format!("{head}{}\n", lines.join("\n"))).unwrap();
    let o = fcrs(&["verify", out.to_str().unwrap(), path(&data("z2.cayley"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn construct_rees_zero_writes_witness_and_certificate() {
    let o = fcrs(&["construct", "rees-zero", path(&data("z2-zero.rees"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("certificate: rees small:"));
    assert!(text.contains("0 = 0"));
    assert!(stderr(&o).contains("verdict: complete-certified-at-scale"));
}

#[test]
fn rees_simple_rejects_zero_entries() {
    let o = fcrs(&["construct", "rees-simple", path(&data("z2-zero.rees"))]);
    assert_eq!(o.status.code(), Some(2));
    let o = fcrs(&["construct", "rees-simple", path(&data("band.rees"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn adjoin_zero_and_ideal_extension_kinds() {
    let o = fcrs(&["construct", "adjoin-zero", path(&data("nullsemi.prs")), "--zero", "a a"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = fcrs(&["construct", "ideal-extension", path(&data("zae.cayley")), "--ideal", "0 a"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("certificate: ideal-extension"));
}

#[test]
fn regular_construction_rejects_bad_tables() {
    assert_eq!(fcrs(&["construct", "regular", path(&data("bad.cayley"))]).status.code(), Some(2));
    assert_eq!(fcrs(&["construct", "regular", path(&data("null2.cayley"))]).status.code(), Some(2));
}

#[test]
fn subgroup_override_is_used() {
    let o = fcrs(&["construct", "regular", path(&data("z2.cayley")), "--subgroup", &format!("e={}", path(&data("z2-sub.prs")))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("letters: x y\n"));
    assert!(stdout(&o).contains("a = y"));
}
