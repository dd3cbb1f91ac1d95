use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn grapeqi(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_grapeqi"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn grapeqi");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("grapeqi-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const FOUR_STAR: &str = "stem c a\nstem c b\nstem c d\nstem c e\nloops a 1\nloops b 1\nloops c 1\nloops d 1\nloops e 1\n";
const PAIR_LEFT: &str = "stem c a\nstem c b\nstem c d\nloops a 2\nloops b 1\nloops d 1\n";
const PAIR_RIGHT: &str = "stem c a\nstem c b\nstem c d\nloops a 1\nloops b 1\nloops d 1\n";

#[test]
fn minimize_four_star_gives_a_short_path() {
    let o = grapeqi(&["minimize", "-"], FOUR_STAR);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "format 1\nstem a c\nstem b c\nloops a 1\nloops b 1\nloops c 1\n");
}

#[test]
fn normalize_is_stable_on_normal_input() {
    let first = stdout(&grapeqi(&["normalize", "-"], PAIR_RIGHT));
    let second = grapeqi(&["normalize", "-"], &first);
    assert!(second.status.success());
    assert_eq!(stdout(&second), first);
}

#[test]
fn enrich_rejects_non_normal_input() {
    let o = grapeqi(&["enrich", "-"], "stem a b\nstem b c\nloops a 1\nloops c 1\n");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("normal"));
}

#[test]
fn trace_lists_each_step() {
    let o = grapeqi(&["--trace", "minimize", "-"], FOUR_STAR);
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("# prune-substem")), "{out}");
}

#[test]
fn qi_verdicts() {
    let a = scratch("left.grape", PAIR_LEFT);
    let b = scratch("right.grape", PAIR_RIGHT);
    let (a, b) = (a.to_str().unwrap(), b.to_str().unwrap());
    let o = grapeqi(&["qi", a, b], "");
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("QI: no\n"));
    assert!(stdout(&grapeqi(&["qi", a, a], "")).starts_with("QI: yes\n"));

    let small = scratch("small.grape", "stem a b\nloops a 1\n");
    let o = grapeqi(&["qi", small.to_str().unwrap(), b], "");
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("QI: no\n"));
}

#[test]
fn qi_json_is_structured() {
    let a = scratch("json-left.grape", PAIR_LEFT);
    let p = a.to_str().unwrap();
    let o = grapeqi(&["--json", "qi", p, p], "");
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["quasi_isometric"], true);
}

#[test]
fn qi_tree4_cases() {
    let star = scratch("star.tree", "stem c a\nstem c b\nstem c d\n");
    let path = scratch("path.tree", "stem a b\nstem b c\nstem c d\n");
    let d5 = scratch("d5.tree", "stem p q\nstem p x1\nstem p x2\nstem q y1\nstem q y2\n");
    let s = |p: &PathBuf| p.to_str().unwrap().to_string();
    let run = |a: &PathBuf, b: &PathBuf| stdout(&grapeqi(&["qi-tree4", &s(a), &s(b)], ""));
    assert!(run(&star, &star).starts_with("QI: yes"));
    assert!(run(&path, &path).starts_with("QI: yes"));
    assert!(run(&star, &d5).starts_with("QI: no"));
}

#[test]
fn ri_emits_json_and_dot() {
    let dot = std::env::temp_dir().join(format!("grapeqi-ri-{}.dot", std::process::id()));
    let o = grapeqi(&["--dot", dot.to_str().unwrap(), "ri", "-"], PAIR_RIGHT);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["twigs"].as_array().unwrap().len(), 3);
    assert_eq!(v["simplices"].as_array().unwrap().len(), 6);
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("graph"));
    assert!(text.contains("1×1"));
    let _ = std::fs::remove_file(dot);
}

#[test]
fn ri_rejects_small_input() {
    assert_eq!(grapeqi(&["ri", "-"], "stem a b\nloops a 1\n").status.code(), Some(2));
}

#[test]
fn ud_reports() {
    let o = grapeqi(&["ud", "-"], "edge c x\nedge c y\nedge c z\n");
    assert_eq!(stdout(&o).lines().next().unwrap(), "cells: 6/6/0, b0=1, b1=1, npc: yes, special: yes");

    let bouquet = "loops v 2\n";
    let line = stdout(&grapeqi(&["ud", "-"], bouquet));
    assert!(line.starts_with("cells: 10/18/5, b0=1, b1=4"), "{line}");

    let line = stdout(&grapeqi(&["ud", "--n", "4", "-"], "edge c x\nedge c y\nedge c z\n"));
    assert!(line.contains("b1=6"), "{line}");
}

#[test]
fn ud_without_subdivision_names_the_condition() {
    let o = grapeqi(&["ud", "--n", "3", "--subdivide", "off", "-"], "edge c x\nedge c y\nedge c z\n");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n-1"));
}

#[test]
fn ud_guard_exit_code() {
    let edges: String = (1..60).map(|i| format!("edge v0 v{i}\n")).collect();
    let o = grapeqi(&["ud", "-"], &edges);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn ud_verify_on_a_grape() {
    let out = stdout(&grapeqi(&["ud", "--verify", "-"], PAIR_RIGHT));
    assert!(out.contains("twig correspondence: yes"), "{out}");
    assert!(out.contains("intersection lemma: yes"), "{out}");
}

#[test]
fn grow_rank_canon_raag() {
    let grown = stdout(&grapeqi(&["grow", "-"], "stem c a\nstem c b\nstem c d\nstem c e\n"));
    assert!(grown.lines().any(|l| l == "loops c 3"), "{grown}");

    assert_eq!(stdout(&grapeqi(&["rank", "-"], "stem c a\nstem c b\nstem c d\n")), "1\n");
    assert_eq!(stdout(&grapeqi(&["rank", "-"], PAIR_RIGHT)), "large\n");

    let a = stdout(&grapeqi(&["canon", "-"], "stem a b\nloops b 2\n"));
    let b = stdout(&grapeqi(&["canon", "-"], "stem z y\nloops z 2\n"));
    assert_eq!(a, b);

    let d5 = "stem p q\nstem p x1\nstem p x2\nstem q y1\nstem q y2\nloops x1 1\nloops x2 1\nloops y1 1\nloops y2 1\n";
    assert!(stdout(&grapeqi(&["raag", "-"], d5)).starts_with("raag: not-qi-to-raag"));
}

#[test]
fn parse_errors_carry_positions() {
    let o = grapeqi(&["canon", "-"], "stem a b\nbogus x\n");
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2"), "{err}");
    assert!(err.contains("unknown-directive"), "{err}");
}

#[test]
fn json_input_is_accepted() {
    let out: serde_json::Value = serde_json::from_slice(&grapeqi(&["--json", "normalize", "-"], PAIR_RIGHT).stdout).unwrap();
    let o = grapeqi(&["canon", "-"], &out["representative"].to_string());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), stdout(&grapeqi(&["canon", "-"], PAIR_RIGHT)));
}

#[test]
fn output_is_deterministic() {
    let a = grapeqi(&["--json", "ud", "--verify", "-"], PAIR_LEFT);
    let b = grapeqi(&["--json", "ud", "--verify", "-"], PAIR_LEFT);
    assert_eq!(a.stdout, b.stdout);
}
