use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_udvalue")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn value_of_third_example() {
    let game = fixture("example3.game");
    let out = run(&["value", "--kind", "ud", "--game", game.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "0 0.25 0.75");
    let exact = run(&["value", "--kind", "r", "--game", game.to_str().unwrap(), "--exact"]);
    assert_eq!(stdout(&exact).trim(), "0 1/2 1/2");
}

#[test]
fn ud_refuses_systems_without_unique_value() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pairs.game");
    std::fs::write(&path, "players 3\n3 1\n5 1\n7 2\n").unwrap();
    let out = run(&["value", "--kind", "ud", "--game", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("error[ud_not_unique]"), "{}", stderr(&out));
    let ic = run(&["value", "--kind", "ic", "--game", path.to_str().unwrap()]);
    assert!(stderr(&ic).contains("error[not_intersection_closed]"));
}

#[test]
fn uniqueness_reports() {
    let out = run(&["uniqueness", "--players", "3", "--system", "135"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("unique (intersection-closed)"), "{}", stdout(&out));
    let pairs = run(&["uniqueness", "--players", "3", "--system", "169"]);
    assert!(stdout(&pairs).starts_with("non-unique"), "{}", stdout(&pairs));
    assert!(stdout(&pairs).contains("rank_A="));
}

#[test]
fn census_row() {
    let out = run(&["census", "--players", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("# udvalue "));
    assert!(text.contains("# seed: none"));
    assert!(text.lines().any(|l| l == "3,64,45,0.703125,0,0,,"), "{text}");
}

#[test]
fn sampled_census_reports_standard_errors() {
    let out = run(&["census", "--players", "5", "--samples", "500", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("# seed: 3"));
    assert!(text.contains("# standard errors"));
    assert_eq!(run(&["census", "--players", "5"]).status.code(), Some(1));
}

#[test]
fn domain_and_parse_errors_exit_with_one() {
    let bad_mask = run(&["uniqueness", "--players", "2", "--system", "99"]);
    assert_eq!(bad_mask.status.code(), Some(1));
    assert!(stderr(&bad_mask).starts_with("error[invalid_input]"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.game");
    std::fs::write(&path, "players 3\n1 0\n9 1\n").unwrap();
    let out = run(&["value", "--kind", "r", "--game", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("error[parse_error]"));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["value", "--kind", "shapley"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn audit_lists_violations() {
    let game = fixture("example3.game");
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("audit.csv");
    let out = run(&["audit", "--game", game.to_str().unwrap(), "--kind", "ud", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.contains("axiom,kind,status,witness,gap"));
    assert!(text.lines().any(|l| l.starts_with("symmetric_partnership,UD,violated")), "{text}");
}

#[test]
fn experiment_then_plots() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_owned();
    let out = run(&[
        "experiment", "diff", "--players", "3", "--exhaustive", "--games", "10", "--seed", "4",
        "--out", &p("diff.csv"), "--ranks", &p("ranks.csv"), "--hist", &p("hist.csv"),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let diff = std::fs::read_to_string(p("diff.csv")).unwrap();
    assert!(diff.contains("# command: "));
    assert!(diff.contains("# seed: 4"));
    assert_eq!(diff.lines().filter(|l| !l.starts_with('#')).count(), 46);

    for (input, kind) in [("diff.csv", "lines"), ("ranks.csv", "ranks"), ("hist.csv", "hist")] {
        let svg = p(&format!("{kind}.svg"));
        let out = run(&["plot", "--in", &p(input), "--kind", kind, "--out", &svg]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    }
    let again = p("again.svg");
    run(&["plot", "--in", &p("diff.csv"), "--kind", "lines", "--out", &again]);
    assert_eq!(std::fs::read(p("lines.svg")).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn plotting_an_empty_table_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("empty.csv");
    std::fs::write(&csv, "# nothing\nsystem,mean_R_IC,sd_R_IC\n").unwrap();
    let svg = dir.path().join("empty.svg");
    let out = run(&["plot", "--in", csv.to_str().unwrap(), "--kind", "lines", "--out", svg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!svg.exists());
}
