use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn openshop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_openshop"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn makespan_of(schedule: &str) -> String {
    schedule
        .lines()
        .next()
        .and_then(|l| l.strip_prefix("makespan "))
        .unwrap()
        .to_string()
}

const FOUR_EQUAL: &str = "2 2 4\n2 2\n2 2\n2 2\n2 2\n";
const GRID_PAIR: &str = "2 2 2\n1/4 1/4\n1/4 1/4\n";

#[test]
fn gen_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for p in [&a, &b] {
        let out = openshop(&["gen", "--m", "2", "--k", "2", "--n", "4", "--max-time", "9", "--seed", "7", "--out", s(p)]);
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let out = openshop(&["gen", "--m", "1", "--k", "3", "--n", "0", "--max-time", "9"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "1 3 0\n");
    let out = openshop(&["gen", "--m", "2", "--k", "2", "--n", "3", "--max-time", "0"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "2 2 3\n0 0\n0 0\n0 0\n");
}

#[test]
fn solve_each_algorithm() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "four.txt", FOUR_EQUAL);
    let sched = dir.path().join("out.txt");
    let report = dir.path().join("report.txt");

    let out = openshop(&["solve", "--algo", "oracle", "--input", s(&inst), "--out-schedule", s(&sched)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(makespan_of(&fs::read_to_string(&sched).unwrap()), "4");

    let out = openshop(&["solve", "--algo", "baseline", "--input", s(&inst), "--report", s(&report)]);
    assert!(out.status.success());
    let text = fs::read_to_string(&report).unwrap();
    let ms: i64 = text.trim().strip_prefix("makespan = ").unwrap().parse().unwrap();
    assert!(ms <= 12);

    let pair = write(&dir, "pair.txt", GRID_PAIR);
    let csv = dir.path().join("report.csv");
    let out = openshop(&[
        "solve", "--algo", "eptas", "--gamma", "1/4", "--input", s(&pair), "--out-schedule", s(&sched),
        "--report", s(&report), "--report-csv", s(&csv),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let eptas = makespan_of(&fs::read_to_string(&sched).unwrap());
    let out = openshop(&["solve", "--algo", "oracle", "--input", s(&pair)]);
    assert_eq!(makespan_of(&String::from_utf8_lossy(&out.stdout)), eptas);
    assert_eq!(eptas, "1/2");
    assert!(fs::read_to_string(&report).unwrap().contains("gamma = 1/4"));
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 2);

    let out = openshop(&["validate", "--instance", s(&pair), "--schedule", s(&sched), "--complete"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "OK\n");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "four.txt", FOUR_EQUAL);

    let out = openshop(&["solve", "--algo", "eptas", "--input", s(&inst)]);
    assert_eq!(out.status.code(), Some(2));

    let bad = write(&dir, "bad.txt", "2 2 1\n3\n");
    let out = openshop(&["solve", "--algo", "baseline", "--input", s(&bad)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let out = openshop(&["solve", "--algo", "eptas", "--epsilon", "1/2", "--budget", "5", "--input", s(&inst)]);
    assert_eq!(out.status.code(), Some(4));

    let big = write(&dir, "big.txt", "3 1 1\n1\n");
    let out = openshop(&["solve", "--algo", "oracle", "--input", s(&big)]);
    assert_eq!(out.status.code(), Some(5));
    let out = openshop(&["solve", "--algo", "oracle", "--max-shops", "3", "--input", s(&big)]);
    assert!(out.status.success());

    let missing = dir.path().join("nope.txt");
    let out = openshop(&["solve", "--algo", "baseline", "--input", s(&missing)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.txt"));

    let out = openshop(&["gen", "--m", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_reports_missing_operation() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "one.txt", "1 2 1\n3 1\n");
    let sched = write(&dir, "s.txt", "makespan 3\n0 0 0 0 3\n");
    let out = openshop(&["validate", "--instance", s(&inst), "--schedule", s(&sched)]);
    assert!(out.status.success());
    let out = openshop(&["validate", "--instance", s(&inst), "--schedule", s(&sched), "--complete"]);
    assert_eq!(out.status.code(), Some(6));
    assert!(String::from_utf8_lossy(&out.stdout).contains("job 0, stage 1"));
}

#[test]
fn bench_csv_is_stable() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("data");
    fs::create_dir(&data).unwrap();
    for (name, seed) in [("c.txt", "3"), ("a.txt", "1"), ("b.txt", "2")] {
        let out = openshop(&[
            "gen", "--m", "2", "--k", "2", "--n", "4", "--max-time", "9", "--seed", seed, "--out",
            s(&data.join(name)),
        ]);
        assert!(out.status.success());
    }
    let run = |csv: &Path| {
        let out = openshop(&[
            "bench", "--dir", s(&data), "--algos", "baseline,oracle", "--csv", s(csv), "--no-timestamp",
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        fs::read_to_string(csv).unwrap()
    };
    let first = run(&dir.path().join("1.csv"));
    let second = run(&dir.path().join("2.csv"));
    assert_eq!(first, second);
    let lines: Vec<&str> = first.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].contains("baseline_makespan") && lines[0].contains("oracle_ratio"));
    assert!(lines[1].starts_with("a.txt") && lines[2].starts_with("b.txt") && lines[3].starts_with("c.txt"));

    let out = openshop(&["bench", "--dir", s(&data), "--algos", "baseline", "--gamma", "1/4"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().next().unwrap().ends_with("timestamp"));
}
