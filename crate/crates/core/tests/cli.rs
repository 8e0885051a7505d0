//! Behavior of the installed binary: exit codes, emitted files, and
//! output stability.

mod common;

use common::fixtures::INSTANCE_A_VLP;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const UNBOUNDED_VLP: &str = "\
vlp 2 0 1
o 1 1 1
o 2 1 1
";

const LINES_VLP: &str = "\
vlp 2 0 1
o 1 1 1
o 2 1 -1
";

const INFEASIBLE_VLP: &str = "\
vlp 2 4 2
a 1 1 1
a 1 2 1
a 2 1 1
a 3 2 1
o 1 1 1
o 2 2 1
r 1 1 inf
r 2 0 inf
r 3 0 inf
r 4 1 inf
";

const MARKET_FILE: &str = "\
market 2 2 2
prob 1 0.5
prob 2 0.5
s0 1 1
lambda 0.05 0.05
sT 1 1.1 0.9
sT 2 0.95 1.05
payoff 1 1 0
payoff 2 -1 0
alpha 0.5 0.5
rwc_eps 0.1 0.1
rwc_lambda 0.1 0.1
";

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_molp"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn solves_a_problem_file_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "a.vlp", INSTANCE_A_VLP);
    let out = run(&["solve", &file, "--output", "result"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("status"), "missing stats table: {stdout}");
    assert!(stdout.contains("solved"), "unexpected status: {stdout}");

    let primal = fs::read_to_string(dir.path().join("result.primal_v")).unwrap();
    assert_eq!(primal, "v 0 1\nv 1 0\nd 0 1\nd 1 0\n");
    let dual = fs::read_to_string(dir.path().join("result.dual_v")).unwrap();
    assert_eq!(dual, "v 0 0\nv 0.5 0.5\nv 1 0\n");
    for ext in ["sbar", "tbar", "stats"] {
        assert!(
            dir.path().join(format!("result.{ext}")).exists(),
            "missing result.{ext}"
        );
    }
}

#[test]
fn exit_codes_distinguish_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (INSTANCE_A_VLP, "ok.vlp", 0),
        (INFEASIBLE_VLP, "infeasible.vlp", 2),
        (UNBOUNDED_VLP, "unbounded.vlp", 3),
        (LINES_VLP, "lines.vlp", 4),
    ];
    for (text, name, want) in cases {
        let file = write(dir.path(), name, text);
        let out = run(&["solve", &file], dir.path());
        assert_eq!(
            out.status.code(),
            Some(want),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }

    let missing = run(&["solve", "nope.vlp"], dir.path());
    assert_eq!(missing.status.code(), Some(1));

    let garbage = write(dir.path(), "bad.vlp", "vlp what\n");
    let out = run(&["solve", &garbage], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn repeated_runs_emit_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "a.vlp", INSTANCE_A_VLP);
    let mut blobs = Vec::new();
    for prefix in ["one", "two"] {
        let out = run(&["solve", &file, "--output", prefix], dir.path());
        assert!(out.status.success());
        let mut blob = Vec::new();
        for ext in ["primal_v", "dual_v", "sbar", "tbar", "stats"] {
            blob.extend(fs::read(dir.path().join(format!("{prefix}.{ext}"))).unwrap());
        }
        blobs.push(blob);
    }
    assert_eq!(blobs[0], blobs[1]);
}

#[test]
fn solver_flags_are_accepted_and_validated() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "a.vlp", INSTANCE_A_VLP);

    let out = run(
        &["solve", &file, "--algorithm", "dual", "--eps", "0.05"],
        dir.path(),
    );
    assert!(out.status.success());

    let out = run(
        &["solve", &file, "--no-break", "--parallel", "2"],
        dir.path(),
    );
    assert!(out.status.success());

    let out = run(&["solve", &file, "--parallel", "2"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("--no-break"),
        "unhelpful message: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn off_export_needs_three_objectives() {
    let dir = tempfile::tempdir().unwrap();
    let tri = "\
vlp 3 1 3
a 1 1 1
a 1 2 1
a 1 3 1
o 1 1 1
o 2 2 1
o 3 3 1
r 1 1 inf
x 1 0 inf
x 2 0 inf
x 3 0 inf
";
    let file = write(dir.path(), "tri.vlp", tri);
    let out = run(
        &["solve", &file, "--output", "tri", "--off", "1.0"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mesh = fs::read_to_string(dir.path().join("tri.off")).unwrap();
    assert!(mesh.starts_with("OFF\n"), "not an OFF file: {mesh}");

    let planar = write(dir.path(), "a.vlp", INSTANCE_A_VLP);
    let out = run(&["solve", &planar, "--off", "1.0"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn risk_subcommands_emit_solvable_problems() {
    let dir = tempfile::tempdir().unwrap();
    let market = write(dir.path(), "m.mkt", MARKET_FILE);

    let out = run(
        &["risk", "avar", &market, "--output", "avar", "--solve"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let emitted = fs::read_to_string(dir.path().join("avar.vlp")).unwrap();
    assert!(emitted.starts_with("vlp "));
    assert!(String::from_utf8_lossy(&out.stdout).contains("solved"));

    let out = run(&["risk", "rwc", &market, "--output", "rwc"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("rwc.vlp").exists());

    let no_alpha = write(
        dir.path(),
        "bare.mkt",
        "market 1 1 1\nprob 1 1\ns0 1\nlambda 0\nsT 1 1\npayoff 1 2\n",
    );
    let out = run(&["risk", "avar", &no_alpha], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}
