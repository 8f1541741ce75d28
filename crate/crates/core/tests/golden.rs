//! CLI output against the files in tests/golden. Set `UPDATE_GOLDEN=1` to rewrite them.

use std::path::Path;
use std::process::Command;

const CONSTS: &[&str] = &[
    "--const", "P=10", "--const", "ID=2", "--const", "PTB=3", "--const", "PD=6", "--const", "AD=4", "--const", "ATB=1",
    "--const", "OD=2",
];

fn run(args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_scjc"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .unwrap();
    (String::from_utf8(out.stdout).unwrap(), out.status.code().unwrap())
}

fn golden(name: &str, args: &[&str], code: i32) {
    let (stdout, got) = run(args);
    assert_eq!(got, code, "exit code of {args:?}");
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &stdout).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(stdout, want, "{name}");
}

#[test]
fn translate_s_anchor() {
    golden("s_anchor.circus", &["translate", "programs/s_anchor.scjc"], 0);
}

#[test]
fn translate_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.circus");
    let (_, code) = run(&["translate", "programs/s_anchor.scjc", "-o", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let want = include_str!("golden/s_anchor.circus");
    assert_eq!(std::fs::read_to_string(out).unwrap(), want);
}

#[test]
fn check_outputs() {
    let mut args = vec!["check", "programs/s_anchor.scjc"];
    args.extend(CONSTS);
    golden("check_s_anchor.txt", &args, 0);
    golden("check_bad_alloc.txt", &["check", "programs/bad_alloc.scjc"], 1);
    golden("check_bad_alloc.json", &["--format", "json", "check", "programs/bad_alloc.scjc"], 1);
}

#[test]
fn sim_outputs() {
    let mut args = vec!["sim", "run", "programs/s_anchor.scjc", "--main", "System", "--seed", "1", "--max-ticks", "20"];
    args.extend(CONSTS);
    golden("sim_run_seed1.txt", &args, 1);
    golden("sim_traces_impl.txt", &["sim", "traces", "programs/laws.circus", "--main", "Impl", "--depth", "4"], 0);
}

#[test]
fn refine_outputs() {
    let l = "programs/laws.circus";
    golden("refine_check_holds.txt", &["refine", "check", "--spec", l, "--impl", l, "--spec-process", "Spec", "--impl-process", "Impl"], 0);
    golden("refine_check_fails.txt", &["refine", "check", "--spec", l, "--impl", l, "--spec-process", "Spec", "--impl-process", "Wrong"], 1);
    golden("refine_law1.txt", &["refine", "law1", "--context", "a -> HOLE", "--filler", "b -> Skip", "--decls", l, "--verify", "5"], 0);
    golden("refine_law2.txt", &["refine", "law2", "--target", "a -> Skip [| {} | {| a |} | {} |] a -> Skip", "--b", "b", "--branch", "Skip"], 0);
}

#[test]
fn framework_dumps() {
    for kind in ["safelet", "sequencer", "mission", "peh", "apeh"] {
        golden(&format!("fw_{kind}.txt"), &["frameworks", "dump", kind], 0);
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["translate"]).1, 2);
    assert_eq!(run(&["check", "does/not/exist.scjc"]).1, 2);
    assert_eq!(run(&["frameworks", "dump", "nonsense"]).1, 2);
}
