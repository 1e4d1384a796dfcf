//! End-to-end tests of the command-line interface: golden text output,
//! exit codes, JSON schema tagging, and byte-determinism.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pde2ode"))
}

fn example(name: &str) -> String {
    format!("{}/examples/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn pde2ode")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn rif_example1_golden_text() {
    let out = run(&["rif", &example("example1.pde")]);
    assert!(out.status.success());
    let want = "\
rule diff(u,y$2) = (diff(u,y))/(2*diff(u,y) + 1)
rule diff(u,x,y) = (diff(u,x))/(2*diff(u,y) + 1)
rule diff(u,x$2) = (diff(u,x))/(2*diff(u,y) + 1)
constraint diff(u,y)^2 + diff(u,y) - u = 0
constraint diff(u,x)^2 - diff(u,y)*diff(u,x) = 0
inequation 2*diff(u,y) + 1 != 0
status complete
";
    assert_eq!(stdout(&out), want);
}

#[test]
fn json_outputs_carry_the_schema_tag() {
    for args in [
        vec!["rif", &example("example1.pde"), "--format", "json"],
        vec!["initdata", &example("example1.pde"), "--format", "json"],
        vec!["ode", &example("example1.pde"), "--format", "json"],
        vec!["polysolve", &example("ms27.pde"), "--format", "json"],
        vec![
            "liestructure",
            &example("detsys_rif.pde"),
            "--vf",
            "xi:x,eta:y",
            "--point",
            "x0=0,y0=2",
            "--format",
            "json",
        ],
    ] {
        let out = run(&args);
        assert!(out.status.success(), "{args:?}: {out:?}");
        let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(v["schema"], "pde2ode/1", "{args:?}");
    }
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = [
        "polysolve",
        &example("ms27.pde"),
        "--seed",
        "7",
        "--format",
        "json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes_follow_the_contract() {
    // usage error
    let out = run(&["rif"]);
    assert_eq!(out.status.code(), Some(1));
    // parse error / missing file
    let out = run(&["rif", "no_such_file.pde"]);
    assert_eq!(out.status.code(), Some(2));
    // inconsistent system
    let out = run(&["rif", &example("toy_incompatible.pde")]);
    assert_eq!(out.status.code(), Some(3));
    // infinite-dimensional where finiteness is required
    let out = run(&["initdata", &example("toy_infinite.pde")]);
    assert_eq!(out.status.code(), Some(4));
    // numerical failure: inequation vanishes at the expansion point
    let out = run(&[
        "liestructure",
        &example("detsys_rif.pde"),
        "--vf",
        "xi:x,eta:y",
        "--point",
        "x0=0,y0=0",
    ]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn strict_mode_fails_on_the_iteration_cap() {
    let dir = std::env::temp_dir().join("pde2ode_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("capped.pde");
    std::fs::write(
        &file,
        "vars x,y;\nfuncs u(x,y);\neq diff(u,x,y) = u;\neq diff(u,x,x) = diff(u,y);\n",
    )
    .unwrap();
    let path = file.to_str().unwrap();
    let out = run(&["rif", path, "--cap", "0", "--strict"]);
    assert_eq!(out.status.code(), Some(6));
    // without --strict the capped form is still emitted
    let out = run(&["rif", path, "--cap", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("status iteration_capped"));
    // with the default cap the completion finishes
    let out = run(&["rif", path]);
    assert!(stdout(&out).contains("status complete"));
}

#[test]
fn integrate_emits_csv_with_chained_legs() {
    let out = run(&[
        "integrate",
        &example("example1.pde"),
        "--state",
        "u=2,u_x=1,u_y=1",
        "--from",
        "x=0,y=0",
        "--dir",
        "1,0",
        "--dir",
        "0,1",
        "--continue-from",
        "10",
        "--h",
        "0.01",
        "--steps",
        "10",
        "--format",
        "csv",
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "leg,t,x,y,u,u_x,u_y,max_drift,min_pivot"
    );
    // 2 legs x 11 samples
    assert_eq!(text.lines().count(), 1 + 2 * 11);
    assert!(text.lines().any(|l| l.starts_with("1,")));
}

#[test]
fn probe_reports_the_inconsistent_branch() {
    let out = run(&["probe", &example("example1.pde")]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("2*diff(u,y) + 1 = 0 branch is inconsistent"));
}
