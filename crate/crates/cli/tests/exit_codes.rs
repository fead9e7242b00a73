use std::process::Command;

fn bcplus(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_bcplus"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn program(name: &str) -> String {
    format!("{}/../../programs/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn extension_is_optional_and_one_solution_is_the_default() {
    let (code, out, _) = bcplus(&[&program("switch"), "query=test"]);
    assert_eq!(code, 0);
    assert_eq!(out.matches("Solution:").count(), 1);
}

#[test]
fn unknown_query_is_a_diagnostic() {
    let (code, out, err) = bcplus(&[&program("switch.bcp"), "query=nope"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("unknown query `nope` (defined: test)"), "{err}");
}

#[test]
fn missing_query_is_a_diagnostic() {
    let (code, _, err) = bcplus(&[&program("switch.bcp")]);
    assert_eq!(code, 2);
    assert!(err.contains("no query selected"), "{err}");
}

#[test]
fn unbound_constant_is_reported() {
    let (code, out, err) = bcplus(&[&program("blocks4.bcp"), "query=stack"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("unbound symbol"), "{err}");
}

#[test]
fn unsatisfiable_fixed_horizon_exits_one() {
    let dir = std::env::temp_dir().join(format!("bcplus-exit-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("stuck.bcp");
    std::fs::write(
        &file,
        ":- constants p :: inertialFluent.\n:- query maxstep :: 1; 0: p; 1: ~p.\n",
    )
    .unwrap();
    let (code, out, _) = bcplus(&[file.to_str().unwrap(), "query=1"]);
    assert_eq!(code, 1);
    assert_eq!(out, "No solution with maxstep 1.\n");
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn dump_graph_without_query() {
    let (code, out, _) = bcplus(&["--dump-graph", &program("switch.bcp")]);
    assert_eq!(code, 0);
    assert!(out.starts_with("digraph"), "{out}");
}
