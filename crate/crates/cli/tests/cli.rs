use std::process::{Command, Output};

fn bccsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bccsp")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn ready_simulation_separates_the_distributed_sum() {
    let o = bccsp(&["equiv", "RS", "(a+a.a+b)||c", "(a+b)||c + (a.a+b)||c"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    let o = bccsp(&["equiv", "S", "(a+a.a+b)||c", "(a+b)||c + (a.a+b)||c"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn eliminate_prints_the_interleavings() {
    let o = bccsp(&["eliminate", "--system", "E_T", "a.0||b.0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "a.b.0 + b.a.0");
}

#[test]
fn table6_check_prints_the_falsifying_valuation() {
    let o = bccsp(&["model", "check", "--fixture", "table6", "--axioms", "E_CS", "--goal", "EL2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("w=1, x=0, y=0, z=1"), "{}", stdout(&o));
    let o = bccsp(&["model", "check", "--fixture", "table6", "--axioms", "E_RT", "--goal", "EL2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn json_output_and_exit_codes() {
    let o = bccsp(&["--emit", "json", "metrics", "a || (b.a + b.b.a)"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((v["depth"].as_u64(), v["norm"].as_u64()), (Some(4), Some(3)));
    assert_eq!(bccsp(&["equiv", "nonsense", "a", "b"]).status.code(), Some(2));
    assert_eq!(bccsp(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(bccsp(&["prove-check", "--fixture", "E_T-CTP"]).status.code(), Some(0));
    assert_eq!(bccsp(&["witness", "--kind", "sync", "--max-n", "2"]).status.code(), Some(0));
    let o = bccsp(&["soundness", "--relation", "RS", "--lhs", "(x+y)||z", "--rhs", "x||z + y||z"]);
    assert_eq!(o.status.code(), Some(1));
}
