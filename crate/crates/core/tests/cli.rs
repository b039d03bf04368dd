mod common;

use std::io::Write;
use std::process::{Command, Output, Stdio};

use common::{BACKWARD, FORWARD};

fn programs(name: &str) -> String {
    format!("{}/programs/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn rever(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_rever"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> Vec<String> {
    String::from_utf8_lossy(&o.stdout).lines().map(str::to_owned).collect()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn trace_forward_and_back() {
    let example = programs("example1.pl");
    let o = rever(&["trace", &example, "p(A,B)"], &format!("{}{}", "\n".repeat(10), "u\n".repeat(10)));
    assert!(o.status.success());
    let lines = stdout(&o);
    assert_eq!(lines[..11], FORWARD);
    assert_eq!(lines[11..], BACKWARD);
}

#[test]
fn arrow_keys_and_skip() {
    let example = programs("example1.pl");
    let o = rever(&["trace", &example, "p(A,B)"], "s\n\x1b[A\n\x1b[B\n");
    let lines = stdout(&o);
    assert_eq!(lines[..11], FORWARD);
    assert_eq!(lines[11..], ["^Exit: p(b,b)", "Exit: p(b,b)"]);
}

#[test]
fn debug_prints_only_answers() {
    let example = programs("example1.pl");
    let o = rever(&["debug", &example, "p(A,B)"], "\n\n\n");
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        ["**Answer: A = b, B = b", "**Answer: A = b, B = c", "**Answer: A = c, B = c"]
    );
    assert!(stderr(&o).contains("% no more answers"));
}

#[test]
fn rtrace_starts_tracing() {
    let o = rever(&["debug", &programs("rtrace.pl"), "main(A,B)"], "\n\n\n");
    assert_eq!(stdout(&o), ["Call: r(a,B)", "Fail: r(a,B)", "Redo: q(A)", "Exit: q(b)"]);
}

#[test]
fn quit_and_unknown_keys() {
    let example = programs("example1.pl");
    let o = rever(&["trace", &example, "p(A,B)"], "x\nq\n\n\n");
    assert!(o.status.success());
    assert_eq!(stdout(&o), ["Call: p(A,B)"]);
    assert!(stderr(&o).contains("unknown key"));
}

#[test]
fn failure_is_reported() {
    let example = programs("example1.pl");
    let o = rever(&["debug", &example, "r(a,X)"], "u\nu\n");
    assert_eq!(stdout(&o), ["^Fail: r(a,X)", "^Call: r(a,X)"]);
    assert!(stderr(&o).contains("% no (more) answers"));
}

#[test]
fn step_limit_and_occurs_check_flags() {
    let dir = std::env::temp_dir().join(format!("rever-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let looping = dir.join("loop.pl");
    std::fs::write(&looping, "p :- p.\neq(X,X).\n").unwrap();
    let looping = looping.to_str().unwrap();

    let o = rever(&["debug", "--max-steps", "1000", looping, "p"], "");
    assert!(o.status.success());
    assert!(stderr(&o).contains("step limit"));

    let o = rever(&["debug", looping, "eq(Y,f(Y))"], "");
    assert!(stderr(&o).contains("failed"));
    let o = rever(&["debug", "--no-occurs-check", looping, "eq(Z,g(Z))"], "");
    assert_eq!(stdout(&o).len(), 1, "{}", stderr(&o));
    assert!(stdout(&o)[0].starts_with("**Answer: Z = g("));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bad_input_exits_with_a_diagnostic() {
    let example = programs("example1.pl");
    let o = rever(&["trace", &example, "p(A,"], "");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("query"), "{}", stderr(&o));

    let o = rever(&["trace", "/no/such/file.pl", "p"], "");
    assert!(!o.status.success());
    assert!(stderr(&o).starts_with("rever: "));
}
