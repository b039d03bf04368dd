mod common;

use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::process::{Command, Stdio};

use serde_json::{json, Value};

use rever::bridge::{serve, Bridge, WireDir, WireEvent};
use rever::debugger::{Action, Key, Mode, Session};

use common::{example1, BACKWARD, EXAMPLE1, FORWARD};

fn load(mode: &str) -> String {
    json!({"cmd": "load", "program": EXAMPLE1, "query": "p(A,B)", "mode": mode}).to_string()
}

fn step(dir: &str) -> String {
    json!({"cmd": "step", "dir": dir}).to_string()
}

/// The line the terminal would print for a wire event.
fn as_line(e: &WireEvent) -> Option<String> {
    match e {
        WireEvent::Port { port, goal, dir, .. } => {
            let back = if *dir == WireDir::Bwd { "^" } else { "" };
            let mut name = port.clone();
            name[..1].make_ascii_uppercase();
            Some(format!("{back}{name}: {goal}"))
        }
        WireEvent::Answer { bindings, dir, .. } => {
            let eqs: Vec<_> = bindings.iter().map(|b| format!("{} = {}", b.var, b.term)).collect();
            let eqs = if eqs.is_empty() { "true".to_owned() } else { eqs.join(", ") };
            let stars = if *dir == WireDir::Bwd { "^" } else { "**" };
            Some(format!("{stars}Answer: {eqs}"))
        }
        _ => None,
    }
}

#[test]
fn example_session_over_the_wire() {
    let mut b = Bridge::new();
    assert_eq!(b.handle_line(&load("trace")), [WireEvent::Ok]);
    let first = b.handle_line(&step("fwd"));
    assert_eq!(
        serde_json::to_value(&first[0]).unwrap(),
        json!({"type": "port", "port": "call", "goal": "p(A,B)", "dir": "fwd", "step": 1})
    );
    assert_eq!(first[1], WireEvent::Ok);
    let mut lines: Vec<String> = first.iter().filter_map(as_line).collect();
    for _ in 0..10 {
        let events = b.handle_line(&step("fwd"));
        assert_eq!(events.last(), Some(&WireEvent::Ok));
        lines.extend(events.iter().filter_map(as_line));
    }
    assert_eq!(lines, FORWARD);
    let mut back = Vec::new();
    for _ in 0..10 {
        back.extend(b.handle_line(&step("bwd")).iter().filter_map(as_line));
    }
    assert_eq!(back, BACKWARD);
    let r = b.handle_line(&step("bwd"));
    assert_eq!(serde_json::to_value(&r).unwrap(), json!([{"type": "halted", "reason": "origin"}]));
}

#[test]
fn wire_and_terminal_agree_on_a_key_script() {
    let script = "ddddduuddddddddddsuuuuudsss";
    let (program, query) = example1();
    let mut session = Session::start(program, query, Mode::Trace);
    let mut bridge = Bridge::new();
    bridge.handle_line(&load("trace"));
    let mut terminal = Vec::new();
    let mut wire = Vec::new();
    for k in script.chars() {
        let key = Key::from_input(&k.to_string());
        match session.handle_key(&key) {
            Action::Show(lines) | Action::Stopped { lines, .. } => terminal.extend(lines),
            other => panic!("{other:?}"),
        }
        let cmd = match k {
            'd' => step("fwd"),
            'u' => step("bwd"),
            _ => json!({"cmd": "run"}).to_string(),
        };
        let events = bridge.handle_line(&cmd);
        assert!(events.last().unwrap().is_terminal());
        assert_eq!(events.iter().filter(|e| e.is_terminal()).count(), 1);
        wire.extend(events.iter().filter_map(as_line));
    }
    assert_eq!(wire, terminal);
    assert!(terminal.iter().any(|l| l == "**Answer: A = c, B = c"));
}

#[test]
fn step_numbers_track_the_history() {
    let mut b = Bridge::new();
    b.handle_line(&load("trace"));
    let mut last = 0;
    for _ in 0..11 {
        for e in b.handle_line(&step("fwd")) {
            if let WireEvent::Port { step, .. } | WireEvent::Answer { step, .. } = e {
                assert!(step >= last);
                last = step;
            }
        }
    }
    let state = b.handle_line(r#"{"cmd":"state"}"#);
    let WireEvent::State { history_len, queries } = &state[0] else { panic!("{state:?}") };
    assert_eq!(*history_len, last);
    assert_eq!(queries[0], "⟨true;{A/b,B/b}⟩");
    assert_eq!(queries.len(), 3);
}

#[test]
fn debug_mode_runs_to_each_answer() {
    let mut b = Bridge::new();
    b.handle_line(&load("debug"));
    let mut answers = Vec::new();
    loop {
        let events = b.handle_line(&step("fwd"));
        if let Some(WireEvent::Halted { reason }) = events.last() {
            assert_eq!(reason, "success");
            break;
        }
        answers.extend(events.iter().filter_map(as_line));
    }
    assert_eq!(
        answers,
        ["**Answer: A = b, B = b", "**Answer: A = b, B = c", "**Answer: A = c, B = c"]
    );
}

#[test]
fn failures_and_limits() {
    let mut b = Bridge::new().with_max_steps(100);
    b.handle_line(r#"{"cmd":"load","program":"p :- p.","query":"p","mode":"debug"}"#);
    let r = b.handle_line(&step("fwd"));
    assert!(matches!(r.as_slice(), [WireEvent::Error { message }] if message.contains("step limit")));

    b.handle_line(r#"{"cmd":"load","program":"q(a).","query":"q(b)","mode":"trace"}"#);
    let r: Vec<Value> = b.handle_line(r#"{"cmd":"run"}"#).iter().map(|e| serde_json::to_value(e).unwrap()).collect();
    assert_eq!(r.last().unwrap(), &json!({"type": "halted", "reason": "failure"}));
    assert_eq!(r[0]["port"], "call");
    assert_eq!(r[1]["port"], "fail");

    let r = b.handle_line(r#"{"cmd":"step","dir":"sideways"}"#);
    assert!(matches!(r.as_slice(), [WireEvent::Error { .. }]));
    let r = b.handle_line(r#"{"cmd":"load","program":"q(a) :- .","query":"q(X)"}"#);
    let [WireEvent::Error { message }] = r.as_slice() else { panic!("{r:?}") };
    assert!(message.starts_with("program:1:"), "{message}");
    let r = b.handle_line(r#"{"cmd":"load","program":"q(a).","query":"q(X"}"#);
    assert!(matches!(r.as_slice(), [WireEvent::Error { .. }]));
}

#[test]
fn in_process_serve() {
    let input = format!("{}\n{}\nnot json\n{}\n", load("trace"), step("fwd"), json!({"cmd": "quit"}));
    let mut out = Vec::new();
    serve(&mut Bridge::new(), input.as_bytes(), &mut out).unwrap();
    let lines: Vec<Value> = String::from_utf8(out)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[1]["goal"], "p(A,B)");
    assert_eq!(lines[3]["type"], "error");
    assert_eq!(lines[4], json!({"type": "ok"}));
}

#[test]
fn serve_over_stdio() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_rever"))
        .args(["serve", "--stdio"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stdin = child.stdin.take().unwrap();
    writeln!(stdin, "{}", load("trace")).unwrap();
    writeln!(stdin, "{}", step("fwd")).unwrap();
    drop(stdin);
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text,
        "{\"type\":\"ok\"}\n{\"type\":\"port\",\"port\":\"call\",\"goal\":\"p(A,B)\",\"dir\":\"fwd\",\"step\":1}\n{\"type\":\"ok\"}\n"
    );
}

#[test]
fn serve_over_tcp() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_rever"))
        .args(["serve", "--listen", "0"])
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut banner = String::new();
    BufReader::new(child.stderr.take().unwrap()).read_line(&mut banner).unwrap();
    let addr = banner.trim().rsplit(' ').next().unwrap().to_owned();
    for _ in 0..2 {
        // each connection gets a fresh session
        let stream = TcpStream::connect(&addr).unwrap();
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut w = &stream;
        writeln!(w, "{}", step("fwd")).unwrap();
        let mut line = String::new();
        reader.read_line(&mut line).unwrap();
        assert!(line.contains("\"error\""), "{line}");
        writeln!(w, "{}", load("trace")).unwrap();
        writeln!(w, "{}", step("fwd")).unwrap();
        writeln!(w, "{}", json!({"cmd": "quit"})).unwrap();
        let lines: Vec<String> = reader.lines().map(Result::unwrap).collect();
        assert_eq!(lines.len(), 4, "{lines:?}");
        assert!(lines[1].contains("\"step\":1"));
    }
    child.kill().unwrap();
    child.wait().unwrap();
}
