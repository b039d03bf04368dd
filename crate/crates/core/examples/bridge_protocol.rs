//! The line-delimited JSON protocol, driven in process.

use rever::bridge::{serve, Bridge};
use serde_json::json;

fn main() {
    let program = include_str!("../programs/example1.pl");
    let script = [
        json!({"cmd": "load", "program": program, "query": "p(A,B)", "mode": "trace"}),
        json!({"cmd": "step", "dir": "fwd"}),
        json!({"cmd": "step", "dir": "fwd"}),
        json!({"cmd": "run"}),
        json!({"cmd": "state"}),
        json!({"cmd": "step", "dir": "bwd"}),
        json!({"cmd": "quit"}),
    ];
    let input: String = script.iter().map(|c| format!("{c}\n")).collect();
    for line in input.lines() {
        println!(">> {line}");
    }
    let mut out = Vec::new();
    serve(&mut Bridge::new(), input.as_bytes(), &mut out).unwrap();
    print!("{}", String::from_utf8(out).unwrap());
}
