//! Small steps over query sequences, naming each rule as it fires.

use rever::{parse_program_str, parse_query, DState};

fn main() {
    let program = parse_program_str("p(X,Y) :- q(X), r(X,Y).\nq(a).\nq(b).\nr(b,b).\n").unwrap();
    let query = parse_query("p(A,B)").unwrap();
    let mut state = DState::initial(&query);
    println!("{:<12} {state}", "");
    loop {
        match state.step(&program) {
            Ok(rule) => println!("{:<12} {state}", rule.name()),
            Err(halted) => {
                println!("halted: {halted:?}");
                break;
            }
        }
        if let Some(theta) = state.answer() {
            println!("answer: {theta}");
        }
    }
}
