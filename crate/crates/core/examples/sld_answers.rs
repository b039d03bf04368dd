//! Computed answers by plain SLD resolution and by the deterministic engine.

use rever::parser::{format_answer, VarNames};
use rever::{det_answers, parse_program_str, parse_query, sld_solve};

const PROGRAM: &str = "
nat(z).
nat(s(X)) :- nat(X).
add(z, Y, Y).
add(s(X), Y, s(Z)) :- add(X, Y, Z).
";

fn main() {
    let program = parse_program_str(PROGRAM).unwrap();
    let query = parse_query("add(A, B, s(s(z)))").unwrap();

    let sld = sld_solve(&program, &query, 10_000, 10);
    let det = det_answers(&program, &query, 10_000, 10);
    assert_eq!(sld.answers, det.answers);

    let mut names = VarNames::new();
    for theta in &sld.answers {
        println!("{}", format_answer(theta, &query, &mut names));
    }
    println!("exhausted: {}, steps: {}", sld.exhausted, sld.steps_used);

    let infinite = parse_query("nat(N)").unwrap();
    let r = sld_solve(&program, &infinite, 10_000, 4);
    println!("first {} of nat(N), exhausted: {}", r.answers.len(), r.exhausted);
}
