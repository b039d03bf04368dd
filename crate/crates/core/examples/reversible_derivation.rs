//! Forward to the first answer, then undo every step back to the initial
//! configuration, printing the history event consumed by each backward step.

use rever::parser::VarNames;
use rever::{parse_program_str, parse_query, Configuration};

fn main() {
    let program = parse_program_str(include_str!("../programs/example1.pl")).unwrap();
    let query = parse_query("p(A,B)").unwrap();
    let origin = Configuration::new(&query);
    let mut config = origin.clone();
    while config.answer().is_none() {
        let t = config.forward_step(&program).unwrap();
        println!("-> {:<12} {}", t.rule.name(), config.state);
    }

    let vars = query.vars();
    let mut names = VarNames::new();
    let history: Vec<String> = config.history().map(|e| e.render(&vars, &mut names)).collect();
    println!("history, newest first: {}", history.join(" "));

    while let Some(event) = config.last_event() {
        let shown = event.render(&vars, &mut names);
        let t = config.backward_step(&program).unwrap();
        println!("<- {:<12} undoes {shown}", t.rule.name());
    }
    assert_eq!(config, origin);
    println!("back at the origin");
}
