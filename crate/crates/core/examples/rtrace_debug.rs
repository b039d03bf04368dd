//! Debug mode runs silently between answers; an `rtrace` goal in the program
//! switches the port trace on from that point.

use rever::debugger::Outcome;
use rever::parser::{parse_program, SourceProgram};
use rever::{parse_query, Mode, Session};

fn show(session: &mut Session, o: Outcome) {
    for e in &o.shown {
        println!("{}", session.render_line(&e.event));
    }
    if let Some(halt) = o.halt {
        println!("% {halt}");
    }
}

fn main() {
    let src = SourceProgram::read(concat!(env!("CARGO_MANIFEST_DIR"), "/programs/rtrace.pl")).unwrap();
    let program = parse_program(&src).unwrap();
    let query = parse_query("main(A,B)").unwrap();
    let mut session = Session::start(program, query, Mode::Debug);
    for _ in 0..6 {
        let o = session.advance();
        let done = o.halt.is_some();
        show(&mut session, o);
        if done {
            break;
        }
    }
    println!("tracing: {}", session.tracing_active());
}
