//! The four-port trace of a query, forwards to the first answer and then
//! backwards to the start, one port per key press.

use rever::debugger::{Action, Key};
use rever::{parse_program_str, parse_query, Mode, Session};

fn press(session: &mut Session, key: Key) -> bool {
    match session.handle_key(&key) {
        Action::Show(lines) => {
            lines.iter().for_each(|l| println!("{l}"));
            true
        }
        Action::Stopped { lines, halt } => {
            lines.iter().for_each(|l| println!("{l}"));
            println!("% {halt}");
            false
        }
        _ => false,
    }
}

fn main() {
    let program = parse_program_str(include_str!("../programs/example1.pl")).unwrap();
    let query = parse_query("p(A,B)").unwrap();
    let mut session = Session::start(program, query, Mode::Trace);
    for _ in 0..11 {
        press(&mut session, Key::Down);
    }
    while press(&mut session, Key::Up) {}
}
