//! Line-delimited JSON protocol over a [`Session`].
//!
//! Each input line is one command object keyed by `cmd`; each response line
//! is one event object keyed by `type`. A command answers with zero or more
//! `port`/`answer`/`state` events and then exactly one of `ok`, `error` or
//! `halted`.
//!
//! ```text
//! > {"cmd":"load","program":"q(a).","query":"q(X)","mode":"trace"}
//! < {"type":"ok"}
//! > {"cmd":"step","dir":"fwd"}
//! < {"type":"port","port":"call","goal":"q(X)","dir":"fwd","step":1}
//! < {"type":"ok"}
//! ```

use std::io::{self, BufRead, BufReader, Write};
use std::net::TcpListener;

use serde::{Deserialize, Serialize};

use crate::debugger::{Emitted, Halt, Mode, Outcome, Session};
use crate::parser::{answer_bindings, parse_program, parse_query, SourceProgram};
use crate::rev::{Direction, Port};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WireMode {
    Debug,
    Trace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WireDir {
    Fwd,
    Bwd,
}

impl From<Direction> for WireDir {
    fn from(d: Direction) -> Self {
        match d {
            Direction::Forward => WireDir::Fwd,
            Direction::Backward => WireDir::Bwd,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "cmd", rename_all = "lowercase")]
pub enum WireCommand {
    Load {
        program: String,
        query: String,
        #[serde(default = "default_mode")]
        mode: WireMode,
    },
    Step {
        dir: WireDir,
    },
    Run,
    State,
    Quit,
}

fn default_mode() -> WireMode {
    WireMode::Trace
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Binding {
    pub var: String,
    pub term: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum WireEvent {
    Port {
        port: String,
        goal: String,
        dir: WireDir,
        step: usize,
    },
    Answer {
        bindings: Vec<Binding>,
        dir: WireDir,
        step: usize,
    },
    State {
        queries: Vec<String>,
        history_len: usize,
    },
    Halted {
        reason: String,
    },
    Error {
        message: String,
    },
    Ok,
}

impl WireEvent {
    fn error(message: impl Into<String>) -> Self {
        WireEvent::Error { message: message.into() }
    }

    /// True for the events that end a command's response.
    pub fn is_terminal(&self) -> bool {
        matches!(self, WireEvent::Ok | WireEvent::Error { .. } | WireEvent::Halted { .. })
    }
}

/// One connection's worth of protocol state.
pub struct Bridge {
    session: Option<Session>,
    max_steps: usize,
    occurs_check: bool,
    done: bool,
}

impl Default for Bridge {
    fn default() -> Self {
        Bridge::new()
    }
}

impl Bridge {
    pub fn new() -> Self {
        Bridge {
            session: None,
            max_steps: crate::debugger::DEFAULT_MAX_STEPS,
            occurs_check: true,
            done: false,
        }
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn with_occurs_check(mut self, on: bool) -> Self {
        self.occurs_check = on;
        self
    }

    /// Set once `quit` has been handled.
    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn session(&self) -> Option<&Session> {
        self.session.as_ref()
    }

    /// Handles one input line.
    pub fn handle_line(&mut self, line: &str) -> Vec<WireEvent> {
        match serde_json::from_str::<WireCommand>(line) {
            Ok(cmd) => self.handle(cmd),
            Err(e) => vec![WireEvent::error(format!("bad command: {e}"))],
        }
    }

    pub fn handle(&mut self, cmd: WireCommand) -> Vec<WireEvent> {
        if let WireCommand::Load { program, query, mode } = cmd {
            return self.load(&program, &query, mode);
        }
        if let WireCommand::Quit = cmd {
            self.done = true;
            return vec![WireEvent::Ok];
        }
        let Some(session) = self.session.as_mut() else {
            return vec![WireEvent::error("no session: send load first")];
        };
        let outcome = match cmd {
            WireCommand::Step { dir: WireDir::Fwd } => session.advance(),
            WireCommand::Step { dir: WireDir::Bwd } => session.retreat(),
            WireCommand::Run => session.run(),
            WireCommand::State => {
                let queries = session.render_state();
                let history_len = session.config().history_len();
                return vec![WireEvent::State { queries, history_len }, WireEvent::Ok];
            }
            WireCommand::Load { .. } | WireCommand::Quit => unreachable!(),
        };
        events(session, outcome, self.max_steps)
    }

    fn load(&mut self, program: &str, query: &str, mode: WireMode) -> Vec<WireEvent> {
        let program = match parse_program(&SourceProgram::named(program, "program")) {
            Ok(p) => p.with_occurs_check(self.occurs_check),
            Err(e) => return vec![WireEvent::error(e.to_string())],
        };
        let query = match parse_query(query) {
            Ok(q) => q,
            Err(e) => return vec![WireEvent::error(e.to_string())],
        };
        let mode = match mode {
            WireMode::Debug => Mode::Debug,
            WireMode::Trace => Mode::Trace,
        };
        self.session = Some(Session::start(program, query, mode).with_max_steps(self.max_steps));
        vec![WireEvent::Ok]
    }
}

fn events(session: &mut Session, outcome: Outcome, max_steps: usize) -> Vec<WireEvent> {
    let mut out: Vec<_> = outcome.shown.iter().map(|e| port_event(session, e)).collect();
    out.push(match outcome.halt {
        None => WireEvent::Ok,
        Some(Halt::StepLimit) => WireEvent::error(format!("step limit of {max_steps} exceeded")),
        Some(halt) => WireEvent::Halted { reason: halt.name().to_owned() },
    });
    out
}

fn port_event(session: &mut Session, emitted: &Emitted) -> WireEvent {
    let dir = emitted.event.dir.into();
    let step = emitted.step;
    let atom = match &emitted.event.port {
        Port::Answer(theta) => {
            let query = session.query().clone();
            let bindings = answer_bindings(theta, &query, session.names())
                .into_iter()
                .map(|(var, term)| Binding { var, term })
                .collect();
            return WireEvent::Answer { bindings, dir, step };
        }
        Port::Call(a) | Port::Exit(a) | Port::Redo(a) | Port::Fail(a) => a,
    };
    WireEvent::Port {
        port: emitted.event.port.name().to_owned(),
        goal: session.names().atom(atom),
        dir,
        step,
    }
}

/// Runs the protocol until `quit` or end of input.
pub fn serve<R: BufRead, W: Write>(bridge: &mut Bridge, input: R, mut output: W) -> io::Result<()> {
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        for event in bridge.handle_line(&line) {
            serde_json::to_writer(&mut output, &event)?;
            output.write_all(b"\n")?;
        }
        output.flush()?;
        if bridge.is_done() {
            break;
        }
    }
    Ok(())
}

/// Accepts connections one at a time, each with a fresh session built by
/// `make`.
pub fn serve_tcp(listener: TcpListener, make: impl Fn() -> Bridge) -> io::Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        let reader = BufReader::new(stream.try_clone()?);
        let mut bridge = make();
        // a client dropping mid-line should not take the server down
        let _ = serve(&mut bridge, reader, &stream);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn json(events: &[WireEvent]) -> Vec<String> {
        events.iter().map(|e| serde_json::to_string(e).unwrap()).collect()
    }

    #[test]
    fn load_then_step() {
        let mut b = Bridge::new();
        let r = b.handle_line(r#"{"cmd":"load","program":"q(a).","query":"q(X)","mode":"trace"}"#);
        assert_eq!(json(&r), [r#"{"type":"ok"}"#]);
        let r = b.handle_line(r#"{"cmd":"step","dir":"fwd"}"#);
        assert_eq!(
            json(&r),
            [r#"{"type":"port","port":"call","goal":"q(X)","dir":"fwd","step":1}"#, r#"{"type":"ok"}"#]
        );
    }

    #[test]
    fn origin_is_halted() {
        let mut b = Bridge::new();
        b.handle_line(r#"{"cmd":"load","program":"q(a).","query":"q(X)","mode":"trace"}"#);
        let r = b.handle_line(r#"{"cmd":"step","dir":"bwd"}"#);
        assert_eq!(json(&r), [r#"{"type":"halted","reason":"origin"}"#]);
    }

    #[test]
    fn errors_keep_the_connection() {
        let mut b = Bridge::new();
        assert!(matches!(b.handle_line("{nope").as_slice(), [WireEvent::Error { .. }]));
        assert!(matches!(b.handle_line(r#"{"cmd":"run"}"#).as_slice(), [WireEvent::Error { .. }]));
        let r = b.handle_line(r#"{"cmd":"load","program":"q(a","query":"q(X)","mode":"trace"}"#);
        let [WireEvent::Error { message }] = r.as_slice() else { panic!("{r:?}") };
        assert!(message.contains("1:"), "{message}");
        assert!(b.session().is_none());
    }

    #[test]
    fn answer_and_state() {
        let mut b = Bridge::new();
        b.handle_line(r#"{"cmd":"load","program":"q(a).","query":"q(X)","mode":"debug"}"#);
        let r = b.handle_line(r#"{"cmd":"run"}"#);
        assert_eq!(
            json(&r),
            [
                r#"{"type":"answer","bindings":[{"var":"X","term":"a"}],"dir":"fwd","step":3}"#,
                r#"{"type":"ok"}"#
            ]
        );
        let r = b.handle_line(r#"{"cmd":"state"}"#);
        assert_eq!(
            json(&r),
            [r#"{"type":"state","queries":["⟨true;{X/a}⟩"],"history_len":3}"#, r#"{"type":"ok"}"#]
        );
    }

    #[test]
    fn serve_stops_at_quit() {
        let input = "{\"cmd\":\"load\",\"program\":\"q(a).\",\"query\":\"q(X)\"}\n\n{\"cmd\":\"quit\"}\n{\"cmd\":\"state\"}\n";
        let mut out = Vec::new();
        serve(&mut Bridge::new(), input.as_bytes(), &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "{\"type\":\"ok\"}\n{\"type\":\"ok\"}\n");
    }
}
