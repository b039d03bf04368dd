//! Interactive sessions over the reversible engine.
//!
//! A session shows one port per key press. A transition may pass several
//! ports (choice_fail passes call and fail), so the ones not yet shown wait
//! in a queue. When the user turns around in the middle of such a group, the
//! step in the new direction first passes the queued ports again, mirrored,
//! and those stay hidden.
//!
//! In debug mode nothing but answers is shown until an `rtrace` goal runs;
//! trace mode shows every port from the start.

use std::collections::VecDeque;
use std::fmt;

use crate::det::Rule;
use crate::parser::{format_answer, Query, VarNames};
use crate::rev::{Configuration, Direction, Port, PortEvent};
use crate::terms::Program;

pub const DEFAULT_MAX_STEPS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Silent until `rtrace` is executed.
    Debug,
    /// Ports are shown from the first step.
    Trace,
}

/// Why a command stopped without reaching a port.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Halt {
    /// The last answer has been shown and nothing is left to try.
    Success,
    /// The only query left has failed.
    Failure,
    /// Nothing left to undo.
    Origin,
    /// The per-command step budget ran out.
    StepLimit,
}

impl Halt {
    pub fn name(self) -> &'static str {
        match self {
            Halt::Success => "success",
            Halt::Failure => "failure",
            Halt::Origin => "origin",
            Halt::StepLimit => "step-limit",
        }
    }
}

impl fmt::Display for Halt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Halt::Success => "no more answers",
            Halt::Failure => "no (more) answers: the query failed",
            Halt::Origin => "at the start of the execution",
            Halt::StepLimit => "step limit reached",
        })
    }
}

/// A port as shown to the user, with the step index it was shown at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Emitted {
    pub event: PortEvent,
    pub step: usize,
}

/// The result of one command: the ports shown, and the halt that ended it
/// early, if any.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub shown: Vec<Emitted>,
    pub halt: Option<Halt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Key {
    Down,
    Up,
    Skip,
    Trace,
    Quit,
    Unknown(String),
}

impl Key {
    /// Reads one line of terminal input. An empty line is Enter; arrow keys
    /// arrive as their escape sequences.
    pub fn from_input(line: &str) -> Key {
        match line.trim_end_matches(['\r', '\n']) {
            "" | "d" | "\x1b[B" => Key::Down,
            "u" | "\x1b[A" => Key::Up,
            "s" => Key::Skip,
            "t" => Key::Trace,
            "q" => Key::Quit,
            other => Key::Unknown(other.to_owned()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    Show(Vec<String>),
    Stopped { lines: Vec<String>, halt: Halt },
    Quit,
    Hint(String),
}

pub struct Session {
    program: Program,
    query: Query,
    config: Configuration,
    mode: Mode,
    tracing_active: bool,
    /// Ports of the last transition not shown yet, and the direction it ran.
    pending: VecDeque<PortEvent>,
    pending_dir: Direction,
    max_steps: usize,
    names: VarNames,
}

impl Session {
    pub fn start(program: Program, query: Query, mode: Mode) -> Self {
        Session {
            config: Configuration::new(&query),
            program,
            query,
            mode,
            tracing_active: mode == Mode::Trace,
            pending: VecDeque::new(),
            pending_dir: Direction::Forward,
            max_steps: DEFAULT_MAX_STEPS,
            names: VarNames::new(),
        }
    }

    /// Sets the number of engine steps one command may take.
    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        assert!(max_steps > 0, "step budget must be positive");
        self.max_steps = max_steps;
        self
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn query(&self) -> &Query {
        &self.query
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn tracing_active(&self) -> bool {
        self.tracing_active
    }

    /// Forward steps minus backward steps so far.
    pub fn step_index(&self) -> usize {
        self.config.history_len()
    }

    /// Switches to trace mode.
    pub fn trace(&mut self) {
        self.mode = Mode::Trace;
        self.tracing_active = true;
    }

    /// Runs forwards to the next port worth showing.
    pub fn advance(&mut self) -> Outcome {
        let mut budget = self.max_steps;
        self.advance_within(&mut budget)
    }

    /// Runs backwards to the previous port worth showing.
    pub fn retreat(&mut self) -> Outcome {
        let mut budget = self.max_steps;
        if let Some(event) = self.take_pending(Direction::Backward) {
            return self.shown(event);
        }
        let mut skip = self.mirror_pending();
        loop {
            if budget == 0 {
                return halted(Halt::StepLimit);
            }
            budget -= 1;
            let Ok(t) = self.config.backward_step(&self.program) else {
                return halted(Halt::Origin);
            };
            let mut events: VecDeque<_> = t.events.into();
            drop_prefix(&mut events, &mut skip);
            if !self.tracing_active {
                events.retain(|e| matches!(e.port, Port::Answer(_)));
            }
            if let Some(first) = events.pop_front() {
                self.pending = events;
                self.pending_dir = Direction::Backward;
                return self.shown(first);
            }
        }
    }

    /// Advances without pausing until an answer is shown or the run halts.
    pub fn run(&mut self) -> Outcome {
        let mut budget = self.max_steps;
        let mut all = Outcome::default();
        loop {
            let step = self.advance_within(&mut budget);
            all.shown.extend(step.shown);
            if step.halt.is_some() {
                all.halt = step.halt;
                return all;
            }
            if all.shown.last().is_some_and(|e| matches!(e.event.port, Port::Answer(_))) {
                return all;
            }
        }
    }

    fn advance_within(&mut self, budget: &mut usize) -> Outcome {
        if let Some(event) = self.take_pending(Direction::Forward) {
            return self.shown(event);
        }
        let mut skip = self.mirror_pending();
        loop {
            if *budget == 0 {
                return halted(Halt::StepLimit);
            }
            let t = match self.config.forward_step(&self.program) {
                Ok(t) => t,
                Err(crate::det::Halted::Success) => return halted(Halt::Success),
                Err(crate::det::Halted::Failure) => {
                    // leave the failure open for rewinding with ports visible
                    self.tracing_active = true;
                    return halted(Halt::Failure);
                }
            };
            *budget -= 1;
            if t.rule == Rule::Rtrace {
                self.tracing_active = true;
            }
            let mut events: VecDeque<_> = t.events.into();
            if let Some(theta) = self.config.answer() {
                events.push_back(PortEvent {
                    port: Port::Answer(theta.clone()),
                    dir: Direction::Forward,
                });
            }
            drop_prefix(&mut events, &mut skip);
            if !self.tracing_active {
                events.retain(|e| matches!(e.port, Port::Answer(_)));
            }
            if let Some(first) = events.pop_front() {
                self.pending = events;
                self.pending_dir = Direction::Forward;
                return self.shown(first);
            }
        }
    }

    fn take_pending(&mut self, dir: Direction) -> Option<PortEvent> {
        if self.pending_dir == dir {
            self.pending.pop_front()
        } else {
            None
        }
    }

    /// Ports still queued from the other direction: the step that turns
    /// around passes them again first, and they stay hidden.
    fn mirror_pending(&mut self) -> VecDeque<PortEvent> {
        let dir = match self.pending_dir {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        };
        self.pending
            .drain(..)
            .filter(|e| !matches!(e.port, Port::Answer(_)))
            .map(|e| PortEvent { port: e.port, dir })
            .collect()
    }

    fn shown(&self, event: PortEvent) -> Outcome {
        Outcome {
            shown: vec![Emitted { event, step: self.step_index() }],
            halt: None,
        }
    }

    pub fn render_line(&mut self, event: &PortEvent) -> String {
        render_line(event, &self.query, &mut self.names)
    }

    /// The current queries, leftmost first, substitutions cut down to the
    /// query's variables.
    pub fn render_state(&mut self) -> Vec<String> {
        let vars = self.query.originals.clone();
        self.config
            .state
            .queries
            .iter()
            .map(|q| q.render(&vars, &mut self.names))
            .collect()
    }

    pub fn names(&mut self) -> &mut VarNames {
        &mut self.names
    }

    pub fn handle_key(&mut self, key: &Key) -> Action {
        let outcome = match key {
            Key::Down => self.advance(),
            Key::Up => self.retreat(),
            Key::Skip => self.run(),
            Key::Trace => {
                self.trace();
                return Action::Show(Vec::new());
            }
            Key::Quit => return Action::Quit,
            Key::Unknown(k) => {
                return Action::Hint(format!(
                    "unknown key {k:?}: Enter or d steps forward, u steps back, s skips to the next answer, t traces, q quits"
                ))
            }
        };
        let lines = outcome.shown.iter().map(|e| self.render_line(&e.event)).collect();
        match outcome.halt {
            Some(halt) => Action::Stopped { lines, halt },
            None => Action::Show(lines),
        }
    }
}

fn halted(halt: Halt) -> Outcome {
    Outcome { shown: Vec::new(), halt: Some(halt) }
}

fn drop_prefix(events: &mut VecDeque<PortEvent>, skip: &mut VecDeque<PortEvent>) {
    while let (Some(e), Some(s)) = (events.front(), skip.front()) {
        if e != s {
            break;
        }
        events.pop_front();
        skip.pop_front();
    }
    skip.clear();
}

/// `Call: p(A,B)`, `^Fail: r(a,B)`, `**Answer: A = b, B = b`.
pub fn render_line(event: &PortEvent, query: &Query, names: &mut VarNames) -> String {
    let back = if event.dir == Direction::Backward { "^" } else { "" };
    match &event.port {
        Port::Answer(theta) => {
            let stars = if back.is_empty() { "**" } else { back };
            format!("{stars}Answer: {}", format_answer(theta, query, names))
        }
        Port::Call(a) => format!("{back}Call: {}", names.atom(a)),
        Port::Exit(a) => format!("{back}Exit: {}", names.atom(a)),
        Port::Redo(a) => format!("{back}Redo: {}", names.atom(a)),
        Port::Fail(a) => format!("{back}Fail: {}", names.atom(a)),
    }
}
