//! Reversible semantics. A [`Configuration`] pairs a deterministic state
//! with a history holding exactly what each forward rule destroys, so every
//! step can be undone. Unfolding also plants a `ret(A)` marker after the
//! clause body; consuming it is the exit rule that produces the Exit port.
//!
//! Forward steps report the ports they pass (call, exit, fail, redo) with
//! the selected atom instantiated by the current answer substitution.

use std::fmt;

use crate::det::{clauses_for, DQuery, DState, Goal, Halted, Rule};
use crate::parser::{Query, VarNames};
use crate::terms::{probe_head, Atom, FreshSource, Label, Program, Substitution, Syntax, Var};

/// History entry, one per forward step.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum HistEvent {
    /// choice with this many branches
    Ch(usize),
    /// unfold of `atom` under `theta` with clause `label`; `fresh_before` is
    /// the counter the renaming started from
    Unf {
        atom: Atom,
        theta: Substitution,
        label: Label,
        fresh_before: FreshSource,
    },
    /// choice_fail on `atom`
    Fail(Atom),
    Exit(Atom),
    /// backtrack away from `⟨fail, goals; theta⟩`
    Bck { goals: Vec<Goal>, theta: Substitution },
    Next(Substitution),
    Rtrace,
}

impl HistEvent {
    pub fn rule(&self) -> Rule {
        match self {
            HistEvent::Ch(_) => Rule::Choice,
            HistEvent::Unf { .. } => Rule::Unfold,
            HistEvent::Fail(_) => Rule::ChoiceFail,
            HistEvent::Exit(_) => Rule::Exit,
            HistEvent::Bck { .. } => Rule::Backtrack,
            HistEvent::Next(_) => Rule::Next,
            HistEvent::Rtrace => Rule::Rtrace,
        }
    }

    /// Constructor name as it appears in histories: ch, unf, fail, exit, bck, next.
    pub fn kind(&self) -> &'static str {
        match self {
            HistEvent::Ch(_) => "ch",
            HistEvent::Unf { .. } => "unf",
            HistEvent::Fail(_) => "fail",
            HistEvent::Exit(_) => "exit",
            HistEvent::Bck { .. } => "bck",
            HistEvent::Next(_) => "next",
            HistEvent::Rtrace => "rtrace",
        }
    }

    /// Renders the event with substitutions cut down to `vars`, leaving the
    /// atoms exactly as stored.
    pub fn render(&self, vars: &[Var], names: &mut VarNames) -> String {
        let mut theta = |t: &Substitution| {
            let shown = t.restrict(vars);
            if shown.is_identity() {
                "id".to_owned()
            } else {
                let parts: Vec<_> = shown
                    .iter()
                    .map(|(v, t)| format!("{}/{}", names.var(v), names.term(t)))
                    .collect();
                format!("{{{}}}", parts.join(","))
            }
        };
        match self {
            HistEvent::Ch(m) => format!("ch({m})"),
            HistEvent::Unf { atom, theta: t, label, .. } => {
                let t = theta(t);
                format!("unf({},{t},{label})", names.atom(atom))
            }
            HistEvent::Fail(a) => format!("fail({})", names.atom(a)),
            HistEvent::Exit(a) => format!("exit({})", names.atom(a)),
            HistEvent::Bck { goals, theta: t } => {
                let t = theta(t);
                let goals: Vec<_> = goals.iter().map(|g| g.render(names)).collect();
                let goals = if goals.is_empty() { "true".to_owned() } else { goals.join(",") };
                format!("bck({goals},{t})")
            }
            HistEvent::Next(t) => format!("next({})", theta(t)),
            HistEvent::Rtrace => "rtrace".to_owned(),
        }
    }
}

impl fmt::Debug for HistEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HistEvent::Ch(m) => write!(f, "ch({m})"),
            HistEvent::Unf { atom, theta, label, fresh_before } => {
                write!(f, "unf({atom},{theta},{label})@{}", fresh_before.counter())
            }
            HistEvent::Fail(a) => write!(f, "fail({a})"),
            HistEvent::Exit(a) => write!(f, "exit({a})"),
            HistEvent::Bck { goals, theta } => write!(f, "bck({goals:?},{theta})"),
            HistEvent::Next(t) => write!(f, "next({t})"),
            HistEvent::Rtrace => f.write_str("rtrace"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

/// A Byrd-box port, or an answer, carrying what is shown to the user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Port {
    Call(Atom),
    Exit(Atom),
    Redo(Atom),
    Fail(Atom),
    Answer(Substitution),
}

impl Port {
    pub fn name(&self) -> &'static str {
        match self {
            Port::Call(_) => "call",
            Port::Exit(_) => "exit",
            Port::Redo(_) => "redo",
            Port::Fail(_) => "fail",
            Port::Answer(_) => "answer",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortEvent {
    pub port: Port,
    pub dir: Direction,
}

impl PortEvent {
    fn forward(port: Port) -> Self {
        PortEvent { port, dir: Direction::Forward }
    }

    fn backward(port: Port) -> Self {
        PortEvent { port, dir: Direction::Backward }
    }
}

/// What a forward or backward step did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub rule: Rule,
    pub events: Vec<PortEvent>,
}

/// Returned by a backward step with an empty history.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AtOrigin;

/// `S • H`: a state and its history. The history is stored oldest first;
/// [`Configuration::history`] yields it newest first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub state: DState,
    history: Vec<HistEvent>,
}

impl Configuration {
    pub fn new(query: &Query) -> Self {
        Configuration {
            state: DState::initial(query),
            history: Vec::new(),
        }
    }

    /// Newest event first.
    pub fn history(&self) -> impl ExactSizeIterator<Item = &HistEvent> + DoubleEndedIterator {
        self.history.iter().rev()
    }

    pub fn history_len(&self) -> usize {
        self.history.len()
    }

    pub fn last_event(&self) -> Option<&HistEvent> {
        self.history.last()
    }

    /// θ when the leftmost query is `⟨true; θ⟩`.
    pub fn answer(&self) -> Option<&Substitution> {
        self.state.answer()
    }

    /// The forward rule that would fire, or `None` at a halted configuration.
    pub fn applicable_rule(&self, program: &Program) -> Option<Rule> {
        let q = self.state.first();
        let more = self.state.queries.len() > 1;
        match (q.head(), q.label) {
            (None, _) => more.then_some(Rule::Next),
            (Some(Goal::Fail), _) => more.then_some(Rule::Backtrack),
            (Some(Goal::Ret(_)), _) => Some(Rule::Exit),
            (Some(Goal::Rtrace), _) => Some(Rule::Rtrace),
            (Some(Goal::Call(_)), Some(_)) => Some(Rule::Unfold),
            (Some(Goal::Call(a)), None) => {
                if clauses_for(&a.apply(&q.theta), program).is_empty() {
                    Some(Rule::ChoiceFail)
                } else {
                    Some(Rule::Choice)
                }
            }
        }
    }

    pub fn forward_step(&mut self, program: &Program) -> Result<Transition, Halted> {
        let Some(rule) = self.applicable_rule(program) else {
            return Err(if self.state.first().is_true() {
                Halted::Success
            } else {
                Halted::Failure
            });
        };
        let state = &mut self.state;
        let (event, ports) = match rule {
            Rule::Choice => {
                let q = state.first();
                let Some(Goal::Call(a)) = q.head() else { unreachable!() };
                let called = a.apply(&q.theta);
                let labels = clauses_for(&called, program);
                state.choice(&labels);
                (HistEvent::Ch(labels.len()), vec![Port::Call(called)])
            }
            Rule::ChoiceFail => {
                let q = state.first_mut();
                let Goal::Call(a) = std::mem::replace(&mut q.goals[0], Goal::Fail) else {
                    unreachable!()
                };
                let called = a.apply(&q.theta);
                (HistEvent::Fail(a), vec![Port::Call(called.clone()), Port::Fail(called)])
            }
            Rule::Unfold => {
                let fresh_before = state.fresh;
                let (mut body, theta) = state.unfold(program);
                let q = state.first_mut();
                let Goal::Call(a) = q.goals.remove(0) else { unreachable!() };
                let label = q.label.take().expect("labeled");
                body.push(Goal::Ret(a.clone()));
                q.goals.splice(0..0, body);
                let old = std::mem::replace(&mut q.theta, theta);
                (
                    HistEvent::Unf { atom: a, theta: old, label, fresh_before },
                    Vec::new(),
                )
            }
            Rule::Exit => {
                let q = state.first_mut();
                let Goal::Ret(a) = q.goals.remove(0) else { unreachable!() };
                let exited = a.apply(&q.theta);
                (HistEvent::Exit(a), vec![Port::Exit(exited)])
            }
            Rule::Backtrack => {
                let mut failed = state.queries.pop_front().expect("non-empty");
                failed.goals.remove(0);
                let redo = redo_port(state.first());
                (
                    HistEvent::Bck { goals: failed.goals, theta: failed.theta },
                    redo.into_iter().collect(),
                )
            }
            Rule::Next => {
                let done = state.queries.pop_front().expect("non-empty");
                (HistEvent::Next(done.theta), Vec::new())
            }
            Rule::Rtrace => {
                state.first_mut().goals.remove(0);
                (HistEvent::Rtrace, Vec::new())
            }
        };
        self.history.push(event);
        Ok(Transition {
            rule,
            events: ports.into_iter().map(PortEvent::forward).collect(),
        })
    }

    /// Undoes the most recent forward step. Which rule runs is decided by
    /// the history head alone.
    pub fn backward_step(&mut self, program: &Program) -> Result<Transition, AtOrigin> {
        let event = self.history.pop().ok_or(AtOrigin)?;
        let rule = event.rule();
        let state = &mut self.state;
        let ports = match event {
            HistEvent::Ch(m) => {
                let first = state.first_mut();
                first.label = None;
                let Some(Goal::Call(a)) = first.head() else {
                    panic!("ch({m}) over a query without a selected atom")
                };
                let called = a.apply(&first.theta);
                state.queries.drain(1..m);
                vec![Port::Call(called)]
            }
            HistEvent::Fail(a) => {
                let q = state.first_mut();
                assert_eq!(q.goals.first(), Some(&Goal::Fail), "fail(A) over a query not headed by fail");
                let called = a.apply(&q.theta);
                q.goals[0] = Goal::Call(a);
                vec![Port::Fail(called.clone()), Port::Call(called)]
            }
            HistEvent::Unf { atom, theta, label, fresh_before } => {
                let n = program.clause(label).body.len();
                let q = state.first_mut();
                assert_eq!(
                    q.goals.get(n),
                    Some(&Goal::Ret(atom.clone())),
                    "unf over goals that do not end the body of {label}"
                );
                q.goals.splice(0..=n, [Goal::Call(atom)]);
                q.theta = theta;
                q.label = Some(label);
                state.fresh = fresh_before;
                Vec::new()
            }
            HistEvent::Exit(a) => {
                let q = state.first_mut();
                let exited = a.apply(&q.theta);
                q.goals.insert(0, Goal::Ret(a));
                vec![Port::Exit(exited)]
            }
            HistEvent::Bck { goals, theta } => {
                let redo = redo_port(state.first());
                let mut restored = vec![Goal::Fail];
                restored.extend(goals);
                state.queries.push_front(DQuery::new(restored, theta));
                redo.into_iter().collect()
            }
            HistEvent::Next(theta) => {
                state.queries.push_front(DQuery::new(Vec::new(), theta.clone()));
                vec![Port::Answer(theta)]
            }
            HistEvent::Rtrace => {
                state.first_mut().goals.insert(0, Goal::Rtrace);
                Vec::new()
            }
        };
        Ok(Transition {
            rule,
            events: ports.into_iter().map(PortEvent::backward).collect(),
        })
    }

    /// Every forward rule whose premises hold, each checked on its own.
    pub fn forward_candidates(&self, program: &Program) -> Vec<Rule> {
        let q = self.state.first();
        let more = self.state.queries.len() > 1;
        let head = q.head();
        let mut rules = Vec::new();
        if matches!(head, Some(Goal::Fail)) && more {
            rules.push(Rule::Backtrack);
        }
        if head.is_none() && more {
            rules.push(Rule::Next);
        }
        if let (Some(Goal::Call(a)), None) = (head, q.label) {
            if !clauses_for(&a.apply(&q.theta), program).is_empty() {
                rules.push(Rule::Choice);
            }
        }
        if let (Some(Goal::Call(a)), None) = (head, q.label) {
            if clauses_for(&a.apply(&q.theta), program).is_empty() {
                rules.push(Rule::ChoiceFail);
            }
        }
        if let (Some(Goal::Call(a)), Some(l)) = (head, q.label) {
            if program.unify(&a.apply(&q.theta), &probe_head(program.clause(l))).is_ok() {
                rules.push(Rule::Unfold);
            }
        }
        if let Some(Goal::Ret(_)) = head {
            rules.push(Rule::Exit);
        }
        if let (Some(Goal::Rtrace), None) = (head, q.label) {
            rules.push(Rule::Rtrace);
        }
        rules
    }

    /// Every backward rule whose left-hand side matches this configuration.
    pub fn backward_candidates(&self, program: &Program) -> Vec<Rule> {
        let Some(top) = self.history.last() else {
            return Vec::new();
        };
        let queries = &self.state.queries;
        let first = &queries[0];
        let mut rules = Vec::new();
        if let HistEvent::Bck { .. } = top {
            rules.push(Rule::Backtrack);
        }
        if let HistEvent::Next(_) = top {
            rules.push(Rule::Next);
        }
        if let HistEvent::Ch(m) = top {
            let copies = *m >= 1
                && queries.len() >= *m
                && queries.iter().take(*m).all(|q| {
                    q.label.is_some() && q.goals == first.goals && q.theta == first.theta
                })
                && matches!(first.head(), Some(Goal::Call(_)));
            if copies {
                rules.push(Rule::Choice);
            }
        }
        if let HistEvent::Fail(_) = top {
            if first.head() == Some(&Goal::Fail) {
                rules.push(Rule::ChoiceFail);
            }
        }
        if let HistEvent::Unf { atom, label, .. } = top {
            let n = program.clause(*label).body.len();
            if first.label.is_none() && first.goals.get(n) == Some(&Goal::Ret(atom.clone())) {
                rules.push(Rule::Unfold);
            }
        }
        if let HistEvent::Exit(_) = top {
            rules.push(Rule::Exit);
        }
        if let HistEvent::Rtrace = top {
            rules.push(Rule::Rtrace);
        }
        rules
    }
}

fn redo_port(q: &DQuery) -> Option<Port> {
    match q.head() {
        Some(Goal::Call(a)) => Some(Port::Redo(a.apply(&q.theta))),
        _ => None,
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} • {:?}", self.state, self.history().collect::<Vec<_>>())
    }
}

pub fn init_config(query: &Query) -> Configuration {
    Configuration::new(query)
}

/// `config` advanced by one forward rule, with the ports it passed.
pub fn forward_step(program: &Program, config: &Configuration) -> Result<(Configuration, Vec<PortEvent>), Halted> {
    let mut next = config.clone();
    let t = next.forward_step(program)?;
    Ok((next, t.events))
}

/// `config` with its most recent step undone, with the ports passed backwards.
pub fn backward_step(program: &Program, config: &Configuration) -> Result<(Configuration, Vec<PortEvent>), AtOrigin> {
    let mut prev = config.clone();
    let t = prev.backward_step(program)?;
    Ok((prev, t.events))
}

pub fn applicable_rule(program: &Program, config: &Configuration) -> Option<Rule> {
    config.applicable_rule(program)
}

/// `state` with every `ret` marker removed; labels, substitutions and query
/// order are kept. A goal list made only of markers becomes `true`.
pub fn strip_ret(state: &DState) -> DState {
    let mut out = state.clone();
    for q in &mut out.queries {
        q.goals.retain(|g| !g.is_ret());
    }
    out
}
