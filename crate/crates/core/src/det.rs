//! Deterministic operational semantics: a state is the depth-first frontier
//! of the SLD tree as a sequence of (optionally labeled) queries `⟨goals; θ⟩`,
//! rewritten by the rules backtrack, next, choice, choice_fail and unfold.
//!
//! Substitutions are threaded beside the goals and never applied to them;
//! they are applied only where a rule needs the instantiated selected atom.

use std::collections::VecDeque;
use std::fmt;

use crate::parser::{Query, VarNames, RTRACE};
use crate::sld::SldResult;
use crate::terms::{probe_head, rename_apart, Atom, Clause, FreshSource, Label, Program, Substitution, Syntax};

/// One entry of a goal list. `true` is the empty goal list; `fail` is
/// introduced by choice_fail; `ret` markers are only produced by the
/// reversible engine; `rtrace` switches on tracing when executed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Goal {
    Call(Atom),
    Fail,
    Ret(Atom),
    Rtrace,
}

impl Goal {
    pub fn from_atom(atom: Atom) -> Goal {
        if atom.is(RTRACE, 0) {
            Goal::Rtrace
        } else {
            Goal::Call(atom)
        }
    }

    pub fn is_ret(&self) -> bool {
        matches!(self, Goal::Ret(_))
    }

    pub fn apply(&self, theta: &Substitution) -> Goal {
        match self {
            Goal::Call(a) => Goal::Call(a.apply(theta)),
            Goal::Ret(a) => Goal::Ret(a.apply(theta)),
            other => other.clone(),
        }
    }

    pub fn render(&self, names: &mut VarNames) -> String {
        match self {
            Goal::Call(a) => names.atom(a),
            Goal::Fail => "fail".to_owned(),
            Goal::Ret(a) => format!("ret({})", names.atom(a)),
            Goal::Rtrace => RTRACE.to_owned(),
        }
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Goal::Call(a) => write!(f, "{a}"),
            Goal::Fail => f.write_str("fail"),
            Goal::Ret(a) => write!(f, "ret({a})"),
            Goal::Rtrace => f.write_str(RTRACE),
        }
    }
}

impl fmt::Debug for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub(crate) fn body_goals(clause: &Clause) -> impl Iterator<Item = Goal> + '_ {
    clause.body.iter().cloned().map(Goal::from_atom)
}

/// A query `⟨goals; θ⟩`, labeled with the clause it is due to be unfolded with.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DQuery {
    pub goals: Vec<Goal>,
    pub theta: Substitution,
    pub label: Option<Label>,
}

impl DQuery {
    pub fn new(goals: Vec<Goal>, theta: Substitution) -> Self {
        DQuery {
            goals,
            theta,
            label: None,
        }
    }

    /// The empty goal list, written `true`.
    pub fn is_true(&self) -> bool {
        self.goals.is_empty()
    }

    pub fn head(&self) -> Option<&Goal> {
        self.goals.first()
    }

    /// Goals with θ applied, θ restricted to `vars`, and the label.
    pub fn render<'a>(&self, vars: impl IntoIterator<Item = &'a crate::terms::Var>, names: &mut VarNames) -> String {
        let goals = if self.goals.is_empty() {
            "true".to_owned()
        } else {
            self.goals
                .iter()
                .map(|g| g.apply(&self.theta).render(names))
                .collect::<Vec<_>>()
                .join(",")
        };
        let shown = self.theta.restrict(vars);
        let theta = if shown.is_identity() {
            "id".to_owned()
        } else {
            let parts: Vec<_> = shown
                .iter()
                .map(|(v, t)| format!("{}/{}", names.var(v), names.term(t)))
                .collect();
            format!("{{{}}}", parts.join(","))
        };
        match self.label {
            Some(l) => format!("⟨{goals};{theta}⟩^{l}"),
            None => format!("⟨{goals};{theta}⟩"),
        }
    }
}

impl fmt::Display for DQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("⟨")?;
        if self.goals.is_empty() {
            f.write_str("true")?;
        }
        for (i, g) in self.goals.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ";{}⟩", self.theta)?;
        if let Some(l) = self.label {
            write!(f, "^{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for DQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A non-empty sequence of queries, leftmost first, plus the fresh-variable
/// counter used by unfold.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DState {
    pub queries: VecDeque<DQuery>,
    pub fresh: FreshSource,
}

impl DState {
    pub fn initial(query: &Query) -> Self {
        let goals = query.atoms.iter().cloned().map(Goal::from_atom).collect();
        DState {
            queries: VecDeque::from([DQuery::new(goals, Substitution::identity())]),
            fresh: FreshSource::new(),
        }
    }

    pub fn first(&self) -> &DQuery {
        &self.queries[0]
    }

    pub(crate) fn first_mut(&mut self) -> &mut DQuery {
        &mut self.queries[0]
    }

    /// θ when the leftmost query is `⟨true; θ⟩`.
    pub fn answer(&self) -> Option<&Substitution> {
        let q = self.first();
        q.is_true().then_some(&q.theta)
    }

    /// Applies the one rule whose premises hold.
    pub fn step(&mut self, program: &Program) -> Result<Rule, Halted> {
        let first = self.first();
        let rule = match (first.head(), first.label) {
            (None, _) if self.queries.len() == 1 => return Err(Halted::Success),
            (None, _) => Rule::Next,
            (Some(Goal::Fail), _) if self.queries.len() == 1 => return Err(Halted::Failure),
            (Some(Goal::Fail), _) => Rule::Backtrack,
            (Some(Goal::Rtrace), None) => Rule::Rtrace,
            (Some(Goal::Call(_)), Some(_)) => Rule::Unfold,
            (Some(Goal::Call(a)), None) => {
                let labels = clauses_for(&a.apply(&first.theta), program);
                if labels.is_empty() {
                    Rule::ChoiceFail
                } else {
                    self.choice(&labels);
                    return Ok(Rule::Choice);
                }
            }
            (head, label) => panic!("no rule applies to {head:?} with label {label:?}"),
        };
        match rule {
            Rule::Next | Rule::Backtrack => {
                self.queries.pop_front();
            }
            Rule::Rtrace => {
                self.first_mut().goals.remove(0);
            }
            Rule::ChoiceFail => self.first_mut().goals[0] = Goal::Fail,
            Rule::Unfold => {
                let (body, theta) = self.unfold(program);
                let q = self.first_mut();
                q.goals.splice(0..1, body);
                q.theta = theta;
                q.label = None;
            }
            _ => unreachable!(),
        }
        Ok(rule)
    }

    /// Replaces the leftmost query with one labeled copy per clause.
    pub(crate) fn choice(&mut self, labels: &[Label]) {
        let q = self.queries.pop_front().expect("non-empty state");
        for &l in labels.iter().rev() {
            let mut copy = q.clone();
            copy.label = Some(l);
            self.queries.push_front(copy);
        }
    }

    /// Renames the clause of the leftmost labeled query apart and unifies
    /// its head with the selected atom. Returns the body goals and `θσ`.
    pub(crate) fn unfold(&mut self, program: &Program) -> (Vec<Goal>, Substitution) {
        let q = self.first();
        let label = q.label.expect("unfold needs a labeled query");
        let Some(Goal::Call(selected)) = q.head() else {
            panic!("unfold needs a user atom in head position");
        };
        let selected = selected.apply(&q.theta);
        let (clause, fresh) = clause_instance(label, program, self.fresh);
        let sigma = program
            .unify(&selected, &clause.head)
            .unwrap_or_else(|_| panic!("{label} was listed for {selected} but does not unify"));
        let theta = q.theta.compose(&sigma);
        self.fresh = fresh;
        (body_goals(&clause).collect(), theta)
    }

    /// Every rule whose premises hold, checked independently of [`step`].
    pub fn applicable(&self, program: &Program) -> Vec<Rule> {
        let q = self.first();
        let more = self.queries.len() > 1;
        let mut rules = Vec::new();
        let head = q.head();
        if matches!(head, Some(Goal::Fail)) && more {
            rules.push(Rule::Backtrack);
        }
        if head.is_none() && more {
            rules.push(Rule::Next);
        }
        if let (Some(Goal::Call(a)), None) = (head, q.label) {
            let n = clauses_for(&a.apply(&q.theta), program).len();
            rules.push(if n > 0 { Rule::Choice } else { Rule::ChoiceFail });
        }
        if let (Some(Goal::Call(a)), Some(l)) = (head, q.label) {
            if program.unify(&a.apply(&q.theta), &probe_head(program.clause(l))).is_ok() {
                rules.push(Rule::Unfold);
            }
        }
        if let (Some(Goal::Rtrace), None) = (head, q.label) {
            rules.push(Rule::Rtrace);
        }
        rules
    }
}

impl fmt::Display for DState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, q) in self.queries.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{q}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for DState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} @{}", self.fresh.counter())
    }
}

/// Transition rules. `Exit` only exists in the reversible semantics;
/// `Rtrace` consumes the tracing switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Backtrack,
    Next,
    Choice,
    ChoiceFail,
    Unfold,
    Exit,
    Rtrace,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Backtrack => "backtrack",
            Rule::Next => "next",
            Rule::Choice => "choice",
            Rule::ChoiceFail => "choice_fail",
            Rule::Unfold => "unfold",
            Rule::Exit => "exit",
            Rule::Rtrace => "rtrace",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Why no rule applies: `⟨true;θ⟩` or `⟨fail,…;θ⟩` is the only query left.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Halted {
    Success,
    Failure,
}

/// Labels, in program order, of the clauses whose head unifies with `atom`.
/// Unification runs against a throwaway renaming, so no counter moves.
pub fn clauses_for(atom: &Atom, program: &Program) -> Vec<Label> {
    program
        .clauses()
        .iter()
        .filter(|c| c.head.pred == atom.pred && c.head.arity() == atom.arity())
        .filter(|c| program.unify(atom, &probe_head(c)).is_ok())
        .map(|c| c.label)
        .collect()
}

/// A renamed-apart copy of clause `label`, and the advanced counter.
pub fn clause_instance(label: Label, program: &Program, fresh: FreshSource) -> (Clause, FreshSource) {
    rename_apart(program.clause(label), fresh)
}

pub fn det_init(query: &Query) -> DState {
    DState::initial(query)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    Next { state: DState, rule: Rule },
    /// The leftmost query is `⟨true;θ⟩`; `rest` is what rule next continues
    /// from, `None` when the search is over.
    Success { theta: Substitution, rest: Option<DState> },
    Failure { state: DState },
    Stuck,
}

/// One transition from `state`, as a fresh value.
pub fn det_step(program: &Program, state: &DState) -> StepOutcome {
    if let Some(theta) = state.answer() {
        let theta = theta.clone();
        let mut rest = state.clone();
        let rest = match rest.step(program) {
            Ok(_) => Some(rest),
            Err(_) => None,
        };
        return StepOutcome::Success { theta, rest };
    }
    let mut next = state.clone();
    match next.step(program) {
        Ok(rule) => StepOutcome::Next { state: next, rule },
        Err(Halted::Failure) => StepOutcome::Failure { state: next },
        Err(Halted::Success) => StepOutcome::Stuck,
    }
}

/// All computed answers in depth-first order, within the same budgets as
/// [`crate::sld::sld_solve`].
pub fn det_answers(program: &Program, query: &Query, max_steps: usize, max_answers: usize) -> SldResult {
    assert!(max_steps > 0 && max_answers > 0, "budgets must be positive");
    let vars = query.vars();
    let mut state = DState::initial(query);
    let mut answers = Vec::new();
    let mut steps = 0;
    loop {
        if let Some(theta) = state.answer() {
            answers.push(theta.restrict(&vars));
            if answers.len() >= max_answers {
                let exhausted = state.queries.len() == 1;
                return SldResult { answers, exhausted, steps_used: steps };
            }
        }
        if steps == max_steps {
            let exhausted = state.queries.len() == 1 && (state.answer().is_some() || state.first().head() == Some(&Goal::Fail));
            return SldResult { answers, exhausted, steps_used: steps };
        }
        match state.step(program) {
            Ok(_) => steps += 1,
            Err(_) => return SldResult { answers, exhausted: true, steps_used: steps },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_program_str, parse_query};
    use crate::terms::{Term, Var};

    const EXAMPLE1: &str = "p(X,Y) :- q(X),r(X,Y).\nq(a).\nq(b).\nq(c).\nr(b,b).\nr(b,c).\nr(c,c).";

    fn example() -> Program {
        parse_program_str(EXAMPLE1).unwrap()
    }

    fn atom(text: &str) -> Atom {
        parse_query(text).unwrap().atoms.remove(0)
    }

    fn bind(pairs: &[(&str, &str)]) -> Substitution {
        Substitution::resolved(pairs.iter().map(|(v, t)| (Var::user(v), Term::constant(t)))).unwrap()
    }

    fn render(state: &DState) -> String {
        let vars = [Var::user("A"), Var::user("B")];
        let mut names = VarNames::new();
        state
            .queries
            .iter()
            .map(|q| q.render(&vars, &mut names))
            .collect::<Vec<_>>()
            .join(" | ")
    }

    #[test]
    fn clauses_for_lists_matching_labels() {
        let p = example();
        assert_eq!(clauses_for(&atom("q(A)"), &p), vec![Label(2), Label(3), Label(4)]);
        assert!(clauses_for(&atom("r(a,B)"), &p).is_empty());
        assert!(clauses_for(&atom("unknown(X)"), &p).is_empty());
        assert_eq!(clauses_for(&atom("r(b,B)"), &p), vec![Label(5), Label(6)]);
    }

    #[test]
    fn clause_instances_are_fresh() {
        let p = example();
        let (c1, fs) = clause_instance(Label(1), &p, FreshSource::new());
        assert!(crate::terms::variant_eq(&c1, p.clause(Label(1))));
        let (c2, _) = clause_instance(Label(1), &p, fs);
        assert!(c2.vars().iter().all(|v| !c1.vars().contains(v)));
        let (fact, _) = clause_instance(Label(5), &p, fs);
        assert_eq!(fact.to_string(), "r(b,b).");
    }

    #[test]
    fn initial_state() {
        let s = det_init(&parse_query("p(A,B)").unwrap());
        assert_eq!(s.to_string(), "⟨p(A,B);id⟩");
        assert_eq!(s.fresh.counter(), 0);
        let s = det_init(&parse_query("q(X), r(X,Y)").unwrap());
        assert_eq!(s.to_string(), "⟨q(X),r(X,Y);id⟩");
    }

    /// The deterministic derivation reaching {A/b,B/c}, rule by rule.
    #[test]
    fn example_derivation() {
        let p = example();
        let mut s = det_init(&parse_query("p(A,B)").unwrap());
        let expected = [
            (Rule::Choice, "⟨p(A,B);id⟩^l1"),
            (Rule::Unfold, "⟨q(A),r(A,B);id⟩"),
            (Rule::Choice, "⟨q(A),r(A,B);id⟩^l2 | ⟨q(A),r(A,B);id⟩^l3 | ⟨q(A),r(A,B);id⟩^l4"),
            (Rule::Unfold, "⟨r(a,B);{A/a}⟩ | ⟨q(A),r(A,B);id⟩^l3 | ⟨q(A),r(A,B);id⟩^l4"),
            (Rule::ChoiceFail, "⟨fail;{A/a}⟩ | ⟨q(A),r(A,B);id⟩^l3 | ⟨q(A),r(A,B);id⟩^l4"),
            (Rule::Backtrack, "⟨q(A),r(A,B);id⟩^l3 | ⟨q(A),r(A,B);id⟩^l4"),
            (Rule::Unfold, "⟨r(b,B);{A/b}⟩ | ⟨q(A),r(A,B);id⟩^l4"),
            (Rule::Choice, "⟨r(b,B);{A/b}⟩^l5 | ⟨r(b,B);{A/b}⟩^l6 | ⟨q(A),r(A,B);id⟩^l4"),
            (Rule::Unfold, "⟨true;{A/b,B/b}⟩ | ⟨r(b,B);{A/b}⟩^l6 | ⟨q(A),r(A,B);id⟩^l4"),
            (Rule::Next, "⟨r(b,B);{A/b}⟩^l6 | ⟨q(A),r(A,B);id⟩^l4"),
            (Rule::Unfold, "⟨true;{A/b,B/c}⟩ | ⟨q(A),r(A,B);id⟩^l4"),
        ];
        for (rule, shown) in expected {
            assert_eq!(s.applicable(&p), vec![rule]);
            assert_eq!(s.step(&p), Ok(rule));
            assert_eq!(render(&s), shown);
        }
        assert_eq!(s.answer().unwrap().restrict(&[Var::user("A"), Var::user("B")]), bind(&[("A", "b"), ("B", "c")]));
    }

    #[test]
    fn pure_step_outcomes() {
        let p = example();
        let s = det_init(&parse_query("r(a,B)").unwrap());
        let StepOutcome::Next { state, rule } = det_step(&p, &s) else { panic!() };
        assert_eq!(rule, Rule::ChoiceFail);
        assert_eq!(state.to_string(), "⟨fail;id⟩");
        assert!(matches!(det_step(&p, &state), StepOutcome::Failure { .. }));

        let mut s = det_init(&parse_query("q(a)").unwrap());
        s.step(&p).unwrap();
        s.step(&p).unwrap();
        match det_step(&p, &s) {
            StepOutcome::Success { theta, rest } => {
                assert!(theta.is_identity());
                assert!(rest.is_none());
            }
            other => panic!("{other:?}"),
        }
        // the input state is untouched
        assert!(s.answer().is_some());
    }

    #[test]
    fn answers_match_depth_first_order() {
        let p = example();
        let r = det_answers(&p, &parse_query("p(A,B)").unwrap(), 1000, 100);
        assert!(r.exhausted);
        assert_eq!(
            r.answers,
            vec![bind(&[("A", "b"), ("B", "b")]), bind(&[("A", "b"), ("B", "c")]), bind(&[("A", "c"), ("B", "c")])]
        );
        let r = det_answers(&p, &parse_query("r(a,B)").unwrap(), 1000, 100);
        assert!(r.exhausted && r.answers.is_empty());
        let r = det_answers(&p, &parse_query("q(Z)").unwrap(), 1000, 100);
        assert_eq!(r.answers, vec![bind(&[("Z", "a")]), bind(&[("Z", "b")]), bind(&[("Z", "c")])]);
    }

    #[test]
    fn rtrace_is_consumed_without_choice() {
        let p = parse_program_str("p :- rtrace, q.\nq.").unwrap();
        let r = det_answers(&p, &parse_query("p").unwrap(), 100, 10);
        assert_eq!(r.answers, vec![Substitution::identity()]);
        assert!(r.exhausted);
    }

    #[test]
    fn budget_stops_infinite_search() {
        let p = parse_program_str("p :- p.").unwrap();
        let r = det_answers(&p, &parse_query("p").unwrap(), 100, 10);
        assert!(!r.exhausted);
        assert_eq!(r.steps_used, 100);
    }

    #[test]
    fn choice_with_one_clause_still_labels() {
        let p = example();
        let mut s = det_init(&parse_query("p(A,B)").unwrap());
        assert_eq!(s.step(&p), Ok(Rule::Choice));
        assert_eq!(s.queries.len(), 1);
        assert_eq!(s.first().label, Some(Label(1)));
    }
}
