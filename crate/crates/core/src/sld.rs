//! Textbook SLD resolution with the leftmost computation rule, explored
//! depth first in clause order. This is the reference the other engines are
//! checked against, so it shares nothing with them beyond the term layer.

use crate::parser::{Query, RTRACE};
use crate::terms::{probe_head, rename_apart, Atom, FreshSource, Program, Substitution, Syntax};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SldResult {
    /// Computed answers, restricted to the query's variables, in search order.
    pub answers: Vec<Substitution>,
    /// True when the whole search tree was traversed within the budgets.
    pub exhausted: bool,
    pub steps_used: usize,
}

struct Node {
    /// Remaining goals, already instantiated.
    goals: Vec<Atom>,
    /// Composition of the mgu's along the branch.
    theta: Substitution,
    /// First clause index not yet tried for the leftmost goal.
    next_clause: usize,
}

/// Enumerates computed answers of `query` depth first. One step is one
/// resolution step; the search stops after `max_steps` steps or
/// `max_answers` answers, whichever comes first.
pub fn sld_solve(program: &Program, query: &Query, max_steps: usize, max_answers: usize) -> SldResult {
    assert!(max_steps > 0 && max_answers > 0, "budgets must be positive");
    let query_vars = query.vars();
    let mut fresh = FreshSource::new();
    let mut answers = Vec::new();
    let mut steps = 0;
    let mut stack = vec![Node {
        goals: query.atoms.clone(),
        theta: Substitution::identity(),
        next_clause: 0,
    }];

    while let Some(mut node) = stack.pop() {
        // the tracing switch has no logical content
        while node.goals.first().is_some_and(|g| g.is(RTRACE, 0)) {
            node.goals.remove(0);
        }
        let Some(selected) = node.goals.first().cloned() else {
            answers.push(node.theta.restrict(&query_vars));
            if answers.len() >= max_answers {
                return SldResult {
                    answers,
                    exhausted: stack.is_empty(),
                    steps_used: steps,
                };
            }
            continue;
        };

        let clauses = program.clauses();
        let mut resolvent = None;
        for (i, clause) in clauses.iter().enumerate().skip(node.next_clause) {
            if clause.head.pred != selected.pred || clause.head.arity() != selected.arity() {
                continue;
            }
            let (renamed, after) = rename_apart(clause, fresh);
            if let Ok(sigma) = program.unify(&selected, &renamed.head) {
                fresh = after;
                resolvent = Some((i, renamed, sigma));
                break;
            }
        }
        let Some((i, renamed, sigma)) = resolvent else {
            continue;
        };
        if steps == max_steps {
            return SldResult {
                answers,
                exhausted: false,
                steps_used: steps,
            };
        }
        steps += 1;

        let mut goals = renamed.body;
        goals.extend(node.goals[1..].iter().cloned());
        let child = Node {
            goals: goals.apply(&sigma),
            theta: node.theta.compose(&sigma),
            next_clause: 0,
        };
        node.next_clause = i + 1;
        // keep the parent only while it still has an untried matching clause
        let pending = clauses[i + 1..].iter().any(|c| {
            program.unify(&selected, &probe_head(c)).is_ok()
        });
        if pending {
            stack.push(node);
        }
        stack.push(child);
    }

    SldResult {
        answers,
        exhausted: true,
        steps_used: steps,
    }
}
