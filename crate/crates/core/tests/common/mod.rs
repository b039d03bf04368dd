#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use rever::parser::{parse_program_str, parse_query, Query};
use rever::rev::Configuration;
use rever::terms::Program;

pub const EXAMPLE1: &str = "p(X,Y) :- q(X), r(X,Y).\nq(a).\nq(b).\nq(c).\nr(b,b).\nr(b,c).\nr(c,c).\n";

pub const FORWARD: [&str; 11] = [
    "Call: p(A,B)",
    "Call: q(A)",
    "Exit: q(a)",
    "Call: r(a,B)",
    "Fail: r(a,B)",
    "Redo: q(A)",
    "Exit: q(b)",
    "Call: r(b,B)",
    "Exit: r(b,b)",
    "Exit: p(b,b)",
    "**Answer: A = b, B = b",
];

pub const BACKWARD: [&str; 10] = [
    "^Exit: p(b,b)",
    "^Exit: r(b,b)",
    "^Call: r(b,B)",
    "^Exit: q(b)",
    "^Redo: q(A)",
    "^Fail: r(a,B)",
    "^Call: r(a,B)",
    "^Exit: q(a)",
    "^Call: q(A)",
    "^Call: p(A,B)",
];

pub fn example1() -> (Program, Query) {
    (parse_program_str(EXAMPLE1).unwrap(), parse_query("p(A,B)").unwrap())
}

/// A random program and query as source text.
#[derive(Debug, Clone)]
pub struct Generated {
    pub seed: u64,
    pub program: String,
    pub query: String,
}

impl Generated {
    pub fn parse(&self) -> (Program, Query) {
        let p = parse_program_str(&self.program)
            .unwrap_or_else(|e| panic!("seed {}: {e}\n{}", self.seed, self.program));
        let q = parse_query(&self.query).unwrap_or_else(|e| panic!("seed {}: {e}", self.seed));
        (p, q)
    }
}

const PREDS: [&str; 4] = ["p", "q", "r", "s"];
const CONSTS: [&str; 3] = ["a", "b", "c"];

struct Gen {
    rng: StdRng,
    arity: [usize; 4],
}

impl Gen {
    fn term(&mut self, vars: &[&str], depth: usize) -> String {
        let roll = self.rng.gen_range(0..10);
        match roll {
            0..=3 => vars.choose(&mut self.rng).unwrap().to_string(),
            4..=6 => CONSTS.choose(&mut self.rng).unwrap().to_string(),
            _ if depth <= 1 => CONSTS.choose(&mut self.rng).unwrap().to_string(),
            7 | 8 => format!("f({})", self.term(vars, depth - 1)),
            _ => format!("g({},{})", self.term(vars, depth - 1), self.term(vars, depth - 1)),
        }
    }

    fn atom(&mut self, vars: &[&str]) -> String {
        let i = self.rng.gen_range(0..PREDS.len());
        let args: Vec<_> = (0..self.arity[i]).map(|_| self.term(vars, 3)).collect();
        if args.is_empty() {
            PREDS[i].to_owned()
        } else {
            format!("{}({})", PREDS[i], args.join(","))
        }
    }
}

/// Up to 8 clauses with up to 3 body atoms over p/q/r/s, a fixed arity of at
/// most 2 per predicate, and terms of depth at most 3; plus a query of one or
/// two atoms over A, B, C.
pub fn generate(seed: u64) -> Generated {
    let mut g = Gen {
        rng: StdRng::seed_from_u64(seed),
        arity: [0; 4],
    };
    for a in &mut g.arity {
        *a = g.rng.gen_range(0..=2);
    }
    let clause_vars = ["X", "Y", "Z"];
    let n = g.rng.gen_range(1..=8);
    let mut program = String::new();
    for _ in 0..n {
        let head = g.atom(&clause_vars);
        let body_len = g.rng.gen_range(0..=3);
        let body: Vec<_> = (0..body_len).map(|_| g.atom(&clause_vars)).collect();
        if body.is_empty() {
            program.push_str(&format!("{head}.\n"));
        } else {
            program.push_str(&format!("{head} :- {}.\n", body.join(", ")));
        }
    }
    let query_vars = ["A", "B", "C"];
    let goals: Vec<_> = (0..g.rng.gen_range(1..=2)).map(|_| g.atom(&query_vars)).collect();
    Generated {
        seed,
        program,
        query: goals.join(", "),
    }
}

/// False when some substitution reaches `max_nodes` term nodes within
/// `steps` forward steps. Some generated programs double their terms on every
/// unfold and would exhaust memory long before any step budget.
pub fn tame(program: &Program, query: &Query, steps: usize, max_nodes: usize) -> bool {
    let mut c = Configuration::new(query);
    for _ in 0..steps {
        if c.forward_step(program).is_err() {
            return true;
        }
        let nodes: usize = c.state.first().theta.iter().map(|(_, t)| t.size()).sum();
        if nodes > max_nodes {
            return false;
        }
    }
    true
}
