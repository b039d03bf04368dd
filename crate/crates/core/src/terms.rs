//! First-order syntax shared by every engine: terms, atoms, clauses,
//! programs and substitutions, together with unification, composition,
//! restriction, renaming and variant checking.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// An interned-by-sharing name for functors, predicates and variables.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Symbol {
    fn from(name: &str) -> Self {
        Symbol::new(name)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&*self.0, f)
    }
}

/// Prefix the parser gives to each anonymous `_` occurrence.
pub(crate) const ANON_PREFIX: &str = "_#";

/// A logic variable. Serial 0 is reserved for variables written by the user;
/// renamed clause instances carry serials handed out by a [`FreshSource`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    name: Symbol,
    serial: u32,
}

impl Var {
    pub fn new(name: impl Into<Symbol>, serial: u32) -> Self {
        Var {
            name: name.into(),
            serial,
        }
    }

    /// A variable as written in source text.
    pub fn user(name: &str) -> Self {
        Var::new(name, 0)
    }

    pub fn name(&self) -> &Symbol {
        &self.name
    }

    pub fn serial(&self) -> u32 {
        self.serial
    }

    pub fn is_anonymous(&self) -> bool {
        self.name.as_str().starts_with(ANON_PREFIX)
    }

    pub fn is_generated(&self) -> bool {
        self.serial > 0
    }
}

impl From<Symbol> for Var {
    fn from(name: Symbol) -> Self {
        Var { name, serial: 0 }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_anonymous() {
            f.write_str("_")?;
        } else {
            f.write_str(self.name.as_str())?;
        }
        if self.serial > 0 {
            write!(f, "_{}", self.serial)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A first-order term. Constants are applications with no arguments.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(Var::user(name))
    }

    pub fn constant(name: &str) -> Self {
        Term::App(Symbol::new(name), Vec::new())
    }

    pub fn app(functor: &str, args: Vec<Term>) -> Self {
        Term::App(Symbol::new(functor), args)
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::App(..) => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn occurs(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::App(_, args) => args.iter().any(|a| a.occurs(v)),
        }
    }

    /// Number of variable and function-symbol occurrences.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => fmt::Display::fmt(v, f),
            Term::App(name, args) => {
                f.write_str(name.as_str())?;
                write_args(f, args)
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    if args.is_empty() {
        return Ok(());
    }
    f.write_str("(")?;
    for (i, arg) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        fmt::Display::fmt(arg, f)?;
    }
    f.write_str(")")
}

/// A predicate applied to arguments. `p/2` and `p/3` are distinct predicates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub pred: Symbol,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Self {
        Atom {
            pred: Symbol::new(pred),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is(&self, pred: &str, arity: usize) -> bool {
        self.pred.as_str() == pred && self.args.len() == arity
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.pred.as_str())?;
        write_args(f, &self.args)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Clause label; `Label(1)` is the first clause of a program and prints as `l1`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub u32);

impl Label {
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l{}", self.0)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub label: Label,
    pub head: Atom,
    pub body: Vec<Atom>,
}

impl Clause {
    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.head, f)?;
        if !self.body.is_empty() {
            f.write_str(" :- ")?;
            for (i, atom) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                fmt::Display::fmt(atom, f)?;
            }
        }
        f.write_str(".")
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.label, self)
    }
}

/// A finite sequence of labeled clauses in source order, plus the unification
/// settings every engine uses when running it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    clauses: Vec<Clause>,
    occurs_check: bool,
}

impl Program {
    /// Labels the clauses `l1, l2, ...` in the order given.
    pub fn new(clauses: impl IntoIterator<Item = (Atom, Vec<Atom>)>) -> Self {
        let clauses = clauses
            .into_iter()
            .enumerate()
            .map(|(i, (head, body))| Clause {
                label: Label(i as u32 + 1),
                head,
                body,
            })
            .collect();
        Program {
            clauses,
            occurs_check: true,
        }
    }

    pub fn with_occurs_check(mut self, on: bool) -> Self {
        self.occurs_check = on;
        self
    }

    pub fn occurs_check(&self) -> bool {
        self.occurs_check
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Panics on a label that does not belong to this program.
    pub fn clause(&self, label: Label) -> &Clause {
        self.clauses
            .get(label.index())
            .unwrap_or_else(|| panic!("unknown clause label {label}"))
    }

    pub(crate) fn unify(&self, a: &Atom, b: &Atom) -> Result<Substitution, NoUnifier> {
        mgu_with(a, b, self.occurs_check)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for clause in &self.clauses {
            writeln!(f, "{clause}")?;
        }
        Ok(())
    }
}

/// A finite map from variables to terms. Identity bindings are never stored.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Substitution {
    bindings: BTreeMap<Var, Term>,
}

impl Substitution {
    pub fn identity() -> Self {
        Substitution::default()
    }

    /// Builds a substitution from possibly triangular bindings, resolving
    /// each range term to a fixpoint. Returns `None` when the bindings are
    /// cyclic (some variable would have to contain itself).
    pub fn resolved(bindings: impl IntoIterator<Item = (Var, Term)>) -> Option<Self> {
        let raw: BTreeMap<Var, Term> = bindings.into_iter().collect();
        let mut out = BTreeMap::new();
        for var in raw.keys() {
            let mut visiting = BTreeSet::new();
            let term = resolve_var(var, &raw, &mut visiting)?;
            if term.as_var() != Some(var) {
                out.insert(var.clone(), term);
            }
        }
        Some(Substitution { bindings: out })
    }

    pub fn is_identity(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.bindings.get(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.bindings.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.bindings.keys()
    }

    /// `x` under this substitution, or `x` itself when unbound.
    pub fn lookup(&self, v: &Var) -> Term {
        self.bindings
            .get(v)
            .cloned()
            .unwrap_or_else(|| Term::Var(v.clone()))
    }

    /// Pointwise `(self ; other)`: `apply(x, result) = apply(apply(x, self), other)`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut bindings = BTreeMap::new();
        for (v, t) in &self.bindings {
            let t = t.apply(other);
            if t.as_var() != Some(v) {
                bindings.insert(v.clone(), t);
            }
        }
        for (v, t) in &other.bindings {
            if !self.bindings.contains_key(v) {
                bindings.insert(v.clone(), t.clone());
            }
        }
        Substitution { bindings }
    }

    pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a Var>) -> Substitution {
        let keep: BTreeSet<&Var> = vars.into_iter().collect();
        Substitution {
            bindings: self
                .bindings
                .iter()
                .filter(|(v, _)| keep.contains(v))
                .map(|(v, t)| (v.clone(), t.clone()))
                .collect(),
        }
    }

    /// Adds `v ↦ t`, applying the new binding to the existing range so the
    /// result stays fully resolved. `v` must not already be bound.
    fn bind(&mut self, v: Var, t: Term) {
        let single = Substitution {
            bindings: BTreeMap::from([(v.clone(), t.clone())]),
        };
        for range in self.bindings.values_mut() {
            *range = range.apply(&single);
        }
        self.bindings.insert(v, t);
    }
}

fn resolve_var(
    var: &Var,
    raw: &BTreeMap<Var, Term>,
    visiting: &mut BTreeSet<Var>,
) -> Option<Term> {
    match raw.get(var) {
        None => Some(Term::Var(var.clone())),
        Some(t) if t.as_var() == Some(var) => Some(t.clone()),
        Some(t) => {
            if !visiting.insert(var.clone()) {
                return None;
            }
            let out = resolve_term(t, raw, visiting);
            visiting.remove(var);
            out
        }
    }
}

fn resolve_term(
    t: &Term,
    raw: &BTreeMap<Var, Term>,
    visiting: &mut BTreeSet<Var>,
) -> Option<Term> {
    match t {
        Term::Var(v) => resolve_var(v, raw, visiting),
        Term::App(f, args) => Some(Term::App(
            f.clone(),
            args.iter()
                .map(|a| resolve_term(a, raw, visiting))
                .collect::<Option<_>>()?,
        )),
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bindings.is_empty() {
            return f.write_str("id");
        }
        f.write_str("{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}/{t}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Syntactic objects: anything built from terms that substitutions act on.
pub trait Syntax: Sized {
    fn apply(&self, subst: &Substitution) -> Self;

    fn map_vars(&self, f: &mut dyn FnMut(&Var) -> Var) -> Self;

    fn visit_vars<'a>(&'a self, f: &mut dyn FnMut(&'a Var));

    /// Simultaneous traversal for [`variant_eq`].
    fn match_variant(&self, other: &Self, bij: &mut Bijection) -> bool;

    /// Distinct variables in first-occurrence order.
    fn vars(&self) -> Vec<Var> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        self.visit_vars(&mut |v| {
            if seen.insert(v) {
                out.push(v.clone());
            }
        });
        out
    }
}

impl Syntax for Term {
    fn apply(&self, subst: &Substitution) -> Self {
        if subst.is_identity() {
            return self.clone();
        }
        match self {
            Term::Var(v) => subst.lookup(v),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.apply(subst)).collect()),
        }
    }

    fn map_vars(&self, f: &mut dyn FnMut(&Var) -> Var) -> Self {
        match self {
            Term::Var(v) => Term::Var(f(v)),
            Term::App(name, args) => {
                Term::App(name.clone(), args.iter().map(|a| a.map_vars(f)).collect())
            }
        }
    }

    fn visit_vars<'a>(&'a self, f: &mut dyn FnMut(&'a Var)) {
        match self {
            Term::Var(v) => f(v),
            Term::App(_, args) => args.iter().for_each(|a| a.visit_vars(f)),
        }
    }

    fn match_variant(&self, other: &Self, bij: &mut Bijection) -> bool {
        match (self, other) {
            (Term::Var(a), Term::Var(b)) => bij.pair(a, b),
            (Term::App(f, xs), Term::App(g, ys)) => f == g && xs.match_variant(ys, bij),
            _ => false,
        }
    }
}

impl Syntax for Atom {
    fn apply(&self, subst: &Substitution) -> Self {
        Atom {
            pred: self.pred.clone(),
            args: self.args.apply(subst),
        }
    }

    fn map_vars(&self, f: &mut dyn FnMut(&Var) -> Var) -> Self {
        Atom {
            pred: self.pred.clone(),
            args: self.args.map_vars(f),
        }
    }

    fn visit_vars<'a>(&'a self, f: &mut dyn FnMut(&'a Var)) {
        self.args.visit_vars(f)
    }

    fn match_variant(&self, other: &Self, bij: &mut Bijection) -> bool {
        self.pred == other.pred && self.args.match_variant(&other.args, bij)
    }
}

impl<T: Syntax> Syntax for Vec<T> {
    fn apply(&self, subst: &Substitution) -> Self {
        self.iter().map(|x| x.apply(subst)).collect()
    }

    fn map_vars(&self, f: &mut dyn FnMut(&Var) -> Var) -> Self {
        self.iter().map(|x| x.map_vars(f)).collect()
    }

    fn visit_vars<'a>(&'a self, f: &mut dyn FnMut(&'a Var)) {
        self.iter().for_each(|x| x.visit_vars(f))
    }

    fn match_variant(&self, other: &Self, bij: &mut Bijection) -> bool {
        self.len() == other.len()
            && self
                .iter()
                .zip(other)
                .all(|(a, b)| a.match_variant(b, bij))
    }
}

impl Syntax for Clause {
    fn apply(&self, subst: &Substitution) -> Self {
        Clause {
            label: self.label,
            head: self.head.apply(subst),
            body: self.body.apply(subst),
        }
    }

    fn map_vars(&self, f: &mut dyn FnMut(&Var) -> Var) -> Self {
        Clause {
            label: self.label,
            head: self.head.map_vars(f),
            body: self.body.map_vars(f),
        }
    }

    fn visit_vars<'a>(&'a self, f: &mut dyn FnMut(&'a Var)) {
        self.head.visit_vars(f);
        self.body.visit_vars(f);
    }

    fn match_variant(&self, other: &Self, bij: &mut Bijection) -> bool {
        self.head.match_variant(&other.head, bij) && self.body.match_variant(&other.body, bij)
    }
}

/// A partial variable bijection built while comparing two objects.
#[derive(Default)]
pub struct Bijection {
    forward: HashMap<Var, Var>,
    backward: HashMap<Var, Var>,
}

impl Bijection {
    pub fn pair(&mut self, a: &Var, b: &Var) -> bool {
        match (self.forward.get(a), self.backward.get(b)) {
            (None, None) => {
                self.forward.insert(a.clone(), b.clone());
                self.backward.insert(b.clone(), a.clone());
                true
            }
            (Some(x), Some(y)) => x == b && y == a,
            _ => false,
        }
    }
}

pub fn apply<T: Syntax>(obj: &T, subst: &Substitution) -> T {
    obj.apply(subst)
}

/// True iff `a` and `b` are equal up to a bijective renaming of variables.
pub fn variant_eq<T: Syntax>(a: &T, b: &T) -> bool {
    a.match_variant(b, &mut Bijection::default())
}

pub fn compose(theta: &Substitution, sigma: &Substitution) -> Substitution {
    theta.compose(sigma)
}

pub fn restrict<'a>(theta: &Substitution, vars: impl IntoIterator<Item = &'a Var>) -> Substitution {
    theta.restrict(vars)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("terms do not unify")]
pub struct NoUnifier;

/// Things `mgu` can be computed for.
pub trait Unifiable {
    /// Pushes the argument equations, or returns false on a functor/arity clash.
    fn equations(&self, other: &Self, out: &mut Vec<(Term, Term)>) -> bool;
}

impl Unifiable for Term {
    fn equations(&self, other: &Self, out: &mut Vec<(Term, Term)>) -> bool {
        out.push((self.clone(), other.clone()));
        true
    }
}

impl Unifiable for Atom {
    fn equations(&self, other: &Self, out: &mut Vec<(Term, Term)>) -> bool {
        if self.pred != other.pred || self.args.len() != other.args.len() {
            return false;
        }
        out.extend(self.args.iter().cloned().zip(other.args.iter().cloned()));
        true
    }
}

/// Most general unifier with the occurs check on.
pub fn mgu<T: Unifiable>(a: &T, b: &T) -> Result<Substitution, NoUnifier> {
    mgu_with(a, b, true)
}

/// Most general unifier. Variable–variable equations bind the variable with
/// the larger serial to the one with the smaller serial; on equal serials the
/// left variable is bound. The result is idempotent whenever the occurs check
/// is on.
pub fn mgu_with<T: Unifiable>(a: &T, b: &T, occurs_check: bool) -> Result<Substitution, NoUnifier> {
    let mut pending = Vec::new();
    if !a.equations(b, &mut pending) {
        return Err(NoUnifier);
    }
    pending.reverse();
    let mut subst = Substitution::identity();
    while let Some((s, t)) = pending.pop() {
        let s = s.apply(&subst);
        let t = t.apply(&subst);
        match (s, t) {
            (Term::Var(x), Term::Var(y)) if x == y => {}
            (Term::Var(x), Term::Var(y)) => {
                if y.serial() > x.serial() {
                    subst.bind(y, Term::Var(x));
                } else {
                    subst.bind(x, Term::Var(y));
                }
            }
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if occurs_check && t.occurs(&x) {
                    return Err(NoUnifier);
                }
                subst.bind(x, t);
            }
            (Term::App(f, xs), Term::App(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return Err(NoUnifier);
                }
                pending.extend(xs.into_iter().zip(ys).rev());
            }
        }
    }
    Ok(subst)
}

/// Source of fresh variable serials. A plain value, so any earlier counter
/// can be put back exactly.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FreshSource {
    counter: u32,
}

impl FreshSource {
    pub fn new() -> Self {
        FreshSource { counter: 0 }
    }

    pub fn at(counter: u32) -> Self {
        FreshSource { counter }
    }

    pub fn counter(&self) -> u32 {
        self.counter
    }
}

/// A variant of `clause` whose variables all carry the serial `counter + 1`;
/// the returned source has advanced by one tick.
pub fn rename_apart(clause: &Clause, fresh: FreshSource) -> (Clause, FreshSource) {
    let serial = fresh.counter + 1;
    let renamed = clause.map_vars(&mut |v| Var::new(v.name().clone(), serial));
    (renamed, FreshSource { counter: serial })
}

/// Serial used for throwaway renamings that must not collide with any
/// variable the engines hand out.
pub(crate) const PROBE_SERIAL: u32 = u32::MAX;

pub(crate) fn probe_head(clause: &Clause) -> Atom {
    clause
        .head
        .map_vars(&mut |v| Var::new(v.name().clone(), PROBE_SERIAL))
}
