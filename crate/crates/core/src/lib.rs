//! A reversible interpreter for definite logic programs with a four-port
//! (call, exit, redo, fail) debugger that can step both forwards and
//! backwards.
//!
//! The layers, bottom up:
//!
//! - [`terms`]: terms, substitutions, most general unifiers, renaming apart.
//! - [`parser`]: the Prolog subset and answer rendering.
//! - [`sld`]: plain SLD resolution, the reference for computed answers.
//! - [`det`]: deterministic small-step semantics over query sequences.
//! - [`rev`]: the reversible semantics, configurations with histories.
//! - [`debugger`]: interactive sessions with debug and trace modes.
//! - [`bridge`]: a line-delimited JSON protocol over a session.

pub mod bridge;
pub mod debugger;
pub mod det;
pub mod parser;
pub mod rev;
pub mod sld;
pub mod terms;

pub use debugger::{Action, Halt, Key, Mode, Session};
pub use det::{det_answers, det_init, det_step, DState, Rule};
pub use parser::{parse_program, parse_program_str, parse_query, ParseError, Query};
pub use rev::{Configuration, Direction, HistEvent, Port, PortEvent};
pub use sld::{sld_solve, SldResult};
pub use terms::{mgu, Atom, Program, Substitution, Term, Var};
