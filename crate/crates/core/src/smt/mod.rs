//! SMT-LIB v2 solver sessions over a child process.

mod session;
mod sexpr;
mod term;

pub use session::{Answer, Session, SolverConfig, DEFAULT_SOLVER, DEFAULT_TIMEOUT_MS, SOLVER_ENV};
pub use sexpr::{parse_one, Parsed, SExpr};
pub use term::{numeral, symbol, Term};
