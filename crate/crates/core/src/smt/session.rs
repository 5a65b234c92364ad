use std::io::{BufRead, BufReader, BufWriter, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use log::{debug, trace};

use super::sexpr::{parse_one, Parsed, SExpr};
use super::term::{symbol, Term};
use crate::error::{Error, Result};
use crate::theory::{Sort, Valuation};

/// Environment variable consulted when no solver command is given.
pub const SOLVER_ENV: &str = "SYNTHMT_SOLVER";
pub const DEFAULT_SOLVER: &str = "z3 -in";
pub const DEFAULT_TIMEOUT_MS: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    /// Program followed by its arguments.
    pub command: Vec<String>,
    pub timeout_ms: u64,
    pub sort: Sort,
}

impl SolverConfig {
    pub fn new(command: &str, sort: Sort) -> Result<Self> {
        let command: Vec<String> = command.split_whitespace().map(str::to_string).collect();
        if command.is_empty() {
            return Err(Error::contract("empty solver command"));
        }
        Ok(SolverConfig {
            command,
            timeout_ms: DEFAULT_TIMEOUT_MS,
            sort,
        })
    }

    /// Uses `$SYNTHMT_SOLVER`, falling back to `z3 -in`.
    pub fn from_env(sort: Sort) -> Result<Self> {
        let cmd = std::env::var(SOLVER_ENV).unwrap_or_else(|_| DEFAULT_SOLVER.to_string());
        Self::new(&cmd, sort)
    }

    pub fn with_timeout_ms(mut self, timeout_ms: u64) -> Result<Self> {
        if timeout_ms == 0 {
            return Err(Error::contract("solver timeout must be positive"));
        }
        self.timeout_ms = timeout_ms;
        Ok(self)
    }

    pub fn with_sort(mut self, sort: Sort) -> Self {
        self.sort = sort;
        self
    }

    pub fn logic(&self) -> &'static str {
        self.sort.logic()
    }

    pub fn command_line(&self) -> String {
        self.command.join(" ")
    }
}

/// Solver answer. `Unknown` is reported as is, never guessed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answer {
    Sat(Valuation),
    Unsat,
    Unknown,
}

impl Answer {
    pub fn is_sat(&self) -> bool {
        matches!(self, Answer::Sat(_))
    }

    /// Turns `Unknown` into [`Error::SolverUnknown`]; `Some(model)` on Sat.
    pub fn decided(self) -> Result<Option<Valuation>> {
        match self {
            Answer::Sat(m) => Ok(Some(m)),
            Answer::Unsat => Ok(None),
            Answer::Unknown => Err(Error::SolverUnknown),
        }
    }
}

/// An SMT-LIB v2 solver child process.
///
/// Every query runs inside its own `push 1`/`pop 1` scope, with the
/// variables it mentions declared in that scope.
pub struct Session {
    config: SolverConfig,
    child: Child,
    stdin: BufWriter<ChildStdin>,
    lines: Receiver<String>,
    pending: String,
    depth: usize,
    dead: bool,
    queries: u64,
}

impl Session {
    pub fn start(config: SolverConfig) -> Result<Session> {
        let (program, args) = config.command.split_first().expect("validated non-empty");
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|source| Error::SolverSpawn {
                command: config.command_line(),
                source,
            })?;
        let stdin = BufWriter::new(child.stdin.take().expect("piped stdin"));
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        let mut session = Session {
            config,
            child,
            stdin,
            lines: rx,
            pending: String::new(),
            depth: 0,
            dead: false,
            queries: 0,
        };
        session.init()?;
        Ok(session)
    }

    fn init(&mut self) -> Result<()> {
        self.command("(set-option :print-success true)")?;
        self.command("(set-option :produce-models true)")?;
        let logic = self.config.logic();
        self.command(&format!("(set-logic {logic})"))
    }

    /// Clears all assertions and declarations and re-initializes.
    ///
    /// Whether `reset` itself answers `success` varies between solvers, so
    /// the replies are drained up to an echoed marker.
    fn reset(&mut self) -> Result<()> {
        const MARKER: &str = "synthmt-reset-done";
        self.write_line("(reset)")?;
        self.write_line("(set-option :print-success true)")?;
        self.write_line(&format!("(echo \"{MARKER}\")"))?;
        loop {
            match self.read_response()? {
                SExpr::Atom(a) if a == "success" => {}
                SExpr::Str(s) if s == MARKER => break,
                // some solvers print echo output without quotes
                SExpr::Atom(a) if a == MARKER => break,
                other => {
                    return Err(Error::SolverProtocol(format!(
                        "unexpected reply `{other}` while resetting"
                    )))
                }
            }
        }
        self.init()
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn sort(&self) -> Sort {
        self.config.sort
    }

    /// Current assertion-stack depth; zero between operations.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Number of check-sat queries issued so far.
    pub fn query_count(&self) -> u64 {
        self.queries
    }

    fn write_line(&mut self, text: &str) -> Result<()> {
        if self.dead {
            return Err(Error::SolverProtocol(
                "solver session is no longer usable".into(),
            ));
        }
        trace!("smt> {text}");
        let res = writeln!(self.stdin, "{text}").and_then(|_| self.stdin.flush());
        res.map_err(|e| {
            self.dead = true;
            Error::SolverProtocol(format!("cannot write to solver: {e}"))
        })
    }

    fn read_response(&mut self) -> Result<SExpr> {
        let deadline = Instant::now() + Duration::from_millis(self.config.timeout_ms);
        loop {
            match parse_one(&self.pending)? {
                Parsed::Done(expr, used) => {
                    self.pending.drain(..used);
                    trace!("smt< {expr}");
                    if let SExpr::List(items) = &expr {
                        if let [SExpr::Atom(head), rest @ ..] = items.as_slice() {
                            if head == "error" {
                                let msg: Vec<String> =
                                    rest.iter().map(ToString::to_string).collect();
                                return Err(Error::SolverProtocol(format!(
                                    "solver error: {}",
                                    msg.join(" ")
                                )));
                            }
                        }
                    }
                    return Ok(expr);
                }
                Parsed::Empty | Parsed::Incomplete => {}
            }
            let remaining = deadline.saturating_duration_since(Instant::now());
            match self.lines.recv_timeout(remaining) {
                Ok(line) => {
                    self.pending.push_str(&line);
                    self.pending.push('\n');
                }
                Err(RecvTimeoutError::Timeout) => {
                    self.kill();
                    return Err(Error::SolverTimeout(self.config.timeout_ms));
                }
                Err(RecvTimeoutError::Disconnected) => {
                    self.dead = true;
                    return Err(Error::SolverProtocol("solver exited unexpectedly".into()));
                }
            }
        }
    }

    /// Sends a command that answers `success`.
    fn command(&mut self, text: &str) -> Result<()> {
        self.write_line(text)?;
        match self.read_response()? {
            SExpr::Atom(a) if a == "success" => Ok(()),
            other => Err(Error::SolverProtocol(format!(
                "expected `success` after `{text}`, got `{other}`"
            ))),
        }
    }

    fn kill(&mut self) {
        self.dead = true;
        let _ = self.child.kill();
        let _ = self.child.wait();
    }

    fn push(&mut self) -> Result<()> {
        self.command("(push 1)")?;
        self.depth += 1;
        Ok(())
    }

    fn pop(&mut self) -> Result<()> {
        if self.depth == 0 {
            return Err(Error::contract("pop on an empty assertion stack"));
        }
        self.command("(pop 1)")?;
        self.depth -= 1;
        Ok(())
    }

    /// `(check-sat)` on the current stack.
    pub fn check(&mut self) -> Result<Answer> {
        self.queries += 1;
        self.write_line("(check-sat)")?;
        match self.read_response()? {
            SExpr::Atom(a) if a == "sat" => Ok(Answer::Sat(Valuation::new())),
            SExpr::Atom(a) if a == "unsat" => Ok(Answer::Unsat),
            SExpr::Atom(a) if a == "unknown" => Ok(Answer::Unknown),
            other => Err(Error::SolverProtocol(format!(
                "unexpected check-sat reply `{other}`"
            ))),
        }
    }

    fn get_values(&mut self, vars: &[String]) -> Result<Valuation> {
        if vars.is_empty() {
            return Ok(Valuation::new());
        }
        let names: Vec<String> = vars.iter().map(|v| symbol(v)).collect();
        self.write_line(&format!("(get-value ({}))", names.join(" ")))?;
        let reply = self.read_response()?;
        let SExpr::List(pairs) = &reply else {
            return Err(Error::SolverProtocol(format!(
                "malformed get-value reply `{reply}`"
            )));
        };
        if pairs.len() != vars.len() {
            return Err(Error::SolverProtocol(format!(
                "get-value returned {} pairs for {} variables",
                pairs.len(),
                vars.len()
            )));
        }
        let mut model = Valuation::new();
        for (var, pair) in vars.iter().zip(pairs) {
            let value = match pair {
                SExpr::List(kv) if kv.len() == 2 => kv[1].to_value()?,
                other => {
                    return Err(Error::SolverProtocol(format!(
                        "malformed model entry `{other}`"
                    )))
                }
            };
            if !value.fits(self.config.sort) {
                return Err(Error::SolverProtocol(format!(
                    "model value {value} of `{var}` is not of sort {}",
                    self.config.sort
                )));
            }
            model.insert(var.clone(), value);
        }
        Ok(model)
    }

    /// Runs `body` inside a push/pop scope, restoring the depth afterwards.
    fn scoped<T>(&mut self, body: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        self.push()?;
        let out = body(self);
        if self.dead {
            return out;
        }
        let popped = self.pop();
        let out = out?;
        popped?;
        Ok(out)
    }

    fn query(&mut self, vars: &[String], formula: &Term) -> Result<Answer> {
        self.scoped(|s| s.assert_and_check(vars, formula))
    }

    fn assert_and_check(&mut self, vars: &[String], formula: &Term) -> Result<Answer> {
        let sort = self.config.sort;
        let mut declared: Vec<String> = vars.to_vec();
        for v in formula.free_vars() {
            if !declared.contains(&v) {
                declared.push(v);
            }
        }
        for v in &declared {
            self.command(&format!(
                "(declare-const {} {})",
                symbol(v),
                sort.smt_name()
            ))?;
        }
        self.command(&format!("(assert {})", formula.to_smtlib(sort)))?;
        match self.check()? {
            Answer::Sat(_) => Ok(Answer::Sat(self.get_values(vars)?)),
            other => Ok(other),
        }
    }

    /// Satisfiability of a quantifier-free formula; on Sat, exact values for `vars`.
    /// Every returned model is re-checked against the formula.
    pub fn solve_exists(&mut self, vars: &[String], formula: &Term) -> Result<Answer> {
        if !formula.is_quantifier_free() {
            return Err(Error::contract(
                "solve_exists expects a quantifier-free formula",
            ));
        }
        let answer = self.query(vars, formula)?;
        if let Answer::Sat(model) = &answer {
            let free = formula.free_vars();
            if free.iter().all(|v| model.get(v).is_some()) && !formula.eval(model)? {
                return Err(Error::SolverProtocol(format!(
                    "model {model} does not satisfy the queried formula"
                )));
            }
        }
        debug!("solve_exists -> {}", answer_tag(&answer));
        Ok(answer)
    }

    /// Satisfiability of a formula whose free variables are the outer
    /// existentials `outer`; inner blocks carry explicit quantifiers.
    ///
    /// Quantified queries run on a freshly reset solver rather than inside a
    /// push/pop scope: incremental mode disables the quantifier elimination
    /// some solvers rely on for these formulas.
    pub fn check_quantified(&mut self, outer: &[String], formula: &Term) -> Result<Answer> {
        if formula.is_quantifier_free() {
            return self.query(outer, formula);
        }
        self.reset()?;
        let answer = self.assert_and_check(outer, formula);
        if !self.dead {
            self.reset()?;
        }
        let answer = answer?;
        debug!("check_quantified -> {}", answer_tag(&answer));
        Ok(answer)
    }
}

fn answer_tag(a: &Answer) -> &'static str {
    match a {
        Answer::Sat(_) => "sat",
        Answer::Unsat => "unsat",
        Answer::Unknown => "unknown",
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        if !self.dead {
            let _ = writeln!(self.stdin, "(exit)");
            let _ = self.stdin.flush();
        }
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
