use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use log::info;

use synthmt::booleanize::{booleanize, BooleanSpec, BooleanizeReport};
use synthmt::frontend::CompiledSpec;
use synthmt::oracle::{oracle_reaction_map, oracle_realizability, regions, Window};
use synthmt::runtime::{Engine, Policy, TraceStep};
use synthmt::smt::{Session, SolverConfig, DEFAULT_SOLVER, DEFAULT_TIMEOUT_MS, SOLVER_ENV};
use synthmt::synth::{synthesize, ControllerArtifact, DEFAULT_STATE_CAP};
use synthmt::theory::{Sort, Valuation};
use synthmt::Error;

const EXIT_OK: u8 = 0;
const EXIT_FAILURE: u8 = 1;
const EXIT_UNREALIZABLE: u8 = 2;
const EXIT_UNKNOWN: u8 = 3;

const DEFAULT_SIM_WINDOW: u64 = 100;
const DEFAULT_ORACLE_WINDOW: u64 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "synthmt",
    version,
    about = "Reactive synthesis for LTL safety specifications over linear arithmetic"
)]
struct Cli {
    /// Solver command line, e.g. `z3 -in`
    #[arg(long, global = true, env = SOLVER_ENV, default_value = DEFAULT_SOLVER)]
    solver: String,

    /// Per-query solver timeout
    #[arg(long, global = true, default_value_t = DEFAULT_TIMEOUT_MS)]
    timeout_ms: u64,

    /// Seed for random inputs
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Input bound for random simulation (default 100) or the oracle grid (default 5)
    #[arg(long, global = true)]
    window: Option<u64>,

    /// Output selection rules, e.g. `min:y,max:z,target:w=prev`
    #[arg(long, global = true, default_value = "")]
    policy: String,

    /// Write the result here instead of standard output
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide realizability: exit 0 realizable, 2 unrealizable, 3 unknown
    Check { spec: PathBuf },
    /// Print literals, partitions and the Boolean LTL as JSON
    Booleanize { spec: PathBuf },
    /// Synthesize a controller artifact
    Synth { spec: PathBuf },
    /// Run a controller artifact and stream a JSON-lines trace
    Simulate {
        artifact: PathBuf,
        /// One input per line, e.g. `x=4`
        #[arg(long, conflicts_with = "random")]
        inputs: Option<PathBuf>,
        /// Draw this many random inputs
        #[arg(long)]
        random: Option<usize>,
    },
    /// Brute-force reactions and realizability over a bounded grid
    Oracle { spec: PathBuf },
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<Error>() {
            Some(e) if e.is_inconclusive() => EXIT_UNKNOWN,
            _ => EXIT_FAILURE,
        };
        Failure { code, error }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

type CliResult = Result<u8, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                EXIT_FAILURE
            } else {
                EXIT_OK
            });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Check { spec } => check(cli, spec),
        Command::Booleanize { spec } => {
            let (b, _) = abstraction(cli, spec)?;
            let mut json = serde_json::to_string_pretty(&BooleanizeReport::new(&b))
                .context("serializing the report")?;
            json.push('\n');
            emit(cli, &json)?;
            Ok(EXIT_OK)
        }
        Command::Synth { spec } => synth(cli, spec),
        Command::Simulate {
            artifact,
            inputs,
            random,
        } => simulate(cli, artifact, inputs.as_deref(), *random),
        Command::Oracle { spec } => oracle(cli, spec),
    }
}

fn load_spec(path: &Path) -> Result<CompiledSpec, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    CompiledSpec::parse(&text).map_err(|e| match e {
        Error::Parse { .. } | Error::UndeclaredVariable { .. } | Error::MixedSorts { .. } => {
            anyhow!("{}:{e}", path.display()).into()
        }
        other => anyhow::Error::from(other)
            .context(path.display().to_string())
            .into(),
    })
}

fn start_session(cli: &Cli, sort: Sort) -> Result<Session, Failure> {
    let config = SolverConfig::new(&cli.solver, sort)?.with_timeout_ms(cli.timeout_ms)?;
    Ok(Session::start(config)?)
}

fn abstraction(cli: &Cli, path: &Path) -> Result<(BooleanSpec, Session), Failure> {
    let spec = load_spec(path)?;
    let mut session = start_session(cli, spec.signature.sort)?;
    let b = booleanize(&spec, &mut session)?;
    info!(
        "{} literals, {} partitions, {} solver queries",
        b.num_literals(),
        b.num_partitions(),
        session.query_count()
    );
    Ok((b, session))
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => io::stdout()
            .write_all(text.as_bytes())
            .context("writing to stdout")?,
    }
    Ok(())
}

fn describe_trap(b: &BooleanSpec, trap: &[usize]) -> String {
    trap.iter()
        .map(|&k| format!("e{k} ({})", b.partitions[k].witness))
        .collect::<Vec<_>>()
        .join(", ")
}

fn check(cli: &Cli, spec: &Path) -> CliResult {
    let (b, _) = abstraction(cli, spec)?;
    match synthesize(&b, DEFAULT_STATE_CAP) {
        Ok(_) => {
            println!("realizable");
            Ok(EXIT_OK)
        }
        Err(Error::NotRealizable { trap }) => {
            println!("unrealizable");
            eprintln!("environment trap: {}", describe_trap(&b, &trap));
            Ok(EXIT_UNREALIZABLE)
        }
        Err(e) => Err(e.into()),
    }
}

fn synth(cli: &Cli, spec: &Path) -> CliResult {
    let (b, _) = abstraction(cli, spec)?;
    let (artifact, code) = match synthesize(&b, DEFAULT_STATE_CAP) {
        Ok(c) => (ControllerArtifact::new(&b, Some(&c)), EXIT_OK),
        Err(Error::NotRealizable { trap }) => {
            eprintln!(
                "unrealizable, environment trap: {}",
                describe_trap(&b, &trap)
            );
            (ControllerArtifact::new(&b, None), EXIT_UNREALIZABLE)
        }
        Err(e) => return Err(e.into()),
    };
    emit(cli, &artifact.to_json())?;
    Ok(code)
}

fn read_inputs(path: &Path) -> Result<Vec<Valuation>, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v = Valuation::parse_assignments(line)
            .map_err(|e| anyhow!("{}:{}: {e}", path.display(), i + 1))?;
        out.push(v);
    }
    Ok(out)
}

struct TraceSink {
    out: Box<dyn Write>,
    violations: usize,
}

impl TraceSink {
    fn new(cli: &Cli) -> Result<Self, Failure> {
        let out: Box<dyn Write> = match &cli.output {
            Some(path) => Box::new(io::BufWriter::new(
                fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
            )),
            None => Box::new(io::stdout()),
        };
        Ok(TraceSink { out, violations: 0 })
    }

    fn push(&mut self, t: &TraceStep) -> Result<(), Failure> {
        if !t.verdict.is_ok() {
            self.violations += 1;
        }
        writeln!(self.out, "{}", t.to_json_line()).context("writing the trace")?;
        self.out.flush().context("writing the trace")?;
        Ok(())
    }
}

fn simulate(cli: &Cli, artifact: &Path, inputs: Option<&Path>, random: Option<usize>) -> CliResult {
    let art = ControllerArtifact::load(artifact)
        .map_err(|e| anyhow::Error::from(e).context(artifact.display().to_string()))?;
    if !art.realizable {
        return Err(anyhow!(
            "{}: artifact has no controller (unrealizable)",
            artifact.display()
        )
        .into());
    }
    let policy: Policy = cli.policy.parse()?;
    let session = start_session(cli, art.sort)?;
    let mut engine = Engine::from_artifact(&art, policy, session)?;
    let mut sink = TraceSink::new(cli)?;

    let scripted = match (inputs, random) {
        (Some(path), _) => Some(read_inputs(path)?),
        (None, Some(n)) => {
            let sig = &engine.spec().signature;
            let window = cli.window.unwrap_or(DEFAULT_SIM_WINDOW);
            Some(synthmt::runtime::random_inputs(
                &sig.env_vars,
                sig.sort,
                n,
                cli.seed,
                window,
            ))
        }
        (None, None) => None,
    };
    match scripted {
        Some(list) => {
            for env in &list {
                let t = engine.step(env)?;
                sink.push(&t)?;
            }
        }
        None => interactive(&mut engine, &mut sink)?,
    }
    if sink.violations > 0 {
        eprintln!("monitor reported {} violation(s)", sink.violations);
        return Ok(EXIT_FAILURE);
    }
    Ok(EXIT_OK)
}

/// Reads one input per line from stdin until `quit` or end of input.
/// Malformed lines are reported and skipped.
fn interactive(engine: &mut Engine, sink: &mut TraceSink) -> Result<(), Failure> {
    for line in io::stdin().lock().lines() {
        let line = line.context("reading stdin")?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line == "quit" {
            break;
        }
        let env = match Valuation::parse_assignments(line) {
            Ok(v) => v,
            Err(e) => {
                eprintln!("error: {e}");
                continue;
            }
        };
        match engine.step(&env) {
            Ok(t) => sink.push(&t)?,
            Err(e @ Error::Contract(_)) => eprintln!("error: {e}"),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

fn oracle(cli: &Cli, spec_path: &Path) -> CliResult {
    let spec = load_spec(spec_path)?;
    let window = Window::new(cli.window.unwrap_or(DEFAULT_ORACLE_WINDOW))?;
    let map = oracle_reaction_map(&spec.signature, &spec.literals, window)?;
    let mut text = String::new();
    for (i, l) in spec.literals.iter().enumerate() {
        text.push_str(&format!("s{i}: {}\n", l.pretty()));
    }
    for r in regions(&map) {
        text.push_str(&format!("{r}\n"));
    }
    let realizable = oracle_realizability(&spec, window)?;
    text.push_str(if realizable {
        "realizable\n"
    } else {
        "unrealizable\n"
    });
    emit(cli, &text)?;
    Ok(if realizable {
        EXIT_OK
    } else {
        EXIT_UNREALIZABLE
    })
}
