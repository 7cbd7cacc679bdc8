//! Batch driver behind the `hflz` binary.
//!
//! Inputs are picked by extension (`.hfl` formula, `.hes` equation system,
//! `.term` game term). `-` reads standard input and guesses the kind from the
//! content.

use std::ffi::OsString;
use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::eqsys::{m_approximation, recursion_free, to_mu_formula, EquationSystem};
use crate::error::Error;
use crate::formula::{is_disjunctive, order_of_formula, Formula};
use crate::fromdisj::{lower, LowerOptions};
use crate::frontend::{parse_term, to_formula, Term};
use crate::normalize::normalize_with;
use crate::parse::{parse_formula, parse_system};
use crate::print::{print_formula, print_system};
use crate::semantics::{kleene_eval, search_valid, SearchBudget, Verdict};
use crate::todisj::raise_top_simplified;
use crate::typeck::check_closed_prop;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "hflz", version, about = "Order-shifting translations for μHFL(Z)")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct IoArgs {
    /// Input file (`-` for standard input).
    pub input: PathBuf,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct BudgetArgs {
    /// Maximum number of explored reduction steps.
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub fuel: u64,
    /// Integers tried for each `exists` lie in [-box, box].
    #[arg(long = "box", default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    pub exists_box: u64,
    /// Maximum number of memoized states.
    #[arg(long, default_value_t = 200_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub states: u64,
}

impl BudgetArgs {
    fn budget(&self) -> SearchBudget {
        SearchBudget {
            max_steps: self.fuel as usize,
            exists_box: self.exists_box,
            max_states: self.states as usize,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Type-check a formula, system or term.
    Typecheck {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Decide validity and print a verdict line.
    Eval {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Kleene iteration over [-box, box] (order-0 systems only).
        #[arg(long)]
        kleene: bool,
        /// Iteration cap for `--kleene`.
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        iters: u64,
    },
    /// Closed formula to an order+1 disjunctive formula.
    Raise {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Closed disjunctive formula to a normalized equation system.
    Normalize {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        maxar: Option<u64>,
    },
    /// Normalized system to an order-1-lower system, with a stats sidecar.
    Lower {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long)]
        no_simplify: bool,
        #[arg(long)]
        no_flatten: bool,
        /// Re-typecheck every translation bundle.
        #[arg(long)]
        check: bool,
    },
    /// m-th approximation of a system.
    Approx {
        #[command(flatten)]
        io: IoArgs,
        #[arg(short = 'm', value_parser = clap::value_parser!(u64))]
        m: u64,
        /// Print the verdict of the approximation instead of the system.
        #[arg(long)]
        eval: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Game term to formula.
    FromTerm {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Size and shape statistics.
    Stats {
        #[command(flatten)]
        io: IoArgs,
    },
}

/// Parsed input of any kind.
#[derive(Clone, Debug)]
pub enum Input {
    Formula(Formula),
    System(EquationSystem),
    Term(Term),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Formula,
    System,
    Term,
}

impl Kind {
    pub fn from_path(p: &Path) -> Option<Kind> {
        match p.extension()?.to_str()? {
            "hfl" => Some(Kind::Formula),
            "hes" => Some(Kind::System),
            "term" => Some(Kind::Term),
            _ => None,
        }
    }

    fn guess(src: &str) -> Kind {
        let code: String = src
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .collect::<Vec<_>>()
            .join("\n");
        if code.contains("%DEFS") || code.contains("%MAIN") || code.contains("%ENV") {
            Kind::System
        } else if ["fun ", "fix ", "fail", "<+>", "<&>", "assume ", "()"]
            .iter()
            .any(|k| code.contains(k))
        {
            Kind::Term
        } else {
            Kind::Formula
        }
    }
}

pub fn parse_input(kind: Kind, src: &str) -> crate::Result<Input> {
    Ok(match kind {
        Kind::Formula => Input::Formula(parse_formula(src)?),
        Kind::System => Input::System(parse_system(src)?),
        Kind::Term => Input::Term(parse_term(src)?),
    })
}

/// Failure of a run: message and exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn fail(file: &str, e: Error) -> Failure {
    let code = match e {
        Error::Invariant(_) => EXIT_INVARIANT,
        _ => EXIT_INPUT,
    };
    let message = match &e {
        Error::Parse { line, col, msg } => format!("{file}:{line}:{col}: parse error: {msg}"),
        _ => format!("{file}:1:1: {e}"),
    };
    Failure { code, message }
}

fn io_fail(file: &str, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: format!("{file}: {e}"),
    }
}

struct Ctx<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn load(&mut self, path: &Path) -> Result<(String, Input), Failure> {
        let name = path.display().to_string();
        let (src, kind) = if name == "-" {
            let mut s = String::new();
            self.stdin.read_to_string(&mut s).map_err(|e| io_fail(&name, e))?;
            let k = Kind::guess(&s);
            (s, k)
        } else {
            let s = std::fs::read_to_string(path).map_err(|e| io_fail(&name, e))?;
            let k = Kind::from_path(path).unwrap_or_else(|| Kind::guess(&s));
            (s, k)
        };
        let input = parse_input(kind, &src).map_err(|e| fail(&name, e))?;
        Ok((name, input))
    }

    fn emit(&mut self, io: &IoArgs, text: &str) -> Result<(), Failure> {
        match &io.output {
            Some(p) => std::fs::write(p, text).map_err(|e| io_fail(&p.display().to_string(), e)),
            None => self
                .stdout
                .write_all(text.as_bytes())
                .map_err(|e| io_fail("<stdout>", e)),
        }
    }
}

/// Closed formula view of an input.
fn as_formula(file: &str, input: &Input) -> Result<Formula, Failure> {
    match input {
        Input::Formula(f) => Ok(f.clone()),
        Input::System(es) => to_mu_formula(es).map_err(|e| fail(file, e)),
        Input::Term(t) => to_formula(t).map_err(|e| fail(file, e)),
    }
}

/// Equation-system view: formulas are normalized first.
fn as_system(file: &str, input: &Input) -> Result<EquationSystem, Failure> {
    match input {
        Input::System(es) => Ok(es.clone()),
        _ => normalize_with(&as_formula(file, input)?, None).map_err(|e| fail(file, e)),
    }
}

fn verdict_line(ctx: &mut Ctx<'_>, v: Verdict) -> Result<i32, Failure> {
    writeln!(ctx.stdout, "{v}").map_err(|e| io_fail("<stdout>", e))?;
    Ok(v.exit_code())
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn execute(cfg: &RunConfig, ctx: &mut Ctx<'_>, stderr: &mut dyn Write) -> Result<i32, Failure> {
    match &cfg.command {
        Command::Typecheck { io } => {
            let (file, input) = ctx.load(&io.input)?;
            let line = match &input {
                Input::Formula(f) => {
                    check_closed_prop(f).map_err(|e| fail(&file, e))?;
                    format!("ok formula order={}", order_of_formula(f))
                }
                Input::System(es) => {
                    es.typecheck().map_err(|e| fail(&file, e))?;
                    format!("ok system order={} defs={}", es.order(), es.defs.len())
                }
                Input::Term(t) => {
                    to_formula(t).map_err(|e| fail(&file, e))?;
                    format!("ok term order={}", t.order())
                }
            };
            ctx.emit(io, &with_newline(line))?;
            Ok(EXIT_OK)
        }
        Command::Eval {
            io,
            budget,
            kleene,
            iters,
        } => {
            let (file, input) = ctx.load(&io.input)?;
            let v = if *kleene {
                let es = as_system(&file, &input)?;
                kleene_eval(&es, budget.exists_box, *iters as usize)
            } else {
                let f = as_formula(&file, &input)?;
                search_valid(&f, &budget.budget())
            }
            .map_err(|e| fail(&file, e))?;
            verdict_line(ctx, v)
        }
        Command::Raise { io } => {
            let (file, input) = ctx.load(&io.input)?;
            let f = as_formula(&file, &input)?;
            let g = raise_top_simplified(&f).map_err(|e| fail(&file, e))?;
            ctx.emit(io, &with_newline(print_formula(&g)))?;
            Ok(EXIT_OK)
        }
        Command::Normalize { io, maxar } => {
            let (file, input) = ctx.load(&io.input)?;
            let f = as_formula(&file, &input)?;
            let es = normalize_with(&f, maxar.map(|m| m as usize)).map_err(|e| fail(&file, e))?;
            ctx.emit(io, &with_newline(print_system(&es)))?;
            Ok(EXIT_OK)
        }
        Command::Lower {
            io,
            no_simplify,
            no_flatten,
            check,
        } => {
            let (file, input) = ctx.load(&io.input)?;
            let es = as_system(&file, &input)?;
            let opts = LowerOptions {
                simplify: !no_simplify,
                flatten: !no_flatten,
                check: *check,
            };
            let (out, stats) = lower(&es, opts).map_err(|e| fail(&file, e))?;
            ctx.emit(io, &with_newline(print_system(&out)))?;
            match &io.output {
                Some(p) => {
                    let mut side = p.clone().into_os_string();
                    side.push(".stats");
                    std::fs::write(&side, stats.to_string())
                        .map_err(|e| io_fail(&PathBuf::from(&side).display().to_string(), e))?;
                }
                None => {
                    let _ = write!(stderr, "{stats}");
                }
            }
            Ok(EXIT_OK)
        }
        Command::Approx { io, m, eval, budget } => {
            let (file, input) = ctx.load(&io.input)?;
            let es = as_system(&file, &input)?;
            let a = m_approximation(&es, *m as usize).map_err(|e| fail(&file, e))?;
            if *eval {
                let f = to_mu_formula(&a).map_err(|e| fail(&file, e))?;
                let v = search_valid(&f, &budget.budget()).map_err(|e| fail(&file, e))?;
                return verdict_line(ctx, v);
            }
            ctx.emit(io, &with_newline(print_system(&a)))?;
            Ok(EXIT_OK)
        }
        Command::FromTerm { io } => {
            let (file, input) = ctx.load(&io.input)?;
            let f = as_formula(&file, &input)?;
            ctx.emit(io, &with_newline(print_formula(&f)))?;
            Ok(EXIT_OK)
        }
        Command::Stats { io } => {
            let (file, input) = ctx.load(&io.input)?;
            let mut lines = Vec::new();
            match &input {
                Input::Formula(f) => {
                    check_closed_prop(f).map_err(|e| fail(&file, e))?;
                    lines.push("kind=formula".to_string());
                    lines.push(format!("order={}", order_of_formula(f)));
                    lines.push(format!("nodes={}", f.size()));
                    lines.push(format!("disjunctive={}", is_disjunctive(f)));
                }
                Input::System(es) => {
                    es.typecheck().map_err(|e| fail(&file, e))?;
                    lines.push("kind=system".to_string());
                    lines.push(format!("order={}", es.order()));
                    lines.push(format!("defs={}", es.defs.len()));
                    lines.push(format!("nodes={}", es.node_count()));
                    let disj = es.defs.iter().all(|d| is_disjunctive(&d.body)) && is_disjunctive(&es.main);
                    lines.push(format!("disjunctive={disj}"));
                    lines.push(format!("recursion_free={}", recursion_free(es)));
                    if let Some(m) = es.maxar {
                        lines.push(format!("maxar={m}"));
                    }
                }
                Input::Term(t) => {
                    let f = to_formula(t).map_err(|e| fail(&file, e))?;
                    lines.push("kind=term".to_string());
                    lines.push(format!("order={}", t.order()));
                    lines.push(format!("nodes={}", f.size()));
                    lines.push(format!("demonic={}", t.uses_demonic()));
                }
            }
            ctx.emit(io, &(lines.join("\n") + "\n"))?;
            Ok(EXIT_OK)
        }
    }
}

/// Runs the driver on `argv` (including the program name).
pub fn run<I, T>(argv: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    let mut ctx = Ctx { stdin, stdout };
    match execute(&cfg, &mut ctx, stderr) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {f}");
            f.code
        }
    }
}
