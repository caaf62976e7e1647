//! `lambdalin`: normalise, trace and check terms of the linear-algebraic
//! λ-calculus.
//!
//! Exit codes: 0 success, 1 parse or usage error, 2 fuel exhausted,
//! 3 a check failed.

mod repl;

use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use lambdalin::harness::{self, GenConfig};
use lambdalin::parser::{self, Bindings, ParseError, PrettyNames, Script};
use lambdalin::rewrite::{Rewriter, Status, Strategy};
use lambdalin::stdlib::{self, Prelude};
use lambdalin::term::Term;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_FUEL: u8 = 2;
pub const EXIT_CHECK: u8 = 3;

/// Interpreter for the linear-algebraic lambda-calculus.
#[derive(Parser, Debug)]
#[command(name = "lambdalin", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the normal form of a term
    Normalize,
    /// Print every rewrite step
    Trace,
    /// Interactive read-eval-print loop
    Repl,
    /// Run the restriction, critical-pair and confluence suites
    Check,
    /// Check syntax only
    Parse,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Args, Debug, Clone)]
struct Options {
    /// Program text given inline
    #[arg(short = 'e', long = "expr", global = true, conflicts_with = "file")]
    expr: Option<String>,
    /// Program file (.lal)
    #[arg(short = 'f', long = "file", global = true)]
    file: Option<PathBuf>,
    /// Maximum number of rewrite steps
    #[arg(long, default_value_t = 10_000, global = true)]
    fuel: usize,
    /// Pick redexes at random with this seed (check: master seed)
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Do not load the prelude
    #[arg(long, global = true)]
    no_prelude: bool,
    /// Print terms without abbreviating prelude values as <name>
    #[arg(long, global = true)]
    no_prelude_names: bool,
    /// Number of random terms for `check`
    #[arg(long, default_value_t = 1_000, global = true)]
    samples: usize,
    #[arg(long, hide = true, global = true)]
    unrestricted_factorization: bool,
}

impl Options {
    fn rewriter(&self) -> Rewriter {
        if self.unrestricted_factorization {
            Rewriter::new().with_unrestricted_factorization()
        } else {
            Rewriter::new()
        }
    }

    fn strategy(&self) -> Strategy {
        match self.seed {
            Some(seed) => Strategy::RandomSeeded(seed),
            None => Strategy::Deterministic,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(run(cli))
}

fn run(cli: Cli) -> u8 {
    let opts = &cli.opts;
    let prelude = match load_prelude(opts) {
        Ok(p) => p,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    match cli.command {
        Command::Check => cmd_check(opts),
        Command::Repl => {
            let stdin = io::stdin();
            let mut session = repl::Session::new(prelude, opts.fuel, opts.rewriter());
            session.names_enabled = !opts.no_prelude_names;
            session.prompt = stdin.is_terminal();
            session.run(&mut stdin.lock(), &mut io::stdout(), &mut io::stderr());
            EXIT_OK
        }
        Command::Normalize | Command::Trace | Command::Parse => {
            let (src, origin) = match read_input(opts) {
                Ok(x) => x,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return EXIT_USAGE;
                }
            };
            let script = match parser::parse_script(&src, prelude.bindings()) {
                Ok(s) => s,
                Err(e) => {
                    report_parse_error(&origin, &src, &e);
                    return EXIT_USAGE;
                }
            };
            match cli.command {
                Command::Parse => cmd_parse(opts, &script),
                Command::Normalize => cmd_normalize(opts, &prelude, &script, false),
                _ => cmd_normalize(opts, &prelude, &script, true),
            }
        }
    }
}

fn load_prelude(opts: &Options) -> Result<Prelude, String> {
    if opts.no_prelude {
        return Ok(Prelude::empty());
    }
    match std::env::var_os("LAMBDALIN_PRELUDE") {
        Some(path) => Prelude::load(Path::new(&path)).map_err(|e| e.to_string()),
        None => Ok(Prelude::builtin()),
    }
}

fn read_input(opts: &Options) -> Result<(String, String), String> {
    match (&opts.expr, &opts.file) {
        (Some(e), None) => Ok((e.clone(), "<expr>".into())),
        (None, Some(p)) => std::fs::read_to_string(p)
            .map(|s| (s, p.display().to_string()))
            .map_err(|e| format!("cannot read {}: {e}", p.display())),
        _ => Err("give exactly one of -e EXPR or -f FILE".into()),
    }
}

pub fn report_parse_error(origin: &str, src: &str, e: &ParseError) {
    eprintln!("{origin}:{e}");
    if let Some(line) = src.lines().nth(e.span.line - 1) {
        eprintln!("  {line}");
        let width = src[e.span.start..e.span.end.min(src.len())]
            .lines()
            .next()
            .map_or(1, |s| s.chars().count().max(1));
        eprintln!("  {}{}", " ".repeat(e.span.column - 1), "^".repeat(width));
    }
}

fn names_for_output(opts: &Options, prelude: &Prelude, script: &Script) -> PrettyNames {
    if opts.no_prelude_names {
        return PrettyNames::new();
    }
    let mut all: Bindings = prelude.bindings().clone();
    for (n, t) in &script.bindings {
        all.insert(n.clone(), t.clone());
    }
    stdlib::names_for(&all)
}

fn cmd_parse(opts: &Options, script: &Script) -> u8 {
    let printed = script.main.as_ref().map(parser::print_term);
    match opts.format {
        Format::Text => {
            for (n, _) in &script.bindings {
                println!("let {n}");
            }
            if let Some(p) = printed {
                println!("{p}");
            }
        }
        Format::Machine => println!(
            "{}",
            json!({
                "status": "ok",
                "bindings": script.bindings.iter().map(|(n, _)| n).collect::<Vec<_>>(),
                "term": printed,
            })
        ),
    }
    EXIT_OK
}

fn cmd_normalize(opts: &Options, prelude: &Prelude, script: &Script, trace: bool) -> u8 {
    let Some(term) = &script.main else {
        eprintln!("error: the program has no term to evaluate");
        return EXIT_USAGE;
    };
    let names = names_for_output(opts, prelude, script);
    let print = |t: &Term| parser::print_term_named(t, &names);
    let rw = opts.rewriter();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let outcome = if trace {
        let tr = rw.trace(term, opts.fuel, opts.strategy());
        let lines = match opts.format {
            Format::Text => tr.text_lines(&print),
            Format::Machine => tr.machine_lines(&print),
        };
        for l in lines {
            let _ = writeln!(out, "{l}");
        }
        tr.outcome
    } else {
        rw.normalize_with_strategy(term, opts.fuel, opts.strategy())
    };
    let printed = print(&outcome.term);
    match opts.format {
        Format::Text => match outcome.status {
            Status::Normal if trace => {
                let _ = writeln!(out, "normal after {} steps\t{printed}", outcome.steps);
            }
            Status::Normal => {
                let _ = writeln!(out, "{printed}");
            }
            _ => {
                let _ = writeln!(out, "FUEL EXHAUSTED after {} steps", outcome.steps);
                let _ = writeln!(out, "{printed}");
            }
        },
        Format::Machine => {
            let _ = writeln!(
                out,
                "{}",
                json!({
                    "outcome": harness::status_label(outcome.status),
                    "steps": outcome.steps,
                    "term": printed,
                })
            );
        }
    }
    if outcome.status == Status::Normal {
        EXIT_OK
    } else {
        EXIT_FUEL
    }
}

fn cmd_check(opts: &Options) -> u8 {
    let rw = opts.rewriter();
    let seed = opts.seed.unwrap_or(0);
    let restrictions = harness::restriction_suite_with(&rw);
    let pairs = harness::critical_pair_suite_with(&rw);
    let confluence = (opts.samples > 0).then(|| {
        let cfg = GenConfig::default().with_seed(seed);
        let seeds = [
            seed.wrapping_add(1),
            seed.wrapping_add(2),
            seed.wrapping_add(3),
        ];
        harness::check_confluence_sample_with(
            &rw.with_max_size(harness::SAMPLE_SIZE_CAP),
            &cfg,
            opts.samples,
            opts.fuel,
            &seeds,
        )
    });
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for suite in [&restrictions, &pairs] {
        let lines = match opts.format {
            Format::Text => suite.text_lines(),
            Format::Machine => suite.machine_lines(),
        };
        for l in lines {
            let _ = writeln!(out, "{l}");
        }
    }
    if let Some(report) = &confluence {
        match opts.format {
            Format::Text => {
                for s in &report.samples {
                    if let harness::Verdict::Disagree { counterexample } = &s.verdict {
                        let _ = writeln!(
                            out,
                            "FAIL confluence/sample-{}: {} (minimised: {})",
                            s.id,
                            parser::print_term(&s.term),
                            parser::print_term(counterexample)
                        );
                    }
                }
            }
            Format::Machine => {
                for l in report.machine_lines() {
                    let _ = writeln!(out, "{l}");
                }
            }
        }
    }
    let failed = restrictions.failures()
        + pairs.failures()
        + confluence.as_ref().map_or(0, |r| r.disagreements());
    if opts.format == Format::Text {
        let _ = writeln!(out, "{}", restrictions.summary());
        let _ = writeln!(out, "{}", pairs.summary());
        if let Some(r) = &confluence {
            let _ = writeln!(out, "{}", r.summary());
        }
        let _ = writeln!(
            out,
            "{}",
            if failed == 0 {
                "all checks passed"
            } else {
                "checks FAILED"
            }
        );
    }
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_CHECK
    }
}
