use std::io::{BufRead, Write};

use lambdalin::parser::{self, Bindings, PrettyNames};
use lambdalin::rewrite::{Rewriter, Status, Strategy};
use lambdalin::stdlib::{self, Prelude};
use lambdalin::term::Term;

const HELP: &str = "\
terms and `let name = term;` bindings are read one line at a time
:trace on|off   show rewrite steps
:fuel N         set the step budget
:eq t u         compare normal forms (separate with `;` if ambiguous)
:quit           leave";

pub struct Session {
    env: Bindings,
    rw: Rewriter,
    pub fuel: usize,
    pub trace: bool,
    pub names_enabled: bool,
    pub prompt: bool,
    names: Option<PrettyNames>,
}

impl Session {
    pub fn new(prelude: Prelude, fuel: usize, rw: Rewriter) -> Session {
        Session {
            env: prelude.bindings().clone(),
            rw,
            fuel,
            trace: false,
            names_enabled: true,
            prompt: false,
            names: None,
        }
    }

    fn print(&mut self, t: &Term) -> String {
        if !self.names_enabled {
            return parser::print_term(t);
        }
        let names = self
            .names
            .get_or_insert_with(|| stdlib::names_for(&self.env));
        parser::print_term_named(t, names)
    }

    pub fn run(&mut self, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) {
        let mut line = String::new();
        loop {
            if self.prompt {
                let _ = write!(out, "λ> ");
                let _ = out.flush();
            }
            line.clear();
            match input.read_line(&mut line) {
                Ok(0) | Err(_) => return,
                Ok(_) => {}
            }
            if !self.handle(line.trim(), out, err) {
                return;
            }
        }
    }

    /// Processes one line; false means the session should end.
    pub fn handle(&mut self, line: &str, out: &mut dyn Write, err: &mut dyn Write) -> bool {
        if line.is_empty() || line.starts_with('#') {
            return true;
        }
        if let Some(cmd) = line.strip_prefix(':') {
            return self.directive(cmd.trim(), out, err);
        }
        let script = match parser::parse_script(line, &self.env) {
            Ok(s) => s,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return true;
            }
        };
        if !script.bindings.is_empty() {
            for (name, t) in script.bindings {
                self.env.insert(name, t);
            }
            self.names = None;
        }
        if let Some(t) = script.main {
            self.evaluate(&t, out);
        }
        true
    }

    fn evaluate(&mut self, t: &Term, out: &mut dyn Write) {
        let outcome = if self.trace {
            let tr = self.rw.trace(t, self.fuel, Strategy::Deterministic);
            let lines = {
                let names = self.names_snapshot();
                tr.text_lines(&|t| Self::print_with(&names, t))
            };
            for l in lines {
                let _ = writeln!(out, "{l}");
            }
            tr.outcome
        } else {
            self.rw.normalize(t, self.fuel)
        };
        let printed = self.print(&outcome.term);
        if outcome.status == Status::Normal {
            let _ = writeln!(out, "{printed}");
        } else {
            let _ = writeln!(out, "FUEL EXHAUSTED after {} steps", outcome.steps);
            let _ = writeln!(out, "{printed}");
        }
    }

    fn names_snapshot(&mut self) -> Option<PrettyNames> {
        if !self.names_enabled {
            return None;
        }
        let env = &self.env;
        Some(
            self.names
                .get_or_insert_with(|| stdlib::names_for(env))
                .clone(),
        )
    }

    fn print_with(names: &Option<PrettyNames>, t: &Term) -> String {
        match names {
            Some(n) => parser::print_term_named(t, n),
            None => parser::print_term(t),
        }
    }

    fn directive(&mut self, cmd: &str, out: &mut dyn Write, err: &mut dyn Write) -> bool {
        let (name, arg) = cmd.split_once(char::is_whitespace).unwrap_or((cmd, ""));
        let arg = arg.trim();
        match name {
            "q" | "quit" => return false,
            "help" | "h" => {
                let _ = writeln!(out, "{HELP}");
            }
            "trace" => match arg {
                "on" => self.trace = true,
                "off" => self.trace = false,
                _ => {
                    let _ = writeln!(err, "error: expected `:trace on` or `:trace off`");
                }
            },
            "fuel" => match arg.parse() {
                Ok(n) => self.fuel = n,
                Err(_) => {
                    let _ = writeln!(err, "error: expected a step count");
                }
            },
            "eq" => match self.split_pair(arg) {
                Some((t, u)) => {
                    let a = self.rw.normalize(&t, self.fuel);
                    let b = self.rw.normalize(&u, self.fuel);
                    if a.status != Status::Normal || b.status != Status::Normal {
                        let _ = writeln!(out, "unknown (fuel exhausted)");
                    } else {
                        let _ = writeln!(out, "{}", a.term == b.term);
                    }
                }
                None => {
                    let _ = writeln!(err, "error: expected two terms");
                }
            },
            _ => {
                let _ = writeln!(err, "error: unknown directive `:{name}` (try :help)");
            }
        }
        true
    }

    // `t ; u`, or the last split at top-level whitespace where both halves
    // parse.
    fn split_pair(&self, arg: &str) -> Option<(Term, Term)> {
        let parse = |s: &str| parser::parse_term_with(s, &self.env).ok();
        let mut depth = 0i32;
        let mut cuts = Vec::new();
        for (i, c) in arg.char_indices() {
            match c {
                '(' | '[' | '{' | '<' => depth += 1,
                ')' | ']' | '}' | '>' => depth -= 1,
                ';' if depth == 0 => return Some((parse(&arg[..i])?, parse(&arg[i + 1..])?)),
                c if c.is_whitespace() && depth == 0 => cuts.push(i),
                _ => {}
            }
        }
        cuts.into_iter()
            .rev()
            .find_map(|i| Some((parse(&arg[..i])?, parse(&arg[i..])?)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn session() -> Session {
        Session::new(Prelude::builtin(), 10_000, Rewriter::new())
    }

    fn feed(s: &mut Session, input: &str) -> (String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        s.run(&mut input.as_bytes(), &mut out, &mut err);
        (
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn hadamard_twice() {
        let (out, _) = feed(&mut session(), "H (H false)\n");
        assert_eq!(out.trim(), "<false>");
    }

    #[test]
    fn fuel_directive() {
        let (out, _) = feed(&mut session(), ":fuel 10\nY x\n");
        assert!(out.starts_with("FUEL EXHAUSTED after 10 steps"), "{out}");
    }

    #[test]
    fn let_then_use() {
        let (out, _) = feed(&mut session(), "let p = \\x.x; p true\n");
        assert_eq!(out.trim(), "<true>");
        let mut s = session();
        let (out, _) = feed(&mut s, "let p = \\x.x;\np false\n");
        assert_eq!(out.trim(), "<false>");
    }

    #[test]
    fn eq_directive() {
        let (out, _) = feed(&mut session(), ":eq H (H true) true\n:eq Not true ; true\n");
        assert_eq!(out, "true\nfalse\n");
    }

    #[test]
    fn errors_do_not_stop_the_loop() {
        let (out, err) = feed(&mut session(), "(\n:bogus\nNot false\n:quit\nNot true\n");
        assert_eq!(out.trim(), "<true>");
        assert_eq!(err.lines().count(), 2);
    }

    #[test]
    fn trace_directive() {
        let (out, _) = feed(&mut session(), ":trace on\n{[true]}\n");
        let lines: Vec<_> = out.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("1\tB-Beta\t\t"));
        assert_eq!(lines[1], "<true>");
    }
}
